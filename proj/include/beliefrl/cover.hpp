#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace beliefrl {

/// Product term over k variables: variable i is constrained when bit i of
/// `care` is set, and must then equal bit i of `value`.
struct Cube
{
  std::uint32_t care = 0;
  std::uint32_t value = 0;

  bool covers( std::uint32_t minterm ) const { return ( minterm & care ) == value; }
  bool operator==( const Cube& ) const = default;
};

/// Two-level minimization (Quine-McCluskey prime implicants, essential
/// primes first, then greedy cover). `minterms` are assignments over k <= 16
/// variables. The returned cubes cover exactly the given minterms.
std::vector<Cube> minimize_cover( unsigned k, const std::vector<std::uint32_t>& minterms );

/// "a & !b | c"; "true" for the full cube, "false" for no cubes. `names`
/// holds the k variable names.
std::string render_cover( const std::vector<Cube>& cubes, const std::vector<std::string>& names );

} // namespace beliefrl
