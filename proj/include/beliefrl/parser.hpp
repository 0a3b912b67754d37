#pragma once

#include <beliefrl/errors.hpp>
#include <beliefrl/formula.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace beliefrl::ltl {

/// Syntax error with 1-based position and the tokens that would have been
/// accepted there.
class ParseError : public ValidationError
{
public:
  ParseError( const std::string& message, std::size_t line, std::size_t column, std::vector<std::string> expected );

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

/// Grammar, loosest to tightest binding:
///
///   formula := disj ( '->' disj )?
///   disj    := conj ( '|' conj )*
///   conj    := binop ( '&' binop )*
///   binop   := unary ( ( 'U' | 'R' ) binop )?        right-associative
///   unary   := ( '!' | 'X' | 'F' | 'G' ) unary | atom
///   atom    := 'true' | 'false' | IDENT | '(' formula ')'
///
/// `a -> b` becomes `!a | b`. Returns the formula as written.
Formula parse_raw( std::string_view text );

/// parse_raw() followed by simplify(); parse(render(f)) == f for every
/// canonical f.
Formula parse( std::string_view text );

} // namespace beliefrl::ltl
