#include <beliefrl/cover.hpp>

#include <beliefrl/errors.hpp>

#include <algorithm>
#include <bit>
#include <set>

namespace beliefrl {

std::vector<Cube> minimize_cover( unsigned k, const std::vector<std::uint32_t>& minterms )
{
  if ( k > 16 )
  {
    throw CapacityError( "cover minimization over more than 16 variables" );
  }
  const std::uint32_t full = k == 0 ? 0u : ( ( 1u << k ) - 1u );
  std::set<std::uint32_t> on( minterms.begin(), minterms.end() );
  if ( on.empty() )
    return {};
  if ( on.size() == ( std::size_t{ 1 } << k ) )
    return { Cube{} };

  // Iteratively merge cubes differing in one cared variable.
  auto less = []( const Cube& a, const Cube& b ) { return a.care != b.care ? a.care < b.care : a.value < b.value; };
  std::set<Cube, decltype( less )> current( less ), primes( less );
  for ( auto m : on )
    current.insert( Cube{ full, m } );
  while ( !current.empty() )
  {
    std::set<Cube, decltype( less )> next( less ), merged( less );
    for ( auto a = current.begin(); a != current.end(); ++a )
    {
      for ( auto b = std::next( a ); b != current.end(); ++b )
      {
        if ( a->care != b->care )
          continue;
        const std::uint32_t diff = a->value ^ b->value;
        if ( std::popcount( diff ) != 1 )
          continue;
        next.insert( Cube{ a->care & ~diff, a->value & ~diff } );
        merged.insert( *a );
        merged.insert( *b );
      }
    }
    for ( const auto& c : current )
      if ( !merged.count( c ) )
        primes.insert( c );
    current = std::move( next );
  }

  std::vector<Cube> candidates( primes.begin(), primes.end() );
  std::vector<Cube> chosen;
  std::set<std::uint32_t> uncovered = on;
  const auto take = [&]( const Cube& c ) {
    chosen.push_back( c );
    for ( auto it = uncovered.begin(); it != uncovered.end(); )
      it = c.covers( *it ) ? uncovered.erase( it ) : std::next( it );
  };

  // Essential primes.
  for ( auto m : on )
  {
    const Cube* only = nullptr;
    int count = 0;
    for ( const auto& c : candidates )
      if ( c.covers( m ) )
      {
        only = &c;
        ++count;
      }
    if ( count == 1 && uncovered.count( m ) )
      take( *only );
  }
  while ( !uncovered.empty() )
  {
    const Cube* best = nullptr;
    std::size_t best_gain = 0;
    for ( const auto& c : candidates )
    {
      const auto gain =
          static_cast<std::size_t>( std::count_if( uncovered.begin(), uncovered.end(), [&]( auto m ) { return c.covers( m ); } ) );
      if ( gain > best_gain )
      {
        best = &c;
        best_gain = gain;
      }
    }
    take( *best );
  }
  std::sort( chosen.begin(), chosen.end(), less );
  return chosen;
}

std::string render_cover( const std::vector<Cube>& cubes, const std::vector<std::string>& names )
{
  if ( cubes.empty() )
    return "false";
  std::string out;
  for ( std::size_t i = 0; i < cubes.size(); ++i )
  {
    if ( cubes[i].care == 0 )
      return "true";
    if ( i > 0 )
      out += " | ";
    bool first = true;
    for ( std::size_t v = 0; v < names.size(); ++v )
    {
      if ( !( cubes[i].care >> v & 1u ) )
        continue;
      if ( !first )
        out += " & ";
      first = false;
      if ( !( cubes[i].value >> v & 1u ) )
        out += "!";
      out += names[v];
    }
  }
  return out;
}

} // namespace beliefrl
