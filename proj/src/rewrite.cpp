#include <beliefrl/rewrite.hpp>

#include <algorithm>
#include <optional>

namespace beliefrl::ltl {

namespace canon {

namespace {

bool includes_operands( const Formula& outer, const Formula& inner )
{
  const auto outer_ops = outer.operands();
  const auto inner_ops = inner.operands();
  return std::includes( outer_ops.begin(), outer_ops.end(), inner_ops.begin(), inner_ops.end() );
}

Formula nary_of( Op op, std::vector<Formula> operands )
{
  const Op dual = op == Op::And ? Op::Or : Op::And;
  const Formula unit = op == Op::And ? top() : bottom();
  const Formula zero = op == Op::And ? bottom() : top();

  std::vector<Formula> flat;
  flat.reserve( operands.size() );
  for ( auto& operand : operands )
  {
    if ( operand.op() == op )
    {
      flat.insert( flat.end(), operand.operands().begin(), operand.operands().end() );
    }
    else if ( operand == zero )
    {
      return zero;
    }
    else if ( operand != unit )
    {
      flat.push_back( std::move( operand ) );
    }
  }

  std::sort( flat.begin(), flat.end() );
  flat.erase( std::unique( flat.begin(), flat.end() ), flat.end() );

  // f & (f | g) = f: a dual operand goes when another operand is one of its
  // operands or a dual node over a subset of them.
  std::vector<bool> absorbed( flat.size(), false );
  bool any_absorbed = false;
  for ( std::size_t i = 0; i < flat.size(); ++i )
  {
    if ( flat[i].op() != dual )
    {
      continue;
    }
    const auto inner = flat[i].operands();
    for ( std::size_t j = 0; j < flat.size() && !absorbed[i]; ++j )
    {
      if ( i == j )
      {
        continue;
      }
      if ( std::binary_search( inner.begin(), inner.end(), flat[j] ) ||
           ( flat[j].op() == dual && includes_operands( flat[i], flat[j] ) ) )
      {
        absorbed[i] = true;
        any_absorbed = true;
      }
    }
  }
  if ( any_absorbed )
  {
    std::vector<Formula> kept;
    for ( std::size_t i = 0; i < flat.size(); ++i )
    {
      if ( !absorbed[i] )
      {
        kept.push_back( std::move( flat[i] ) );
      }
    }
    flat = std::move( kept );
  }

  if ( flat.empty() )
  {
    return unit;
  }
  if ( flat.size() == 1 )
  {
    return std::move( flat.front() );
  }
  return Formula::make_nary( op, std::move( flat ) );
}

} // namespace

Formula not_of( Formula f )
{
  if ( f.is_true() )
  {
    return bottom();
  }
  if ( f.is_false() )
  {
    return top();
  }
  return negation( std::move( f ) );
}

Formula and_of( std::vector<Formula> operands )
{
  return nary_of( Op::And, std::move( operands ) );
}

Formula or_of( std::vector<Formula> operands )
{
  return nary_of( Op::Or, std::move( operands ) );
}

Formula next_of( Formula f )
{
  if ( f.is_false() )
  {
    return f;
  }
  return next( std::move( f ) );
}

Formula eventually_of( Formula f )
{
  if ( f.is_constant() )
  {
    return f;
  }
  return eventually( std::move( f ) );
}

Formula globally_of( Formula f )
{
  if ( f.is_constant() )
  {
    return f;
  }
  return globally( std::move( f ) );
}

Formula until_of( Formula left, Formula right )
{
  if ( right.is_constant() )
  {
    return right;
  }
  if ( left.is_false() )
  {
    return right;
  }
  if ( left.is_true() )
  {
    return eventually_of( std::move( right ) );
  }
  return until( std::move( left ), std::move( right ) );
}

Formula release_of( Formula left, Formula right )
{
  if ( right.is_constant() )
  {
    return right;
  }
  if ( left.is_true() )
  {
    return right;
  }
  if ( left.is_false() )
  {
    return globally_of( std::move( right ) );
  }
  return release( std::move( left ), std::move( right ) );
}

} // namespace canon

Formula simplify( const Formula& f )
{
  switch ( f.op() )
  {
  case Op::True:
  case Op::False:
  case Op::Prop:
    return f;
  case Op::Not:
    return canon::not_of( simplify( f.child() ) );
  case Op::Next:
    return canon::next_of( simplify( f.child() ) );
  case Op::Eventually:
    return canon::eventually_of( simplify( f.child() ) );
  case Op::Globally:
    return canon::globally_of( simplify( f.child() ) );
  case Op::Until:
    return canon::until_of( simplify( f.left() ), simplify( f.right() ) );
  case Op::Release:
    return canon::release_of( simplify( f.left() ), simplify( f.right() ) );
  case Op::And:
  case Op::Or:
  {
    std::vector<Formula> operands;
    operands.reserve( f.operands().size() );
    for ( const auto& operand : f.operands() )
    {
      operands.push_back( simplify( operand ) );
    }
    return f.op() == Op::And ? canon::and_of( std::move( operands ) ) : canon::or_of( std::move( operands ) );
  }
  }
  return f;
}

namespace {

Formula nnf( const Formula& f, bool negated )
{
  switch ( f.op() )
  {
  case Op::True:
    return negated ? bottom() : top();
  case Op::False:
    return negated ? top() : bottom();
  case Op::Prop:
    return negated ? negation( f ) : f;
  case Op::Not:
    return nnf( f.child(), !negated );
  case Op::Next:
    return canon::next_of( nnf( f.child(), negated ) );
  case Op::Eventually:
    return negated ? canon::globally_of( nnf( f.child(), true ) ) : canon::eventually_of( nnf( f.child(), false ) );
  case Op::Globally:
    return negated ? canon::eventually_of( nnf( f.child(), true ) ) : canon::globally_of( nnf( f.child(), false ) );
  case Op::Until:
    return negated ? canon::release_of( nnf( f.left(), true ), nnf( f.right(), true ) )
                   : canon::until_of( nnf( f.left(), false ), nnf( f.right(), false ) );
  case Op::Release:
    return negated ? canon::until_of( nnf( f.left(), true ), nnf( f.right(), true ) )
                   : canon::release_of( nnf( f.left(), false ), nnf( f.right(), false ) );
  case Op::And:
  case Op::Or:
  {
    std::vector<Formula> operands;
    operands.reserve( f.operands().size() );
    for ( const auto& operand : f.operands() )
    {
      operands.push_back( nnf( operand, negated ) );
    }
    const bool as_and = ( f.op() == Op::And ) != negated;
    return as_and ? canon::and_of( std::move( operands ) ) : canon::or_of( std::move( operands ) );
  }
  }
  return f;
}

} // namespace

Formula to_nnf( const Formula& f )
{
  return nnf( f, false );
}

namespace {

using Clause = std::vector<Formula>;

constexpr std::size_t dnf_clause_limit = 4096;

bool complementary( const Formula& a, const Formula& b )
{
  return ( a.op() == Op::Not && a.child() == b ) || ( b.op() == Op::Not && b.child() == a );
}

// Sorted, duplicate-free, and free of p & !p; false when the clause is
// contradictory.
bool normalize_clause( Clause& clause )
{
  std::sort( clause.begin(), clause.end() );
  clause.erase( std::unique( clause.begin(), clause.end() ), clause.end() );
  for ( std::size_t i = 0; i < clause.size(); ++i )
    for ( std::size_t j = i + 1; j < clause.size(); ++j )
      if ( complementary( clause[i], clause[j] ) )
        return false;
  return true;
}

std::optional<std::vector<Clause>> clauses_of( const Formula& f )
{
  switch ( f.op() )
  {
  case Op::True:
    return std::vector<Clause>{ Clause{} };
  case Op::False:
    return std::vector<Clause>{};
  case Op::Or:
  {
    std::vector<Clause> out;
    for ( const auto& g : f.operands() )
    {
      auto sub = clauses_of( g );
      if ( !sub )
        return std::nullopt;
      out.insert( out.end(), sub->begin(), sub->end() );
      if ( out.size() > dnf_clause_limit )
        return std::nullopt;
    }
    return out;
  }
  case Op::And:
  {
    std::vector<Clause> out{ Clause{} };
    for ( const auto& g : f.operands() )
    {
      auto sub = clauses_of( g );
      if ( !sub )
        return std::nullopt;
      if ( out.size() * sub->size() > dnf_clause_limit )
        return std::nullopt;
      std::vector<Clause> next;
      for ( const auto& a : out )
        for ( const auto& b : *sub )
        {
          Clause c = a;
          c.insert( c.end(), b.begin(), b.end() );
          if ( normalize_clause( c ) )
            next.push_back( std::move( c ) );
        }
      out = std::move( next );
    }
    return out;
  }
  default:
    return std::vector<Clause>{ Clause{ f } };
  }
}

} // namespace

Formula to_dnf( const Formula& f )
{
  if ( f.op() != Op::And && f.op() != Op::Or )
    return f;
  auto clauses = clauses_of( f );
  if ( !clauses )
    return f;
  for ( auto& c : *clauses )
    normalize_clause( c );
  std::sort( clauses->begin(), clauses->end(), []( const Clause& a, const Clause& b ) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  } );
  clauses->erase( std::unique( clauses->begin(), clauses->end() ), clauses->end() );

  // Drop every clause that a shorter kept clause subsumes.
  std::vector<Clause> kept;
  for ( auto& c : *clauses )
  {
    const bool subsumed = std::any_of( kept.begin(), kept.end(), [&]( const Clause& k ) {
      return std::includes( c.begin(), c.end(), k.begin(), k.end() );
    } );
    if ( !subsumed )
      kept.push_back( std::move( c ) );
  }

  std::vector<Formula> disjuncts;
  for ( auto& c : kept )
  {
    if ( c.empty() )
      return top();
    disjuncts.push_back( c.size() == 1 ? c.front() : canon::and_of( std::move( c ) ) );
  }
  return disjuncts.empty() ? bottom() : canon::or_of( std::move( disjuncts ) );
}

} // namespace beliefrl::ltl
