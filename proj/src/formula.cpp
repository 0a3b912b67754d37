#include <beliefrl/formula.hpp>

#include <beliefrl/errors.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>

namespace beliefrl::ltl {

namespace {

// Operand of & or |: literals and constants stand bare, everything else is
// bracketed.
void append_nary_operand( std::string& out, const Formula& f )
{
  if ( f.is_literal() || f.is_constant() )
  {
    out += f.text();
  }
  else
  {
    out += '(';
    out += f.text();
    out += ')';
  }
}

// Operand of a prefix operator or of U/R: binary nodes are bracketed.
void append_tight_operand( std::string& out, const Formula& f )
{
  if ( f.is_binary() )
  {
    out += '(';
    out += f.text();
    out += ')';
  }
  else
  {
    out += f.text();
  }
}

std::string render_node( Op op, const std::string& name, const std::vector<Formula>& operands )
{
  std::string out;
  switch ( op )
  {
  case Op::True:
    return "true";
  case Op::False:
    return "false";
  case Op::Prop:
    return name;
  case Op::Not:
    out = "!";
    append_tight_operand( out, operands.front() );
    return out;
  case Op::Next:
  case Op::Eventually:
  case Op::Globally:
    out = op == Op::Next ? "X " : op == Op::Eventually ? "F " : "G ";
    append_tight_operand( out, operands.front() );
    return out;
  case Op::Until:
  case Op::Release:
    append_tight_operand( out, operands.front() );
    out += op == Op::Until ? " U " : " R ";
    append_tight_operand( out, operands.back() );
    return out;
  case Op::And:
  case Op::Or:
    for ( std::size_t i = 0; i < operands.size(); ++i )
    {
      if ( i > 0 )
      {
        out += op == Op::And ? " & " : " | ";
      }
      append_nary_operand( out, operands[i] );
    }
    return out;
  }
  return out;
}

} // namespace

Formula::Formula()
{
  static const Formula constant_true = build( Op::True, {}, {} );
  node_ = constant_true.node_;
}

bool Formula::is_literal() const noexcept
{
  return op() == Op::Prop || ( op() == Op::Not && child().op() == Op::Prop );
}

bool Formula::is_binary() const noexcept
{
  switch ( op() )
  {
  case Op::And:
  case Op::Or:
  case Op::Until:
  case Op::Release:
    return true;
  default:
    return false;
  }
}

std::set<std::string> Formula::propositions() const
{
  std::set<std::string> result;
  std::vector<const Formula*> stack{ this };
  while ( !stack.empty() )
  {
    const Formula* f = stack.back();
    stack.pop_back();
    if ( f->op() == Op::Prop )
    {
      result.insert( f->name() );
    }
    for ( const auto& child : f->operands() )
    {
      stack.push_back( &child );
    }
  }
  return result;
}

Formula Formula::build( Op op, std::string name, std::vector<Formula> operands )
{
  auto node = std::make_shared<Node>();
  node->op = op;
  node->text = render_node( op, name, operands );
  node->hash = std::hash<std::string>{}( node->text );
  node->size = 1;
  node->depth = 0;
  for ( const auto& child : operands )
  {
    node->size += child.size();
    node->depth = std::max( node->depth, child.depth() + 1 );
  }
  node->name = std::move( name );
  node->operands = std::move( operands );
  return Formula( std::move( node ) );
}

Formula Formula::make_true()
{
  return Formula();
}

Formula Formula::make_false()
{
  static const Formula constant_false = build( Op::False, {}, {} );
  return constant_false;
}

Formula Formula::make_prop( std::string name )
{
  if ( !is_identifier( name ) )
  {
    throw ValidationError( "'" + name + "' is not a valid proposition name" );
  }
  return build( Op::Prop, std::move( name ), {} );
}

Formula Formula::make_unary( Op op, Formula child )
{
  if ( op != Op::Not && op != Op::Next && op != Op::Eventually && op != Op::Globally )
  {
    throw std::invalid_argument( "make_unary: not a unary operator" );
  }
  return build( op, {}, { std::move( child ) } );
}

Formula Formula::make_binary( Op op, Formula left, Formula right )
{
  if ( op != Op::Until && op != Op::Release )
  {
    throw std::invalid_argument( "make_binary: not U or R" );
  }
  return build( op, {}, { std::move( left ), std::move( right ) } );
}

Formula Formula::make_nary( Op op, std::vector<Formula> operands )
{
  if ( op != Op::And && op != Op::Or )
  {
    throw std::invalid_argument( "make_nary: not & or |" );
  }
  if ( operands.size() < 2 )
  {
    throw std::invalid_argument( "make_nary: needs at least two operands" );
  }
  return build( op, {}, std::move( operands ) );
}

Formula top() { return Formula::make_true(); }
Formula bottom() { return Formula::make_false(); }
Formula prop( std::string name ) { return Formula::make_prop( std::move( name ) ); }
Formula negation( Formula f ) { return Formula::make_unary( Op::Not, std::move( f ) ); }
Formula conjunction( std::vector<Formula> operands ) { return Formula::make_nary( Op::And, std::move( operands ) ); }
Formula disjunction( std::vector<Formula> operands ) { return Formula::make_nary( Op::Or, std::move( operands ) ); }
Formula next( Formula f ) { return Formula::make_unary( Op::Next, std::move( f ) ); }
Formula eventually( Formula f ) { return Formula::make_unary( Op::Eventually, std::move( f ) ); }
Formula globally( Formula f ) { return Formula::make_unary( Op::Globally, std::move( f ) ); }
Formula until( Formula left, Formula right ) { return Formula::make_binary( Op::Until, std::move( left ), std::move( right ) ); }
Formula release( Formula left, Formula right ) { return Formula::make_binary( Op::Release, std::move( left ), std::move( right ) ); }

bool is_identifier( std::string_view name )
{
  static constexpr std::array<std::string_view, 7> reserved{ "true", "false", "X", "F", "G", "U", "R" };
  if ( name.empty() )
  {
    return false;
  }
  const auto head = static_cast<unsigned char>( name.front() );
  if ( !std::isalpha( head ) && head != '_' )
  {
    return false;
  }
  for ( const char c : name )
  {
    const auto u = static_cast<unsigned char>( c );
    if ( !std::isalnum( u ) && u != '_' )
    {
      return false;
    }
  }
  return std::find( reserved.begin(), reserved.end(), name ) == reserved.end();
}

} // namespace beliefrl::ltl
