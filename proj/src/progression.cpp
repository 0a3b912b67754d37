#include <beliefrl/progression.hpp>

#include <beliefrl/errors.hpp>
#include <beliefrl/rewrite.hpp>

namespace beliefrl::ltl {

namespace {

bool prop_value( const Formula& p, const Vocabulary& vocabulary, AssignmentBits bits )
{
  const auto index = vocabulary.index_of( p.name() );
  if ( !index )
  {
    throw ValidationError( "proposition '" + p.name() + "' is not in the assignment vocabulary" );
  }
  return ( bits >> *index ) & 1u;
}

Formula progress_raw( const Formula& f, const Vocabulary& vocabulary, AssignmentBits bits );

} // namespace

Formula progress( const Formula& f, const Vocabulary& vocabulary, AssignmentBits bits )
{
  return to_dnf( progress_raw( f, vocabulary, bits ) );
}

namespace {

Formula progress_raw( const Formula& f, const Vocabulary& vocabulary, AssignmentBits bits )
{
  switch ( f.op() )
  {
  case Op::True:
  case Op::False:
    return f;
  case Op::Prop:
    return prop_value( f, vocabulary, bits ) ? top() : bottom();
  case Op::Not:
    if ( f.child().op() == Op::Prop )
    {
      return prop_value( f.child(), vocabulary, bits ) ? bottom() : top();
    }
    return canon::not_of( progress_raw( f.child(), vocabulary, bits ) );
  case Op::And:
  case Op::Or:
  {
    std::vector<Formula> operands;
    operands.reserve( f.operands().size() );
    for ( const auto& operand : f.operands() )
    {
      Formula p = progress_raw( operand, vocabulary, bits );
      // Short-circuit on the absorbing constant.
      if ( ( f.op() == Op::And && p.is_false() ) || ( f.op() == Op::Or && p.is_true() ) )
      {
        return p;
      }
      operands.push_back( std::move( p ) );
    }
    return f.op() == Op::And ? canon::and_of( std::move( operands ) ) : canon::or_of( std::move( operands ) );
  }
  case Op::Next:
    return f.child();
  case Op::Eventually:
    return canon::or_of( { progress_raw( f.child(), vocabulary, bits ), f } );
  case Op::Globally:
    return canon::and_of( { progress_raw( f.child(), vocabulary, bits ), f } );
  case Op::Until:
    return canon::or_of( { progress_raw( f.right(), vocabulary, bits ),
                           canon::and_of( { progress_raw( f.left(), vocabulary, bits ), f } ) } );
  case Op::Release:
    return canon::and_of( { progress_raw( f.right(), vocabulary, bits ),
                            canon::or_of( { progress_raw( f.left(), vocabulary, bits ), f } ) } );
  }
  return f;
}

} // namespace

Formula progress( const Formula& f, const TruthAssignment& assignment )
{
  return progress( f, assignment.vocabulary(), assignment.bits() );
}

std::string_view to_string( Fragment fragment )
{
  switch ( fragment )
  {
  case Fragment::CoSafe:
    return "co-safe";
  case Fragment::Safe:
    return "safe";
  case Fragment::Obligation:
    return "obligation";
  case Fragment::General:
    return "general";
  }
  return "?";
}

std::string_view to_string( TerminalStatus status )
{
  switch ( status )
  {
  case TerminalStatus::DecidedTrue:
    return "decided-true";
  case TerminalStatus::DecidedFalse:
    return "decided-false";
  case TerminalStatus::SafePersistent:
    return "safe-persistent";
  case TerminalStatus::Pending:
    return "pending";
  }
  return "?";
}

std::string_view to_string( TraceVerdict verdict )
{
  switch ( verdict )
  {
  case TraceVerdict::Satisfied:
    return "satisfied";
  case TraceVerdict::Violated:
    return "violated";
  case TraceVerdict::Undecided:
    return "undecided";
  }
  return "?";
}

bool is_cosafe( const Formula& f )
{
  switch ( f.op() )
  {
  case Op::True:
  case Op::Prop:
    return true;
  case Op::False:
  case Op::Globally:
  case Op::Release:
    return false;
  case Op::Not:
    return f.child().op() == Op::Prop;
  case Op::And:
  case Op::Or:
  case Op::Next:
  case Op::Eventually:
  case Op::Until:
    for ( const auto& operand : f.operands() )
    {
      if ( !is_cosafe( operand ) )
      {
        return false;
      }
    }
    return true;
  }
  return false;
}

bool is_safe( const Formula& f )
{
  switch ( f.op() )
  {
  case Op::False:
  case Op::Prop:
    return true;
  case Op::True:
  case Op::Eventually:
  case Op::Until:
    return false;
  case Op::Not:
    return f.child().op() == Op::Prop;
  case Op::And:
  case Op::Or:
  case Op::Next:
  case Op::Globally:
  case Op::Release:
    for ( const auto& operand : f.operands() )
    {
      if ( !is_safe( operand ) )
      {
        return false;
      }
    }
    return true;
  }
  return false;
}

Fragment classify_fragment( const Formula& f )
{
  if ( is_cosafe( f ) )
  {
    return Fragment::CoSafe;
  }
  if ( is_safe( f ) )
  {
    return Fragment::Safe;
  }
  if ( f.op() == Op::And )
  {
    for ( const auto& conjunct : f.operands() )
    {
      if ( !is_cosafe( conjunct ) && !is_safe( conjunct ) )
      {
        return Fragment::General;
      }
    }
    return Fragment::Obligation;
  }
  return Fragment::General;
}

bool is_obligation_class( const Formula& f )
{
  return classify_fragment( f ) != Fragment::General;
}

TerminalStatus terminal_status( const Formula& f, std::size_t vocabulary_cap )
{
  if ( f.is_true() )
  {
    return TerminalStatus::DecidedTrue;
  }
  if ( f.is_false() )
  {
    return TerminalStatus::DecidedFalse;
  }
  if ( !is_safe( f ) )
  {
    return TerminalStatus::Pending;
  }
  const auto props = f.propositions();
  if ( props.size() > vocabulary_cap )
  {
    throw CapacityError( "safe-persistence check over " + std::to_string( props.size() ) +
                         " propositions exceeds the cap of " + std::to_string( vocabulary_cap ) );
  }
  const Vocabulary local( std::vector<std::string>( props.begin(), props.end() ) );
  bool loops = false;
  for ( AssignmentBits bits = 0; bits < local.assignment_count(); ++bits )
  {
    const Formula successor = progress( f, local, bits );
    if ( successor == f )
    {
      loops = true;
    }
    else if ( !successor.is_false() )
    {
      return TerminalStatus::Pending;
    }
  }
  // Every assignment failing means no continuation can satisfy f.
  return loops ? TerminalStatus::SafePersistent : TerminalStatus::Pending;
}

TraceVerdict evaluate_trace( const Formula& f, const std::vector<TruthAssignment>& trace )
{
  if ( trace.empty() )
  {
    throw ValidationError( "evaluate_trace: empty trace" );
  }
  Formula current = f;
  for ( const auto& step : trace )
  {
    current = progress( current, step );
  }
  switch ( terminal_status( current ) )
  {
  case TerminalStatus::DecidedTrue:
  case TerminalStatus::SafePersistent:
    return TraceVerdict::Satisfied;
  case TerminalStatus::DecidedFalse:
    return TraceVerdict::Violated;
  case TerminalStatus::Pending:
    return TraceVerdict::Undecided;
  }
  return TraceVerdict::Undecided;
}

} // namespace beliefrl::ltl
