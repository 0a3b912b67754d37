#pragma once

#include <beliefrl/formula.hpp>
#include <beliefrl/vocabulary.hpp>

#include <string_view>
#include <vector>

namespace beliefrl::ltl {

/// Formula progression: the formula that must hold from the next step on
/// for `f` to hold now, given this step's assignment. Implements the
/// Bacchus-Kabanza rules and returns a canonical formula when `f` is
/// canonical. Throws ValidationError if a proposition of `f` is missing
/// from the vocabulary.
Formula progress( const Formula& f, const TruthAssignment& assignment );
Formula progress( const Formula& f, const Vocabulary& vocabulary, AssignmentBits bits );

enum class Fragment
{
  CoSafe,
  Safe,
  Obligation,
  General
};

enum class TerminalStatus
{
  DecidedTrue,
  DecidedFalse,
  SafePersistent,
  Pending
};

enum class TraceVerdict
{
  Satisfied,
  Violated,
  Undecided
};

std::string_view to_string( Fragment fragment );
std::string_view to_string( TerminalStatus status );
std::string_view to_string( TraceVerdict verdict );

/// Grammar derivations, on NNF input:
///   co-safe: true | p | !p | a & b | a | b | X a | F a | a U b
///   safe:    false | p | !p | a & b | a | b | X a | G a | a R b
bool is_cosafe( const Formula& f );
bool is_safe( const Formula& f );

/// CoSafe and Safe are checked first, so a lone safe or co-safe formula
/// reports its own fragment; Obligation is a conjunction of safe and
/// co-safe conjuncts.
Fragment classify_fragment( const Formula& f );

/// CoSafe, Safe or Obligation.
bool is_obligation_class( const Formula& f );

inline constexpr std::size_t default_vocabulary_cap = 16;

/// SafePersistent means: safe, and every assignment over the formula's own
/// propositions progresses it to itself or to false. Throws CapacityError
/// when that check would enumerate more than 2^cap assignments.
TerminalStatus terminal_status( const Formula& f, std::size_t vocabulary_cap = default_vocabulary_cap );

/// Progresses `f` through the trace and reads the verdict off the final
/// formula: true or safe-persistent gives Satisfied, false gives Violated,
/// anything else Undecided. Throws ValidationError on an empty trace.
TraceVerdict evaluate_trace( const Formula& f, const std::vector<TruthAssignment>& trace );

} // namespace beliefrl::ltl
