#pragma once

// Infinite-trace LTL semantics on ultimately periodic words prefix.loop^w,
// computed by fixpoint iteration per subformula. Test-only and independent
// of progression.
//
// A finite trace gets its verdict from a family of lasso extensions:
// Satisfied when every extension satisfies the formula, Violated when none
// does, Undecided otherwise.

#include <beliefrl/formula.hpp>
#include <beliefrl/progression.hpp>
#include <beliefrl/vocabulary.hpp>

#include <random>
#include <unordered_map>
#include <vector>

namespace beliefrl::oracle {

class LassoEvaluator
{
public:
  LassoEvaluator( const std::vector<TruthAssignment>& prefix, const std::vector<TruthAssignment>& loop )
  {
    word_ = prefix;
    word_.insert( word_.end(), loop.begin(), loop.end() );
    loop_start_ = prefix.size();
  }

  bool holds( const ltl::Formula& f ) { return values( f )[0]; }

private:
  std::size_t successor( std::size_t i ) const { return i + 1 < word_.size() ? i + 1 : loop_start_; }

  const std::vector<bool>& values( const ltl::Formula& f )
  {
    if ( auto it = memo_.find( f.text() ); it != memo_.end() )
      return it->second;

    using ltl::Op;
    const std::size_t n = word_.size();
    std::vector<bool> v( n, false );
    switch ( f.op() )
    {
    case Op::True:
      v.assign( n, true );
      break;
    case Op::False:
      break;
    case Op::Prop:
      for ( std::size_t i = 0; i < n; ++i )
        v[i] = word_[i].value( f.name() );
      break;
    case Op::Not:
    {
      const auto c = values( f.child() );
      for ( std::size_t i = 0; i < n; ++i )
        v[i] = !c[i];
      break;
    }
    case Op::And:
    case Op::Or:
    {
      const bool is_and = f.op() == Op::And;
      v.assign( n, is_and );
      for ( const auto& g : f.operands() )
      {
        const auto c = values( g );
        for ( std::size_t i = 0; i < n; ++i )
          v[i] = is_and ? ( v[i] && c[i] ) : ( v[i] || c[i] );
      }
      break;
    }
    case Op::Next:
    {
      const auto c = values( f.child() );
      for ( std::size_t i = 0; i < n; ++i )
        v[i] = c[successor( i )];
      break;
    }
    case Op::Eventually:
    case Op::Until:
    {
      // Least fixpoint of v = right | (left & X v).
      const auto right = values( f.op() == Op::Until ? f.right() : f.child() );
      const std::vector<bool> left = f.op() == Op::Until ? values( f.left() ) : std::vector<bool>( n, true );
      for ( bool changed = true; changed; )
      {
        changed = false;
        for ( std::size_t k = n; k-- > 0; )
        {
          const bool next = right[k] || ( left[k] && v[successor( k )] );
          if ( next != v[k] )
          {
            v[k] = next;
            changed = true;
          }
        }
      }
      break;
    }
    case Op::Globally:
    case Op::Release:
    {
      // Greatest fixpoint of v = right & (left | X v).
      const auto right = values( f.op() == Op::Release ? f.right() : f.child() );
      const std::vector<bool> left = f.op() == Op::Release ? values( f.left() ) : std::vector<bool>( n, false );
      v.assign( n, true );
      for ( bool changed = true; changed; )
      {
        changed = false;
        for ( std::size_t k = n; k-- > 0; )
        {
          const bool next = right[k] && ( left[k] || v[successor( k )] );
          if ( next != v[k] )
          {
            v[k] = next;
            changed = true;
          }
        }
      }
      break;
    }
    }
    return memo_.emplace( f.text(), std::move( v ) ).first->second;
  }

  std::vector<TruthAssignment> word_;
  std::size_t loop_start_ = 0;
  std::unordered_map<std::string, std::vector<bool>> memo_;
};

inline bool holds_on_lasso( const ltl::Formula& f, const std::vector<TruthAssignment>& prefix,
                            const std::vector<TruthAssignment>& loop )
{
  return LassoEvaluator( prefix, loop ).holds( f );
}

enum class ExtensionVerdict
{
  AllSatisfy,
  NoneSatisfy,
  Mixed
};

/// Checks every constant-letter loop trace.a^w plus `sampled` random lassos
/// trace.u.v^w with |u| <= 2 and 1 <= |v| <= 2.
template <class Rng>
ExtensionVerdict extension_verdict( const ltl::Formula& f, const std::vector<TruthAssignment>& trace,
                                    const VocabularyPtr& vocabulary, Rng& rng, std::size_t sampled = 48 )
{
  bool some_sat = false;
  bool some_unsat = false;
  const auto record = [&]( bool sat ) { ( sat ? some_sat : some_unsat ) = true; };

  for ( AssignmentBits a = 0; a < vocabulary->assignment_count(); ++a )
  {
    record( holds_on_lasso( f, trace, { TruthAssignment( vocabulary, a ) } ) );
  }
  std::uniform_int_distribution<AssignmentBits> letter( 0, vocabulary->assignment_count() - 1 );
  std::uniform_int_distribution<std::size_t> len_u( 0, 2 ), len_v( 1, 2 );
  for ( std::size_t s = 0; s < sampled; ++s )
  {
    auto prefix = trace;
    for ( std::size_t k = len_u( rng ); k > 0; --k )
      prefix.emplace_back( vocabulary, letter( rng ) );
    std::vector<TruthAssignment> loop;
    for ( std::size_t k = len_v( rng ); k > 0; --k )
      loop.emplace_back( vocabulary, letter( rng ) );
    record( holds_on_lasso( f, prefix, loop ) );
  }
  if ( some_sat && !some_unsat )
    return ExtensionVerdict::AllSatisfy;
  if ( some_unsat && !some_sat )
    return ExtensionVerdict::NoneSatisfy;
  return ExtensionVerdict::Mixed;
}

/// Progression outcome consistent with the sampled extensions: true needs
/// every extension to satisfy, false none, safe-persistent at least one.
inline bool agrees( ltl::TerminalStatus status, ExtensionVerdict ext )
{
  switch ( status )
  {
  case ltl::TerminalStatus::DecidedTrue:
    return ext == ExtensionVerdict::AllSatisfy;
  case ltl::TerminalStatus::DecidedFalse:
    return ext == ExtensionVerdict::NoneSatisfy;
  case ltl::TerminalStatus::SafePersistent:
    return ext != ExtensionVerdict::NoneSatisfy;
  case ltl::TerminalStatus::Pending:
    return true;
  }
  return false;
}

} // namespace beliefrl::oracle
