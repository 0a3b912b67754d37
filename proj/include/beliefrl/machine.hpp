#pragma once

#include <beliefrl/belief.hpp>
#include <beliefrl/formula.hpp>
#include <beliefrl/progression.hpp>
#include <beliefrl/vocabulary.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace beliefrl {

using StateId = std::uint32_t;

enum class CriterionKind
{
  MostLikely,
  MaxCoverage,
  MinRegret,
  ChanceConstrained
};

struct Criterion
{
  CriterionKind kind = CriterionKind::MinRegret;
  /// Only meaningful for ChanceConstrained.
  double delta = 0.0;

  static Criterion most_likely() { return { CriterionKind::MostLikely }; }
  static Criterion max_coverage() { return { CriterionKind::MaxCoverage }; }
  static Criterion min_regret() { return { CriterionKind::MinRegret }; }
  static Criterion chance_constrained( double delta ) { return { CriterionKind::ChanceConstrained, delta }; }

  /// "most-likely", "max-coverage", "min-regret", "chance-constrained".
  std::string name() const;
  /// Inverse of name(); throws ValidationError on an unknown name or a
  /// delta outside [0, 1).
  static Criterion from_name( std::string_view name, double delta = 0.0 );
};

struct CompileLimits
{
  std::size_t vocabulary_cap = ltl::default_vocabulary_cap;
  std::size_t state_budget = 1'000'000;
  /// Largest states * 2^|vocabulary| kept as a dense table.
  std::uint64_t dense_limit = std::uint64_t{ 1 } << 22;
};

/// Reward of a single formula state: +1 satisfied or safe-persistent, -1
/// falsified, 0 pending.
int formula_reward( ltl::TerminalStatus status );

/// Deterministic progression machine of one formula. Transitions are stored
/// over the formula's own propositions and looked up by projecting the
/// vocabulary assignment.
class FormulaMachine
{
public:
  const VocabularyPtr& vocabulary() const noexcept { return vocabulary_; }
  std::size_t num_states() const noexcept { return states_.size(); }
  StateId initial() const noexcept { return 0; }

  const ltl::Formula& formula( StateId s ) const { return states_.at( s ); }
  ltl::TerminalStatus status( StateId s ) const { return status_.at( s ); }
  int reward( StateId s ) const { return formula_reward( status_.at( s ) ); }
  bool decided( StateId s ) const { return status_.at( s ) != ltl::TerminalStatus::Pending; }

  StateId next( StateId s, AssignmentBits bits ) const;

  /// Vocabulary indices of the propositions the transitions depend on.
  const std::vector<std::size_t>& support() const noexcept { return support_; }

private:
  friend FormulaMachine compile_formula( const ltl::Formula&, VocabularyPtr, const CompileLimits& );

  VocabularyPtr vocabulary_;
  std::vector<ltl::Formula> states_;
  std::vector<ltl::TerminalStatus> status_;
  std::vector<std::size_t> support_;
  std::vector<StateId> table_;
};

/// BFS over all assignments from f (canonicalized through NNF). Throws
/// ValidationError for a formula outside the obligation class or with
/// propositions outside the vocabulary, CapacityError past the limits.
FormulaMachine compile_formula( const ltl::Formula& f, VocabularyPtr vocabulary, const CompileLimits& limits = {} );

/// The criterion applied to per-component rewards R_i in {-1, 0, +1}:
/// most-likely takes R of the highest-probability component (ties by
/// smallest rendering), max-coverage the sum of R_i, min-regret and
/// chance-constrained the sum of P_i * R_i.
double criterion_reward( std::span<const int> rewards, std::span<const BeliefEntry> components, const Criterion& c );

struct MachineStep
{
  StateId next = 0;
  /// reward(next) on first entry into a terminal-decided state, else 0.
  double reward = 0.0;
};

/// Cross-product reward machine over the components of a belief.
class SpecMachine
{
public:
  const Criterion& criterion() const noexcept { return criterion_; }
  const VocabularyPtr& vocabulary() const noexcept { return vocabulary_; }
  /// Components in machine order, with their original masses.
  const std::vector<BeliefEntry>& components() const noexcept { return components_; }
  const FormulaMachine& component_machine( std::size_t i ) const { return machines_.at( i ); }

  std::size_t num_states() const noexcept { return width() == 0 ? 0 : tuples_.size() / width(); }
  StateId initial() const noexcept { return 0; }

  /// Component-machine state ids of s.
  std::span<const StateId> tuple( StateId s ) const;
  /// "<f1, f2>" with rendered component formulas.
  std::string label( StateId s ) const;

  /// Every component decided (true, false or safe-persistent).
  bool terminal( StateId s ) const { return terminal_.at( s ) != 0; }
  /// Criterion value with pending components counted as 0.
  double criterion_value( StateId s ) const { return value_.at( s ); }
  /// criterion_value on terminal states, 0 elsewhere.
  double reward( StateId s ) const { return terminal( s ) ? value_[s] : 0.0; }
  double max_abs_reward() const noexcept { return max_abs_reward_; }

  StateId next( StateId s, AssignmentBits bits ) const;
  MachineStep step( StateId s, AssignmentBits bits ) const;
  MachineStep step( StateId s, const TruthAssignment& a ) const;

  bool dense() const noexcept { return !table_.empty() || num_states() == 0; }

private:
  friend SpecMachine compile_spec( const BeliefSpec&, const Criterion&, const CompileLimits& );

  struct TupleHash
  {
    std::size_t operator()( const std::vector<StateId>& t ) const noexcept;
  };

  std::size_t width() const noexcept { return machines_.size(); }
  StateId intern_lookup( const std::vector<StateId>& t ) const;

  Criterion criterion_;
  VocabularyPtr vocabulary_;
  std::vector<BeliefEntry> components_;
  std::vector<FormulaMachine> machines_;
  std::vector<StateId> tuples_;
  std::unordered_map<std::vector<StateId>, StateId, TupleHash> index_;
  std::vector<std::uint8_t> terminal_;
  std::vector<double> value_;
  std::vector<StateId> table_;
  double max_abs_reward_ = 0.0;
};

/// The components a criterion compiles: the most likely formula alone,
/// the chance-constrained pruned support, or the whole belief.
std::vector<BeliefEntry> criterion_components( const BeliefSpec& belief, const Criterion& c );

/// Breadth-first construction of the reachable tuple states. Dense
/// transitions while states * 2^|vocabulary| <= limits.dense_limit;
/// otherwise successors are recomputed from the component tables.
SpecMachine compile_spec( const BeliefSpec& belief, const Criterion& c, const CompileLimits& limits = {} );

/// DOT digraph: one node per state, one edge per (source, target) pair
/// labelled with a minimized condition, decided states shaded.
std::string export_dot( const SpecMachine& m );
std::string export_dot( const FormulaMachine& m );

/// JSON with vocabulary, components, states, initial id, rewards, terminal
/// flags and (state, assignment, state) triples, or "lazy".
std::string machine_to_json( const SpecMachine& m );

} // namespace beliefrl
