#pragma once

#include <beliefrl/formula.hpp>
#include <beliefrl/vocabulary.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace beliefrl {

struct BeliefEntry
{
  ltl::Formula formula;
  double prob = 0.0;
};

/// Finite-support distribution over formulas. Construction stores entries
/// as given; validate() enforces the invariants.
class BeliefSpec
{
public:
  static constexpr double sum_tolerance = 1e-6;

  BeliefSpec() = default;
  BeliefSpec( VocabularyPtr vocabulary, std::vector<BeliefEntry> entries, bool pruned = false );

  const VocabularyPtr& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<BeliefEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  /// Set by prune_chance_constrained: masses no longer sum to 1.
  bool pruned() const noexcept { return pruned_; }
  double total_mass() const;

private:
  VocabularyPtr vocabulary_;
  std::vector<BeliefEntry> entries_;
  bool pruned_ = false;
};

/// Canonicalizes every formula (NNF, then simplify), merges canonical
/// duplicates by summing their mass and checks the invariants: nonempty
/// support, each prob in (0,1], propositions inside the vocabulary, every
/// formula Safe, CoSafe or Obligation, and a total of 1 within 1e-6 (then
/// renormalized exactly). Pruned beliefs skip the sum rule. Entry order
/// follows first occurrence. Throws ValidationError.
BeliefSpec validate( const BeliefSpec& raw );

/// Highest-probability formula; ties go to the smallest rendering.
const ltl::Formula& most_likely( const BeliefSpec& belief );

/// Entries sorted by descending prob, ties by ascending rendering.
std::vector<BeliefEntry> sorted_by_mass( const BeliefSpec& belief );

/// Shortest mass-sorted prefix holding at least 1 - delta of the mass.
/// Masses are kept as they are and the result is flagged pruned.
BeliefSpec prune_chance_constrained( const BeliefSpec& belief, double delta );

/// `{"propositions": [...], "formulas": [{"ltl": "...", "prob": 0.7}, ...]}`
/// Unknown keys are rejected. The result is validated.
BeliefSpec parse_belief_json( std::string_view text );
BeliefSpec load_belief_file( const std::filesystem::path& path );
std::string belief_to_json( const BeliefSpec& belief );

} // namespace beliefrl
