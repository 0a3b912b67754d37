#pragma once

#include <beliefrl/vocabulary.hpp>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace beliefrl {

using EnvState = std::uint32_t;
using ActionId = std::uint32_t;
using Rng = std::mt19937_64;

struct Outcome
{
  EnvState next = 0;
  double prob = 0.0;
};

/// Finite labeled MDP without rewards. Immutable once built, so a single
/// instance can be shared across threads; all randomness comes from the
/// caller's generator.
class Environment
{
public:
  struct StateInfo
  {
    std::string name;
    AssignmentBits label = 0;
    bool terminal = false;
  };

  /// Validates and freezes the model. `transitions[x][a]` lists the outcome
  /// distribution of action a in state x; an empty list marks a unavailable.
  Environment( std::string name, VocabularyPtr vocabulary, std::vector<StateInfo> states,
               std::vector<std::string> action_names, std::vector<std::vector<std::vector<Outcome>>> transitions,
               EnvState initial, int default_horizon );

  const std::string& name() const noexcept { return name_; }
  const VocabularyPtr& vocabulary() const noexcept { return vocabulary_; }
  std::size_t num_states() const noexcept { return states_.size(); }
  std::size_t num_actions() const noexcept { return action_names_.size(); }
  int default_horizon() const noexcept { return default_horizon_; }

  const std::vector<ActionId>& actions( EnvState x ) const { return available_.at( x ); }
  bool legal( EnvState x, ActionId a ) const;

  EnvState initial( Rng& ) const { return initial_; }
  EnvState initial() const noexcept { return initial_; }
  /// Throws ValidationError on an illegal action.
  EnvState sample_next( EnvState x, ActionId a, Rng& rng ) const;
  const std::vector<Outcome>& transition_distribution( EnvState x, ActionId a ) const;

  AssignmentBits label_bits( EnvState x ) const { return states_.at( x ).label; }
  TruthAssignment label( EnvState x ) const { return { vocabulary_, label_bits( x ) }; }
  bool env_terminal( EnvState x ) const { return states_.at( x ).terminal; }

  const std::string& state_name( EnvState x ) const { return states_.at( x ).name; }
  const std::string& action_name( ActionId a ) const { return action_names_.at( a ); }

private:
  std::string name_;
  VocabularyPtr vocabulary_;
  std::vector<StateInfo> states_;
  std::vector<std::string> action_names_;
  std::vector<std::vector<std::vector<Outcome>>> transitions_;
  std::vector<std::vector<ActionId>> available_;
  EnvState initial_;
  int default_horizon_;
};

inline constexpr int grid5_horizon = 25;
inline constexpr int dinner_horizon = 50;
inline constexpr double dinner_success_prob = 0.8;

/// States S, T0, W0, W1, W2 (ids in that order); actions goto-T0, goto-W0,
/// goto-W1, goto-W2, deterministic and available everywhere.
Environment build_grid5();

/// Object names in proposition order.
const std::vector<std::string>& dinner_objects();

/// State = bitmask of placed objects; action i places object i with
/// probability success_prob, otherwise nothing changes.
Environment build_dinner( int horizon = dinner_horizon, double success_prob = dinner_success_prob );

/// Tabular model from JSON:
///   {"name", "propositions": [...], "actions": [...],
///    "states": [{"name", "labels": [...], "terminal"}],
///    "initial": "<state>", "horizon": n,
///    "transitions": [["<x>", "<a>", "<x'>", p], ...]}
Environment parse_environment_json( std::string_view text );
Environment load_environment_file( const std::filesystem::path& path );

/// "grid5", "dinner", or a path to a JSON description.
Environment environment_by_name( const std::string& spec );

/// Number of orderings of n objects respecting every (before, after) pair.
/// Throws ValidationError on a cyclic order or n > 20.
std::uint64_t valid_order_count( const std::vector<std::pair<std::size_t, std::size_t>>& partial_order,
                                 std::size_t n_objects );

} // namespace beliefrl
