#pragma once

#include <beliefrl/learner.hpp>

#include <optional>
#include <string>
#include <vector>

namespace beliefrl {

/// The two-formula belief of the running example over {T0, W1, W2}.
BeliefSpec example_belief();

/// Built-in grid5 beliefs, case_id in 1..4.
BeliefSpec case_belief( int case_id );

/// Six-formula belief over the dinner objects; the ground truth is its
/// fourth most likely entry.
BeliefSpec dinner_surrogate_belief();
/// Every object placed, dinner plate before small plate before bowl.
ltl::Formula dinner_ground_truth();

struct RewardStats
{
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double mean = 0.0;
};

RewardStats reward_stats( const std::vector<double>& rewards );

struct RunMetrics
{
  std::size_t episodes = 0;
  /// Ground truth satisfied / violated / neither; all episodes count as
  /// undecided without a ground truth.
  std::size_t successes = 0;
  std::size_t violations = 0;
  std::size_t undecided = 0;
  /// Distinct sequences of propositions becoming true.
  std::size_t unique_orderings = 0;
  RewardStats rewards;
  std::size_t machine_states = 0;
  std::vector<std::string> formulas;
  /// Fraction of episodes in which each environment proposition held at
  /// some step, in vocabulary order.
  std::vector<double> visit_rate;
};

/// Environment labels entered during the episode (the initial label is
/// not part of the trace).
std::vector<TruthAssignment> episode_trace( const Environment& env, const Episode& episode );

/// Propositions in the order they became true.
std::vector<std::size_t> rising_order( const Environment& env, const Episode& episode );

RunMetrics compute_metrics( const Environment& env, const SpecMachine& m, const std::vector<Episode>& episodes,
                            const std::optional<ltl::Formula>& ground_truth );

/// Union of observed environment transitions as a DOT digraph; edges are
/// labelled with the action and the number of traversals.
std::string exploration_dot( const Environment& env, const std::vector<Episode>& episodes );

std::string metrics_to_json( const Environment& env, const RunMetrics& metrics );

/// Training protocol of the grid cases.
TrainConfig grid_protocol();
/// Training protocol of the dinner study.
TrainConfig dinner_protocol();

struct CheckResult
{
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CaseReport
{
  int case_id = 0;
  Criterion criterion;
  std::vector<CheckResult> checks;
  std::vector<Episode> episodes;
  RunMetrics metrics;

  bool passed() const;
};

/// Trains one learner per seed on grid5, evaluates each with
/// eval_episodes episodes, and checks the behaviors expected of the case
/// under the criterion.
CaseReport run_case( int case_id, const Criterion& criterion, const std::vector<std::uint64_t>& seeds,
                     int eval_episodes = 100, const TrainConfig& protocol = grid_protocol() );

/// Trains one learner per seed in parallel threads; results in seed order.
std::vector<TrainResult> train_replications( const Environment& env, const SpecMachine& m, const TrainConfig& cfg,
                                             const std::vector<std::uint64_t>& seeds );

} // namespace beliefrl
