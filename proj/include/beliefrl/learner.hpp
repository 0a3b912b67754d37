#pragma once

#include <beliefrl/product.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace beliefrl {

struct PolicyConfig
{
  enum class Kind
  {
    EpsilonGreedy,
    Softmax
  };

  Kind kind = Kind::EpsilonGreedy;
  double epsilon = 0.3;
  double temperature = 0.02;

  static PolicyConfig epsilon_greedy( double epsilon ) { return { Kind::EpsilonGreedy, epsilon, 0.02 }; }
  static PolicyConfig softmax( double temperature ) { return { Kind::Softmax, 0.3, temperature }; }

  /// Throws ValidationError for epsilon outside [0, 1] or temperature <= 0.
  void validate() const;
};

/// Action values over (machine state, env state, action), 0 until written.
/// Rows of action values are materialized on first write.
class QTable
{
public:
  QTable( std::size_t machine_states, std::size_t env_states, std::size_t actions, double lr = 0.1,
          double gamma = 0.95 );

  double lr() const noexcept { return lr_; }
  double gamma() const noexcept { return gamma_; }
  std::size_t machine_states() const noexcept { return machine_states_; }
  std::size_t env_states() const noexcept { return env_states_; }
  std::size_t num_actions() const noexcept { return actions_; }
  std::size_t visited_rows() const noexcept { return values_.size() / std::max<std::size_t>( actions_, 1 ); }

  double value( StateId u, EnvState x, ActionId a ) const;
  void set( StateId u, EnvState x, ActionId a, double q );
  /// Largest value over `actions`; 0 for an empty list.
  double max_value( StateId u, EnvState x, const std::vector<ActionId>& actions ) const;

  bool operator==( const QTable& other ) const;

  std::string to_json() const;
  static QTable from_json( std::string_view text );

private:
  std::size_t slot( StateId u, EnvState x ) const;

  std::size_t machine_states_, env_states_, actions_;
  double lr_, gamma_;
  std::vector<std::int32_t> row_of_;
  std::vector<double> values_;
};

/// Q(s, a) <- (1 - lr) Q(s, a) + lr (r + gamma M) with M = 0 when done,
/// else the best value at `next` over `next_actions`.
void q_update( QTable& q, const ProductState& s, ActionId a, double reward, const ProductState& next, bool done,
               const std::vector<ActionId>& next_actions );

/// Applies q_update to (u, x, a) for every machine state u, each advanced
/// by the label of x'. Returns the number of updates.
std::size_t counterfactual_update( QTable& q, const Product& product, EnvState x, ActionId a, EnvState x_next,
                                   bool last );

/// Throws ValidationError on an empty action list.
ActionId select_action( const QTable& q, const ProductState& s, const std::vector<ActionId>& actions,
                        const PolicyConfig& policy, Rng& rng );

/// Action probabilities the policy assigns, in the order of `actions`.
std::vector<double> action_probabilities( const QTable& q, const ProductState& s,
                                          const std::vector<ActionId>& actions, const PolicyConfig& policy );

struct TrainConfig
{
  int episodes = 3000;
  /// 0 selects the environment's default horizon.
  int horizon = 0;
  std::uint64_t seed = 1;
  bool counterfactual = true;
  bool terminate_on_decided = true;
  /// 0 disables evaluation checkpoints.
  int eval_every = 0;
  int eval_episodes = 50;
  PolicyConfig train_policy = PolicyConfig::epsilon_greedy( 0.3 );
  PolicyConfig eval_policy = PolicyConfig::softmax( 0.02 );
  double gamma = 0.95;
  double lr = 0.1;

  void validate() const;
};

struct CurvePoint
{
  int episode = 0;
  std::vector<double> rewards;
};

struct Episode
{
  /// Environment states entered, starting with the initial one.
  std::vector<EnvState> states;
  std::vector<ActionId> actions;
  std::vector<StateId> machine_states;
  double reward = 0.0;
  /// Machine terminal-decided when the episode ended.
  bool decided = false;
};

struct EpisodeStats
{
  std::vector<Episode> episodes;
  std::vector<double> rewards;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

/// Quantile with linear interpolation between order statistics; 0 for an
/// empty sample.
double quantile( std::vector<double> values, double p );

/// Runs one episode under `policy` without learning.
Episode run_episode( const Product& product, const QTable& q, const PolicyConfig& policy, int horizon, Rng& rng );

/// Runs n_episodes episodes with `policy`.
EpisodeStats evaluate( const Product& product, const QTable& q, const PolicyConfig& policy, int n_episodes,
                       int horizon, Rng& rng );

struct TrainResult
{
  QTable q;
  std::vector<CurvePoint> curve;
  std::size_t updates = 0;
};

/// Q-learning over the product. Training and evaluation draw from separate
/// generators seeded from cfg.seed. Throws ValidationError when the machine
/// vocabulary is not labeled by the environment.
TrainResult train( const Environment& env, const SpecMachine& m, const TrainConfig& cfg );

/// Largest |criterion value| over machine states, the reward bound used by
/// the Q-value check.
double reward_bound( const SpecMachine& m );

} // namespace beliefrl
