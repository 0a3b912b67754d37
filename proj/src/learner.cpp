#include <beliefrl/learner.hpp>

#include <beliefrl/errors.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace beliefrl {

using nlohmann::json;

void PolicyConfig::validate() const
{
  if ( kind == Kind::EpsilonGreedy && !( epsilon >= 0.0 && epsilon <= 1.0 ) )
    throw ValidationError( "epsilon must be in [0, 1]" );
  if ( kind == Kind::Softmax && !( temperature > 0.0 && std::isfinite( temperature ) ) )
    throw ValidationError( "softmax temperature must be positive" );
}

QTable::QTable( std::size_t machine_states, std::size_t env_states, std::size_t actions, double lr, double gamma )
    : machine_states_( machine_states ), env_states_( env_states ), actions_( actions ), lr_( lr ), gamma_( gamma )
{
  if ( !( lr >= 0.0 && lr <= 1.0 ) )
    throw ValidationError( "learning rate must be in [0, 1]" );
  if ( !( gamma >= 0.0 && gamma < 1.0 ) )
    throw ValidationError( "discount must be in [0, 1)" );
  row_of_.assign( machine_states * env_states, -1 );
}

std::size_t QTable::slot( StateId u, EnvState x ) const
{
  if ( u >= machine_states_ || x >= env_states_ )
    throw ValidationError( "Q-table key (" + std::to_string( u ) + ", " + std::to_string( x ) + ") out of range" );
  return std::size_t{ u } * env_states_ + x;
}

double QTable::value( StateId u, EnvState x, ActionId a ) const
{
  if ( a >= actions_ )
    throw ValidationError( "Q-table action " + std::to_string( a ) + " out of range" );
  const auto row = row_of_[slot( u, x )];
  return row < 0 ? 0.0 : values_[std::size_t( row ) * actions_ + a];
}

void QTable::set( StateId u, EnvState x, ActionId a, double q )
{
  if ( a >= actions_ )
    throw ValidationError( "Q-table action " + std::to_string( a ) + " out of range" );
  auto& row = row_of_[slot( u, x )];
  if ( row < 0 )
  {
    row = static_cast<std::int32_t>( values_.size() / actions_ );
    values_.resize( values_.size() + actions_, 0.0 );
  }
  values_[std::size_t( row ) * actions_ + a] = q;
}

double QTable::max_value( StateId u, EnvState x, const std::vector<ActionId>& actions ) const
{
  if ( actions.empty() )
    return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for ( auto a : actions )
    best = std::max( best, value( u, x, a ) );
  return best;
}

bool QTable::operator==( const QTable& other ) const
{
  if ( machine_states_ != other.machine_states_ || env_states_ != other.env_states_ || actions_ != other.actions_ ||
       lr_ != other.lr_ || gamma_ != other.gamma_ )
    return false;
  for ( std::size_t k = 0; k < row_of_.size(); ++k )
    for ( std::size_t a = 0; a < actions_; ++a )
    {
      const double mine = row_of_[k] < 0 ? 0.0 : values_[std::size_t( row_of_[k] ) * actions_ + a];
      const double theirs = other.row_of_[k] < 0 ? 0.0 : other.values_[std::size_t( other.row_of_[k] ) * actions_ + a];
      if ( mine != theirs )
        return false;
    }
  return true;
}

std::string QTable::to_json() const
{
  json rows = json::array();
  for ( std::size_t k = 0; k < row_of_.size(); ++k )
  {
    if ( row_of_[k] < 0 )
      continue;
    const auto begin = values_.begin() + std::ptrdiff_t( std::size_t( row_of_[k] ) * actions_ );
    rows.push_back( { k / env_states_, k % env_states_, std::vector<double>( begin, begin + std::ptrdiff_t( actions_ ) ) } );
  }
  json doc = { { "machine_states", machine_states_ },
               { "env_states", env_states_ },
               { "actions", actions_ },
               { "lr", lr_ },
               { "gamma", gamma_ },
               { "rows", rows } };
  return doc.dump();
}

QTable QTable::from_json( std::string_view text )
{
  try
  {
    const auto doc = json::parse( text );
    QTable q( doc.at( "machine_states" ).get<std::size_t>(), doc.at( "env_states" ).get<std::size_t>(),
              doc.at( "actions" ).get<std::size_t>(), doc.at( "lr" ).get<double>(), doc.at( "gamma" ).get<double>() );
    for ( const auto& row : doc.at( "rows" ) )
    {
      const auto values = row.at( 2 ).get<std::vector<double>>();
      if ( values.size() != q.actions_ )
        throw ValidationError( "Q-table row has " + std::to_string( values.size() ) + " values" );
      for ( std::size_t a = 0; a < values.size(); ++a )
        q.set( row.at( 0 ).get<StateId>(), row.at( 1 ).get<EnvState>(), static_cast<ActionId>( a ), values[a] );
    }
    return q;
  }
  catch ( const json::exception& e )
  {
    throw ValidationError( std::string( "malformed Q-table: " ) + e.what() );
  }
}

void q_update( QTable& q, const ProductState& s, ActionId a, double reward, const ProductState& next, bool done,
               const std::vector<ActionId>& next_actions )
{
  const double m = done ? 0.0 : q.max_value( next.u, next.x, next_actions );
  const double old = q.value( s.u, s.x, a );
  q.set( s.u, s.x, a, ( 1.0 - q.lr() ) * old + q.lr() * ( reward + q.gamma() * m ) );
}

std::size_t counterfactual_update( QTable& q, const Product& product, EnvState x, ActionId a, EnvState x_next,
                                   bool last )
{
  const auto& next_actions = product.env().actions( x_next );
  const auto n = product.machine().num_states();
  for ( StateId u = 0; u < n; ++u )
  {
    const auto out = product.advance( u, x_next, last );
    q_update( q, { u, x }, a, out.reward, { out.next, x_next }, out.done, next_actions );
  }
  return n;
}

std::vector<double> action_probabilities( const QTable& q, const ProductState& s,
                                          const std::vector<ActionId>& actions, const PolicyConfig& policy )
{
  if ( actions.empty() )
    throw ValidationError( "no actions to choose from" );
  const std::size_t n = actions.size();
  std::vector<double> values( n ), probs( n, 0.0 );
  for ( std::size_t i = 0; i < n; ++i )
    values[i] = q.value( s.u, s.x, actions[i] );
  const double best = *std::max_element( values.begin(), values.end() );
  if ( policy.kind == PolicyConfig::Kind::Softmax )
  {
    double total = 0.0;
    for ( std::size_t i = 0; i < n; ++i )
      total += probs[i] = std::exp( ( values[i] - best ) / policy.temperature );
    for ( auto& p : probs )
      p /= total;
    return probs;
  }
  const auto ties = static_cast<double>( std::count( values.begin(), values.end(), best ) );
  for ( std::size_t i = 0; i < n; ++i )
    probs[i] = policy.epsilon / double( n ) + ( values[i] == best ? ( 1.0 - policy.epsilon ) / ties : 0.0 );
  return probs;
}

ActionId select_action( const QTable& q, const ProductState& s, const std::vector<ActionId>& actions,
                        const PolicyConfig& policy, Rng& rng )
{
  if ( actions.empty() )
    throw ValidationError( "no actions to choose from" );
  if ( policy.kind == PolicyConfig::Kind::EpsilonGreedy )
  {
    if ( std::uniform_real_distribution<double>( 0.0, 1.0 )( rng ) < policy.epsilon )
      return actions[std::uniform_int_distribution<std::size_t>( 0, actions.size() - 1 )( rng )];
    std::vector<ActionId> best;
    double top = -std::numeric_limits<double>::infinity();
    for ( auto a : actions )
    {
      const double v = q.value( s.u, s.x, a );
      if ( v > top )
      {
        top = v;
        best.clear();
      }
      if ( v == top )
        best.push_back( a );
    }
    return best[std::uniform_int_distribution<std::size_t>( 0, best.size() - 1 )( rng )];
  }
  const auto probs = action_probabilities( q, s, actions, policy );
  std::discrete_distribution<std::size_t> pick( probs.begin(), probs.end() );
  return actions[pick( rng )];
}

void TrainConfig::validate() const
{
  if ( episodes < 0 )
    throw ValidationError( "episodes must be non-negative" );
  if ( horizon < 0 )
    throw ValidationError( "horizon must be non-negative" );
  if ( eval_every < 0 || eval_episodes < 0 )
    throw ValidationError( "evaluation counts must be non-negative" );
  if ( !( lr >= 0.0 && lr <= 1.0 ) )
    throw ValidationError( "learning rate must be in [0, 1]" );
  if ( !( gamma >= 0.0 && gamma < 1.0 ) )
    throw ValidationError( "discount must be in [0, 1)" );
  train_policy.validate();
  eval_policy.validate();
}

double quantile( std::vector<double> values, double p )
{
  if ( values.empty() )
    return 0.0;
  std::sort( values.begin(), values.end() );
  const double pos = p * double( values.size() - 1 );
  const auto lo = static_cast<std::size_t>( std::floor( pos ) );
  const auto hi = std::min( lo + 1, values.size() - 1 );
  return values[lo] + ( pos - double( lo ) ) * ( values[hi] - values[lo] );
}

double reward_bound( const SpecMachine& m )
{
  double bound = 0.0;
  for ( StateId s = 0; s < m.num_states(); ++s )
    bound = std::max( bound, std::abs( m.criterion_value( s ) ) );
  return bound;
}

namespace {

int effective_horizon( const Product& product, int horizon )
{
  return horizon > 0 ? horizon : product.env().default_horizon();
}

/// One episode acting on q; learns into `learn` (which aliases q) when given.
Episode play( const Product& product, const QTable& q, QTable* learn, const PolicyConfig& policy, int horizon,
              Rng& rng, bool counterfactual, double bound, std::size_t& updates )
{
  const auto& env = product.env();
  Episode ep;
  ProductState s = product.initial( rng );
  ep.states.push_back( s.x );
  ep.machine_states.push_back( s.u );
  for ( int t = 0; t < horizon; ++t )
  {
    const auto& actions = env.actions( s.x );
    if ( actions.empty() )
      break;
    const ActionId a = select_action( q, s, actions, policy, rng );
    const bool last = t + 1 == horizon;
    const auto step = product.step( s, a, rng, last );
    if ( learn )
    {
      if ( counterfactual )
        updates += counterfactual_update( *learn, product, s.x, a, step.next.x, last );
      else
      {
        q_update( *learn, s, a, step.reward, step.next, step.done, env.actions( step.next.x ) );
        ++updates;
      }
      if ( std::abs( q.value( s.u, s.x, a ) ) > bound / ( 1.0 - q.gamma() ) + 1e-9 )
        throw Error( "Q-value exceeds the reward bound" );
    }
    ep.actions.push_back( a );
    ep.states.push_back( step.next.x );
    ep.machine_states.push_back( step.next.u );
    ep.reward += step.reward;
    s = step.next;
    if ( step.done )
      break;
  }
  ep.decided = product.machine().terminal( s.u );
  return ep;
}

} // namespace

Episode run_episode( const Product& product, const QTable& q, const PolicyConfig& policy, int horizon, Rng& rng )
{
  std::size_t unused = 0;
  return play( product, q, nullptr, policy, effective_horizon( product, horizon ), rng, false, 0.0, unused );
}

EpisodeStats evaluate( const Product& product, const QTable& q, const PolicyConfig& policy, int n_episodes,
                       int horizon, Rng& rng )
{
  policy.validate();
  EpisodeStats stats;
  for ( int i = 0; i < n_episodes; ++i )
  {
    stats.episodes.push_back( run_episode( product, q, policy, horizon, rng ) );
    stats.rewards.push_back( stats.episodes.back().reward );
  }
  stats.median = quantile( stats.rewards, 0.5 );
  stats.q25 = quantile( stats.rewards, 0.25 );
  stats.q75 = quantile( stats.rewards, 0.75 );
  return stats;
}

TrainResult train( const Environment& env, const SpecMachine& m, const TrainConfig& cfg )
{
  cfg.validate();
  const Product product( env, m, cfg.terminate_on_decided );
  TrainResult result{ QTable( m.num_states(), env.num_states(), env.num_actions(), cfg.lr, cfg.gamma ), {}, 0 };
  std::seed_seq train_seq{ cfg.seed, std::uint64_t{ 0 } }, eval_seq{ cfg.seed, std::uint64_t{ 1 } };
  Rng train_rng( train_seq ), eval_rng( eval_seq );
  const int horizon = effective_horizon( product, cfg.horizon );
  const double bound = reward_bound( m );
  for ( int episode = 1; episode <= cfg.episodes; ++episode )
  {
    play( product, result.q, &result.q, cfg.train_policy, horizon, train_rng, cfg.counterfactual, bound,
          result.updates );
    if ( cfg.eval_every > 0 && episode % cfg.eval_every == 0 )
      result.curve.push_back(
          { episode, evaluate( product, result.q, cfg.eval_policy, cfg.eval_episodes, horizon, eval_rng ).rewards } );
  }
  return result;
}

} // namespace beliefrl
