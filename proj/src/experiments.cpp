#include <beliefrl/experiments.hpp>

#include <beliefrl/errors.hpp>
#include <beliefrl/parser.hpp>
#include <beliefrl/rewrite.hpp>

#include <json.hpp>

#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace beliefrl {

using nlohmann::json;

namespace {

BeliefSpec belief_of( const VocabularyPtr& vocab, const std::vector<std::pair<std::string, double>>& items )
{
  std::vector<BeliefEntry> entries;
  for ( const auto& [text, p] : items )
    entries.push_back( { ltl::parse( text ), p } );
  return validate( BeliefSpec( vocab, std::move( entries ) ) );
}

VocabularyPtr grid_vocabulary()
{
  return make_vocabulary( { "T0", "W0", "W1", "W2" } );
}

const std::string dinner_all = "F dinner_plate & F small_plate & F bowl & F fork & F knife & F spoon & "
                               "F water_glass & F mug";
const std::string c1 = "(!small_plate U dinner_plate)";
const std::string c2 = "(!bowl U small_plate)";
const std::string c3 = "(!knife U fork)";
const std::string c4 = "(!spoon U knife)";

} // namespace

BeliefSpec example_belief()
{
  return belief_of( make_vocabulary( { "T0", "W1", "W2" } ),
                    { { "G !T0 & F W2 & (!W2 U W1)", 0.3 }, { "G !T0 & F W2", 0.7 } } );
}

BeliefSpec case_belief( int case_id )
{
  const auto v = grid_vocabulary();
  switch ( case_id )
  {
  case 1:
    return belief_of( v, { { "G !T0 & F W0 & F W1 & F W2", 0.6 },
                           { "G !T0 & F W0 & F W1", 0.25 },
                           { "G !T0 & F W0", 0.15 } } );
  case 2:
    return belief_of( v, { { "G !T0 & F W0", 0.6 },
                           { "G !T0 & F W0 & F W1", 0.25 },
                           { "G !T0 & F W0 & F W1 & F W2", 0.15 } } );
  case 3:
    return belief_of( v, { { "G !T0 & F W0", 0.4 }, { "G !T0 & F W1", 0.25 }, { "G !T0 & F W2", 0.35 } } );
  case 4:
    return belief_of( v, { { "G !T0 & G !W2 & F W1", 0.05 },
                           { "G !T0 & G !W2 & F W0", 0.15 },
                           { "G !T0 & F W2", 0.8 } } );
  default:
    throw ValidationError( "unknown case " + std::to_string( case_id ) + "; expected 1 to 4" );
  }
}

BeliefSpec dinner_surrogate_belief()
{
  const auto all = [&]( std::initializer_list<std::string> constraints ) {
    std::string text = dinner_all;
    for ( const auto& c : constraints )
      text += " & " + c;
    return text;
  };
  return belief_of( make_vocabulary( dinner_objects() ), { { all( { c1 } ), 0.30 },
                                                           { all( { c1, c3 } ), 0.20 },
                                                           { all( { c2 } ), 0.15 },
                                                           { all( { c1, c2 } ), 0.14 },
                                                           { all( { c1, c2, c3 } ), 0.12 },
                                                           { all( { c1, c2, c4 } ), 0.09 } } );
}

ltl::Formula dinner_ground_truth()
{
  return ltl::to_nnf( ltl::parse( dinner_all + " & " + c1 + " & " + c2 ) );
}

RewardStats reward_stats( const std::vector<double>& rewards )
{
  RewardStats s;
  s.median = quantile( rewards, 0.5 );
  s.q25 = quantile( rewards, 0.25 );
  s.q75 = quantile( rewards, 0.75 );
  s.mean = rewards.empty() ? 0.0 : std::accumulate( rewards.begin(), rewards.end(), 0.0 ) / double( rewards.size() );
  return s;
}

std::vector<TruthAssignment> episode_trace( const Environment& env, const Episode& episode )
{
  std::vector<TruthAssignment> trace;
  for ( std::size_t i = 1; i < episode.states.size(); ++i )
    trace.push_back( env.label( episode.states[i] ) );
  return trace;
}

std::vector<std::size_t> rising_order( const Environment& env, const Episode& episode )
{
  std::vector<std::size_t> order;
  for ( std::size_t i = 1; i < episode.states.size(); ++i )
  {
    const AssignmentBits rose = env.label_bits( episode.states[i] ) & ~env.label_bits( episode.states[i - 1] );
    for ( std::size_t p = 0; p < env.vocabulary()->size(); ++p )
      if ( rose >> p & 1u )
        order.push_back( p );
  }
  return order;
}

RunMetrics compute_metrics( const Environment& env, const SpecMachine& m, const std::vector<Episode>& episodes,
                            const std::optional<ltl::Formula>& ground_truth )
{
  RunMetrics metrics;
  metrics.episodes = episodes.size();
  metrics.machine_states = m.num_states();
  for ( const auto& c : m.components() )
    metrics.formulas.push_back( c.formula.text() );
  const std::size_t k = env.vocabulary()->size();
  std::vector<std::size_t> visits( k, 0 );
  std::set<std::vector<std::size_t>> orders;
  std::vector<double> rewards;
  for ( const auto& ep : episodes )
  {
    rewards.push_back( ep.reward );
    orders.insert( rising_order( env, ep ) );
    AssignmentBits seen = 0;
    for ( std::size_t i = 1; i < ep.states.size(); ++i )
      seen |= env.label_bits( ep.states[i] );
    for ( std::size_t p = 0; p < k; ++p )
      visits[p] += seen >> p & 1u;

    const auto trace = episode_trace( env, ep );
    if ( !ground_truth || trace.empty() )
    {
      ++metrics.undecided;
      continue;
    }
    switch ( ltl::evaluate_trace( *ground_truth, trace ) )
    {
    case ltl::TraceVerdict::Satisfied:
      ++metrics.successes;
      break;
    case ltl::TraceVerdict::Violated:
      ++metrics.violations;
      break;
    case ltl::TraceVerdict::Undecided:
      ++metrics.undecided;
      break;
    }
  }
  metrics.unique_orderings = episodes.empty() ? 0 : orders.size();
  metrics.rewards = reward_stats( rewards );
  for ( auto v : visits )
    metrics.visit_rate.push_back( episodes.empty() ? 0.0 : double( v ) / double( episodes.size() ) );
  return metrics;
}

std::string exploration_dot( const Environment& env, const std::vector<Episode>& episodes )
{
  std::map<std::tuple<EnvState, ActionId, EnvState>, std::size_t> edges;
  std::set<EnvState> nodes;
  for ( const auto& ep : episodes )
  {
    if ( !ep.states.empty() )
      nodes.insert( ep.states.front() );
    for ( std::size_t i = 0; i < ep.actions.size(); ++i )
    {
      ++edges[{ ep.states[i], ep.actions[i], ep.states[i + 1] }];
      nodes.insert( ep.states[i + 1] );
    }
  }
  std::ostringstream out;
  out << "digraph exploration {\n  rankdir=LR;\n";
  for ( auto x : nodes )
  {
    out << "  x" << x << " [label=\"" << env.state_name( x ) << "\"";
    if ( x == env.initial() )
      out << ", penwidth=2";
    if ( env.env_terminal( x ) )
      out << ", style=filled, fillcolor=gray80";
    out << "];\n";
  }
  for ( const auto& [edge, count] : edges )
  {
    const auto& [x, a, y] = edge;
    out << "  x" << x << " -> x" << y << " [label=\"" << env.action_name( a ) << " (" << count << ")\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string metrics_to_json( const Environment& env, const RunMetrics& metrics )
{
  json visits = json::object();
  for ( std::size_t p = 0; p < metrics.visit_rate.size(); ++p )
    visits[env.vocabulary()->name( p )] = metrics.visit_rate[p];
  json doc = { { "episodes", metrics.episodes },
               { "successes", metrics.successes },
               { "violations", metrics.violations },
               { "undecided", metrics.undecided },
               { "unique_orderings", metrics.unique_orderings },
               { "reward",
                 { { "median", metrics.rewards.median },
                   { "q25", metrics.rewards.q25 },
                   { "q75", metrics.rewards.q75 },
                   { "mean", metrics.rewards.mean } } },
               { "machine_states", metrics.machine_states },
               { "formulas", metrics.formulas },
               { "visit_rate", visits } };
  return doc.dump( 2 );
}

TrainConfig grid_protocol()
{
  TrainConfig cfg;
  cfg.episodes = 50000;
  cfg.horizon = grid5_horizon;
  cfg.train_policy = PolicyConfig::epsilon_greedy( 0.3 );
  cfg.eval_policy = PolicyConfig::softmax( 0.02 );
  cfg.gamma = 0.95;
  cfg.lr = 0.02;
  cfg.counterfactual = true;
  return cfg;
}

TrainConfig dinner_protocol()
{
  TrainConfig cfg;
  cfg.episodes = 3000;
  cfg.horizon = dinner_horizon;
  cfg.train_policy = PolicyConfig::epsilon_greedy( 0.3 );
  cfg.eval_policy = PolicyConfig::softmax( 0.01 );
  cfg.eval_episodes = 50;
  cfg.gamma = 0.95;
  cfg.lr = 0.1;
  cfg.counterfactual = true;
  return cfg;
}

bool CaseReport::passed() const
{
  return std::all_of( checks.begin(), checks.end(), []( const CheckResult& c ) { return c.passed; } );
}

std::vector<TrainResult> train_replications( const Environment& env, const SpecMachine& m, const TrainConfig& cfg,
                                             const std::vector<std::uint64_t>& seeds )
{
  std::vector<std::optional<TrainResult>> slots( seeds.size() );
  std::vector<std::exception_ptr> errors( seeds.size() );
  {
    std::vector<std::jthread> workers;
    for ( std::size_t i = 0; i < seeds.size(); ++i )
      workers.emplace_back( [&, i] {
        try
        {
          TrainConfig c = cfg;
          c.seed = seeds[i];
          slots[i].emplace( train( env, m, c ) );
        }
        catch ( ... )
        {
          errors[i] = std::current_exception();
        }
      } );
  }
  std::vector<TrainResult> results;
  for ( std::size_t i = 0; i < seeds.size(); ++i )
  {
    if ( errors[i] )
      std::rethrow_exception( errors[i] );
    results.push_back( std::move( *slots[i] ) );
  }
  return results;
}

namespace {

CheckResult rate_check( const Environment& env, const RunMetrics& metrics, const std::string& prop, double lo,
                        double hi )
{
  const auto idx = env.vocabulary()->index_of( prop );
  const double rate = metrics.visit_rate.at( *idx );
  std::string name = prop;
  if ( lo == 1.0 )
    name = "always visits " + prop;
  else if ( hi == 0.0 )
    name = "never visits " + prop;
  std::ostringstream detail;
  detail << "visit rate " << rate;
  return { name, rate >= lo && rate <= hi, detail.str() };
}

} // namespace

CaseReport run_case( int case_id, const Criterion& criterion, const std::vector<std::uint64_t>& seeds,
                     int eval_episodes, const TrainConfig& protocol )
{
  CaseReport report;
  report.case_id = case_id;
  report.criterion = criterion;
  const auto env = build_grid5();
  const auto m = compile_spec( case_belief( case_id ), criterion );
  const Product product( env, m, protocol.terminate_on_decided );
  const auto trained = train_replications( env, m, protocol, seeds );
  for ( std::size_t i = 0; i < seeds.size(); ++i )
  {
    std::seed_seq seq{ seeds[i], std::uint64_t{ 2 } };
    Rng rng( seq );
    auto stats = evaluate( product, trained[i].q, protocol.eval_policy, eval_episodes, protocol.horizon, rng );
    for ( auto& ep : stats.episodes )
      report.episodes.push_back( std::move( ep ) );
  }
  report.metrics = compute_metrics( env, m, report.episodes, std::nullopt );
  const auto& mt = report.metrics;

  report.checks.push_back( rate_check( env, mt, "T0", 0.0, 0.0 ) );
  const auto kind = criterion.kind;
  if ( case_id == 4 )
  {
    if ( kind == CriterionKind::MaxCoverage )
    {
      report.checks.push_back( rate_check( env, mt, "W2", 0.0, 0.0 ) );
      report.checks.push_back( rate_check( env, mt, "W0", 1.0, 1.0 ) );
      report.checks.push_back( rate_check( env, mt, "W1", 1.0, 1.0 ) );
    }
    else
      report.checks.push_back( rate_check( env, mt, "W2", 1.0, 1.0 ) );
    return report;
  }

  if ( case_id == 3 )
  {
    std::vector<std::string> required = { "W0", "W1", "W2" };
    if ( kind == CriterionKind::MostLikely )
      required = { "W0" };
    else if ( kind == CriterionKind::ChanceConstrained )
      required = { "W0", "W2" };
    for ( const auto& p : required )
      report.checks.push_back( rate_check( env, mt, p, 1.0, 1.0 ) );
  }

  // Every compiled component can be satisfied together here.
  std::size_t satisfied = 0;
  for ( const auto& ep : report.episodes )
  {
    const auto trace = episode_trace( env, ep );
    bool all = !trace.empty();
    for ( const auto& c : m.components() )
      all = all && ltl::evaluate_trace( c.formula, trace ) == ltl::TraceVerdict::Satisfied;
    satisfied += all;
  }
  report.checks.push_back( { "satisfies every compiled formula", satisfied == report.episodes.size(),
                             std::to_string( satisfied ) + " of " + std::to_string( report.episodes.size() ) } );
  return report;
}

} // namespace beliefrl
