#include <beliefrl/errors.hpp>
#include <beliefrl/experiments.hpp>
#include <beliefrl/parser.hpp>
#include <beliefrl/rewrite.hpp>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace beliefrl;

namespace {

constexpr int exit_validation = 2;
constexpr int exit_assertion = 3;

std::string sha256_hex( const std::string& data )
{
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest( data.data(), data.size(), digest, &length, EVP_sha256(), nullptr );
  std::ostringstream out;
  for ( unsigned int i = 0; i < length; ++i )
    out << std::hex << std::setw( 2 ) << std::setfill( '0' ) << int( digest[i] );
  return out.str();
}

std::string read_file( const fs::path& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw ValidationError( "cannot read " + path.string() );
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Collects the files a command writes and records them in manifest.json.
class Artifacts
{
public:
  Artifacts( fs::path dir, std::vector<std::string> command ) : dir_( std::move( dir ) ), command_( std::move( command ) )
  {
    std::error_code ec;
    fs::create_directories( dir_, ec );
    if ( ec || !fs::is_directory( dir_ ) )
      throw ValidationError( "output directory " + dir_.string() + " is not writable" );
  }

  void write( const std::string& name, const std::string& content )
  {
    std::ofstream out( dir_ / name, std::ios::binary );
    out << content;
    if ( !out )
      throw ValidationError( "cannot write " + ( dir_ / name ).string() );
    hashes_[name] = sha256_hex( content );
  }

  void finish( const json& config )
  {
    json doc = { { "command", command_ }, { "config", config }, { "artifacts", hashes_ } };
    std::ofstream( dir_ / "manifest.json" ) << doc.dump( 2 ) << "\n";
  }

  const fs::path& dir() const { return dir_; }

private:
  fs::path dir_;
  std::vector<std::string> command_;
  std::map<std::string, std::string> hashes_;
};

BeliefSpec resolve_belief( const std::string& spec )
{
  if ( spec == "example" )
    return example_belief();
  if ( spec == "dinner" )
    return dinner_surrogate_belief();
  if ( spec.size() == 5 && spec.rfind( "case", 0 ) == 0 && spec[4] >= '1' && spec[4] <= '4' )
    return case_belief( spec[4] - '0' );
  return load_belief_file( spec );
}

struct CommonOptions
{
  std::string belief;
  std::string criterion = "min-regret";
  double delta = 0.0;
  std::string env;
  std::string out = ".";
  std::string ground_truth;

  Criterion make_criterion() const { return Criterion::from_name( criterion, delta ); }

  std::optional<ltl::Formula> make_ground_truth() const
  {
    if ( !ground_truth.empty() )
    {
      auto f = ltl::to_nnf( ltl::parse( ground_truth ) );
      if ( !ltl::is_obligation_class( f ) )
        throw ValidationError( "ground truth '" + f.text() + "' is not in the obligation class" );
      return f;
    }
    if ( belief == "dinner" )
      return dinner_ground_truth();
    return std::nullopt;
  }

  json to_json() const
  {
    return { { "belief", belief },     { "criterion", criterion }, { "delta", delta },
             { "env", env },           { "ground_truth", ground_truth } };
  }
};

struct TrainOptions
{
  std::optional<double> gamma, lr, epsilon, temperature;
  std::optional<int> episodes, horizon, eval_every, eval_episodes;
  std::uint64_t seed = 1;
  int replications = 1;
  std::string counterfactual = "on";
  std::string terminate = "true";

  TrainConfig make( const Environment& env ) const
  {
    TrainConfig cfg = env.name() == "grid5" ? grid_protocol() : env.name() == "dinner" ? dinner_protocol() : TrainConfig{};
    if ( gamma )
      cfg.gamma = *gamma;
    if ( lr )
      cfg.lr = *lr;
    if ( epsilon )
      cfg.train_policy = PolicyConfig::epsilon_greedy( *epsilon );
    if ( temperature )
      cfg.eval_policy = PolicyConfig::softmax( *temperature );
    if ( episodes )
      cfg.episodes = *episodes;
    if ( horizon )
      cfg.horizon = *horizon;
    if ( eval_every )
      cfg.eval_every = *eval_every;
    if ( eval_episodes )
      cfg.eval_episodes = *eval_episodes;
    cfg.seed = seed;
    cfg.counterfactual = counterfactual == "on";
    cfg.terminate_on_decided = terminate == "true";
    if ( replications < 1 )
      throw ValidationError( "replications must be at least 1" );
    cfg.validate();
    return cfg;
  }
};

json config_json( const TrainConfig& cfg, int replications )
{
  return { { "episodes", cfg.episodes },
           { "horizon", cfg.horizon },
           { "seed", cfg.seed },
           { "replications", replications },
           { "counterfactual", cfg.counterfactual },
           { "terminate_on_decided", cfg.terminate_on_decided },
           { "eval_every", cfg.eval_every },
           { "eval_episodes", cfg.eval_episodes },
           { "epsilon", cfg.train_policy.epsilon },
           { "temperature", cfg.eval_policy.temperature },
           { "gamma", cfg.gamma },
           { "lr", cfg.lr } };
}

void add_common( CLI::App* cmd, CommonOptions& o, bool needs_env )
{
  cmd->add_option( "--belief", o.belief, "belief JSON file, or example, case1..case4, dinner" )->required();
  cmd->add_option( "--criterion", o.criterion, "satisfaction criterion" )
      ->check( CLI::IsMember( { "most-likely", "max-coverage", "min-regret", "chance-constrained" } ) );
  cmd->add_option( "--delta", o.delta, "risk bound of chance-constrained" );
  cmd->add_option( "--out", o.out, "output directory" );
  if ( needs_env )
  {
    cmd->add_option( "--env", o.env, "grid5, dinner, or an environment JSON file" )->required();
    cmd->add_option( "--ground-truth", o.ground_truth, "LTL formula used for violation metrics" );
  }
}

void add_training( CLI::App* cmd, TrainOptions& t )
{
  cmd->add_option( "--gamma", t.gamma, "discount" );
  cmd->add_option( "--lr", t.lr, "learning rate" );
  cmd->add_option( "--epsilon", t.epsilon, "exploration rate of training" );
  cmd->add_option( "--temperature", t.temperature, "softmax temperature of evaluation" );
  cmd->add_option( "--episodes", t.episodes, "training episodes" );
  cmd->add_option( "--horizon", t.horizon, "episode length limit" );
  cmd->add_option( "--eval-every", t.eval_every, "episodes between evaluation checkpoints" );
  cmd->add_option( "--eval-episodes", t.eval_episodes, "episodes per evaluation" );
  cmd->add_option( "--seed", t.seed, "base seed; replicate r uses seed + r" );
  cmd->add_option( "--replications", t.replications, "independent runs" );
  cmd->add_option( "--counterfactual", t.counterfactual, "counterfactual updates" )->check( CLI::IsMember( { "on", "off" } ) );
  cmd->add_option( "--terminate-on-decided", t.terminate, "end episodes at decided machine states" )
      ->check( CLI::IsMember( { "true", "false" } ) );
}

std::string summary_json( const SpecMachine& m )
{
  double lo = 0.0, hi = 0.0;
  std::size_t terminal = 0;
  for ( StateId s = 0; s < m.num_states(); ++s )
  {
    lo = std::min( lo, m.reward( s ) );
    hi = std::max( hi, m.reward( s ) );
    terminal += m.terminal( s );
  }
  json formulas = json::array();
  for ( const auto& c : m.components() )
    formulas.push_back( { { "ltl", c.formula.text() }, { "prob", c.prob } } );
  return json{ { "criterion", m.criterion().name() },
               { "states", m.num_states() },
               { "terminal_states", terminal },
               { "formulas_included", m.components().size() },
               { "formulas", formulas },
               { "reward_range", { lo, hi } } }
      .dump( 2 );
}

int cmd_compile( const CommonOptions& o, const std::vector<std::string>& command )
{
  const auto m = compile_spec( resolve_belief( o.belief ), o.make_criterion() );
  Artifacts out( o.out, command );
  out.write( "machine.json", machine_to_json( m ) );
  out.write( "machine.dot", export_dot( m ) );
  const auto summary = summary_json( m );
  out.write( "summary.json", summary );
  out.finish( o.to_json() );
  std::cout << summary << "\n";
  return 0;
}

int cmd_train( const CommonOptions& o, const TrainOptions& t, const std::vector<std::string>& command )
{
  const auto env = environment_by_name( o.env );
  const auto m = compile_spec( resolve_belief( o.belief ), o.make_criterion() );
  const auto ground_truth = o.make_ground_truth();
  const auto cfg = t.make( env );
  std::vector<std::uint64_t> seeds;
  for ( int r = 0; r < t.replications; ++r )
    seeds.push_back( t.seed + std::uint64_t( r ) );
  const auto results = train_replications( env, m, cfg, seeds );

  Artifacts out( o.out, command );
  std::ostringstream csv;
  csv << "episode,replicate,eval_index,terminal_reward\n";
  json checkpoints = json::array();
  const std::size_t points = results.front().curve.size();
  for ( std::size_t k = 0; k < points; ++k )
  {
    std::vector<double> pooled;
    for ( std::size_t r = 0; r < results.size(); ++r )
    {
      const auto& point = results[r].curve[k];
      for ( std::size_t i = 0; i < point.rewards.size(); ++i )
      {
        csv << point.episode << ',' << r << ',' << i << ',' << point.rewards[i] << '\n';
        pooled.push_back( point.rewards[i] );
      }
    }
    const auto s = reward_stats( pooled );
    checkpoints.push_back(
        { { "episode", results.front().curve[k].episode }, { "median", s.median }, { "q25", s.q25 }, { "q75", s.q75 } } );
  }
  out.write( "curve.csv", csv.str() );
  out.write( "curve_summary.json", checkpoints.dump( 2 ) );

  const Product product( env, m, cfg.terminate_on_decided );
  std::vector<Episode> episodes;
  for ( std::size_t r = 0; r < results.size(); ++r )
  {
    out.write( "qtable-" + std::to_string( r ) + ".json", results[r].q.to_json() );
    std::seed_seq seq{ seeds[r], std::uint64_t{ 2 } };
    Rng rng( seq );
    for ( auto& ep : evaluate( product, results[r].q, cfg.eval_policy, cfg.eval_episodes, cfg.horizon, rng ).episodes )
      episodes.push_back( std::move( ep ) );
  }
  const auto metrics = compute_metrics( env, m, episodes, ground_truth );
  const auto metrics_text = metrics_to_json( env, metrics );
  out.write( "metrics.json", metrics_text );
  out.write( "exploration.dot", exploration_dot( env, episodes ) );
  auto config = o.to_json();
  config["training"] = config_json( cfg, t.replications );
  out.finish( config );
  std::cout << metrics_text << "\n";
  return 0;
}

int cmd_eval( const CommonOptions& o, const TrainOptions& t, const std::string& qtable, int episodes,
              const std::vector<std::string>& command )
{
  const auto env = environment_by_name( o.env );
  const auto m = compile_spec( resolve_belief( o.belief ), o.make_criterion() );
  const auto ground_truth = o.make_ground_truth();
  const auto cfg = t.make( env );
  const auto q = QTable::from_json( read_file( qtable ) );
  if ( q.machine_states() != m.num_states() || q.env_states() != env.num_states() ||
       q.num_actions() != env.num_actions() )
    throw ValidationError( "Q-table dimensions do not match the machine and environment" );
  const Product product( env, m, cfg.terminate_on_decided );
  Rng rng( cfg.seed );
  const auto stats = evaluate( product, q, cfg.eval_policy, episodes, cfg.horizon, rng );
  const auto metrics = compute_metrics( env, m, stats.episodes, ground_truth );

  Artifacts out( o.out, command );
  const auto metrics_text = metrics_to_json( env, metrics );
  out.write( "metrics.json", metrics_text );
  out.write( "exploration.dot", exploration_dot( env, stats.episodes ) );
  std::ostringstream traces;
  for ( const auto& ep : stats.episodes )
  {
    for ( std::size_t i = 0; i < ep.states.size(); ++i )
      traces << ( i ? " " : "" ) << env.state_name( ep.states[i] );
    traces << "\t" << ep.reward << "\n";
  }
  out.write( "episodes.tsv", traces.str() );
  auto config = o.to_json();
  config["qtable"] = qtable;
  config["episodes"] = episodes;
  config["seed"] = cfg.seed;
  config["temperature"] = cfg.eval_policy.temperature;
  out.finish( config );
  std::cout << metrics_text << "\n";
  return 0;
}

int cmd_case_suite( int case_id, const std::vector<std::string>& criteria, double delta, int seeds, int eval_episodes,
                    std::optional<int> episodes, const std::string& out_dir, const std::vector<std::string>& command )
{
  std::vector<int> ids = { case_id };
  if ( case_id == 0 )
    ids = { 1, 2, 3, 4 };
  auto protocol = grid_protocol();
  if ( episodes )
    protocol.episodes = *episodes;
  std::vector<std::uint64_t> seed_list;
  for ( int s = 1; s <= seeds; ++s )
    seed_list.push_back( std::uint64_t( s ) );

  std::optional<Artifacts> out;
  if ( !out_dir.empty() )
    out.emplace( out_dir, command );
  bool all = true;
  json report = json::array();
  for ( int id : ids )
    for ( const auto& name : criteria )
    {
      const auto c = Criterion::from_name( name, name == "chance-constrained" ? delta : 0.0 );
      const auto r = run_case( id, c, seed_list, eval_episodes, protocol );
      json checks = json::array();
      for ( const auto& check : r.checks )
      {
        std::cout << ( check.passed ? "PASS" : "FAIL" ) << "  case " << id << "  " << c.name() << "  " << check.name
                  << "  (" << check.detail << ")\n";
        checks.push_back( { { "name", check.name }, { "passed", check.passed }, { "detail", check.detail } } );
      }
      all = all && r.passed();
      report.push_back( { { "case", id }, { "criterion", c.name() }, { "passed", r.passed() }, { "checks", checks } } );
      if ( out )
        out->write( "case" + std::to_string( id ) + "-" + c.name() + ".dot", exploration_dot( build_grid5(), r.episodes ) );
    }
  if ( out )
  {
    out->write( "case_suite.json", report.dump( 2 ) );
    auto config = config_json( protocol, seeds );
    config["delta"] = delta;
    out->finish( config );
  }
  return all ? 0 : exit_assertion;
}

int run( const std::vector<std::string>& args );

int verify_manifest( const std::string& path, bool rerun )
{
  const auto doc = json::parse( read_file( path ) );
  const fs::path dir = fs::path( path ).parent_path();
  bool ok = true;
  for ( const auto& [name, hash] : doc.at( "artifacts" ).items() )
  {
    const bool same = fs::exists( dir / name ) && sha256_hex( read_file( dir / name ) ) == hash.get<std::string>();
    std::cout << ( same ? "ok        " : "MISMATCH  " ) << name << "\n";
    ok = ok && same;
  }
  if ( rerun )
  {
    const auto scratch = fs::temp_directory_path() / ( "beliefrl-rerun-" + doc.at( "artifacts" ).begin().value().get<std::string>().substr( 0, 12 ) );
    auto command = doc.at( "command" ).get<std::vector<std::string>>();
    bool replaced = false;
    for ( std::size_t i = 0; i + 1 < command.size(); ++i )
      if ( command[i] == "--out" )
      {
        command[i + 1] = scratch.string();
        replaced = true;
      }
    if ( !replaced )
    {
      command.push_back( "--out" );
      command.push_back( scratch.string() );
    }
    std::cout << "re-running into " << scratch.string() << "\n";
    command.insert( command.begin(), "beliefrl" );
    std::streambuf* saved = std::cout.rdbuf();
    std::ostringstream sink;
    std::cout.rdbuf( sink.rdbuf() );
    const int code = run( command );
    std::cout.rdbuf( saved );
    if ( code != 0 && code != exit_assertion )
      return code;
    const auto again = json::parse( read_file( scratch / "manifest.json" ) );
    const bool same = again.at( "artifacts" ) == doc.at( "artifacts" );
    std::cout << ( same ? "reproduced" : "NOT REPRODUCED" ) << "\n";
    ok = ok && same;
    fs::remove_all( scratch );
  }
  return ok ? 0 : exit_assertion;
}

int cmd_inspect( const std::string& formula, const std::string& belief, const std::string& criterion, double delta,
                 const std::string& manifest, bool rerun )
{
  if ( !manifest.empty() )
    return verify_manifest( manifest, rerun );
  if ( !formula.empty() )
  {
    const auto f = ltl::parse( formula );
    const auto nnf = ltl::to_nnf( f );
    std::cout << "canonical: " << f.text() << "\n"
              << "nnf:       " << nnf.text() << "\n"
              << "fragment:  " << ltl::to_string( ltl::classify_fragment( nnf ) ) << "\n"
              << "status:    " << ltl::to_string( ltl::terminal_status( nnf ) ) << "\n";
    if ( ltl::is_obligation_class( nnf ) )
    {
      std::vector<std::string> props;
      for ( const auto& p : nnf.propositions() )
        props.push_back( p );
      const auto m = compile_formula( nnf, make_vocabulary( props ) );
      std::cout << "states:    " << m.num_states() << "\n";
      for ( StateId s = 0; s < m.num_states(); ++s )
        std::cout << "  " << s << "  " << ltl::to_string( m.status( s ) ) << "  " << m.formula( s ).text() << "\n";
    }
  }
  if ( !belief.empty() )
  {
    const auto b = resolve_belief( belief );
    std::cout << belief_to_json( b ) << "\n";
    const auto c = Criterion::from_name( criterion, delta );
    std::cout << "most likely: " << most_likely( b ).text() << "\n";
    for ( const auto& e : criterion_components( b, c ) )
      std::cout << "included (" << c.name() << "): " << e.prob << "  " << e.formula.text() << "\n";
  }
  return 0;
}

int run( const std::vector<std::string>& args )
{
  CLI::App app{ "Compile beliefs over LTL formulas into reward machines and "
                "learn policies for them." };
  app.require_subcommand( 1 );

  CommonOptions common;
  TrainOptions training;

  auto* compile = app.add_subcommand( "compile", "compile a belief into a reward machine" );
  add_common( compile, common, false );

  auto* train = app.add_subcommand( "train", "train Q-learning agents on the product" );
  add_common( train, common, true );
  add_training( train, training );

  std::string qtable;
  int eval_episodes = 100;
  auto* eval = app.add_subcommand( "eval", "evaluate a trained Q-table" );
  add_common( eval, common, true );
  add_training( eval, training );
  eval->add_option( "--qtable", qtable, "Q-table JSON written by train" )->required();
  eval->add_option( "--runs", eval_episodes, "evaluation episodes" );

  int case_id = 0, seeds = 3, case_eval = 100;
  std::optional<int> case_episodes;
  double case_delta = 0.3;
  std::string case_out;
  std::vector<std::string> criteria = { "most-likely", "max-coverage", "min-regret", "chance-constrained" };
  auto* suite = app.add_subcommand( "case-suite", "train and check the grid cases" );
  suite->add_option( "--case", case_id, "case 1-4, or 0 for all" )->check( CLI::Range( 0, 4 ) );
  suite->add_option( "--criterion", criteria, "criteria to check" )
      ->check( CLI::IsMember( { "most-likely", "max-coverage", "min-regret", "chance-constrained" } ) );
  suite->add_option( "--delta", case_delta, "risk bound of chance-constrained" );
  suite->add_option( "--seeds", seeds, "seeds per case" )->check( CLI::PositiveNumber );
  suite->add_option( "--eval-episodes", case_eval, "evaluation episodes per seed" )->check( CLI::PositiveNumber );
  suite->add_option( "--episodes", case_episodes, "training episodes" );
  suite->add_option( "--out", case_out, "directory for the report and exploration graphs" );

  std::string formula, inspect_belief, manifest, inspect_criterion = "min-regret";
  double inspect_delta = 0.0;
  bool rerun = false;
  auto* inspect = app.add_subcommand( "inspect", "show formulas, beliefs, or verify a manifest" );
  inspect->add_option( "--formula", formula, "LTL formula" );
  inspect->add_option( "--belief", inspect_belief, "belief file or built-in name" );
  inspect->add_option( "--criterion", inspect_criterion, "criterion for the included formulas" );
  inspect->add_option( "--delta", inspect_delta, "risk bound of chance-constrained" );
  inspect->add_option( "--manifest", manifest, "manifest.json to verify" );
  inspect->add_flag( "--rerun", rerun, "re-run the recorded command and compare artifact hashes" );

  std::vector<std::string> reversed( args.rbegin(), args.rend() - 1 );
  try
  {
    app.parse( reversed );
  }
  catch ( const CLI::ParseError& e )
  {
    const int code = app.exit( e );
    return code == 0 ? 0 : exit_validation;
  }

  const std::vector<std::string> command( args.begin() + 1, args.end() );
  try
  {
    if ( *compile )
      return cmd_compile( common, command );
    if ( *train )
      return cmd_train( common, training, command );
    if ( *eval )
      return cmd_eval( common, training, qtable, eval_episodes, command );
    if ( *suite )
      return cmd_case_suite( case_id, criteria, case_delta, seeds, case_eval, case_episodes, case_out, command );
    return cmd_inspect( formula, inspect_belief, inspect_criterion, inspect_delta, manifest, rerun );
  }
  catch ( const ValidationError& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  }
  catch ( const CapacityError& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  }
  catch ( const json::exception& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  }
}

} // namespace

int main( int argc, char** argv )
{
  try
  {
    return run( std::vector<std::string>( argv, argv + argc ) );
  }
  catch ( const std::exception& e )
  {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
