#include <beliefrl/errors.hpp>
#include <beliefrl/parser.hpp>
#include <beliefrl/product.hpp>

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <numeric>

using namespace beliefrl;

namespace {

BeliefSpec belief_of( const VocabularyPtr& vocab, std::vector<std::pair<std::string, double>> items )
{
  std::vector<BeliefEntry> entries;
  for ( const auto& [text, p] : items )
    entries.push_back( { ltl::parse( text ), p } );
  return validate( BeliefSpec( vocab, std::move( entries ) ) );
}

EnvState grid_state( const Environment& env, const std::string& name )
{
  for ( EnvState x = 0; x < env.num_states(); ++x )
    if ( env.state_name( x ) == name )
      return x;
  throw std::logic_error( "no state " + name );
}

ActionId grid_goto( const Environment& env, const std::string& target )
{
  for ( ActionId a = 0; a < env.num_actions(); ++a )
    if ( env.action_name( a ) == "goto-" + target )
      return a;
  throw std::logic_error( "no action " + target );
}

} // namespace

TEST_CASE( "grid5 model" )
{
  const auto env = build_grid5();
  Rng rng( 1 );
  CHECK( env.num_states() == 5 );
  CHECK( env.state_name( env.initial( rng ) ) == "S" );
  CHECK( env.actions( env.initial() ).size() == 4 );
  CHECK( env.default_horizon() == 25 );
  for ( int i = 0; i < 20; ++i )
    CHECK( env.sample_next( env.initial(), grid_goto( env, "W0" ), rng ) == grid_state( env, "W0" ) );
  CHECK( env.label( grid_state( env, "W1" ) ) ==
         TruthAssignment::from_values( env.vocabulary(), { { "W1", true } } ) );
  CHECK( env.label_bits( env.initial() ) == 0 );
  for ( EnvState x = 0; x < 5; ++x )
  {
    CHECK_FALSE( env.env_terminal( x ) );
    for ( ActionId a = 0; a < 4; ++a )
      CHECK( env.sample_next( x, a, rng ) == a + 1 );
  }
  CHECK_THROWS_AS( env.sample_next( 0, 4, rng ), ValidationError );
}

TEST_CASE( "property: grid5 occupies exactly one node per step" )
{
  const auto env = build_grid5();
  Rng rng( 2 );
  for ( int episode = 0; episode < 200; ++episode )
  {
    EnvState x = env.initial();
    for ( int t = 0; t < 25; ++t )
    {
      const auto& actions = env.actions( x );
      const EnvState y = env.sample_next( x, actions[rng() % actions.size()], rng );
      const auto before = env.label_bits( x ), after = env.label_bits( y );
      REQUIRE( std::popcount( after ) == 1 );
      REQUIRE( std::popcount( before ^ after ) <= 2 );
      x = y;
    }
  }
}

TEST_CASE( "dinner model" )
{
  const auto env = build_dinner();
  CHECK( env.num_states() == 256 );
  CHECK( env.num_actions() == 8 );
  CHECK( env.vocabulary()->names() == dinner_objects() );
  CHECK( env.default_horizon() == 50 );
  const auto& d = env.transition_distribution( 0, 0 );
  REQUIRE( d.size() == 2 );
  CHECK( d[0].prob == doctest::Approx( 0.8 ) );
  CHECK( env.env_terminal( 255 ) );
  CHECK_FALSE( env.env_terminal( 254 ) );

  // Re-placing is a certain no-op.
  const auto& again = env.transition_distribution( 0b101, 2 );
  REQUIRE( again.size() == 1 );
  CHECK( again[0].next == 0b101 );
  CHECK( again[0].prob == 1.0 );

  CHECK_THROWS_AS( build_dinner( 50, 0.0 ), ValidationError );
  CHECK_THROWS_AS( build_dinner( 50, 1.5 ), ValidationError );
  CHECK_THROWS_AS( build_dinner( 0, 0.8 ), ValidationError );
}

TEST_CASE( "property: dinner placements are monotone" )
{
  Rng rng( 3 );
  const auto env = build_dinner();
  for ( int episode = 0; episode < 200; ++episode )
  {
    EnvState x = env.initial();
    for ( int t = 0; t < 50 && !env.env_terminal( x ); ++t )
    {
      const EnvState y = env.sample_next( x, static_cast<ActionId>( rng() % 8 ), rng );
      REQUIRE( ( x & ~y ) == 0 );
      REQUIRE( std::popcount( y ) - std::popcount( x ) <= 1 );
      x = y;
    }
  }
  const auto sure = build_dinner( 50, 1.0 );
  for ( int episode = 0; episode < 50; ++episode )
  {
    std::vector<ActionId> order( 8 );
    std::iota( order.begin(), order.end(), 0 );
    std::shuffle( order.begin(), order.end(), rng );
    EnvState x = sure.initial();
    for ( std::size_t i = 0; i < 8; ++i )
    {
      REQUIRE_FALSE( sure.env_terminal( x ) );
      x = sure.sample_next( x, order[i], rng );
    }
    REQUIRE( sure.env_terminal( x ) );
  }
}

TEST_CASE( "dinner success frequency" )
{
  Rng rng( 4 );
  const auto env = build_dinner();
  int successes = 0;
  const int n = 20000;
  for ( int i = 0; i < n; ++i )
    successes += env.sample_next( 0, 3, rng ) != 0;
  CHECK( successes / double( n ) == doctest::Approx( 0.8 ).epsilon( 0.02 ) );
}

TEST_CASE( "valid_order_count" )
{
  // Brute force over all 8! sequences.
  std::vector<int> perm( 8 );
  std::iota( perm.begin(), perm.end(), 0 );
  std::uint64_t brute = 0;
  do
  {
    std::vector<int> pos( 8 );
    for ( int i = 0; i < 8; ++i )
      pos[perm[i]] = i;
    brute += pos[0] < pos[1] && pos[1] < pos[2];
  } while ( std::next_permutation( perm.begin(), perm.end() ) );
  CHECK( brute == 6720 );
  CHECK( valid_order_count( { { 0, 1 }, { 1, 2 } }, 8 ) == brute );
  CHECK( valid_order_count( {}, 3 ) == 6 );
  CHECK( valid_order_count( { { 0, 1 }, { 1, 2 }, { 2, 3 } }, 4 ) == 1 );
  CHECK( valid_order_count( {}, 0 ) == 1 );
  CHECK_THROWS_AS( valid_order_count( { { 0, 1 }, { 1, 0 } }, 3 ), ValidationError );
  CHECK_THROWS_AS( valid_order_count( { { 2, 2 } }, 3 ), ValidationError );
  CHECK_THROWS_AS( valid_order_count( { { 0, 5 } }, 3 ), ValidationError );
}

TEST_CASE( "property: valid_order_count matches enumeration" )
{
  Rng rng( 5 );
  for ( int i = 0; i < 100; ++i )
  {
    const std::size_t n = 1 + rng() % 6;
    std::vector<std::pair<std::size_t, std::size_t>> order;
    // Edges drawn along a hidden permutation stay acyclic.
    std::vector<std::size_t> hidden( n );
    std::iota( hidden.begin(), hidden.end(), 0 );
    std::shuffle( hidden.begin(), hidden.end(), rng );
    for ( std::size_t a = 0; a < n; ++a )
      for ( std::size_t b = a + 1; b < n; ++b )
        if ( rng() % 3 == 0 )
          order.emplace_back( hidden[a], hidden[b] );
    std::vector<std::size_t> perm( n );
    std::iota( perm.begin(), perm.end(), 0 );
    std::uint64_t brute = 0;
    do
    {
      std::vector<std::size_t> pos( n );
      for ( std::size_t k = 0; k < n; ++k )
        pos[perm[k]] = k;
      brute += std::all_of( order.begin(), order.end(), [&]( auto e ) { return pos[e.first] < pos[e.second]; } );
    } while ( std::next_permutation( perm.begin(), perm.end() ) );
    REQUIRE( valid_order_count( order, n ) == brute );
  }
}

TEST_CASE( "tabular environments from JSON" )
{
  const auto env = parse_environment_json( R"J({
    "name": "corridor",
    "propositions": ["goal", "hazard"],
    "actions": ["left", "right"],
    "states": [{"name": "a"}, {"name": "b", "labels": ["hazard"]}, {"name": "c", "labels": ["goal"], "terminal": true}],
    "initial": "a",
    "horizon": 7,
    "transitions": [["a", "right", "b", 1.0], ["b", "right", "c", 0.5], ["b", "right", "b", 0.5],
                    ["b", "left", "a", 1.0]]
  })J" );
  CHECK( env.name() == "corridor" );
  CHECK( env.num_states() == 3 );
  CHECK( env.default_horizon() == 7 );
  CHECK( env.actions( 0 ) == std::vector<ActionId>{ 1 } );
  CHECK( env.actions( 1 ).size() == 2 );
  CHECK( env.actions( 2 ).empty() );
  CHECK( env.env_terminal( 2 ) );
  CHECK( env.label( 1 ).value( "hazard" ) );
  Rng rng( 6 );
  CHECK_THROWS_AS( env.sample_next( 0, 0, rng ), ValidationError );

  CHECK_THROWS_AS( parse_environment_json( "[]" ), ValidationError );
  CHECK_THROWS_AS( parse_environment_json( "{" ), ValidationError );
  const char* bad_sum = R"J({"propositions": [], "actions": ["go"], "states": [{"name": "a"}], "initial": "a",
    "transitions": [["a", "go", "a", 0.5]]})J";
  CHECK_THROWS_AS( parse_environment_json( bad_sum ), ValidationError );
  const char* stuck = R"J({"propositions": [], "actions": ["go"], "states": [{"name": "a"}], "initial": "a"})J";
  CHECK_THROWS_AS( parse_environment_json( stuck ), ValidationError );
  const char* unknown = R"J({"propositions": [], "actions": [], "states": [{"name": "a", "terminal": true}],
    "initial": "a", "extra": 1})J";
  CHECK_THROWS_AS( parse_environment_json( unknown ), ValidationError );
  const char* bad_label = R"J({"propositions": ["p"], "actions": [], "states": [{"name": "a", "labels": ["q"],
    "terminal": true}], "initial": "a"})J";
  CHECK_THROWS_AS( parse_environment_json( bad_label ), ValidationError );
  CHECK_THROWS_AS( environment_by_name( "/nonexistent/env.json" ), ValidationError );
  CHECK( environment_by_name( "grid5" ).name() == "grid5" );
  CHECK( environment_by_name( "dinner" ).name() == "dinner" );
}

TEST_CASE( "product step: example machine on grid5" )
{
  const auto env = build_grid5();
  const auto vocab = make_vocabulary( { "T0", "W1", "W2" } );
  const auto m = compile_spec( belief_of( vocab, { { "G !T0 & F W2 & (!W2 U W1)", 0.3 }, { "G !T0 & F W2", 0.7 } } ),
                               Criterion::min_regret() );
  const Product product( env, m );
  Rng rng( 7 );
  const auto s0 = product.initial( rng );
  CHECK( s0 == ProductState{ m.initial(), 0 } );

  const auto w2 = product.step( s0, grid_goto( env, "W2" ), rng );
  CHECK( m.label( w2.next.u ) == "<false, G !T0>" );
  CHECK( w2.reward == doctest::Approx( 0.4 ).epsilon( 1e-12 ) );
  CHECK( w2.done );

  const auto w1 = product.step( s0, grid_goto( env, "W1" ), rng );
  CHECK_FALSE( w1.done );
  CHECK( w1.reward == 0.0 );
  const auto then = product.step( w1.next, grid_goto( env, "W2" ), rng );
  CHECK( then.reward == doctest::Approx( 1.0 ) );
  CHECK( then.done );

  const auto t0 = product.step( s0, grid_goto( env, "T0" ), rng );
  CHECK( t0.reward == -1.0 );
  CHECK( t0.done );
}

TEST_CASE( "product step: Case 3 machine falsified by T0" )
{
  const auto env = build_grid5();
  const auto m = compile_spec(
      belief_of( env.vocabulary(), { { "G !T0 & F W0", 0.4 }, { "G !T0 & F W1", 0.25 }, { "G !T0 & F W2", 0.35 } } ),
      Criterion::min_regret() );
  const Product product( env, m );
  Rng rng( 8 );
  const auto step = product.step( product.initial( rng ), grid_goto( env, "T0" ), rng );
  CHECK( step.reward == doctest::Approx( -1.0 ) );
  CHECK( step.done );
}

TEST_CASE( "product step: truncation and terminate-on-decided=false" )
{
  const auto env = build_grid5();
  const auto m = compile_spec(
      belief_of( env.vocabulary(), { { "G !T0 & F W0", 0.5 }, { "G !T0 & F W1", 0.5 } } ), Criterion::max_coverage() );
  Rng rng( 9 );
  {
    const Product product( env, m );
    auto s = product.step( product.initial( rng ), grid_goto( env, "W0" ), rng );
    CHECK_FALSE( s.done );
    CHECK( s.reward == 0.0 );
    // The horizon ends the episode with W1 still pending.
    const auto last = product.step( s.next, grid_goto( env, "W0" ), rng, true );
    CHECK( last.done );
    CHECK( last.reward == 1.0 );
  }
  {
    const Product product( env, m, false );
    auto s = product.step( product.initial( rng ), grid_goto( env, "W0" ), rng );
    s = product.step( s.next, grid_goto( env, "W1" ), rng );
    CHECK( m.terminal( s.next.u ) );
    CHECK_FALSE( s.done );
    CHECK( s.reward == 0.0 );
    s = product.step( s.next, grid_goto( env, "T0" ), rng );
    CHECK_FALSE( s.done );
    const auto last = product.step( s.next, grid_goto( env, "W0" ), rng, true );
    CHECK( last.done );
    CHECK( last.reward == -2.0 );
  }
}

TEST_CASE( "property: at most one nonzero reward per episode" )
{
  const auto env = build_grid5();
  Rng rng( 10 );
  const auto m = compile_spec(
      belief_of( env.vocabulary(), { { "G !T0 & F W0", 0.4 }, { "G !T0 & F W1", 0.25 }, { "G !T0 & F W2", 0.35 } } ),
      Criterion::min_regret() );
  for ( bool terminate : { true, false } )
  {
    const Product product( env, m, terminate );
    for ( int episode = 0; episode < 300; ++episode )
    {
      auto s = product.initial( rng );
      int nonzero = 0;
      for ( int t = 0; t < 25; ++t )
      {
        const auto step = product.step( s, static_cast<ActionId>( rng() % 4 ), rng, t == 24 );
        nonzero += step.reward != 0.0;
        s = step.next;
        if ( step.done )
          break;
        REQUIRE( t < 24 );
      }
      REQUIRE( nonzero <= 1 );
    }
  }
}

TEST_CASE( "product: vocabulary projection" )
{
  const auto env = build_grid5();
  const auto vocab = make_vocabulary( { "W2", "Q" } );
  const auto m = compile_spec( belief_of( vocab, { { "F Q", 1.0 } } ), Criterion::min_regret() );
  CHECK_THROWS_AS( Product( env, m ), ValidationError );

  const auto reordered = make_vocabulary( { "W2", "T0" } );
  const auto m2 = compile_spec( belief_of( reordered, { { "F W2", 1.0 } } ), Criterion::min_regret() );
  const Product p( env, m2 );
  CHECK( p.letter( grid_state( env, "W2" ) ) == 0b01 );
  CHECK( p.letter( grid_state( env, "T0" ) ) == 0b10 );
  CHECK( p.letter( grid_state( env, "W0" ) ) == 0 );
}

TEST_CASE( "seeded trajectories are reproducible" )
{
  const auto env = build_dinner();
  auto run = []( const Environment& e, std::uint64_t seed ) {
    Rng rng( seed );
    std::vector<EnvState> xs;
    EnvState x = e.initial( rng );
    for ( int t = 0; t < 40; ++t )
    {
      x = e.sample_next( x, static_cast<ActionId>( rng() % 8 ), rng );
      xs.push_back( x );
    }
    return xs;
  };
  CHECK( run( env, 11 ) == run( env, 11 ) );
  CHECK( run( env, 11 ) != run( env, 12 ) );
}
