#include <beliefrl/errors.hpp>
#include <beliefrl/experiments.hpp>
#include <beliefrl/parser.hpp>

#include <doctest.h>

#include <set>

using namespace beliefrl;

TEST_CASE( "case beliefs are valid over the grid vocabulary" )
{
  for ( int id = 1; id <= 4; ++id )
  {
    const auto b = case_belief( id );
    CHECK( b.vocabulary()->size() == 4 );
    double total = 0.0;
    for ( const auto& e : b.entries() )
      total += e.prob;
    CHECK( total == doctest::Approx( 1.0 ) );
  }
  CHECK_THROWS_AS( case_belief( 0 ), ValidationError );
  CHECK_THROWS_AS( case_belief( 5 ), ValidationError );
}

TEST_CASE( "dinner ground truth is the fourth most likely hypothesis" )
{
  const auto sorted = sorted_by_mass( dinner_surrogate_belief() );
  REQUIRE( sorted.size() >= 4 );
  CHECK( sorted[3].formula == dinner_ground_truth() );
}

TEST_CASE( "metrics partition the episodes" )
{
  const auto env = build_dinner();
  const auto m = compile_spec( dinner_surrogate_belief(), Criterion::min_regret() );
  auto cfg = dinner_protocol();
  cfg.episodes = 300;
  const auto trained = train( env, m, cfg );
  const Product product( env, m );
  Rng rng( 5 );
  const auto stats = evaluate( product, trained.q, cfg.eval_policy, 60, cfg.horizon, rng );
  const auto metrics = compute_metrics( env, m, stats.episodes, dinner_ground_truth() );
  CHECK( metrics.episodes == 60 );
  CHECK( metrics.successes + metrics.violations + metrics.undecided == metrics.episodes );
  CHECK( metrics.unique_orderings <= metrics.episodes );
  CHECK( metrics.unique_orderings >= 1 );
  CHECK( metrics.visit_rate.size() == env.vocabulary()->size() );
  for ( double r : metrics.visit_rate )
  {
    CHECK( r >= 0.0 );
    CHECK( r <= 1.0 );
  }

  const auto without = compute_metrics( env, m, stats.episodes, std::nullopt );
  CHECK( without.undecided == without.episodes );
  CHECK( without.unique_orderings == metrics.unique_orderings );
}

TEST_CASE( "rising order and trace of a hand-built episode" )
{
  const auto env = build_grid5();
  Episode ep;
  ep.states = { env.initial(), 2, 3, 2, 4 };
  ep.actions = { 1, 2, 1, 3 };
  const auto trace = episode_trace( env, ep );
  CHECK( trace.size() == 4 );
  const auto order = rising_order( env, ep );
  const auto& vocab = *env.vocabulary();
  REQUIRE( order.size() == 4 );
  CHECK( order[0] == *vocab.index_of( "W0" ) );
  CHECK( order[1] == *vocab.index_of( "W1" ) );
  CHECK( order[2] == *vocab.index_of( "W0" ) );
  CHECK( order[3] == *vocab.index_of( "W2" ) );
}

TEST_CASE( "successful dinner orderings never exceed the valid order count" )
{
  const auto env = build_dinner();
  const auto m = compile_spec( dinner_surrogate_belief(), Criterion::chance_constrained( 0.3 ) );
  auto cfg = dinner_protocol();
  cfg.episodes = 1000;
  const auto trained = train( env, m, cfg );
  const Product product( env, m );
  Rng rng( 9 );
  const auto stats = evaluate( product, trained.q, cfg.eval_policy, 200, cfg.horizon, rng );
  std::set<std::vector<std::size_t>> successful;
  const auto truth = dinner_ground_truth();
  for ( const auto& ep : stats.episodes )
    if ( ltl::evaluate_trace( truth, episode_trace( env, ep ) ) == ltl::TraceVerdict::Satisfied )
      successful.insert( rising_order( env, ep ) );
  CHECK( successful.size() <= 6720 );
  CHECK( successful.size() <= stats.episodes.size() );
}

TEST_CASE( "exploration graph" )
{
  const auto env = build_grid5();
  Episode ep;
  ep.states = { env.initial(), 2, 4, 4 };
  ep.actions = { 1, 3, 3 };
  const auto dot = exploration_dot( env, { ep, ep } );
  CHECK( dot.rfind( "digraph", 0 ) == 0 );
  CHECK( dot.find( "goto-W0 (2)" ) != std::string::npos );
  CHECK( dot.find( "goto-W2 (2)" ) != std::string::npos );
  CHECK( dot.find( "T0" ) == std::string::npos );
}

TEST_CASE( "reward statistics" )
{
  const auto s = reward_stats( { 1.0, 2.0, 3.0, 4.0 } );
  CHECK( s.median == doctest::Approx( 2.5 ) );
  CHECK( s.q25 == doctest::Approx( 1.75 ) );
  CHECK( s.q75 == doctest::Approx( 3.25 ) );
  CHECK( s.mean == doctest::Approx( 2.5 ) );
}
