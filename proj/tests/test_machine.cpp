#include <beliefrl/cover.hpp>
#include <beliefrl/errors.hpp>
#include <beliefrl/machine.hpp>
#include <beliefrl/parser.hpp>

#include "support/random_formula.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <regex>
#include <set>

using namespace beliefrl;
using ltl::parse;

namespace {

const auto fig1_vocab = make_vocabulary( { "T0", "W1", "W2" } );
const char* const phi1 = "G !T0 & F W2 & (!W2 U W1)";
const char* const phi2 = "G !T0 & F W2";

BeliefSpec belief_of( std::vector<std::pair<std::string, double>> items, VocabularyPtr vocab = fig1_vocab )
{
  std::vector<BeliefEntry> entries;
  for ( const auto& [text, p] : items )
    entries.push_back( { parse( text ), p } );
  return validate( BeliefSpec( std::move( vocab ), std::move( entries ) ) );
}

BeliefSpec fig1_belief()
{
  return belief_of( { { phi1, 0.3 }, { phi2, 0.7 } } );
}

AssignmentBits bits_of( const VocabularyPtr& v, std::initializer_list<std::pair<std::string_view, bool>> values )
{
  return TruthAssignment::from_values( v, values ).bits();
}

const std::vector<Criterion> all_criteria = { Criterion::most_likely(), Criterion::max_coverage(),
                                              Criterion::min_regret(), Criterion::chance_constrained( 0.3 ) };

BeliefSpec random_belief( testing::Rng& rng, const std::vector<std::string>& props, std::size_t max_formulas )
{
  std::uniform_real_distribution<double> unit( 0.05, 1.0 );
  const std::size_t n = 1 + testing::pick( rng, max_formulas );
  std::vector<BeliefEntry> entries;
  std::vector<double> w;
  for ( std::size_t i = 0; i < n; ++i )
  {
    entries.push_back( { testing::random_obligation( rng, 3, props ), 0.0 } );
    w.push_back( unit( rng ) );
  }
  const double total = std::accumulate( w.begin(), w.end(), 0.0 );
  for ( std::size_t i = 0; i < n; ++i )
    entries[i].prob = w[i] / total;
  return validate( BeliefSpec( make_vocabulary( props ), entries ) );
}

} // namespace

TEST_CASE( "compile_formula: example component sizes" )
{
  const auto m1 = compile_formula( parse( phi1 ), fig1_vocab );
  const auto m2 = compile_formula( parse( phi2 ), fig1_vocab );
  CHECK( m1.num_states() == 4 );
  CHECK( m2.num_states() == 3 );

  std::set<std::string> texts;
  for ( StateId s = 0; s < m2.num_states(); ++s )
    texts.insert( m2.formula( s ).text() );
  CHECK( texts == std::set<std::string>{ parse( phi2 ).text(), "G !T0", "false" } );

  const auto top = compile_formula( parse( "true" ), fig1_vocab );
  REQUIRE( top.num_states() == 1 );
  CHECK( top.reward( 0 ) == 1 );
  for ( AssignmentBits a = 0; a < 8; ++a )
    CHECK( top.next( 0, a ) == 0 );
}

TEST_CASE( "compile_formula: errors" )
{
  CHECK_THROWS_AS( compile_formula( parse( "G F W1" ), fig1_vocab ), ValidationError );
  CHECK_THROWS_AS( compile_formula( parse( "F Q" ), fig1_vocab ), ValidationError );
  CompileLimits tiny;
  tiny.state_budget = 2;
  CHECK_THROWS_AS( compile_formula( parse( phi1 ), fig1_vocab, tiny ), CapacityError );
  const auto wide = make_vocabulary( testing::prop_names( 17 ) );
  CHECK_THROWS_AS( compile_formula( parse( "F p0" ), wide ), CapacityError );
}

TEST_CASE( "compile_spec: example machine under min-regret" )
{
  const auto m = compile_spec( fig1_belief(), Criterion::min_regret() );
  REQUIRE( m.num_states() == 5 );
  std::map<std::string, double> terminal_rewards;
  for ( StateId s = 0; s < m.num_states(); ++s )
    if ( m.terminal( s ) )
      terminal_rewards[m.label( s )] = m.reward( s );
    else
      CHECK( m.reward( s ) == 0.0 );
  REQUIRE( terminal_rewards.size() == 3 );
  CHECK( terminal_rewards.at( "<false, G !T0>" ) == doctest::Approx( 0.4 ).epsilon( 1e-12 ) );
  CHECK( terminal_rewards.at( "<G !T0, G !T0>" ) == doctest::Approx( 1.0 ).epsilon( 1e-12 ) );
  CHECK( terminal_rewards.at( "<false, false>" ) == doctest::Approx( -1.0 ).epsilon( 1e-12 ) );
  CHECK( m.label( m.initial() ) == "<" + parse( phi1 ).text() + ", " + parse( phi2 ).text() + ">" );
  CHECK( m.max_abs_reward() == doctest::Approx( 1.0 ) );
}

TEST_CASE( "step: example transitions" )
{
  const auto m = compile_spec( fig1_belief(), Criterion::min_regret() );
  const auto to_w2 = m.step( m.initial(), bits_of( fig1_vocab, { { "W2", true } } ) );
  CHECK( m.label( to_w2.next ) == "<false, G !T0>" );
  CHECK( to_w2.reward == doctest::Approx( 0.4 ).epsilon( 1e-12 ) );

  const auto to_t0 = m.step( m.initial(), bits_of( fig1_vocab, { { "T0", true } } ) );
  CHECK( m.label( to_t0.next ) == "<false, false>" );
  CHECK( to_t0.reward == doctest::Approx( -1.0 ) );

  const auto to_w1 = m.step( m.initial(), bits_of( fig1_vocab, { { "W1", true } } ) );
  CHECK( m.label( to_w1.next ) == "<" + parse( phi2 ).text() + ", " + parse( phi2 ).text() + ">" );
  CHECK( to_w1.reward == 0.0 );
  const auto then_w2 = m.step( to_w1.next, bits_of( fig1_vocab, { { "W2", true } } ) );
  CHECK( m.label( then_w2.next ) == "<G !T0, G !T0>" );
  CHECK( then_w2.reward == doctest::Approx( 1.0 ) );

  // Already decided: nothing more is emitted.
  for ( AssignmentBits a = 0; a < 8; ++a )
    CHECK( m.step( to_w2.next, a ).reward == 0.0 );
  CHECK_THROWS_AS( m.step( 99, 0 ), ValidationError );
}

TEST_CASE( "criterion_reward" )
{
  const std::vector<BeliefEntry> two = { { parse( "F a" ), 0.3 }, { parse( "F b" ), 0.7 } };
  const std::vector<int> r1 = { -1, 1 };
  CHECK( criterion_reward( r1, two, Criterion::min_regret() ) == doctest::Approx( 0.4 ) );
  const std::vector<int> r2 = { 1, -1 };
  CHECK( criterion_reward( r2, two, Criterion::most_likely() ) == -1.0 );
  const std::vector<BeliefEntry> three = { { parse( "F a" ), 0.2 }, { parse( "F b" ), 0.3 }, { parse( "F c" ), 0.5 } };
  const std::vector<int> ones = { 1, 1, 1 };
  CHECK( criterion_reward( ones, three, Criterion::max_coverage() ) == 3.0 );
  CHECK( criterion_reward( ones, three, Criterion::chance_constrained( 0.1 ) ) == doctest::Approx( 1.0 ) );
}

TEST_CASE( "criterion components" )
{
  const auto v = make_vocabulary( { "T0", "W0", "W1", "W2" } );
  const auto case3 =
      belief_of( { { "G !T0 & F W0", 0.4 }, { "G !T0 & F W1", 0.25 }, { "G !T0 & F W2", 0.35 } }, v );
  const auto ml = compile_spec( case3, Criterion::most_likely() );
  REQUIRE( ml.components().size() == 1 );
  CHECK( ml.components()[0].formula == parse( "G !T0 & F W0" ) );
  const auto cc = compile_spec( case3, Criterion::chance_constrained( 0.3 ) );
  REQUIRE( cc.components().size() == 2 );
  CHECK( cc.components()[0].formula == parse( "G !T0 & F W0" ) );
  CHECK( cc.components()[1].formula == parse( "G !T0 & F W2" ) );
  CHECK( compile_spec( case3, Criterion::min_regret() ).components().size() == 3 );

  // All three falsified at once by T0.
  const auto mr = compile_spec( case3, Criterion::min_regret() );
  const auto step = mr.step( mr.initial(), bits_of( v, { { "T0", true } } ) );
  CHECK( step.reward == doctest::Approx( -1.0 ) );
  CHECK( mr.terminal( step.next ) );
}

TEST_CASE( "singleton beliefs compile to the formula machine under every criterion" )
{
  for ( const char* text : { phi1, phi2, "true", "G !T0" } )
  {
    const auto f = compile_formula( parse( text ), fig1_vocab );
    for ( const auto& c : all_criteria )
    {
      const auto m = compile_spec( belief_of( { { text, 1.0 } } ), c );
      REQUIRE( m.num_states() == f.num_states() );
      for ( StateId s = 0; s < m.num_states(); ++s )
      {
        CHECK( m.label( s ) == "<" + f.formula( s ).text() + ">" );
        CHECK( m.criterion_value( s ) == f.reward( s ) );
        for ( AssignmentBits a = 0; a < 8; ++a )
          CHECK( m.next( s, a ) == f.next( s, a ) );
      }
    }
  }
}

TEST_CASE( "lazy transitions agree with the dense table" )
{
  const auto b = fig1_belief();
  CompileLimits lazy;
  lazy.dense_limit = 4;
  const auto d = compile_spec( b, Criterion::min_regret() );
  const auto l = compile_spec( b, Criterion::min_regret(), lazy );
  CHECK( d.dense() );
  CHECK_FALSE( l.dense() );
  REQUIRE( d.num_states() == l.num_states() );
  for ( StateId s = 0; s < d.num_states(); ++s )
    for ( AssignmentBits a = 0; a < 8; ++a )
      CHECK( d.next( s, a ) == l.next( s, a ) );
  CHECK( nlohmann::json::parse( machine_to_json( l ) )["transitions"] == "lazy" );
}

TEST_CASE( "compile_spec: state budget" )
{
  CompileLimits tiny;
  tiny.state_budget = 4;
  CHECK_THROWS_AS( compile_spec( fig1_belief(), Criterion::min_regret(), tiny ), CapacityError );
}

TEST_CASE( "property: machines agree with per-formula trace verdicts" )
{
  testing::Rng rng( 43 );
  const auto props = testing::prop_names( 3 );
  for ( int i = 0; i < 150; ++i )
  {
    const auto b = random_belief( rng, props, 3 );
    const auto c = all_criteria[testing::pick( rng, all_criteria.size() )];
    const auto m = compile_spec( b, c );
    for ( int k = 0; k < 10; ++k )
    {
      const auto trace = testing::random_trace( rng, b.vocabulary(), 1 + testing::pick( rng, 10 ) );
      StateId s = m.initial();
      int emissions = 0;
      for ( const auto& a : trace )
      {
        const StateId s_prev = s;
        const auto step = m.step( s, a );
        s = step.next;
        if ( m.terminal( step.next ) && !m.terminal( s_prev ) )
        {
          REQUIRE( step.reward == m.reward( step.next ) );
          ++emissions;
        }
        else
          REQUIRE( step.reward == 0.0 );
      }
      CHECK( emissions <= 1 );
      bool all_decided = true;
      const auto t = m.tuple( s );
      for ( std::size_t j = 0; j < m.components().size(); ++j )
      {
        const auto verdict = ltl::evaluate_trace( m.components()[j].formula, trace );
        const auto status = m.component_machine( j ).status( t[j] );
        const auto expected = status == ltl::TerminalStatus::DecidedFalse ? ltl::TraceVerdict::Violated
                              : status == ltl::TerminalStatus::Pending    ? ltl::TraceVerdict::Undecided
                                                                          : ltl::TraceVerdict::Satisfied;
        REQUIRE_MESSAGE( verdict == expected, m.components()[j].formula.text() );
        all_decided = all_decided && verdict != ltl::TraceVerdict::Undecided;
      }
      REQUIRE( m.terminal( s ) == all_decided );
    }
  }
}

TEST_CASE( "property: reachability, reward bounds and absorbing decided states" )
{
  testing::Rng rng( 47 );
  const auto props = testing::prop_names( 3 );
  for ( int i = 0; i < 150; ++i )
  {
    const auto b = random_belief( rng, props, 3 );
    const auto c = all_criteria[testing::pick( rng, all_criteria.size() )];
    const auto m = compile_spec( b, c );
    const AssignmentBits letters = b.vocabulary()->assignment_count();

    std::vector<bool> seen( m.num_states(), false );
    std::vector<StateId> stack{ m.initial() };
    seen[m.initial()] = true;
    while ( !stack.empty() )
    {
      const StateId s = stack.back();
      stack.pop_back();
      for ( AssignmentBits a = 0; a < letters; ++a )
      {
        const StateId n = m.next( s, a );
        if ( !seen[n] )
        {
          seen[n] = true;
          stack.push_back( n );
        }
      }
    }
    CHECK( std::all_of( seen.begin(), seen.end(), []( bool x ) { return x; } ) );

    const double n = static_cast<double>( m.components().size() );
    for ( StateId s = 0; s < m.num_states(); ++s )
    {
      const double r = m.reward( s );
      if ( r != 0.0 )
        REQUIRE( m.terminal( s ) );
      switch ( c.kind )
      {
      case CriterionKind::MostLikely:
        REQUIRE( ( r == -1.0 || r == 0.0 || r == 1.0 ) );
        break;
      case CriterionKind::MaxCoverage:
        REQUIRE( std::abs( r ) <= n );
        break;
      default:
        REQUIRE( std::abs( r ) <= 1.0 + 1e-12 );
      }
      const auto t = m.tuple( s );
      bool constant = true;
      for ( std::size_t j = 0; j < t.size(); ++j )
        constant = constant && m.component_machine( j ).formula( t[j] ).is_constant();
      if ( constant )
        for ( AssignmentBits a = 0; a < letters; ++a )
          REQUIRE( m.next( s, a ) == s );
    }
  }
}

TEST_CASE( "property: cross-product equals brute-force tuple progression" )
{
  testing::Rng rng( 53 );
  const auto props = testing::prop_names( 3 );
  for ( int i = 0; i < 100; ++i )
  {
    const auto b = random_belief( rng, props, 3 );
    const auto m = compile_spec( b, Criterion::min_regret() );
    std::size_t product = 1;
    for ( std::size_t j = 0; j < m.components().size(); ++j )
      product *= m.component_machine( j ).num_states();

    // Every assignment sequence of length <= 2 * product, deduplicated per
    // length: the tuples of formulas reached by direct progression.
    const Vocabulary& v = *b.vocabulary();
    std::vector<ltl::Formula> start;
    for ( const auto& e : m.components() )
      start.push_back( e.formula );
    std::set<std::vector<ltl::Formula>> reached{ start }, level{ start };
    for ( std::size_t len = 1; len <= 2 * product && !level.empty(); ++len )
    {
      std::set<std::vector<ltl::Formula>> next;
      for ( const auto& t : level )
        for ( AssignmentBits a = 0; a < v.assignment_count(); ++a )
        {
          std::vector<ltl::Formula> u;
          for ( const auto& f : t )
            u.push_back( ltl::progress( f, v, a ) );
          next.insert( u );
        }
      level.clear();
      for ( const auto& t : next )
        if ( reached.insert( t ).second )
          level.insert( t );
    }

    std::set<std::string> expected;
    for ( const auto& t : reached )
    {
      std::string label = "<";
      for ( std::size_t j = 0; j < t.size(); ++j )
        label += ( j ? ", " : "" ) + t[j].text();
      expected.insert( label + ">" );
    }
    std::set<std::string> actual;
    for ( StateId s = 0; s < m.num_states(); ++s )
      actual.insert( m.label( s ) );
    REQUIRE( actual == expected );
  }
}

TEST_CASE( "minimize_cover covers exactly the minterms" )
{
  testing::Rng rng( 59 );
  for ( int i = 0; i < 300; ++i )
  {
    const unsigned k = static_cast<unsigned>( testing::pick( rng, 6 ) );
    std::vector<std::uint32_t> on;
    for ( std::uint32_t m = 0; m < ( 1u << k ); ++m )
      if ( testing::pick( rng, 2 ) )
        on.push_back( m );
    const auto cubes = minimize_cover( k, on );
    const std::set<std::uint32_t> want( on.begin(), on.end() );
    for ( std::uint32_t m = 0; m < ( 1u << k ); ++m )
    {
      const bool covered = std::any_of( cubes.begin(), cubes.end(), [&]( const Cube& c ) { return c.covers( m ); } );
      REQUIRE( covered == ( want.count( m ) == 1 ) );
    }
    CHECK( cubes.size() <= std::max<std::size_t>( on.size(), 1 ) );
  }
  const std::vector<std::string> names{ "a", "b" };
  CHECK( render_cover( minimize_cover( 2, { 0, 1, 2, 3 } ), names ) == "true" );
  CHECK( render_cover( minimize_cover( 2, {} ), names ) == "false" );
  CHECK( render_cover( minimize_cover( 2, { 1, 3 } ), names ) == "a" );
  CHECK( render_cover( minimize_cover( 2, { 0 } ), names ) == "!a & !b" );
}

TEST_CASE( "export_dot" )
{
  const auto m = compile_spec( fig1_belief(), Criterion::min_regret() );
  const auto dot = export_dot( m );
  CHECK( dot.rfind( "digraph", 0 ) == 0 );
  const std::regex node( R"(\n  s\d+ \[label=)" );
  const std::regex edge( R"(\n  (s\d+) -> (s\d+) \[label=)" );
  CHECK( std::distance( std::sregex_iterator( dot.begin(), dot.end(), node ), std::sregex_iterator() ) == 5 );
  std::set<std::pair<std::string, std::string>> pairs;
  std::size_t edges = 0;
  for ( auto it = std::sregex_iterator( dot.begin(), dot.end(), edge ); it != std::sregex_iterator(); ++it, ++edges )
    pairs.emplace( ( *it )[1], ( *it )[2] );
  CHECK( pairs.size() == edges );
  std::size_t shaded = 0;
  for ( auto pos = dot.find( "fillcolor" ); pos != std::string::npos; pos = dot.find( "fillcolor", pos + 1 ) )
    ++shaded;
  CHECK( shaded == 3 );
  CHECK( dot.find( "s0 -> s1 [label=\"T0\"]" ) != std::string::npos );

  const auto top = compile_spec( belief_of( { { "true", 1.0 } } ), Criterion::min_regret() );
  const auto one = export_dot( top );
  CHECK( one.find( "s0 -> s0 [label=\"true\"]" ) != std::string::npos );
  CHECK( std::distance( std::sregex_iterator( one.begin(), one.end(), node ), std::sregex_iterator() ) == 1 );

  const auto f = export_dot( compile_formula( parse( phi1 ), fig1_vocab ) );
  CHECK( std::distance( std::sregex_iterator( f.begin(), f.end(), node ), std::sregex_iterator() ) == 4 );
}

TEST_CASE( "machine JSON" )
{
  const auto m = compile_spec( fig1_belief(), Criterion::min_regret() );
  const auto doc = nlohmann::json::parse( machine_to_json( m ) );
  CHECK( doc["criterion"] == "min-regret" );
  CHECK( doc["vocabulary"] == nlohmann::json( { "T0", "W1", "W2" } ) );
  CHECK( doc["states"].size() == 5 );
  CHECK( doc["initial"] == 0 );
  CHECK( doc["transitions"].size() == 5 * 8 );
  for ( const auto& t : doc["transitions"] )
    CHECK( t[2].get<StateId>() == m.next( t[0].get<StateId>(), t[1].get<AssignmentBits>() ) );
  CHECK( doc["rewards"][m.initial()] == 0.0 );
}
