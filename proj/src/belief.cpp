#include <beliefrl/belief.hpp>

#include <beliefrl/errors.hpp>
#include <beliefrl/parser.hpp>
#include <beliefrl/progression.hpp>
#include <beliefrl/rewrite.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace beliefrl {

using nlohmann::json;

BeliefSpec::BeliefSpec( VocabularyPtr vocabulary, std::vector<BeliefEntry> entries, bool pruned )
    : vocabulary_( std::move( vocabulary ) ), entries_( std::move( entries ) ), pruned_( pruned )
{
}

double BeliefSpec::total_mass() const
{
  return std::accumulate( entries_.begin(), entries_.end(), 0.0,
                          []( double acc, const BeliefEntry& e ) { return acc + e.prob; } );
}

BeliefSpec validate( const BeliefSpec& raw )
{
  if ( !raw.vocabulary() )
  {
    throw ValidationError( "belief has no vocabulary" );
  }
  if ( raw.entries().empty() )
  {
    throw ValidationError( "belief support is empty" );
  }

  std::vector<BeliefEntry> merged;
  std::map<ltl::Formula, std::size_t> position;
  for ( const auto& entry : raw.entries() )
  {
    if ( !std::isfinite( entry.prob ) || entry.prob <= 0.0 || entry.prob > 1.0 )
    {
      throw ValidationError( "probability " + std::to_string( entry.prob ) + " of '" + entry.formula.text() +
                             "' is outside (0, 1]" );
    }
    for ( const auto& p : entry.formula.propositions() )
    {
      if ( !raw.vocabulary()->contains( p ) )
      {
        throw ValidationError( "proposition '" + p + "' of '" + entry.formula.text() +
                               "' is not in the belief vocabulary" );
      }
    }
    const ltl::Formula canonical = ltl::to_nnf( entry.formula );
    if ( !ltl::is_obligation_class( canonical ) )
    {
      throw ValidationError( "formula '" + canonical.text() + "' is not in the obligation class" );
    }
    if ( auto it = position.find( canonical ); it != position.end() )
    {
      merged[it->second].prob += entry.prob;
    }
    else
    {
      position.emplace( canonical, merged.size() );
      merged.push_back( { canonical, entry.prob } );
    }
  }

  BeliefSpec result( raw.vocabulary(), std::move( merged ), raw.pruned() );
  if ( !raw.pruned() )
  {
    const double total = result.total_mass();
    if ( std::abs( total - 1.0 ) > BeliefSpec::sum_tolerance )
    {
      std::ostringstream msg;
      msg << "probabilities sum to " << total << ", expected 1 within " << BeliefSpec::sum_tolerance;
      throw ValidationError( msg.str() );
    }
    auto entries = result.entries();
    for ( auto& e : entries )
    {
      e.prob /= total;
    }
    result = BeliefSpec( raw.vocabulary(), std::move( entries ) );
  }
  return result;
}

std::vector<BeliefEntry> sorted_by_mass( const BeliefSpec& belief )
{
  auto entries = belief.entries();
  std::stable_sort( entries.begin(), entries.end(), []( const BeliefEntry& a, const BeliefEntry& b ) {
    if ( a.prob != b.prob )
      return a.prob > b.prob;
    return a.formula.text() < b.formula.text();
  } );
  return entries;
}

const ltl::Formula& most_likely( const BeliefSpec& belief )
{
  if ( belief.entries().empty() )
  {
    throw ValidationError( "most_likely of an empty belief" );
  }
  const BeliefEntry* best = &belief.entries().front();
  for ( const auto& e : belief.entries() )
  {
    if ( e.prob > best->prob || ( e.prob == best->prob && e.formula.text() < best->formula.text() ) )
    {
      best = &e;
    }
  }
  return best->formula;
}

BeliefSpec prune_chance_constrained( const BeliefSpec& belief, double delta )
{
  if ( !( delta >= 0.0 && delta < 1.0 ) )
  {
    throw ValidationError( "delta " + std::to_string( delta ) + " is outside [0, 1)" );
  }
  // Slack for sums like 0.4 + 0.35 that land a hair under 1 - delta.
  constexpr double slack = 1e-9;
  const double target = 1.0 - delta - slack;

  auto sorted = sorted_by_mass( belief );
  std::vector<BeliefEntry> kept;
  double mass = 0.0;
  for ( auto& e : sorted )
  {
    if ( mass >= target )
      break;
    mass += e.prob;
    kept.push_back( std::move( e ) );
  }
  return BeliefSpec( belief.vocabulary(), std::move( kept ), true );
}

namespace {

void reject_unknown_keys( const json& object, std::initializer_list<std::string_view> allowed, const std::string& where )
{
  for ( const auto& [key, value] : object.items() )
  {
    if ( std::find( allowed.begin(), allowed.end(), key ) == allowed.end() )
    {
      throw ValidationError( where + ": unknown key '" + key + "'" );
    }
  }
}

} // namespace

BeliefSpec parse_belief_json( std::string_view text )
{
  json doc;
  try
  {
    doc = json::parse( text );
  }
  catch ( const json::parse_error& e )
  {
    throw ValidationError( std::string( "belief file is not valid JSON: " ) + e.what() );
  }
  if ( !doc.is_object() )
  {
    throw ValidationError( "belief file must hold a JSON object" );
  }
  reject_unknown_keys( doc, { "propositions", "formulas" }, "belief" );
  if ( !doc.contains( "propositions" ) || !doc["propositions"].is_array() )
  {
    throw ValidationError( "belief: 'propositions' must be an array of names" );
  }
  if ( !doc.contains( "formulas" ) || !doc["formulas"].is_array() )
  {
    throw ValidationError( "belief: 'formulas' must be an array" );
  }

  std::vector<std::string> names;
  for ( const auto& p : doc["propositions"] )
  {
    if ( !p.is_string() || !ltl::is_identifier( p.get<std::string>() ) )
    {
      throw ValidationError( "belief: invalid proposition name " + p.dump() );
    }
    names.push_back( p.get<std::string>() );
  }
  VocabularyPtr vocabulary;
  try
  {
    vocabulary = make_vocabulary( std::move( names ) );
  }
  catch ( const std::exception& e )
  {
    throw ValidationError( std::string( "belief: " ) + e.what() );
  }

  std::vector<BeliefEntry> entries;
  std::size_t i = 0;
  for ( const auto& item : doc["formulas"] )
  {
    const std::string where = "belief formulas[" + std::to_string( i++ ) + "]";
    if ( !item.is_object() )
      throw ValidationError( where + ": expected an object" );
    reject_unknown_keys( item, { "ltl", "prob" }, where );
    if ( !item.contains( "ltl" ) || !item["ltl"].is_string() )
      throw ValidationError( where + ": 'ltl' must be a string" );
    if ( !item.contains( "prob" ) || !item["prob"].is_number() )
      throw ValidationError( where + ": 'prob' must be a number" );
    try
    {
      entries.push_back( { ltl::parse( item["ltl"].get<std::string>() ), item["prob"].get<double>() } );
    }
    catch ( const ltl::ParseError& e )
    {
      throw ValidationError( where + ": " + e.what() );
    }
  }
  return validate( BeliefSpec( vocabulary, std::move( entries ) ) );
}

BeliefSpec load_belief_file( const std::filesystem::path& path )
{
  std::ifstream in( path );
  if ( !in )
  {
    throw ValidationError( "cannot read belief file " + path.string() );
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_belief_json( buffer.str() );
}

std::string belief_to_json( const BeliefSpec& belief )
{
  json doc;
  doc["propositions"] = belief.vocabulary()->names();
  doc["formulas"] = json::array();
  for ( const auto& e : belief.entries() )
  {
    doc["formulas"].push_back( { { "ltl", e.formula.text() }, { "prob", e.prob } } );
  }
  return doc.dump( 2 );
}

} // namespace beliefrl
