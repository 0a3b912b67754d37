#include <beliefrl/environment.hpp>

#include <beliefrl/errors.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace beliefrl {

using nlohmann::json;

Environment::Environment( std::string name, VocabularyPtr vocabulary, std::vector<StateInfo> states,
                          std::vector<std::string> action_names,
                          std::vector<std::vector<std::vector<Outcome>>> transitions, EnvState initial,
                          int default_horizon )
    : name_( std::move( name ) ), vocabulary_( std::move( vocabulary ) ), states_( std::move( states ) ),
      action_names_( std::move( action_names ) ), transitions_( std::move( transitions ) ), initial_( initial ),
      default_horizon_( default_horizon )
{
  if ( !vocabulary_ )
    throw ValidationError( "environment '" + name_ + "' has no vocabulary" );
  if ( states_.empty() )
    throw ValidationError( "environment '" + name_ + "' has no states" );
  if ( initial_ >= states_.size() )
    throw ValidationError( "environment '" + name_ + "': initial state out of range" );
  if ( default_horizon_ <= 0 )
    throw ValidationError( "environment '" + name_ + "': horizon must be positive" );
  if ( transitions_.size() != states_.size() )
    throw ValidationError( "environment '" + name_ + "': transition table does not match the state count" );
  const AssignmentBits mask = vocabulary_->size() == 64 ? ~AssignmentBits{ 0 }
                                                         : ( AssignmentBits{ 1 } << vocabulary_->size() ) - 1;
  available_.resize( states_.size() );
  for ( EnvState x = 0; x < states_.size(); ++x )
  {
    if ( states_[x].label & ~mask )
      throw ValidationError( "state '" + states_[x].name + "' labels a proposition outside the vocabulary" );
    auto& row = transitions_[x];
    if ( row.size() > action_names_.size() )
      throw ValidationError( "state '" + states_[x].name + "' has more action rows than actions" );
    row.resize( action_names_.size() );
    for ( ActionId a = 0; a < row.size(); ++a )
    {
      if ( row[a].empty() )
        continue;
      double total = 0.0;
      for ( const auto& o : row[a] )
      {
        if ( o.next >= states_.size() )
          throw ValidationError( "transition from '" + states_[x].name + "' leaves the state space" );
        if ( !( o.prob > 0.0 && o.prob <= 1.0 ) )
          throw ValidationError( "transition probability out of (0, 1] from '" + states_[x].name + "'" );
        total += o.prob;
      }
      if ( std::abs( total - 1.0 ) > 1e-9 )
        throw ValidationError( "transition probabilities of ('" + states_[x].name + "', '" + action_names_[a] +
                               "') sum to " + std::to_string( total ) );
      available_[x].push_back( a );
    }
    if ( available_[x].empty() && !states_[x].terminal )
      throw ValidationError( "non-terminal state '" + states_[x].name + "' has no actions" );
  }
}

bool Environment::legal( EnvState x, ActionId a ) const
{
  return x < states_.size() && a < action_names_.size() && !transitions_[x][a].empty();
}

const std::vector<Outcome>& Environment::transition_distribution( EnvState x, ActionId a ) const
{
  if ( !legal( x, a ) )
    throw ValidationError( "illegal action " + std::to_string( a ) + " in state " + std::to_string( x ) +
                           " of '" + name_ + "'" );
  return transitions_[x][a];
}

EnvState Environment::sample_next( EnvState x, ActionId a, Rng& rng ) const
{
  const auto& dist = transition_distribution( x, a );
  if ( dist.size() == 1 )
    return dist.front().next;
  double u = std::uniform_real_distribution<double>( 0.0, 1.0 )( rng );
  for ( const auto& o : dist )
  {
    if ( u < o.prob )
      return o.next;
    u -= o.prob;
  }
  return dist.back().next;
}

Environment build_grid5()
{
  const auto vocab = make_vocabulary( { "T0", "W0", "W1", "W2" } );
  std::vector<Environment::StateInfo> states = { { "S", 0, false } };
  std::vector<std::string> actions;
  for ( std::size_t i = 0; i < vocab->size(); ++i )
  {
    states.push_back( { vocab->name( i ), AssignmentBits{ 1 } << i, false } );
    actions.push_back( "goto-" + vocab->name( i ) );
  }
  std::vector<std::vector<std::vector<Outcome>>> transitions( states.size() );
  for ( auto& row : transitions )
    for ( ActionId a = 0; a < actions.size(); ++a )
      row.push_back( { { a + 1, 1.0 } } );
  return Environment( "grid5", vocab, std::move( states ), std::move( actions ), std::move( transitions ), 0,
                      grid5_horizon );
}

const std::vector<std::string>& dinner_objects()
{
  static const std::vector<std::string> objects = { "dinner_plate", "small_plate", "bowl", "fork",
                                                    "knife",        "spoon",       "water_glass", "mug" };
  return objects;
}

Environment build_dinner( int horizon, double success_prob )
{
  if ( !( success_prob > 0.0 && success_prob <= 1.0 ) )
    throw ValidationError( "dinner success probability must be in (0, 1]" );
  const auto& objects = dinner_objects();
  const auto vocab = make_vocabulary( objects );
  const EnvState count = EnvState{ 1 } << objects.size();
  std::vector<Environment::StateInfo> states;
  std::vector<std::vector<std::vector<Outcome>>> transitions( count );
  for ( EnvState x = 0; x < count; ++x )
  {
    std::string name;
    for ( std::size_t i = 0; i < objects.size(); ++i )
      if ( x >> i & 1u )
        name += ( name.empty() ? "" : "+" ) + objects[i];
    states.push_back( { name.empty() ? "empty" : name, x, x == count - 1 } );
    for ( std::size_t i = 0; i < objects.size(); ++i )
    {
      const EnvState placed = x | ( EnvState{ 1 } << i );
      if ( placed == x || success_prob == 1.0 )
        transitions[x].push_back( { { placed, 1.0 } } );
      else
        transitions[x].push_back( { { placed, success_prob }, { x, 1.0 - success_prob } } );
    }
  }
  std::vector<std::string> actions;
  for ( const auto& o : objects )
    actions.push_back( "place-" + o );
  return Environment( "dinner", vocab, std::move( states ), std::move( actions ), std::move( transitions ), 0,
                      horizon );
}

namespace {

template <class T>
T field( const json& object, const char* key, const std::string& where )
{
  if ( !object.contains( key ) )
    throw ValidationError( where + ": missing '" + key + "'" );
  try
  {
    return object.at( key ).get<T>();
  }
  catch ( const json::exception& )
  {
    throw ValidationError( where + ": '" + key + "' has the wrong type" );
  }
}

std::size_t index_in( const std::map<std::string, std::size_t>& names, const std::string& name,
                      const std::string& what )
{
  const auto it = names.find( name );
  if ( it == names.end() )
    throw ValidationError( "environment: unknown " + what + " '" + name + "'" );
  return it->second;
}

} // namespace

Environment parse_environment_json( std::string_view text )
{
  json doc;
  try
  {
    doc = json::parse( text );
  }
  catch ( const json::parse_error& e )
  {
    throw ValidationError( std::string( "environment file is not valid JSON: " ) + e.what() );
  }
  if ( !doc.is_object() )
    throw ValidationError( "environment file must hold a JSON object" );
  for ( const auto& [key, _] : doc.items() )
    if ( key != "name" && key != "propositions" && key != "actions" && key != "states" && key != "initial" &&
         key != "horizon" && key != "transitions" )
      throw ValidationError( "environment: unknown key '" + key + "'" );

  const auto vocab = make_vocabulary( field<std::vector<std::string>>( doc, "propositions", "environment" ) );
  const auto actions = field<std::vector<std::string>>( doc, "actions", "environment" );
  std::map<std::string, std::size_t> action_index, state_index;
  for ( std::size_t i = 0; i < actions.size(); ++i )
    if ( !action_index.emplace( actions[i], i ).second )
      throw ValidationError( "environment: duplicate action '" + actions[i] + "'" );

  const auto& raw_states = doc.contains( "states" ) ? doc["states"] : json();
  if ( !raw_states.is_array() )
    throw ValidationError( "environment: 'states' must be an array" );
  std::vector<Environment::StateInfo> states;
  for ( std::size_t i = 0; i < raw_states.size(); ++i )
  {
    const std::string where = "environment states[" + std::to_string( i ) + "]";
    const auto& s = raw_states[i];
    if ( !s.is_object() )
      throw ValidationError( where + ": expected an object" );
    Environment::StateInfo info;
    info.name = field<std::string>( s, "name", where );
    info.terminal = s.contains( "terminal" ) ? field<bool>( s, "terminal", where ) : false;
    if ( s.contains( "labels" ) )
      for ( const auto& p : field<std::vector<std::string>>( s, "labels", where ) )
      {
        const auto idx = vocab->index_of( p );
        if ( !idx )
          throw ValidationError( where + ": label '" + p + "' is not a proposition" );
        info.label |= AssignmentBits{ 1 } << *idx;
      }
    if ( !state_index.emplace( info.name, i ).second )
      throw ValidationError( where + ": duplicate state '" + info.name + "'" );
    states.push_back( std::move( info ) );
  }

  std::vector<std::vector<std::vector<Outcome>>> transitions( states.size(),
                                                              std::vector<std::vector<Outcome>>( actions.size() ) );
  const auto& raw = doc.contains( "transitions" ) ? doc["transitions"] : json::array();
  if ( !raw.is_array() )
    throw ValidationError( "environment: 'transitions' must be an array" );
  for ( const auto& t : raw )
  {
    if ( !t.is_array() || t.size() != 4 || !t[0].is_string() || !t[1].is_string() || !t[2].is_string() ||
         !t[3].is_number() )
      throw ValidationError( "environment: transition " + t.dump() + " is not [state, action, state, prob]" );
    const auto x = index_in( state_index, t[0].get<std::string>(), "state" );
    const auto a = index_in( action_index, t[1].get<std::string>(), "action" );
    const auto y = index_in( state_index, t[2].get<std::string>(), "state" );
    transitions[x][a].push_back( { static_cast<EnvState>( y ), t[3].get<double>() } );
  }

  const auto initial = index_in( state_index, field<std::string>( doc, "initial", "environment" ), "state" );
  const int horizon = doc.contains( "horizon" ) ? field<int>( doc, "horizon", "environment" ) : 50;
  const std::string name = doc.contains( "name" ) ? field<std::string>( doc, "name", "environment" ) : "tabular";
  return Environment( name, vocab, std::move( states ), actions, std::move( transitions ),
                      static_cast<EnvState>( initial ), horizon );
}

Environment load_environment_file( const std::filesystem::path& path )
{
  std::ifstream in( path );
  if ( !in )
    throw ValidationError( "cannot read environment file " + path.string() );
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_environment_json( buffer.str() );
}

Environment environment_by_name( const std::string& spec )
{
  if ( spec == "grid5" )
    return build_grid5();
  if ( spec == "dinner" )
    return build_dinner();
  return load_environment_file( spec );
}

std::uint64_t valid_order_count( const std::vector<std::pair<std::size_t, std::size_t>>& partial_order,
                                 std::size_t n_objects )
{
  if ( n_objects > 20 )
    throw ValidationError( "valid_order_count supports at most 20 objects" );
  std::vector<std::uint32_t> before( n_objects, 0 );
  for ( const auto& [a, b] : partial_order )
  {
    if ( a >= n_objects || b >= n_objects )
      throw ValidationError( "partial order mentions an object out of range" );
    if ( a == b )
      throw ValidationError( "partial order is cyclic" );
    before[b] |= std::uint32_t{ 1 } << a;
  }
  // ways[S]: orderings of the placed set S whose every prefix is closed
  // under predecessors.
  const std::uint32_t full = ( std::uint32_t{ 1 } << n_objects ) - 1;
  std::vector<std::uint64_t> ways( std::size_t{ full } + 1, 0 );
  ways[0] = 1;
  for ( std::uint32_t s = 0; s <= full; ++s )
  {
    if ( ways[s] == 0 )
      continue;
    for ( std::size_t i = 0; i < n_objects; ++i )
    {
      const std::uint32_t bit = std::uint32_t{ 1 } << i;
      if ( !( s & bit ) && ( before[i] & ~s ) == 0 )
        ways[s | bit] += ways[s];
    }
  }
  if ( n_objects > 0 && ways[full] == 0 )
    throw ValidationError( "partial order is cyclic" );
  return ways[full];
}

} // namespace beliefrl
