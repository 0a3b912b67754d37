#include <beliefrl/machine.hpp>

#include <beliefrl/cover.hpp>
#include <beliefrl/errors.hpp>
#include <beliefrl/rewrite.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace beliefrl {

using ltl::Formula;
using ltl::TerminalStatus;

std::string Criterion::name() const
{
  switch ( kind )
  {
  case CriterionKind::MostLikely:
    return "most-likely";
  case CriterionKind::MaxCoverage:
    return "max-coverage";
  case CriterionKind::MinRegret:
    return "min-regret";
  case CriterionKind::ChanceConstrained:
    return "chance-constrained";
  }
  return "?";
}

Criterion Criterion::from_name( std::string_view name, double delta )
{
  if ( name == "most-likely" )
    return most_likely();
  if ( name == "max-coverage" )
    return max_coverage();
  if ( name == "min-regret" )
    return min_regret();
  if ( name == "chance-constrained" )
  {
    if ( !( delta >= 0.0 && delta < 1.0 ) )
      throw ValidationError( "delta " + std::to_string( delta ) + " is outside [0, 1)" );
    return chance_constrained( delta );
  }
  throw ValidationError( "unknown criterion '" + std::string( name ) + "'" );
}

int formula_reward( TerminalStatus status )
{
  switch ( status )
  {
  case TerminalStatus::DecidedTrue:
  case TerminalStatus::SafePersistent:
    return 1;
  case TerminalStatus::DecidedFalse:
    return -1;
  case TerminalStatus::Pending:
    return 0;
  }
  return 0;
}

namespace {

std::uint32_t project( AssignmentBits bits, const std::vector<std::size_t>& support )
{
  std::uint32_t local = 0;
  for ( std::size_t j = 0; j < support.size(); ++j )
    local |= static_cast<std::uint32_t>( ( bits >> support[j] ) & 1u ) << j;
  return local;
}

void check_vocabulary_cap( const Vocabulary& vocabulary, const CompileLimits& limits )
{
  if ( vocabulary.size() > limits.vocabulary_cap )
  {
    throw CapacityError( "vocabulary of " + std::to_string( vocabulary.size() ) + " propositions exceeds the cap of " +
                         std::to_string( limits.vocabulary_cap ) );
  }
}

} // namespace

StateId FormulaMachine::next( StateId s, AssignmentBits bits ) const
{
  const std::size_t stride = std::size_t{ 1 } << support_.size();
  return table_.at( s * stride + project( bits, support_ ) );
}

FormulaMachine compile_formula( const Formula& f, VocabularyPtr vocabulary, const CompileLimits& limits )
{
  if ( !vocabulary )
    throw ValidationError( "compile_formula: no vocabulary" );
  check_vocabulary_cap( *vocabulary, limits );

  const Formula root = ltl::to_nnf( f );
  if ( !ltl::is_obligation_class( root ) )
    throw ValidationError( "formula '" + root.text() + "' is not in the obligation class" );

  FormulaMachine m;
  m.vocabulary_ = vocabulary;
  std::vector<std::string> local_names;
  for ( const auto& p : root.propositions() )
  {
    const auto index = vocabulary->index_of( p );
    if ( !index )
      throw ValidationError( "proposition '" + p + "' is not in the machine vocabulary" );
    m.support_.push_back( *index );
  }
  std::sort( m.support_.begin(), m.support_.end() );
  for ( auto i : m.support_ )
    local_names.push_back( vocabulary->name( i ) );
  const Vocabulary local( local_names );
  const AssignmentBits stride = local.assignment_count();

  std::unordered_map<Formula, StateId, ltl::FormulaHash> ids;
  const auto intern = [&]( const Formula& g ) {
    auto [it, inserted] = ids.emplace( g, static_cast<StateId>( m.states_.size() ) );
    if ( inserted )
    {
      if ( m.states_.size() >= limits.state_budget )
        throw CapacityError( "formula machine for '" + root.text() + "' exceeds the state budget of " +
                             std::to_string( limits.state_budget ) );
      m.states_.push_back( g );
      m.status_.push_back( ltl::terminal_status( g, limits.vocabulary_cap ) );
    }
    return it->second;
  };

  intern( root );
  for ( StateId s = 0; s < m.states_.size(); ++s )
  {
    const Formula g = m.states_[s];
    for ( AssignmentBits bits = 0; bits < stride; ++bits )
    {
      m.table_.push_back( intern( ltl::progress( g, local, bits ) ) );
    }
  }
  return m;
}

double criterion_reward( std::span<const int> rewards, std::span<const BeliefEntry> components, const Criterion& c )
{
  if ( rewards.size() != components.size() )
    throw ValidationError( "criterion_reward: one reward per component expected" );
  double total = 0.0;
  switch ( c.kind )
  {
  case CriterionKind::MostLikely:
  {
    std::size_t best = 0;
    for ( std::size_t i = 1; i < components.size(); ++i )
    {
      const auto& a = components[i];
      const auto& b = components[best];
      if ( a.prob > b.prob || ( a.prob == b.prob && a.formula.text() < b.formula.text() ) )
        best = i;
    }
    return components.empty() ? 0.0 : rewards[best];
  }
  case CriterionKind::MaxCoverage:
    for ( auto r : rewards )
      total += r;
    return total;
  case CriterionKind::MinRegret:
  case CriterionKind::ChanceConstrained:
    for ( std::size_t i = 0; i < rewards.size(); ++i )
      total += components[i].prob * rewards[i];
    return total;
  }
  return total;
}

std::size_t SpecMachine::TupleHash::operator()( const std::vector<StateId>& t ) const noexcept
{
  std::size_t h = 0xcbf29ce484222325ull;
  for ( auto v : t )
  {
    h ^= v;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::span<const StateId> SpecMachine::tuple( StateId s ) const
{
  if ( s >= num_states() )
    throw ValidationError( "unknown machine state " + std::to_string( s ) );
  return { tuples_.data() + static_cast<std::size_t>( s ) * width(), width() };
}

std::string SpecMachine::label( StateId s ) const
{
  const auto t = tuple( s );
  std::string out = "<";
  for ( std::size_t i = 0; i < t.size(); ++i )
  {
    if ( i > 0 )
      out += ", ";
    out += machines_[i].formula( t[i] ).text();
  }
  return out + ">";
}

StateId SpecMachine::intern_lookup( const std::vector<StateId>& t ) const
{
  return index_.at( t );
}

StateId SpecMachine::next( StateId s, AssignmentBits bits ) const
{
  if ( s >= num_states() )
    throw ValidationError( "unknown machine state " + std::to_string( s ) );
  if ( !table_.empty() )
    return table_[static_cast<std::size_t>( s ) * vocabulary_->assignment_count() + bits];
  const auto t = tuple( s );
  std::vector<StateId> successor( t.size() );
  for ( std::size_t i = 0; i < t.size(); ++i )
    successor[i] = machines_[i].next( t[i], bits );
  return intern_lookup( successor );
}

MachineStep SpecMachine::step( StateId s, AssignmentBits bits ) const
{
  const StateId n = next( s, bits );
  const bool newly = terminal( n ) && !terminal( s );
  return { n, newly ? reward( n ) : 0.0 };
}

MachineStep SpecMachine::step( StateId s, const TruthAssignment& a ) const
{
  if ( !( a.vocabulary() == *vocabulary_ ) )
    throw ValidationError( "assignment vocabulary differs from the machine vocabulary" );
  return step( s, a.bits() );
}

std::vector<BeliefEntry> criterion_components( const BeliefSpec& belief, const Criterion& c )
{
  switch ( c.kind )
  {
  case CriterionKind::MostLikely:
  {
    const auto& top = most_likely( belief );
    for ( const auto& e : belief.entries() )
      if ( e.formula == top )
        return { e };
    return {};
  }
  case CriterionKind::ChanceConstrained:
    return prune_chance_constrained( belief, c.delta ).entries();
  case CriterionKind::MaxCoverage:
  case CriterionKind::MinRegret:
    return belief.entries();
  }
  return {};
}

SpecMachine compile_spec( const BeliefSpec& belief, const Criterion& c, const CompileLimits& limits )
{
  if ( !belief.vocabulary() || belief.entries().empty() )
    throw ValidationError( "compile_spec: empty belief" );
  check_vocabulary_cap( *belief.vocabulary(), limits );

  SpecMachine m;
  m.criterion_ = c;
  m.vocabulary_ = belief.vocabulary();
  m.components_ = criterion_components( belief, c );
  for ( const auto& e : m.components_ )
    m.machines_.push_back( compile_formula( e.formula, m.vocabulary_, limits ) );

  const std::size_t width = m.machines_.size();
  const AssignmentBits letters = m.vocabulary_->assignment_count();
  bool dense = true;
  std::vector<int> rewards( width );

  const auto intern = [&]( const std::vector<StateId>& t ) {
    auto [it, inserted] = m.index_.emplace( t, static_cast<StateId>( m.terminal_.size() ) );
    if ( inserted )
    {
      if ( m.terminal_.size() >= limits.state_budget )
        throw CapacityError( "spec machine exceeds the state budget of " + std::to_string( limits.state_budget ) );
      m.tuples_.insert( m.tuples_.end(), t.begin(), t.end() );
      bool decided = true;
      for ( std::size_t i = 0; i < width; ++i )
      {
        decided = decided && m.machines_[i].decided( t[i] );
        rewards[i] = m.machines_[i].reward( t[i] );
      }
      m.terminal_.push_back( decided ? 1 : 0 );
      m.value_.push_back( criterion_reward( rewards, m.components_, c ) );
      if ( decided )
        m.max_abs_reward_ = std::max( m.max_abs_reward_, std::abs( m.value_.back() ) );
    }
    return it->second;
  };

  std::vector<StateId> t( width );
  for ( std::size_t i = 0; i < width; ++i )
    t[i] = m.machines_[i].initial();
  intern( t );

  for ( StateId s = 0; s < m.terminal_.size(); ++s )
  {
    const std::vector<StateId> current( m.tuples_.begin() + static_cast<std::ptrdiff_t>( s * width ),
                                        m.tuples_.begin() + static_cast<std::ptrdiff_t>( ( s + 1 ) * width ) );
    for ( AssignmentBits bits = 0; bits < letters; ++bits )
    {
      for ( std::size_t i = 0; i < width; ++i )
        t[i] = m.machines_[i].next( current[i], bits );
      const StateId n = intern( t );
      if ( dense )
        m.table_.push_back( n );
    }
    if ( dense && static_cast<std::uint64_t>( m.terminal_.size() ) * letters > limits.dense_limit )
    {
      dense = false;
      m.table_.clear();
      m.table_.shrink_to_fit();
    }
  }
  return m;
}

namespace {

std::string escape( const std::string& s )
{
  std::string out;
  for ( char ch : s )
  {
    if ( ch == '"' || ch == '\\' )
      out += '\\';
    out += ch;
  }
  return out;
}

std::string format_reward( double r )
{
  std::ostringstream os;
  os << r;
  return os.str();
}

// Edges from one state: the relevant propositions are enumerated and each
// target gets the minimized condition leading to it.
template <class Next>
void write_edges( std::ostream& os, StateId s, const std::vector<std::size_t>& vars, const Vocabulary& vocabulary,
                  Next next )
{
  std::map<StateId, std::vector<std::uint32_t>> by_target;
  for ( std::uint32_t local = 0; local < ( 1u << vars.size() ); ++local )
  {
    AssignmentBits bits = 0;
    for ( std::size_t j = 0; j < vars.size(); ++j )
      if ( local >> j & 1u )
        bits |= AssignmentBits{ 1 } << vars[j];
    by_target[next( s, bits )].push_back( local );
  }
  std::vector<std::string> names;
  for ( auto v : vars )
    names.push_back( vocabulary.name( v ) );
  for ( const auto& [target, minterms] : by_target )
  {
    const auto cover = minimize_cover( static_cast<unsigned>( vars.size() ), minterms );
    os << "  s" << s << " -> s" << target << " [label=\"" << escape( render_cover( cover, names ) ) << "\"];\n";
  }
}

std::vector<std::size_t> vocabulary_indices( const std::set<std::string>& props, const Vocabulary& vocabulary )
{
  std::vector<std::size_t> out;
  for ( const auto& p : props )
    out.push_back( *vocabulary.index_of( p ) );
  std::sort( out.begin(), out.end() );
  return out;
}

} // namespace

std::string export_dot( const SpecMachine& m )
{
  std::ostringstream os;
  os << "digraph spec {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for ( StateId s = 0; s < m.num_states(); ++s )
  {
    os << "  s" << s << " [label=\"" << escape( m.label( s ) ) << "\\nr=" << format_reward( m.reward( s ) ) << "\"";
    if ( m.terminal( s ) )
      os << ", style=filled, fillcolor=gray80";
    if ( s == m.initial() )
      os << ", penwidth=2";
    os << "];\n";
  }
  for ( StateId s = 0; s < m.num_states(); ++s )
  {
    std::set<std::string> props;
    const auto t = m.tuple( s );
    for ( std::size_t i = 0; i < t.size(); ++i )
    {
      const auto p = m.component_machine( i ).formula( t[i] ).propositions();
      props.insert( p.begin(), p.end() );
    }
    write_edges( os, s, vocabulary_indices( props, *m.vocabulary() ), *m.vocabulary(),
                 [&]( StateId from, AssignmentBits bits ) { return m.next( from, bits ); } );
  }
  os << "}\n";
  return os.str();
}

std::string export_dot( const FormulaMachine& m )
{
  std::ostringstream os;
  os << "digraph formula {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for ( StateId s = 0; s < m.num_states(); ++s )
  {
    os << "  s" << s << " [label=\"" << escape( m.formula( s ).text() ) << "\\nr=" << m.reward( s ) << "\"";
    if ( m.decided( s ) )
      os << ", style=filled, fillcolor=gray80";
    if ( s == m.initial() )
      os << ", penwidth=2";
    os << "];\n";
  }
  for ( StateId s = 0; s < m.num_states(); ++s )
  {
    write_edges( os, s, vocabulary_indices( m.formula( s ).propositions(), *m.vocabulary() ), *m.vocabulary(),
                 [&]( StateId from, AssignmentBits bits ) { return m.next( from, bits ); } );
  }
  os << "}\n";
  return os.str();
}

std::string machine_to_json( const SpecMachine& m )
{
  using nlohmann::json;
  json doc;
  doc["criterion"] = m.criterion().name();
  if ( m.criterion().kind == CriterionKind::ChanceConstrained )
    doc["delta"] = m.criterion().delta;
  doc["vocabulary"] = m.vocabulary()->names();
  doc["components"] = json::array();
  for ( const auto& e : m.components() )
    doc["components"].push_back( { { "ltl", e.formula.text() }, { "prob", e.prob } } );
  doc["initial"] = m.initial();
  doc["states"] = json::array();
  doc["rewards"] = json::array();
  doc["terminal"] = json::array();
  for ( StateId s = 0; s < m.num_states(); ++s )
  {
    json tuple = json::array();
    const auto t = m.tuple( s );
    for ( std::size_t i = 0; i < t.size(); ++i )
      tuple.push_back( m.component_machine( i ).formula( t[i] ).text() );
    doc["states"].push_back( tuple );
    doc["rewards"].push_back( m.reward( s ) );
    doc["terminal"].push_back( m.terminal( s ) );
  }
  if ( m.dense() )
  {
    json triples = json::array();
    const AssignmentBits letters = m.vocabulary()->assignment_count();
    for ( StateId s = 0; s < m.num_states(); ++s )
      for ( AssignmentBits a = 0; a < letters; ++a )
        triples.push_back( { s, a, m.next( s, a ) } );
    doc["transitions"] = std::move( triples );
  }
  else
  {
    doc["transitions"] = "lazy";
  }
  return doc.dump();
}

} // namespace beliefrl
