#include <beliefrl/product.hpp>

#include <beliefrl/errors.hpp>

namespace beliefrl {

Product::Product( const Environment& env, const SpecMachine& machine, bool terminate_on_decided )
    : env_( &env ), machine_( &machine ), terminate_( terminate_on_decided )
{
  const Vocabulary& mv = *machine.vocabulary();
  const Vocabulary& ev = *env.vocabulary();
  std::vector<std::size_t> source( mv.size() );
  for ( std::size_t i = 0; i < mv.size(); ++i )
  {
    const auto idx = ev.index_of( mv.name( i ) );
    if ( !idx )
      throw ValidationError( "proposition '" + mv.name( i ) + "' is not labeled by environment '" + env.name() + "'" );
    source[i] = *idx;
  }
  letters_.resize( env.num_states() );
  for ( EnvState x = 0; x < env.num_states(); ++x )
  {
    const AssignmentBits label = env.label_bits( x );
    AssignmentBits bits = 0;
    for ( std::size_t i = 0; i < source.size(); ++i )
      bits |= ( label >> source[i] & 1u ) << i;
    letters_[x] = bits;
  }
}

MachineOutcome Product::advance( StateId u, EnvState x_next, bool last ) const
{
  const StateId n = machine_->next( u, letters_.at( x_next ) );
  const bool ends = last || env_->env_terminal( x_next );
  if ( terminate_ )
  {
    if ( machine_->terminal( u ) )
      return { n, 0.0, true };
    if ( machine_->terminal( n ) )
      return { n, machine_->reward( n ), true };
  }
  if ( ends )
    return { n, machine_->criterion_value( n ), true };
  return { n, 0.0, false };
}

ProductStep Product::step( const ProductState& s, ActionId a, Rng& rng, bool last ) const
{
  const EnvState x = env_->sample_next( s.x, a, rng );
  const auto m = advance( s.u, x, last );
  return { { m.next, x }, m.reward, m.done };
}

} // namespace beliefrl
