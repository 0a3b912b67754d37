#pragma once

#include <beliefrl/environment.hpp>
#include <beliefrl/machine.hpp>

#include <vector>

namespace beliefrl {

struct ProductState
{
  StateId u = 0;
  EnvState x = 0;

  bool operator==( const ProductState& ) const = default;
};

struct MachineOutcome
{
  StateId next = 0;
  double reward = 0.0;
  bool done = false;
};

struct ProductStep
{
  ProductState next;
  double reward = 0.0;
  bool done = false;
};

/// On-the-fly product of an environment and a specification machine. The
/// machine advances on the label of the state just entered; the initial
/// label is not consumed.
class Product
{
public:
  /// Every machine proposition must be an environment proposition; the
  /// environment label is projected onto the machine vocabulary by name.
  Product( const Environment& env, const SpecMachine& machine, bool terminate_on_decided = true );

  const Environment& env() const noexcept { return *env_; }
  const SpecMachine& machine() const noexcept { return *machine_; }
  bool terminate_on_decided() const noexcept { return terminate_; }

  ProductState initial( Rng& rng ) const { return { machine_->initial(), env_->initial( rng ) }; }

  /// Machine letter of environment state x.
  AssignmentBits letter( EnvState x ) const { return letters_.at( x ); }

  /// Machine side of a transition into x' from machine state u. With
  /// terminate-on-decided, entering a decided state emits its reward and
  /// ends the episode, and an already decided u yields (u', 0, done). When
  /// the episode ends otherwise (env terminal or `last` step), the
  /// criterion value of u' is emitted with pending components as 0.
  MachineOutcome advance( StateId u, EnvState x_next, bool last ) const;

  /// Samples x' and advances the machine. `last` marks the final step
  /// allowed by the horizon. Throws ValidationError on an illegal action.
  ProductStep step( const ProductState& s, ActionId a, Rng& rng, bool last = false ) const;

private:
  const Environment* env_;
  const SpecMachine* machine_;
  bool terminate_;
  std::vector<AssignmentBits> letters_;
};

} // namespace beliefrl
