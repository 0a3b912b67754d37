#pragma once

#include <beliefrl/formula.hpp>

#include <vector>

namespace beliefrl::ltl {

/// Rewrites to the canonical form, bottom-up:
///  - constant folding: true & f = f, false & f = false, true | f = true,
///    false | f = f, !true = false, !false = true, and the temporal
///    constants F c = c, G c = c, X false = false, f U true = true,
///    f U false = false, false U f = f, true U f = F f, f R true = true,
///    f R false = false, true R f = f, false R f = G f;
///  - And/Or flattened, operands sorted by rendering and deduplicated;
///  - absorption: f & (f | g) = f and f | (f & g) = f.
/// X true is kept: on a trace that ends now it is not true.
Formula simplify( const Formula& f );

/// Pushes negations down to propositions (De Morgan, !X = X!, !F = G!,
/// !G = F!, !(a U b) = !a R !b, !(a R b) = !a U !b, !!f = f) and simplifies.
Formula to_nnf( const Formula& f );

/// Boolean normal form over temporal atoms: a disjunction of conjunctions,
/// with p & !p clauses and subsumed clauses removed. Keeps the residuals of
/// repeated progression finite. Returns f unchanged above 4096 clauses.
Formula to_dnf( const Formula& f );

/// Canonical one-node constructors. Operands must already be canonical; the
/// result then is canonical too. Progression builds its results with these.
namespace canon {

Formula not_of( Formula f );
Formula and_of( std::vector<Formula> operands );
Formula or_of( std::vector<Formula> operands );
Formula next_of( Formula f );
Formula eventually_of( Formula f );
Formula globally_of( Formula f );
Formula until_of( Formula left, Formula right );
Formula release_of( Formula left, Formula right );

} // namespace canon

} // namespace beliefrl::ltl
