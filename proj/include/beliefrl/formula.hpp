#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace beliefrl::ltl {

enum class Op : std::uint8_t
{
  True,
  False,
  Prop,
  Not,
  And,
  Or,
  Next,
  Eventually,
  Globally,
  Until,
  Release
};

/// Immutable LTL syntax tree. Nodes are shared and never mutated, so a
/// Formula is a cheap value that can be copied across threads.
///
/// Each node carries its text rendering, computed once at construction.
/// Equality and ordering compare renderings; on canonical formulas (see
/// simplify()) that is the state identity used by the compilers.
class Formula
{
public:
  /// The constant `true`.
  Formula();

  Op op() const noexcept { return node_->op; }
  const std::string& name() const noexcept { return node_->name; }
  std::span<const Formula> operands() const noexcept { return node_->operands; }
  const Formula& child() const { return node_->operands.front(); }
  const Formula& left() const { return node_->operands.front(); }
  const Formula& right() const { return node_->operands.back(); }

  const std::string& text() const noexcept { return node_->text; }
  std::size_t hash() const noexcept { return node_->hash; }

  bool is_true() const noexcept { return op() == Op::True; }
  bool is_false() const noexcept { return op() == Op::False; }
  bool is_constant() const noexcept { return is_true() || is_false(); }
  /// Prop or Not(Prop).
  bool is_literal() const noexcept;
  bool is_binary() const noexcept;

  /// Number of nodes in the tree.
  std::size_t size() const noexcept { return node_->size; }
  std::size_t depth() const noexcept { return node_->depth; }

  std::set<std::string> propositions() const;

  bool operator==( const Formula& other ) const noexcept
  {
    return node_ == other.node_ || ( node_->hash == other.node_->hash && node_->text == other.node_->text );
  }
  std::strong_ordering operator<=>( const Formula& other ) const noexcept
  {
    return node_->text <=> other.node_->text;
  }

  // Raw constructors: build exactly the node requested, no normalization.
  static Formula make_true();
  static Formula make_false();
  static Formula make_prop( std::string name );
  static Formula make_unary( Op op, Formula child );
  static Formula make_binary( Op op, Formula left, Formula right );
  static Formula make_nary( Op op, std::vector<Formula> operands );

private:
  struct Node
  {
    Op op;
    std::string name;
    std::vector<Formula> operands;
    std::string text;
    std::size_t hash;
    std::size_t size;
    std::size_t depth;
  };

  explicit Formula( std::shared_ptr<const Node> node ) : node_( std::move( node ) ) {}
  static Formula build( Op op, std::string name, std::vector<Formula> operands );

  std::shared_ptr<const Node> node_;
};

struct FormulaHash
{
  std::size_t operator()( const Formula& f ) const noexcept { return f.hash(); }
};

// Raw builders. They do not simplify; pass the result through simplify() to
// obtain the canonical form.
Formula top();
Formula bottom();
Formula prop( std::string name );
Formula negation( Formula f );
Formula conjunction( std::vector<Formula> operands );
Formula disjunction( std::vector<Formula> operands );
Formula next( Formula f );
Formula eventually( Formula f );
Formula globally( Formula f );
Formula until( Formula left, Formula right );
Formula release( Formula left, Formula right );

/// Deterministic text form, accepted back by parse().
inline const std::string& render( const Formula& f ) { return f.text(); }

/// True for names accepted as propositions: [A-Za-z_][A-Za-z0-9_]* minus
/// the reserved words true, false, X, F, G, U, R.
bool is_identifier( std::string_view name );

} // namespace beliefrl::ltl
