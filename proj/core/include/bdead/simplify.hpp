#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bdead/ast.hpp"
#include "bdead/eval.hpp"

namespace bdead::simplify {

using model::Expr;
using model::Pred;

/// Closed integer interval; a missing end means unbounded on that side.
struct Bounds {
  std::optional<std::int64_t> lo;
  std::optional<std::int64_t> hi;
};

struct SimplifyContext {
  /// Set expressions known to be nonempty (from axioms and invariants).
  std::vector<Expr> nonempty;
  /// Integer bounds of constants and variables, used to guard `#x.(x > E)`.
  std::map<std::string, Bounds, std::less<>> bounds;
  std::int64_t maxint = model::kDefaultMaxInt;
};

/// Gathers nonempty facts and variable bounds from the top-level conjuncts
/// of `assumptions` (typically axioms & invariants).
SimplifyContext make_context(const Pred& assumptions, std::int64_t maxint = model::kDefaultMaxInt);

/// Integer bounds for identifiers constrained by the top-level conjuncts of
/// `assumptions`, e.g. `x : 0..3`, `x >= 1`, `x = 5`.
std::map<std::string, Bounds, std::less<>> collect_bounds(const Pred& assumptions);

/// Bounds of an integer expression given identifier bounds, or nullopt on a
/// side that cannot be bounded.
Bounds expr_bounds(const Expr& e, const std::map<std::string, Bounds, std::less<>>& vars);

/// Innermost-first rewriting to a fixpoint. Every rewrite preserves the
/// three-valued meaning of `p` in states satisfying the context's facts.
Pred simplify(const Pred& p, const SimplifyContext& ctx);

/// Capture-avoiding p[e/x].
Pred substitute(const Pred& p, const std::string& x, const Expr& e);

enum class AtomKind : std::uint8_t { Lt, Eq, In, Subset };

struct AtomKey {
  AtomKind kind;
  std::string key;   // canonical text; equal for trivially equivalent atoms
  bool positive;     // false when the atom is the negation of `key`
  Expr lhs;          // oriented operands, e.g. Lt(lhs, rhs)
  Expr rhs;
};

/// Canonical form of an atomic predicate. Throws std::invalid_argument when
/// `a` is a connective, quantifier or truth constant.
AtomKey normalize_atom(const Pred& a);

}  // namespace bdead::simplify
