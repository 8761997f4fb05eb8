#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bdead/ast.hpp"
#include "bdead/value.hpp"

namespace bdead::model {

inline constexpr std::int64_t kDefaultMaxInt = 1023;

struct EvalContext {
  std::span<const SortDecl> sorts;
  std::int64_t maxint = kDefaultMaxInt;
};

/// Well-definedness failure, e.g. division by zero. `where` is the smallest
/// enclosing atomic predicate (or the expression itself for eval_expr).
struct WdError {
  NodePtr where;
  std::string what;
};

/// Evaluation that cannot be completed at all: unbound identifier,
/// arithmetic overflow, or a quantifier range too large to enumerate.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TruthResult = std::variant<bool, WdError>;
using ValueResult = std::variant<Value, WdError>;

/// Ground truth of `p` under `v`. Conjunction, disjunction and implication
/// are non-strict from left to right; quantifiers follow Kleene logic.
TruthResult eval(const Pred& p, const Valuation& v, const EvalContext& ctx);
ValueResult eval_expr(const Expr& e, const Valuation& v, const EvalContext& ctx);

inline bool is_wd(const TruthResult& r) { return std::holds_alternative<WdError>(r); }
inline bool is_true(const TruthResult& r) { return !is_wd(r) && std::get<bool>(r); }
inline bool is_false(const TruthResult& r) { return !is_wd(r) && !std::get<bool>(r); }

/// Every value of type `t`; INT is clipped to -maxint..maxint.
std::vector<Value> type_universe(const Ty& t, const EvalContext& ctx);

/// Values a binder `x` has to range over when the quantified body has the
/// given top-level conjuncts. A conjunct `x : E`, `x = E` or `x <: E`
/// narrows the range when every earlier conjunct is free of WD conditions
/// and E evaluates without error; otherwise the full type universe is used.
std::vector<Value> binder_candidates(const std::string& x, const Ty& t, std::span<const Pred> body,
                                     const Valuation& v, const EvalContext& ctx);

/// Literal expression denoting `v` at type `t`.
Expr value_to_expr(const Value& v, const Ty& t, std::span<const SortDecl> sorts);

/// Conjuncts that restrict a quantifier binder: the body for `#`, the
/// antecedent of an implication for `!`.
std::vector<Pred> restricting_conjuncts(const Pred& quantifier);

}  // namespace bdead::model
