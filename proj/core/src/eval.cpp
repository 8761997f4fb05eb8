#include "bdead/eval.hpp"

#include <algorithm>
#include <optional>
#include <utility>

namespace bdead::model {

namespace {

constexpr std::int64_t kMaxMaterialised = 1 << 20;
constexpr std::size_t kMaxPowersetBase = 16;

struct WdSignal {
  NodePtr where;
  std::string what;
};

enum class Tri : std::uint8_t { False, True, Wd };

std::int64_t checked(bool overflow, std::int64_t r) {
  if (overflow) throw EvalError("integer overflow");
  return r;
}

Value interval(std::int64_t lo, std::int64_t hi) {
  if (hi >= lo && hi - lo >= kMaxMaterialised) throw EvalError("interval too large to enumerate");
  std::vector<Value> out;
  for (std::int64_t i = lo; i <= hi; ++i) out.push_back(Value::integer(i));
  return Value::set(std::move(out));
}

bool in_int_set(std::int64_t kind, std::int64_t x) {
  switch (kind) {
    case 1: return x >= 0;
    case 2: return x >= 1;
    default: return true;
  }
}

std::vector<Value> powerset(const std::vector<Value>& base) {
  if (base.size() > kMaxPowersetBase) throw EvalError("set quantifier range too large to enumerate");
  std::vector<Value> out;
  const std::size_t n = std::size_t{1} << base.size();
  out.reserve(n);
  for (std::size_t mask = 0; mask < n; ++mask) {
    std::vector<Value> elems;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (mask & (std::size_t{1} << i)) elems.push_back(base[i]);
    out.push_back(Value::set(std::move(elems)));
  }
  return out;
}

class Evaluator {
 public:
  Evaluator(const Valuation& v, const EvalContext& ctx) : base_(v), ctx_(ctx) {}

  Tri truth(const Pred& p) {
    switch (p->op) {
      case Op::True: return Tri::True;
      case Op::False: return Tri::False;
      case Op::And:
        for (const auto& a : p->args) {
          const Tri t = truth(a);
          if (t != Tri::True) return t;
        }
        return Tri::True;
      case Op::Or:
        for (const auto& a : p->args) {
          const Tri t = truth(a);
          if (t != Tri::False) return t;
        }
        return Tri::False;
      case Op::Implies: {
        const Tri l = truth(p->args[0]);
        if (l != Tri::True) return l == Tri::False ? Tri::True : Tri::Wd;
        return truth(p->args[1]);
      }
      case Op::Equiv: {
        const Tri l = truth(p->args[0]);
        if (l == Tri::Wd) return l;
        const Tri r = truth(p->args[1]);
        if (r == Tri::Wd) return r;
        return l == r ? Tri::True : Tri::False;
      }
      case Op::Not: {
        const Tri t = truth(p->args[0]);
        if (t == Tri::Wd) return t;
        return t == Tri::True ? Tri::False : Tri::True;
      }
      case Op::Exists:
      case Op::Forall:
        return quantifier(p);
      default:
        break;
    }
    try {
      return atom(p) ? Tri::True : Tri::False;
    } catch (const WdSignal& s) {
      if (!wd_) wd_ = WdError{p, s.what};
      return Tri::Wd;
    }
  }

  Value value(const Expr& e) {
    switch (e->op) {
      case Op::IntLit: return Value::integer(e->num);
      case Op::BoolLit: return Value::boolean(e->num != 0);
      case Op::ElemLit: return Value::element(e->sort, static_cast<int>(e->num));
      case Op::Ident: return lookup(e->name);
      case Op::IntSet:
        return interval(e->num == 0 ? -ctx_.maxint : e->num - 1, ctx_.maxint);
      case Op::BoolSet: return Value::set({Value::boolean(false), Value::boolean(true)});
      case Op::SortSet: return Value::set(type_universe(Ty::sort(e->name), ctx_));
      case Op::Neg: {
        const std::int64_t x = value(e->args[0]).as_int();
        if (x == INT64_MIN) throw EvalError("integer overflow");
        return Value::integer(-x);
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Mod:
        return Value::integer(arith(e));
      case Op::Card:
        return Value::integer(static_cast<std::int64_t>(value(e->args[0]).elements().size()));
      case Op::EmptySet: return Value::set({});
      case Op::SetLit: {
        std::vector<Value> elems;
        elems.reserve(e->args.size());
        for (const auto& a : e->args) elems.push_back(value(a));
        return Value::set(std::move(elems));
      }
      case Op::Interval: {
        const std::int64_t lo = value(e->args[0]).as_int();
        const std::int64_t hi = value(e->args[1]).as_int();
        return interval(lo, hi);
      }
      case Op::Union: return set_union(value(e->args[0]), value(e->args[1]));
      case Op::Inter: return set_intersection(value(e->args[0]), value(e->args[1]));
      case Op::Diff: return set_difference(value(e->args[0]), value(e->args[1]));
      default:
        throw EvalError("predicate in expression position");
    }
  }

  std::vector<Value> candidates(const std::string& x, const Ty& t, std::span<const Pred> body) {
    for (const auto& c : body) {
      if (is_atom_op(c->op) && c->args[0]->op == Op::Ident && c->args[0]->name == x &&
          !occurs_free(x, c->args[1])) {
        if (auto r = narrow(c->op, c->args[1])) return *r;
      }
      if (c->op == Op::Eq && c->args[1]->op == Op::Ident && c->args[1]->name == x &&
          !occurs_free(x, c->args[0])) {
        if (auto r = narrow(Op::Eq, c->args[0])) return *r;
      }
      if (!wd_free(c)) break;
    }
    return type_universe(t, ctx_);
  }

  std::optional<WdError> wd_;

 private:
  std::optional<std::vector<Value>> narrow(Op op, const Expr& rhs) {
    if (op != Op::In && op != Op::Eq && op != Op::Subset) return std::nullopt;
    if (op == Op::In && rhs->op == Op::IntSet) return std::nullopt;
    try {
      Value s = value(rhs);
      if (op == Op::Eq) return std::vector<Value>{std::move(s)};
      if (op == Op::In) return s.elements();
      return powerset(s.elements());
    } catch (const WdSignal&) {
      return std::nullopt;
    } catch (const EvalError&) {
      return std::nullopt;
    }
  }

  const Value& lookup(const std::string& name) const {
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it)
      if (it->first == name) return it->second;
    auto it = base_.find(name);
    if (it == base_.end()) throw EvalError("no value for identifier '" + name + "'");
    return it->second;
  }

  std::int64_t arith(const Expr& e) {
    const std::int64_t x = value(e->args[0]).as_int();
    const std::int64_t y = value(e->args[1]).as_int();
    std::int64_t r = 0;
    bool overflow = false;
    switch (e->op) {
      case Op::Add:
        overflow = __builtin_add_overflow(x, y, &r);
        return checked(overflow, r);
      case Op::Sub:
        overflow = __builtin_sub_overflow(x, y, &r);
        return checked(overflow, r);
      case Op::Mul:
        overflow = __builtin_mul_overflow(x, y, &r);
        return checked(overflow, r);
      case Op::Div:
        if (y == 0) throw WdSignal{e, "division by zero in " + to_string(e)};
        if (x == INT64_MIN && y == -1) throw EvalError("integer overflow");
        return x / y;
      default:
        if (y <= 0 || x < 0) throw WdSignal{e, "modulo with negative or zero operand in " + to_string(e)};
        return x % y;
    }
  }

  bool atom(const Pred& p) {
    const auto& a = p->args[0];
    const auto& b = p->args[1];
    switch (p->op) {
      case Op::Eq: return value(a) == value(b);
      case Op::Neq: return value(a) != value(b);
      case Op::Lt: return value(a).as_int() < value(b).as_int();
      case Op::Le: return value(a).as_int() <= value(b).as_int();
      case Op::Gt: return value(a).as_int() > value(b).as_int();
      case Op::Ge: return value(a).as_int() >= value(b).as_int();
      case Op::In:
      case Op::NotIn: {
        const Value x = value(a);
        const bool in = b->op == Op::IntSet ? in_int_set(b->num, x.as_int()) : value(b).contains(x);
        return (p->op == Op::In) == in;
      }
      case Op::Subset: {
        const Value x = value(a);
        if (b->op == Op::IntSet)
          return std::all_of(x.elements().begin(), x.elements().end(),
                             [&](const Value& e) { return in_int_set(b->num, e.as_int()); });
        return x.subset_of(value(b));
      }
      default:
        throw EvalError("unexpected node in predicate position");
    }
  }

  Tri quantifier(const Pred& q) {
    const bool exists = q->op == Op::Exists;
    const auto restrict = restricting_conjuncts(q);
    const auto range = candidates(q->name, q->binder_type, restrict);
    const Tri dominant = exists ? Tri::True : Tri::False;
    bool saw_wd = false;
    std::optional<WdError> first_wd;
    for (const auto& val : range) {
      locals_.emplace_back(q->name, val);
      const auto saved = std::move(wd_);
      wd_.reset();
      const Tri t = truth(q->args[0]);
      if (t == Tri::Wd && !first_wd) first_wd = wd_;
      wd_ = saved;
      locals_.pop_back();
      if (t == dominant) return t;
      if (t == Tri::Wd) saw_wd = true;
    }
    if (saw_wd) {
      if (!wd_) wd_ = first_wd;
      return Tri::Wd;
    }
    return exists ? Tri::False : Tri::True;
  }

  const Valuation& base_;
  const EvalContext& ctx_;
  std::vector<std::pair<std::string, Value>> locals_;
};

}  // namespace

TruthResult eval(const Pred& p, const Valuation& v, const EvalContext& ctx) {
  Evaluator ev(v, ctx);
  const Tri t = ev.truth(p);
  if (t == Tri::Wd) return ev.wd_.value_or(WdError{p, "well-definedness error"});
  return t == Tri::True;
}

ValueResult eval_expr(const Expr& e, const Valuation& v, const EvalContext& ctx) {
  Evaluator ev(v, ctx);
  try {
    return ev.value(e);
  } catch (const WdSignal& s) {
    return WdError{s.where, s.what};
  }
}

std::vector<Value> type_universe(const Ty& t, const EvalContext& ctx) {
  switch (t.kind()) {
    case Ty::Kind::Int: return interval(-ctx.maxint, ctx.maxint).elements();
    case Ty::Kind::Bool: return {Value::boolean(false), Value::boolean(true)};
    case Ty::Kind::Sort:
      for (std::size_t i = 0; i < ctx.sorts.size(); ++i) {
        if (ctx.sorts[i].name != t.sort_name()) continue;
        std::vector<Value> out;
        for (std::size_t j = 0; j < ctx.sorts[i].elements.size(); ++j)
          out.push_back(Value::element(static_cast<int>(i), static_cast<int>(j)));
        return out;
      }
      throw EvalError("unknown carrier set '" + t.sort_name() + "'");
    case Ty::Kind::Set: return powerset(type_universe(t.element(), ctx));
    case Ty::Kind::Unknown: break;
  }
  throw EvalError("cannot enumerate a value of unknown type");
}

std::vector<Value> binder_candidates(const std::string& x, const Ty& t, std::span<const Pred> body,
                                     const Valuation& v, const EvalContext& ctx) {
  Evaluator ev(v, ctx);
  return ev.candidates(x, t, body);
}

Expr value_to_expr(const Value& v, const Ty& t, std::span<const SortDecl> sorts) {
  switch (v.kind()) {
    case Value::Kind::Int: return ast::int_lit(v.as_int());
    case Value::Kind::Bool: return ast::bool_lit(v.as_bool());
    case Value::Kind::Elem: {
      auto e = std::make_shared<Node>(*ast::elem_lit(v.sort(), v.index(),
                                                     sorts[static_cast<std::size_t>(v.sort())]
                                                         .elements[static_cast<std::size_t>(v.index())]));
      e->type = t;
      return e;
    }
    case Value::Kind::Set: {
      if (v.elements().empty()) return ast::make(Op::EmptySet, {}, t);
      std::vector<NodePtr> elems;
      for (const auto& x : v.elements()) elems.push_back(value_to_expr(x, t.element(), sorts));
      return ast::make(Op::SetLit, std::move(elems), t);
    }
  }
  return ast::int_lit(0);
}

std::vector<Pred> restricting_conjuncts(const Pred& q) {
  const Pred& body = q->args[0];
  if (q->op == Op::Forall) {
    if (body->op == Op::Implies) return conjuncts(body->args[0]);
    return {};
  }
  return conjuncts(body);
}

}  // namespace bdead::model
