#include "bdead/simplify.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bdead::simplify {

using model::Node;
using model::NodePtr;
using model::Op;
namespace ast = model::ast;

namespace {

using BoundsMap = std::map<std::string, Bounds, std::less<>>;

std::optional<std::int64_t> constant(const Expr& e) {
  if (e->op == Op::IntLit) return e->num;
  if (e->op == Op::Neg) {
    if (auto v = constant(e->args[0])) return -*v;
  }
  return std::nullopt;
}

void tighten(Bounds& b, std::optional<std::int64_t> lo, std::optional<std::int64_t> hi) {
  if (lo && (!b.lo || *lo > *b.lo)) b.lo = lo;
  if (hi && (!b.hi || *hi < *b.hi)) b.hi = hi;
}

std::optional<std::int64_t> add(std::optional<std::int64_t> a, std::optional<std::int64_t> b) {
  std::int64_t r = 0;
  if (!a || !b || __builtin_add_overflow(*a, *b, &r)) return std::nullopt;
  return r;
}

std::optional<std::int64_t> neg(std::optional<std::int64_t> a) {
  if (!a || *a == INT64_MIN) return std::nullopt;
  return -*a;
}

// Bounds implied on `v` by the atom `v op c` (after orientation).
void bound_from_comparison(Op op, const Expr& lhs, const Expr& rhs, BoundsMap& out) {
  auto c = constant(rhs);
  if (lhs->op != Op::Ident || !c) return;
  Bounds& b = out[lhs->name];
  switch (op) {
    case Op::Lt: tighten(b, std::nullopt, *c - 1); break;
    case Op::Le: tighten(b, std::nullopt, *c); break;
    case Op::Gt: tighten(b, *c + 1, std::nullopt); break;
    case Op::Ge: tighten(b, *c, std::nullopt); break;
    case Op::Eq: tighten(b, *c, *c); break;
    default: break;
  }
}

Op flip(Op op) {
  switch (op) {
    case Op::Lt: return Op::Gt;
    case Op::Le: return Op::Ge;
    case Op::Gt: return Op::Lt;
    case Op::Ge: return Op::Le;
    default: return op;
  }
}

// Bounds of the elements of a set expression.
std::optional<Bounds> element_bounds(const Expr& s) {
  if (s->op == Op::Interval) {
    auto lo = constant(s->args[0]);
    auto hi = constant(s->args[1]);
    if (lo && hi) return Bounds{lo, hi};
  }
  if (s->op == Op::SetLit && !s->args.empty()) {
    Bounds b;
    for (const auto& a : s->args) {
      auto c = constant(a);
      if (!c) return std::nullopt;
      b.lo = b.lo ? std::min(*b.lo, *c) : *c;
      b.hi = b.hi ? std::max(*b.hi, *c) : *c;
    }
    return b;
  }
  if (s->op == Op::IntSet && s->num > 0) return Bounds{s->num - 1, std::nullopt};
  return std::nullopt;
}

bool structurally_nonempty(const Expr& s) {
  switch (s->op) {
    case Op::SetLit: return !s->args.empty();
    case Op::SortSet:
    case Op::BoolSet:
    case Op::IntSet: return true;
    case Op::Interval: {
      auto lo = constant(s->args[0]);
      auto hi = constant(s->args[1]);
      return lo && hi && *lo <= *hi;
    }
    case Op::Union: return structurally_nonempty(s->args[0]) || structurally_nonempty(s->args[1]);
    default: return false;
  }
}

bool is_empty_set(const Expr& e) { return e->op == Op::EmptySet || (e->op == Op::SetLit && e->args.empty()); }

bool known_nonempty(const Expr& s, const SimplifyContext& ctx) {
  if (!model::wd_free(s)) return false;
  if (structurally_nonempty(s)) return true;
  if (s->op == Op::Union) return known_nonempty(s->args[0], ctx) || known_nonempty(s->args[1], ctx);
  return std::any_of(ctx.nonempty.begin(), ctx.nonempty.end(), [&](const Expr& f) { return model::same(f, s); });
}

Pred nonempty_atom(const Expr& s) {
  return ast::make(Op::Neq, {s, ast::make(Op::EmptySet, {}, s->type)});
}

std::string fresh_binder(const std::string& base, const std::set<std::string>& avoid1,
                         const std::set<std::string>& avoid2, const std::string& avoid3) {
  std::string name = base + "'";
  while (avoid1.contains(name) || avoid2.contains(name) || name == avoid3) name += "'";
  return name;
}

NodePtr subst(const NodePtr& p, const std::string& x, const Expr& e, const std::set<std::string>& fv_e) {
  if (p->op == Op::Ident) return p->name == x ? e : p;
  if (model::is_quantifier(p->op)) {
    if (p->name == x || !model::occurs_free(x, p->args[0])) return p;
    NodePtr body = p->args[0];
    std::string binder = p->name;
    if (fv_e.contains(binder)) {
      const std::string fresh = fresh_binder(binder, fv_e, model::free_vars(body), x);
      body = subst(body, binder, ast::ident(fresh, p->binder_type, p->pos), {fresh});
      binder = fresh;
    }
    return ast::quantifier(p->op, binder, p->binder_type, subst(body, x, e, fv_e), p->pos);
  }
  bool changed = false;
  std::vector<NodePtr> args;
  args.reserve(p->args.size());
  for (const auto& a : p->args) {
    args.push_back(subst(a, x, e, fv_e));
    changed |= args.back() != a;
  }
  return changed ? ast::with_args(p, std::move(args)) : p;
}

class Simplifier {
 public:
  explicit Simplifier(const SimplifyContext& ctx) : ctx_(ctx) {}

  Pred run(const Pred& p) {
    if (!model::is_predicate_op(p->op)) return p;
    bool changed = false;
    std::vector<NodePtr> args;
    args.reserve(p->args.size());
    for (const auto& a : p->args) {
      args.push_back(run(a));
      changed |= args.back() != a;
    }
    Pred cur = changed ? ast::with_args(p, std::move(args)) : p;
    if (auto next = rewrite(cur)) return run(*next);
    return cur;
  }

 private:
  std::optional<Pred> rewrite(const Pred& p) {
    switch (p->op) {
      case Op::And: return rewrite_junction(p, Op::True, Op::False);
      case Op::Or: return rewrite_junction(p, Op::False, Op::True);
      case Op::Not: {
        const auto& a = p->args[0];
        if (a->op == Op::True || a->op == Op::False) return ast::negate(a);
        if (a->op == Op::Not) return a->args[0];
        return std::nullopt;
      }
      case Op::Implies: {
        const auto& l = p->args[0];
        const auto& r = p->args[1];
        if (l->op == Op::True) return r;
        if (l->op == Op::False) return ast::truth(true, p->pos);
        if (r->op == Op::True && model::wd_free(l)) return r;
        return std::nullopt;
      }
      case Op::Neq: {
        const auto& a = p->args[0];
        const auto& b = p->args[1];
        const Expr* s = is_empty_set(b) ? &a : (is_empty_set(a) ? &b : nullptr);
        if (s && known_nonempty(*s, ctx_)) return ast::truth(true, p->pos);  // R2
        return std::nullopt;
      }
      case Op::Exists: return rewrite_exists(p);
      case Op::Forall:
        if (p->args[0]->op == Op::True) return p->args[0];
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  // And/Or: flatten, drop units, and cut at an absorbing child whose
  // left context cannot raise a WD error.
  std::optional<Pred> rewrite_junction(const Pred& p, Op unit, Op absorbing) {
    std::vector<Pred> kids;
    bool changed = false;
    for (const auto& a : p->args) {
      if (a->op == p->op) {
        kids.insert(kids.end(), a->args.begin(), a->args.end());
        changed = true;
      } else if (a->op == unit) {
        changed = true;
      } else {
        kids.push_back(a);
      }
    }
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (kids[i]->op != absorbing) continue;
      const bool clean = std::all_of(kids.begin(), kids.begin() + static_cast<std::ptrdiff_t>(i),
                                     [](const Pred& k) { return model::wd_free(k); });
      if (clean) return kids[i];
      if (i + 1 < kids.size()) {
        kids.resize(i + 1);
        changed = true;
      }
      break;
    }
    if (!changed) return std::nullopt;
    if (kids.empty()) return ast::truth(unit == Op::True, p->pos);
    if (kids.size() == 1) return kids.front();
    return ast::make(p->op, std::move(kids), {}, p->pos);
  }

  std::optional<Pred> rewrite_exists(const Pred& q) {
    const std::string& x = q->name;
    const Pred& body = q->args[0];
    if (body->op == Op::True || body->op == Op::False) return body;
    const auto cs = model::conjuncts(body);

    // R4: #x.(... & x = E & ...) -> (...)[E/x]
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (auto e = equated_to(cs[i], x)) {
        std::vector<Pred> rest;
        for (std::size_t j = 0; j < cs.size(); ++j)
          if (j != i) rest.push_back(cs[j]);
        return substitute(ast::conj(std::move(rest)), x, *e);
      }
      if (!model::wd_free(cs[i])) break;
    }

    // hoisting: #x.(C & D) -> C & #x.D when x is not free in C
    std::vector<Pred> hoisted, kept;
    bool kept_wd_free = true;
    for (const auto& c : cs) {
      const bool mentions_x = model::occurs_free(x, c);
      if (!mentions_x && kept_wd_free && (kept.empty() || model::wd_free(c))) {
        hoisted.push_back(c);
      } else {
        kept.push_back(c);
        if (!model::wd_free(c)) kept_wd_free = false;
      }
    }
    if (!hoisted.empty()) {
      hoisted.push_back(ast::quantifier(Op::Exists, x, q->binder_type, ast::conj(std::move(kept)), q->pos));
      return ast::make(Op::And, std::move(hoisted), {}, q->pos);
    }

    if (cs.size() != 1) return std::nullopt;
    const Pred& c = cs.front();
    // R1: #x.(x : S) -> S /= {}
    if (c->op == Op::In && is_binder(c->args[0], x) && !model::occurs_free(x, c->args[1]))
      return nonempty_atom(c->args[1]);
    // R3: #x.(x > E) -> TRUE over INT when E stays below the bounds
    if (q->binder_type.kind() == model::Ty::Kind::Int && (c->op == Op::Lt || c->op == Op::Gt)) {
      const bool left = is_binder(c->args[0], x);
      const bool right = is_binder(c->args[1], x);
      if (left == right) return std::nullopt;
      const Expr& e = left ? c->args[1] : c->args[0];
      if (model::occurs_free(x, e) || !model::wd_free(e)) return std::nullopt;
      // x must exceed E when written x > E or E < x
      const bool above = (c->op == Op::Gt) == left;
      const Bounds b = expr_bounds(e, ctx_.bounds);
      if (above && b.hi && *b.hi >= ctx_.maxint) return std::nullopt;
      if (!above && b.lo && *b.lo <= -ctx_.maxint) return std::nullopt;
      return ast::truth(true, q->pos);
    }
    return std::nullopt;
  }

  static bool is_binder(const Expr& e, const std::string& x) { return e->op == Op::Ident && e->name == x; }

  static std::optional<Expr> equated_to(const Pred& c, const std::string& x) {
    if (c->op != Op::Eq) return std::nullopt;
    for (int side = 0; side < 2; ++side) {
      const Expr& v = c->args[static_cast<std::size_t>(side)];
      const Expr& e = c->args[static_cast<std::size_t>(1 - side)];
      if (is_binder(v, x) && !model::occurs_free(x, e) && model::wd_free(e)) return e;
    }
    return std::nullopt;
  }

  const SimplifyContext& ctx_;
};

std::string key_text(const Expr& e) { return model::to_string(e); }

}  // namespace

BoundsMap collect_bounds(const Pred& assumptions) {
  BoundsMap out;
  for (const auto& c : model::conjuncts(assumptions)) {
    if (model::is_atom_op(c->op) && c->op != Op::In && c->op != Op::Subset) {
      bound_from_comparison(c->op, c->args[0], c->args[1], out);
      bound_from_comparison(flip(c->op), c->args[1], c->args[0], out);
      continue;
    }
    if ((c->op == Op::In || c->op == Op::Subset) && c->args[0]->op == Op::Ident) {
      if (auto b = element_bounds(c->args[1])) tighten(out[c->args[0]->name], b->lo, b->hi);
    }
  }
  return out;
}

Bounds expr_bounds(const Expr& e, const BoundsMap& vars) {
  switch (e->op) {
    case Op::IntLit: return {e->num, e->num};
    case Op::Ident: {
      auto it = vars.find(e->name);
      return it == vars.end() ? Bounds{} : it->second;
    }
    case Op::Neg: {
      const Bounds b = expr_bounds(e->args[0], vars);
      return {neg(b.hi), neg(b.lo)};
    }
    case Op::Add: {
      const Bounds a = expr_bounds(e->args[0], vars);
      const Bounds b = expr_bounds(e->args[1], vars);
      return {add(a.lo, b.lo), add(a.hi, b.hi)};
    }
    case Op::Sub: {
      const Bounds a = expr_bounds(e->args[0], vars);
      const Bounds b = expr_bounds(e->args[1], vars);
      return {add(a.lo, neg(b.hi)), add(a.hi, neg(b.lo))};
    }
    case Op::Mul: {
      const Bounds a = expr_bounds(e->args[0], vars);
      const Bounds b = expr_bounds(e->args[1], vars);
      if (!a.lo || !a.hi || !b.lo || !b.hi) return {};
      std::int64_t lo = INT64_MAX, hi = INT64_MIN;
      for (std::int64_t x : {*a.lo, *a.hi})
        for (std::int64_t y : {*b.lo, *b.hi}) {
          std::int64_t r = 0;
          if (__builtin_mul_overflow(x, y, &r)) return {};
          lo = std::min(lo, r);
          hi = std::max(hi, r);
        }
      return {lo, hi};
    }
    case Op::Card: {
      const Expr& s = e->args[0];
      if (s->op == Op::SetLit) return {0, static_cast<std::int64_t>(s->args.size())};
      std::optional<Bounds> eb = element_bounds(s);
      if (!eb && s->op == Op::Ident) {
        if (auto it = vars.find(s->name); it != vars.end()) eb = it->second;
      }
      if (eb && eb->lo && eb->hi) return {0, std::max<std::int64_t>(0, *eb->hi - *eb->lo + 1)};
      return {0, std::nullopt};
    }
    default:
      return {};
  }
}

SimplifyContext make_context(const Pred& assumptions, std::int64_t maxint) {
  SimplifyContext ctx;
  ctx.maxint = maxint;
  ctx.bounds = collect_bounds(assumptions);
  auto add_fact = [&](const Expr& s) {
    if (model::wd_free(s)) ctx.nonempty.push_back(s);
  };
  for (const auto& c : model::conjuncts(assumptions)) {
    switch (c->op) {
      case Op::Neq:
        if (is_empty_set(c->args[1])) add_fact(c->args[0]);
        if (is_empty_set(c->args[0])) add_fact(c->args[1]);
        break;
      case Op::Not:
        if (c->args[0]->op == Op::Eq) {
          if (is_empty_set(c->args[0]->args[1])) add_fact(c->args[0]->args[0]);
          if (is_empty_set(c->args[0]->args[0])) add_fact(c->args[0]->args[1]);
        }
        break;
      case Op::In:
        add_fact(c->args[1]);
        break;
      case Op::Eq:
        if (structurally_nonempty(c->args[1])) add_fact(c->args[0]);
        if (structurally_nonempty(c->args[0])) add_fact(c->args[1]);
        break;
      case Op::Gt:
      case Op::Ge: {
        auto k = constant(c->args[1]);
        if (c->args[0]->op == Op::Card && k && *k >= (c->op == Op::Gt ? 0 : 1)) add_fact(c->args[0]->args[0]);
        break;
      }
      case Op::Lt:
      case Op::Le: {
        auto k = constant(c->args[0]);
        if (c->args[1]->op == Op::Card && k && *k >= (c->op == Op::Lt ? 0 : 1)) add_fact(c->args[1]->args[0]);
        break;
      }
      default:
        break;
    }
  }
  return ctx;
}

Pred simplify(const Pred& p, const SimplifyContext& ctx) { return Simplifier(ctx).run(p); }

Pred substitute(const Pred& p, const std::string& x, const Expr& e) {
  return subst(p, x, e, model::free_vars(e));
}

AtomKey normalize_atom(const Pred& a) {
  if (!model::is_atom_op(a->op)) throw std::invalid_argument("not an atomic predicate: " + model::to_string(a));
  const Expr& l = a->args[0];
  const Expr& r = a->args[1];
  auto lt = [](const Expr& x, const Expr& y, bool pos) {
    return AtomKey{AtomKind::Lt, "lt:" + key_text(x) + "|" + key_text(y), pos, x, y};
  };
  switch (a->op) {
    case Op::Lt: return lt(l, r, true);
    case Op::Gt: return lt(r, l, true);
    case Op::Ge: return lt(l, r, false);
    case Op::Le: return lt(r, l, false);
    case Op::Eq:
    case Op::Neq: {
      const bool swap = model::compare(*l, *r) > 0;
      const Expr& x = swap ? r : l;
      const Expr& y = swap ? l : r;
      return {AtomKind::Eq, "eq:" + key_text(x) + "|" + key_text(y), a->op == Op::Eq, x, y};
    }
    case Op::In:
    case Op::NotIn:
      return {AtomKind::In, "in:" + key_text(l) + "|" + key_text(r), a->op == Op::In, l, r};
    default:
      return {AtomKind::Subset, "sub:" + key_text(l) + "|" + key_text(r), true, l, r};
  }
}

}  // namespace bdead::simplify
