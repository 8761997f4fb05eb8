// Decomposition of predicates into reified atoms and propagators.

#include <algorithm>
#include <set>

#include "bdead/kernel/store.hpp"
#include "bdead/simplify.hpp"
#include "kernel/arith.hpp"

namespace bdead::kernel {

using model::Op;
using model::Ty;
namespace ast = model::ast;

namespace {

constexpr std::size_t kExpandLimit = 64;
constexpr std::size_t kMaxUniverse = 1 << 16;
constexpr std::size_t kMaxPowersetBase = 6;

std::vector<Value> sorted_unique(std::vector<Value> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<Value> intersect(const std::vector<Value>& a, const std::vector<Value>& b) {
  std::vector<Value> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Value> unite(const std::vector<Value>& a, const std::vector<Value>& b) {
  std::vector<Value> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Value> int_range(std::int64_t lo, std::int64_t hi) {
  std::vector<Value> out;
  if (hi < lo) return out;
  if (static_cast<std::uint64_t>(hi - lo) >= kMaxUniverse) throw Unsupported("integer range too large");
  for (std::int64_t i = lo; i <= hi; ++i) out.push_back(Value::integer(i));
  return out;
}

std::vector<Value> powerset(const std::vector<Value>& base) {
  if (base.size() > kMaxPowersetBase) throw Unsupported("set of sets over more than 6 elements");
  std::vector<Value> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << base.size()); ++mask) {
    std::vector<Value> elems;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (mask & (std::size_t{1} << i)) elems.push_back(base[i]);
    out.push_back(Value::set(std::move(elems)));
  }
  return sorted_unique(std::move(out));
}

bool mentions_card(const Expr& e) {
  if (e->op == Op::Card) return true;
  return std::any_of(e->args.begin(), e->args.end(), mentions_card);
}

std::string value_key(const Value& v) {
  model::Valuation tmp{{"", v}};
  return model::encode_valuation(tmp);
}

}  // namespace

// --- scope inference -------------------------------------------------------

void Store::infer_scope(const Pred& shape) {
  const auto cs = model::conjuncts(shape);
  const auto bounds = simplify::collect_bounds(shape);
  for (auto& v : scalars_) {
    if (v.type.kind() != Ty::Kind::Int) continue;
    auto it = bounds.find(v.name);
    if (it == bounds.end()) continue;
    const auto& b = it->second;
    v.dom.restrict(b.lo.value_or(-ctx_.maxint), b.hi.value_or(ctx_.maxint));
    if (b.lo && b.hi) v.clipped = false;
  }
  for (int round = 0; round < 3; ++round) {
    for (const auto& c : cs) {
      if (c->args.size() != 2) continue;
      const bool eq = c->op == Op::Eq;
      for (int side = 0; side < (eq ? 2 : 1); ++side) {
        const Expr& lhs = c->args[static_cast<std::size_t>(side)];
        const Expr& rhs = c->args[static_cast<std::size_t>(1 - side)];
        if (lhs->op != Op::Ident || model::occurs_free(lhs->name, rhs) || mentions_card(rhs)) continue;
        auto it = names_.find(lhs->name);
        if (it == names_.end()) continue;
        bool clipped = false;
        if (it->second.first && (c->op == Op::Subset || eq)) {
          SetVar& s = sets_[static_cast<std::size_t>(it->second.second)];
          std::vector<Value> u;
          try {
            u = universe(rhs, clipped);
          } catch (const Unsupported&) {
            continue;
          }
          if (clipped && !s.clipped) continue;
          s.universe = intersect(s.universe, u);
          if (!clipped) s.clipped = false;
        } else if (!it->second.first && (c->op == Op::In || eq)) {
          ScalarVar& v = scalars_[static_cast<std::size_t>(it->second.second)];
          std::vector<Value> vals;
          try {
            vals = c->op == Op::In ? universe(rhs, clipped) : possible_values(rhs, v.type, clipped);
          } catch (const Unsupported&) {
            continue;
          }
          if (clipped) continue;
          std::vector<std::int64_t> codes;
          for (const auto& x : vals) codes.push_back(encode(x));
          std::sort(codes.begin(), codes.end());
          v.dom.keep_only(codes);
          v.clipped = false;
        }
      }
    }
  }
  for (auto& s : sets_) {
    for (std::size_t i = 0; i < s.universe.size(); ++i)
      s.flags.push_back(new_bool(s.name + "[" + model::format_value(s.universe[i], scope_.sorts) + "]"));
    clipped_ |= s.clipped;
  }
  for (const auto& v : scalars_) {
    clipped_ |= v.clipped;
    if (v.dom.empty()) failed_ = true;
  }
}

// --- universes ---------------------------------------------------------------

std::vector<Value> Store::possible_values(const Expr& e, const Ty& t, bool& clipped) {
  if (t.is_set()) {
    if (e->op == Op::Ident) {
      auto it = names_.find(e->name);
      if (it != names_.end() && it->second.first)
        return powerset(sets_[static_cast<std::size_t>(it->second.second)].universe);
    }
    return powerset(universe(e, clipped));
  }
  if (e->op == Op::Ident) {
    auto it = names_.find(e->name);
    if (it == names_.end()) throw Unsupported("unbound identifier '" + e->name + "'");
    const ScalarVar& v = scalars_[static_cast<std::size_t>(it->second.second)];
    clipped |= v.clipped;
    std::vector<Value> out;
    for (std::int64_t c : v.dom.values()) out.push_back(decode(c, v.type));
    return out;
  }
  if (t.kind() != Ty::Kind::Int) {
    if (e->op == Op::ElemLit) return {Value::element(e->sort, static_cast<int>(e->num))};
    if (e->op == Op::BoolLit) return {Value::boolean(e->num != 0)};
    return model::type_universe(t, ctx_);
  }
  const Interval iv = forward(compile(e));
  std::int64_t lo = iv.lo, hi = iv.hi;
  if (lo < -ctx_.maxint) {
    lo = -ctx_.maxint;
    clipped = true;
  }
  if (hi > ctx_.maxint) {
    hi = ctx_.maxint;
    clipped = true;
  }
  return int_range(lo, hi);
}

std::vector<Value> Store::universe(const Expr& s, bool& clipped) {
  switch (s->op) {
    case Op::Ident: {
      auto it = names_.find(s->name);
      if (it == names_.end() || !it->second.first) throw Unsupported("unknown set '" + s->name + "'");
      const SetVar& v = sets_[static_cast<std::size_t>(it->second.second)];
      clipped |= v.clipped;
      return v.universe;
    }
    case Op::EmptySet: return {};
    case Op::SetLit: {
      std::vector<Value> out;
      for (const auto& a : s->args) out = unite(out, sorted_unique(possible_values(a, s->type.element(), clipped)));
      return out;
    }
    case Op::Interval: {
      const Interval lo = forward(compile(s->args[0]));
      const Interval hi = forward(compile(s->args[1]));
      std::int64_t a = lo.lo, b = hi.hi;
      if (a < -ctx_.maxint) {
        a = -ctx_.maxint;
        clipped = true;
      }
      if (b > ctx_.maxint) {
        b = ctx_.maxint;
        clipped = true;
      }
      return int_range(a, b);
    }
    case Op::Union: {
      auto a = universe(s->args[0], clipped);
      return unite(a, universe(s->args[1], clipped));
    }
    case Op::Inter: {
      auto a = universe(s->args[0], clipped);
      return intersect(a, universe(s->args[1], clipped));
    }
    case Op::Diff: return universe(s->args[0], clipped);
    case Op::SortSet:
    case Op::BoolSet: return model::type_universe(s->type.element(), ctx_);
    case Op::IntSet:
      clipped = true;
      return int_range(s->num == 0 ? -ctx_.maxint : s->num - 1, ctx_.maxint);
    default:
      throw Unsupported("unsupported set expression " + model::to_string(s));
  }
}

// --- literals ------------------------------------------------------------------

Lit Store::make_and(std::vector<Lit> xs) {
  std::vector<Lit> kept;
  for (Lit l : xs) {
    const Truth t = l.var == 0 ? value(l) : Truth::Unknown;
    if (t == Truth::False) return const_lit(false);
    if (t == Truth::True) continue;
    if (std::find(kept.begin(), kept.end(), l) != kept.end()) continue;
    if (std::find(kept.begin(), kept.end(), !l) != kept.end()) return const_lit(false);
    kept.push_back(l);
  }
  if (kept.empty()) return const_lit(true);
  if (kept.size() == 1) return kept.front();
  Prop p{PropKind::And, Lit{new_bool("and"), false}, std::move(kept), {}, -1, -1, nullptr, nullptr, {}, {}};
  const Lit r = p.r;
  add_prop(std::move(p));
  return r;
}

Lit Store::make_or(std::vector<Lit> xs) {
  for (Lit& l : xs) l = !l;
  return !make_and(std::move(xs));
}

Lit Store::make_equiv(Lit a, Lit b) {
  if (a.var == 0) return value(a) == Truth::True ? b : !b;
  if (b.var == 0) return value(b) == Truth::True ? a : !a;
  if (a == b) return const_lit(true);
  if (a == !b) return const_lit(false);
  Prop p{PropKind::Equiv, Lit{new_bool("equiv"), false}, {a, b}, {}, -1, -1, nullptr, nullptr, {}, {}};
  const Lit r = p.r;
  add_prop(std::move(p));
  return r;
}

void Store::post(const Pred& p, bool polarity) {
  if (p->op == Op::And && polarity) {
    for (const auto& c : p->args) post(c, true);
    return;
  }
  if (p->op == Op::Not) {
    post(p->args[0], !polarity);
    return;
  }
  if (p->op == Op::Or && !polarity) {
    for (const auto& c : p->args) post(c, false);
    return;
  }
  posted_.push_back(polarity ? p : ast::negate(p));
  if (trace_) log("post " + model::to_string(posted_.back()));
  const Lit l = reify(p);
  if (!set_lit(l, polarity)) failed_ = true;
}

Lit Store::reify(const Pred& p) {
  switch (p->op) {
    case Op::True: return const_lit(true);
    case Op::False: return const_lit(false);
    case Op::Not: return !reify(p->args[0]);
    case Op::And: {
      std::vector<Lit> xs;
      for (const auto& a : p->args) xs.push_back(reify(a));
      return make_and(std::move(xs));
    }
    case Op::Or: {
      std::vector<Lit> xs;
      for (const auto& a : p->args) xs.push_back(reify(a));
      return make_or(std::move(xs));
    }
    case Op::Implies: return make_or({!reify(p->args[0]), reify(p->args[1])});
    case Op::Equiv: return make_equiv(reify(p->args[0]), reify(p->args[1]));
    case Op::Exists:
    case Op::Forall: return reify_quantifier(p);
    default: return reify_atom(p);
  }
}

Lit Store::reify_atom(const Pred& p) {
  const auto key = simplify::normalize_atom(p);
  if (auto it = atoms_.find(key.key); it != atoms_.end()) return key.positive ? it->second : !it->second;
  Lit lit;
  const Expr& a = key.lhs;
  const Expr& b = key.rhs;
  switch (key.kind) {
    case simplify::AtomKind::Lt:
      lit = compare_terms(p, a, b, true);
      break;
    case simplify::AtomKind::Eq:
      lit = a->type.is_set() ? set_equality(a, b) : compare_terms(p, a, b, false);
      break;
    case simplify::AtomKind::In:
      lit = membership(ast::make(Op::In, {a, b}), a, b);
      break;
    case simplify::AtomKind::Subset:
      lit = subset(a, b);
      break;
  }
  atoms_.emplace(key.key, lit);
  return key.positive ? lit : !lit;
}

void Store::deps_of(const Pred& p, std::vector<int>& scalars, std::vector<int>& sets) const {
  for (const auto& name : model::free_vars(p)) {
    auto it = names_.find(name);
    if (it == names_.end()) continue;
    (it->second.first ? sets : scalars).push_back(it->second.second);
  }
}

Lit Store::compare_terms(const Pred& source, const Expr& lhs, const Expr& rhs, bool less) {
  const Pred atom = ast::make(less ? Op::Lt : Op::Eq, {lhs, rhs}, model::Ty::boolean(), source->pos);
  Prop p{less ? PropKind::Less : PropKind::Equal, Lit{new_bool(model::to_string(atom)), false}, {}, {}, compile(lhs),
         compile(rhs), atom, source, {}, {}};
  deps_of(atom, p.scalar_deps, p.set_deps);
  for (int t : {p.ta, p.tb}) {
    // card terms depend on member literals of possibly composite sets
    std::vector<int> stack{t};
    while (!stack.empty()) {
      const Term& term = terms_[static_cast<std::size_t>(stack.back())];
      stack.pop_back();
      for (Lit m : term.members) p.lits.push_back(m);
      if (term.a >= 0) stack.push_back(term.a);
      if (term.b >= 0) stack.push_back(term.b);
    }
  }
  const Lit r = p.r;
  add_prop(std::move(p));
  return r;
}

Lit Store::ground_prop(const Pred& pred) {
  Prop p{PropKind::Ground, Lit{new_bool(model::to_string(pred)), false}, {}, {}, -1, -1, pred, pred, {}, {}};
  deps_of(pred, p.scalar_deps, p.set_deps);
  const Lit r = p.r;
  add_prop(std::move(p));
  return r;
}

Expr Store::literal(const Value& v, const Ty& t) const { return model::value_to_expr(v, t, scope_.sorts); }

Lit Store::equals_value(const Expr& e, const Value& u) {
  if (!e->type.is_set()) return reify_atom(ast::make(Op::Eq, {e, literal(u, e->type)}));
  bool clipped = false;
  const auto uni = universe(e, clipped);
  for (const auto& w : u.elements())
    if (!std::binary_search(uni.begin(), uni.end(), w)) return const_lit(false);
  std::vector<Lit> parts;
  for (const auto& w : uni) {
    const Lit m = member(e, w);
    parts.push_back(u.contains(w) ? m : !m);
  }
  return make_and(std::move(parts));
}

Lit Store::member(const Expr& s, const Value& u) {
  const std::string key = model::to_string(s) + "\x1f" + value_key(u);
  if (auto it = members_.find(key); it != members_.end()) return it->second;
  Lit lit = const_lit(false);
  switch (s->op) {
    case Op::Ident: {
      auto it = names_.find(s->name);
      const SetVar& v = sets_[static_cast<std::size_t>(it->second.second)];
      auto pos = std::lower_bound(v.universe.begin(), v.universe.end(), u);
      if (pos != v.universe.end() && *pos == u)
        lit = Lit{v.flags[static_cast<std::size_t>(pos - v.universe.begin())], false};
      break;
    }
    case Op::EmptySet: break;
    case Op::SetLit: {
      std::vector<Lit> alts;
      for (const auto& a : s->args) alts.push_back(equals_value(a, u));
      lit = make_or(std::move(alts));
      break;
    }
    case Op::Interval: {
      const Expr x = ast::int_lit(u.as_int());
      lit = make_and({!reify_atom(ast::make(Op::Lt, {x, s->args[0]})), !reify_atom(ast::make(Op::Lt, {s->args[1], x}))});
      break;
    }
    case Op::Union: lit = make_or({member(s->args[0], u), member(s->args[1], u)}); break;
    case Op::Inter: lit = make_and({member(s->args[0], u), member(s->args[1], u)}); break;
    case Op::Diff: lit = make_and({member(s->args[0], u), !member(s->args[1], u)}); break;
    case Op::SortSet:
    case Op::BoolSet: lit = const_lit(true); break;
    case Op::IntSet: lit = const_lit(s->num == 0 || u.as_int() >= s->num - 1); break;
    default: throw Unsupported("unsupported set expression " + model::to_string(s));
  }
  members_.emplace(key, lit);
  return lit;
}

Lit Store::membership(const Pred& atom, const Expr& e, const Expr& s) {
  (void)atom;
  if (!e->type.is_set()) {
    if (s->op == Op::IntSet) {
      if (s->num == 0) return const_lit(true);
      return !reify_atom(ast::make(Op::Lt, {e, ast::int_lit(s->num - 1)}));
    }
    if (s->op == Op::Interval)
      return make_and({!reify_atom(ast::make(Op::Lt, {e, s->args[0]})), !reify_atom(ast::make(Op::Lt, {s->args[1], e}))});
  }
  bool clipped = false;
  const auto uni = universe(s, clipped);
  if (e->op == Op::Ident && !e->type.is_set()) {
    const int x = names_.at(e->name).second;
    Prop p{PropKind::Element, Lit{new_bool("in"), false}, {}, {}, x, -1, nullptr, nullptr, {x}, {}};
    const IntDomain& dom = scalars_[static_cast<std::size_t>(x)].dom;
    for (const auto& u : uni) {
      if (!dom.contains(encode(u))) continue;
      p.codes.push_back(encode(u));
      p.lits.push_back(member(s, u));
    }
    // member() may have been memoised in a different order; sort by code
    std::vector<std::size_t> idx(p.codes.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return p.codes[i] < p.codes[j]; });
    std::vector<std::int64_t> codes;
    std::vector<Lit> lits;
    for (std::size_t i : idx) {
      codes.push_back(p.codes[i]);
      lits.push_back(p.lits[i]);
    }
    p.codes = std::move(codes);
    p.lits = std::move(lits);
    const Lit r = p.r;
    add_prop(std::move(p));
    return r;
  }
  std::vector<Lit> alts;
  for (const auto& u : uni) alts.push_back(make_and({equals_value(e, u), member(s, u)}));
  return make_or(std::move(alts));
}

Lit Store::set_equality(const Expr& a, const Expr& b) {
  bool clipped = false;
  const auto uni = unite(universe(a, clipped), universe(b, clipped));
  std::vector<Lit> parts;
  for (const auto& u : uni) parts.push_back(make_equiv(member(a, u), member(b, u)));
  return make_and(std::move(parts));
}

Lit Store::subset(const Expr& a, const Expr& b) {
  bool clipped = false;
  std::vector<Lit> parts;
  for (const auto& u : universe(a, clipped)) parts.push_back(make_or({!member(a, u), member(b, u)}));
  return make_and(std::move(parts));
}

// --- quantifiers ---------------------------------------------------------------

std::optional<std::vector<Value>> Store::binder_range(const Pred& q) {
  const std::string& x = q->name;
  const Ty& t = q->binder_type;
  std::optional<std::vector<Value>> range;
  std::optional<std::int64_t> lo, hi;
  auto restrict_to = [&](std::vector<Value> vals) {
    vals = sorted_unique(std::move(vals));
    range = range ? intersect(*range, vals) : vals;
  };
  for (const auto& c : model::restricting_conjuncts(q)) {
    if (!model::is_atom_op(c->op)) continue;
    for (int side = 0; side < 2; ++side) {
      const Expr& v = c->args[static_cast<std::size_t>(side)];
      const Expr& e = c->args[static_cast<std::size_t>(1 - side)];
      if (v->op != Op::Ident || v->name != x || model::occurs_free(x, e)) continue;
      bool clipped = false;
      try {
        if (side == 0 && c->op == Op::In) {
          auto u = universe(e, clipped);
          if (!clipped) restrict_to(std::move(u));
        } else if (side == 0 && c->op == Op::Subset) {
          auto u = universe(e, clipped);
          if (!clipped && u.size() <= kMaxPowersetBase) restrict_to(powerset(u));
        } else if (c->op == Op::Eq) {
          auto u = possible_values(e, t, clipped);
          if (!clipped) restrict_to(std::move(u));
        } else if (t.kind() == Ty::Kind::Int && c->op != Op::In && c->op != Op::NotIn && c->op != Op::Neq &&
                   c->op != Op::Subset) {
          const Interval iv = forward(compile(e));
          Op op = c->op;
          if (side == 1) op = op == Op::Lt ? Op::Gt : op == Op::Gt ? Op::Lt : op == Op::Le ? Op::Ge : Op::Le;
          if (op == Op::Lt && iv.hi < kInf) hi = std::min(hi.value_or(kInf), iv.hi - 1);
          if (op == Op::Le && iv.hi < kInf) hi = std::min(hi.value_or(kInf), iv.hi);
          if (op == Op::Gt && iv.lo > -kInf) lo = std::max(lo.value_or(-kInf), iv.lo + 1);
          if (op == Op::Ge && iv.lo > -kInf) lo = std::max(lo.value_or(-kInf), iv.lo);
        }
      } catch (const Unsupported&) {
      }
    }
  }
  if (t.kind() == Ty::Kind::Int) {
    if (range || (lo && hi)) {
      std::vector<Value> vals = range ? *range : std::vector<Value>{};
      if (!range) {
        if (*hi - *lo + 1 > static_cast<std::int64_t>(kExpandLimit)) return std::nullopt;
        vals = int_range(*lo, *hi);
      }
      std::erase_if(vals, [&](const Value& v) {
        return (lo && v.as_int() < *lo) || (hi && v.as_int() > *hi);
      });
      return vals;
    }
    return std::nullopt;
  }
  if (range) return range;
  if (t.is_set()) {
    try {
      bool clipped = false;
      (void)clipped;
      const auto base = model::type_universe(t.element(), ctx_);
      if (base.size() <= kMaxPowersetBase) return powerset(base);
    } catch (const model::EvalError&) {
    }
    return std::nullopt;
  }
  return model::type_universe(t, ctx_);
}

Lit Store::reify_quantifier(const Pred& q) {
  const std::string key = "q:" + model::to_string(q);
  if (auto it = atoms_.find(key); it != atoms_.end()) return it->second;
  Lit lit;
  const auto range = binder_range(q);
  if (range && range->size() <= kExpandLimit) {
    std::vector<Lit> parts;
    for (const auto& u : *range)
      parts.push_back(reify(simplify::substitute(q->args[0], q->name, literal(u, q->binder_type))));
    lit = q->op == Op::Exists ? make_or(std::move(parts)) : make_and(std::move(parts));
  } else {
    if (q->binder_type.kind() == Ty::Kind::Int) clipped_ = true;
    lit = ground_prop(q);
  }
  atoms_.emplace(key, lit);
  return lit;
}

// --- integer terms ---------------------------------------------------------------

int Store::compile(const Expr& e) {
  const std::string key = model::to_string(e);
  if (auto it = term_memo_.find(key); it != term_memo_.end()) return it->second;
  Term t;
  t.expr = e;
  switch (e->op) {
    case Op::IntLit:
      t.kind = TermKind::Const;
      t.c = e->num;
      break;
    case Op::BoolLit:
      t.kind = TermKind::Const;
      t.c = e->num != 0 ? 1 : 0;
      break;
    case Op::ElemLit:
      t.kind = TermKind::Const;
      t.c = e->num;
      break;
    case Op::Ident: {
      auto it = names_.find(e->name);
      if (it == names_.end() || it->second.first) throw Unsupported("not a scalar variable: " + e->name);
      t.kind = TermKind::Var;
      t.var = it->second.second;
      break;
    }
    case Op::Neg:
      t.kind = TermKind::Neg;
      t.a = compile(e->args[0]);
      break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Mod:
      t.kind = e->op == Op::Add   ? TermKind::Add
               : e->op == Op::Sub ? TermKind::Sub
               : e->op == Op::Mul ? TermKind::Mul
                                  : TermKind::Opaque;
      t.a = compile(e->args[0]);
      t.b = compile(e->args[1]);
      break;
    case Op::Card: {
      t.kind = TermKind::Card;
      bool clipped = false;
      for (const auto& u : universe(e->args[0], clipped)) t.members.push_back(member(e->args[0], u));
      break;
    }
    default:
      throw Unsupported("unsupported scalar expression " + key);
  }
  terms_.push_back(std::move(t));
  const int id = static_cast<int>(terms_.size()) - 1;
  term_memo_.emplace(key, id);
  return id;
}

Store::Interval Store::forward(int id) const {
  const Term& t = terms_[static_cast<std::size_t>(id)];
  switch (t.kind) {
    case TermKind::Const: return {t.c, t.c};
    case TermKind::Var: {
      const IntDomain& d = scalars_[static_cast<std::size_t>(t.var)].dom;
      if (d.empty()) return {0, -1};
      return {d.lo(), d.hi()};
    }
    case TermKind::Neg: {
      const Interval a = forward(t.a);
      return {-a.hi, -a.lo};
    }
    case TermKind::Add: {
      const Interval a = forward(t.a), b = forward(t.b);
      return {sat_add(a.lo, b.lo), sat_add(a.hi, b.hi)};
    }
    case TermKind::Sub: {
      const Interval a = forward(t.a), b = forward(t.b);
      return {sat_add(a.lo, -b.hi), sat_add(a.hi, -b.lo)};
    }
    case TermKind::Mul: {
      const Interval a = forward(t.a), b = forward(t.b);
      const std::int64_t p[4] = {sat_mul(a.lo, b.lo), sat_mul(a.lo, b.hi), sat_mul(a.hi, b.lo), sat_mul(a.hi, b.hi)};
      return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
    }
    case TermKind::Card: {
      std::int64_t in = 0, possible = 0;
      for (Lit m : t.members) {
        const Truth v = value(m);
        if (v == Truth::True) ++in;
        if (v != Truth::False) ++possible;
      }
      return {in, possible};
    }
    case TermKind::Opaque: {
      const Interval a = forward(t.a), b = forward(t.b);
      if (a.lo == a.hi && b.lo == b.hi) {
        if (t.expr->op == Op::Div && b.lo != 0) return {a.lo / b.lo, a.lo / b.lo};
        if (t.expr->op == Op::Mod && a.lo >= 0 && b.lo > 0) return {a.lo % b.lo, a.lo % b.lo};
      }
      return {-kInf, kInf};
    }
  }
  return {-kInf, kInf};
}

bool Store::narrow(int id, std::int64_t lo, std::int64_t hi) {
  const Term& t = terms_[static_cast<std::size_t>(id)];
  const Interval cur = forward(id);
  if (lo <= cur.lo && hi >= cur.hi) return true;
  if (lo > hi) return false;
  switch (t.kind) {
    case TermKind::Const: return t.c >= lo && t.c <= hi;
    case TermKind::Var: {
      IntDomain d = scalars_[static_cast<std::size_t>(t.var)].dom;
      d.restrict(lo, hi);
      return update_domain(t.var, std::move(d));
    }
    case TermKind::Neg: return narrow(t.a, -hi, -lo);
    case TermKind::Add: {
      const Interval b = forward(t.b);
      if (!narrow(t.a, sat_add(lo, -b.hi), sat_add(hi, -b.lo))) return false;
      const Interval a = forward(t.a);
      return narrow(t.b, sat_add(lo, -a.hi), sat_add(hi, -a.lo));
    }
    case TermKind::Sub: {
      const Interval b = forward(t.b);
      if (!narrow(t.a, sat_add(lo, b.lo), sat_add(hi, b.hi))) return false;
      const Interval a = forward(t.a);
      return narrow(t.b, sat_add(a.lo, -hi), sat_add(a.hi, -lo));
    }
    case TermKind::Mul: {
      const Interval a = forward(t.a), b = forward(t.b);
      auto by_factor = [&](int other, std::int64_t k) {
        if (k == 0) return lo <= 0 && hi >= 0;
        const std::int64_t l = lo <= -kInf ? -kInf : (k > 0 ? ceil_div(lo, k) : ceil_div(hi, k));
        const std::int64_t h = hi >= kInf ? kInf : (k > 0 ? floor_div(hi, k) : floor_div(lo, k));
        if (k < 0 && (lo <= -kInf || hi >= kInf)) {
          const std::int64_t l2 = hi >= kInf ? -kInf : ceil_div(hi, k);
          const std::int64_t h2 = lo <= -kInf ? kInf : floor_div(lo, k);
          return narrow(other, l2, h2);
        }
        return narrow(other, l, h);
      };
      if (b.lo == b.hi) return by_factor(t.a, b.lo);
      if (a.lo == a.hi) return by_factor(t.b, a.lo);
      return !(cur.hi < lo || cur.lo > hi);
    }
    case TermKind::Card: {
      if (lo > cur.hi || hi < cur.lo) return false;
      if (hi == cur.lo) {
        for (Lit m : t.members)
          if (value(m) == Truth::Unknown && !set_lit(m, false)) return false;
      } else if (lo == cur.hi) {
        for (Lit m : t.members)
          if (value(m) == Truth::Unknown && !set_lit(m, true)) return false;
      }
      return true;
    }
    case TermKind::Opaque:
      if (cur.lo == cur.hi) return cur.lo >= lo && cur.lo <= hi;
      return true;
  }
  return true;
}

bool Store::linear(int id, std::int64_t coef, std::map<int, std::int64_t>& vars, std::int64_t& k) const {
  const Term& t = terms_[static_cast<std::size_t>(id)];
  switch (t.kind) {
    case TermKind::Const:
      k += coef * t.c;
      return true;
    case TermKind::Var: {
      const IntDomain& d = scalars_[static_cast<std::size_t>(t.var)].dom;
      if (d.fixed()) {
        k += coef * d.value();
      } else {
        vars[t.var] += coef;
      }
      return true;
    }
    case TermKind::Neg: return linear(t.a, -coef, vars, k);
    case TermKind::Add: return linear(t.a, coef, vars, k) && linear(t.b, coef, vars, k);
    case TermKind::Sub: return linear(t.a, coef, vars, k) && linear(t.b, -coef, vars, k);
    case TermKind::Mul: {
      const Interval a = forward(t.a), b = forward(t.b);
      if (a.lo == a.hi && std::abs(a.lo) < kInf) return linear(t.b, coef * a.lo, vars, k);
      if (b.lo == b.hi && std::abs(b.lo) < kInf) return linear(t.a, coef * b.lo, vars, k);
      return false;
    }
    default: {
      const Interval v = forward(id);
      if (v.lo != v.hi || std::abs(v.lo) >= kInf) return false;
      k += coef * v.lo;
      return true;
    }
  }
}

std::optional<std::pair<int, std::int64_t>> Store::single_var_solution(int ta, int tb, bool& unsolvable) const {
  std::map<int, std::int64_t> vars;
  std::int64_t k = 0;
  unsolvable = false;
  if (!linear(ta, 1, vars, k) || !linear(tb, -1, vars, k)) return std::nullopt;
  std::erase_if(vars, [](const auto& kv) { return kv.second == 0; });
  if (vars.size() != 1) {
    if (vars.empty() && k != 0) unsolvable = true;
    return std::nullopt;
  }
  const auto [var, c] = *vars.begin();
  if ((-k) % c != 0) {
    unsolvable = true;
    return std::nullopt;
  }
  return std::make_pair(var, -k / c);
}

}  // namespace bdead::kernel
