#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdead/kernel/store.hpp"
#include "bdead/simplify.hpp"
#include "kernel/arith.hpp"

namespace bdead::kernel {

using model::Op;
using model::Ty;

Store::Store(const Scope& scope, const Pred& shape, std::int64_t maxint) : scope_(scope) {
  ctx_.sorts = scope_.sorts;
  ctx_.maxint = maxint;
  bools_.push_back({Truth::True, {}, "TRUE"});
  const auto free = model::free_vars(shape);
  for (const auto& d : scope_.decls)
    if (free.contains(d.name)) declare(d);
  for (const auto& name : free)
    if (!names_.contains(name)) throw std::invalid_argument("identifier '" + name + "' is not in scope");
  infer_scope(shape);
}

int Store::sort_index(const std::string& name) const {
  for (std::size_t i = 0; i < scope_.sorts.size(); ++i)
    if (scope_.sorts[i].name == name) return static_cast<int>(i);
  throw std::invalid_argument("unknown carrier set '" + name + "'");
}

std::int64_t Store::encode(const Value& v) const {
  switch (v.kind()) {
    case Value::Kind::Int: return v.as_int();
    case Value::Kind::Bool: return v.as_bool() ? 1 : 0;
    case Value::Kind::Elem: return v.index();
    case Value::Kind::Set: break;
  }
  throw std::logic_error("set value has no scalar encoding");
}

Value Store::decode(std::int64_t code, const Ty& t) const {
  switch (t.kind()) {
    case Ty::Kind::Bool: return Value::boolean(code != 0);
    case Ty::Kind::Sort: return Value::element(sort_index(t.sort_name()), static_cast<int>(code));
    default: return Value::integer(code);
  }
}

void Store::declare(const model::Decl& d) {
  const Ty& t = d.type;
  if (t.is_set()) {
    SetVar s{d.name, t, {}, {}, false};
    const Ty& elem = t.element();
    if (elem.kind() == Ty::Kind::Int) {
      s.universe = model::type_universe(elem, ctx_);
      s.clipped = true;
    } else {
      try {
        s.universe = model::type_universe(elem, ctx_);
      } catch (const model::EvalError&) {
        throw Unsupported("universe of '" + d.name + "' is too large");
      }
    }
    names_[d.name] = {true, static_cast<int>(sets_.size())};
    order_.emplace_back(true, static_cast<int>(sets_.size()));
    sets_.push_back(std::move(s));
    return;
  }
  ScalarVar v{d.name, t, {}, {}, false};
  switch (t.kind()) {
    case Ty::Kind::Bool: v.dom = IntDomain(0, 1); break;
    case Ty::Kind::Sort: {
      const auto& s = scope_.sorts[static_cast<std::size_t>(sort_index(t.sort_name()))];
      v.dom = IntDomain(0, static_cast<std::int64_t>(s.elements.size()) - 1);
      break;
    }
    default:
      v.dom = IntDomain(-ctx_.maxint, ctx_.maxint);
      v.clipped = true;
      break;
  }
  names_[d.name] = {false, static_cast<int>(scalars_.size())};
  order_.emplace_back(false, static_cast<int>(scalars_.size()));
  scalars_.push_back(std::move(v));
}

bool Store::set_fixed(const SetVar& s) const {
  return std::all_of(s.flags.begin(), s.flags.end(), [&](int f) { return bools_[static_cast<std::size_t>(f)].value != Truth::Unknown; });
}

Value Store::set_value(const SetVar& s) const {
  std::vector<Value> elems;
  for (std::size_t i = 0; i < s.universe.size(); ++i)
    if (bools_[static_cast<std::size_t>(s.flags[i])].value == Truth::True) elems.push_back(s.universe[i]);
  return Value::set(std::move(elems));
}

int Store::new_bool(std::string label) {
  bools_.push_back({Truth::Unknown, {}, std::move(label)});
  return static_cast<int>(bools_.size()) - 1;
}

Truth Store::value(Lit l) const {
  const Truth t = bools_[static_cast<std::size_t>(l.var)].value;
  if (t == Truth::Unknown || !l.neg) return t;
  return t == Truth::True ? Truth::False : Truth::True;
}

bool Store::set_lit(Lit l, bool v) {
  const Truth want = (v != l.neg) ? Truth::True : Truth::False;
  BoolVar& b = bools_[static_cast<std::size_t>(l.var)];
  if (b.value == want) return true;
  if (b.value != Truth::Unknown) return false;
  b.value = want;
  trail_.emplace_back(BoolUndo{l.var});
  if (trace_) log("set " + b.label + " = " + (want == Truth::True ? "TRUE" : "FALSE"));
  enqueue_all(b.subs);
  return true;
}

bool Store::update_domain(int var, IntDomain next) {
  ScalarVar& v = scalars_[static_cast<std::size_t>(var)];
  if (next == v.dom) return true;
  trail_.emplace_back(DomUndo{var, v.dom});
  v.dom = std::move(next);
  if (trace_) log("dom " + v.name + " = " + v.dom.str());
  if (v.dom.empty()) return false;
  enqueue_all(v.subs);
  return true;
}

void Store::enqueue(int prop) {
  if (queued_[static_cast<std::size_t>(prop)]) return;
  queued_[static_cast<std::size_t>(prop)] = 1;
  agenda_.push_back(prop);
}

void Store::enqueue_all(const std::vector<int>& subs) {
  for (int p : subs) enqueue(p);
}

int Store::add_prop(Prop p) {
  const int id = static_cast<int>(props_.size());
  auto sub_bool = [&](Lit l) {
    if (l.var != 0) bools_[static_cast<std::size_t>(l.var)].subs.push_back(id);
  };
  sub_bool(p.r);
  for (Lit l : p.lits) sub_bool(l);
  for (int v : p.scalar_deps) scalars_[static_cast<std::size_t>(v)].subs.push_back(id);
  for (int s : p.set_deps)
    for (int f : sets_[static_cast<std::size_t>(s)].flags) bools_[static_cast<std::size_t>(f)].subs.push_back(id);
  props_.push_back(std::move(p));
  queued_.push_back(0);
  enqueue(id);
  return id;
}

void Store::backtrack(std::size_t cp) {
  while (trail_.size() > cp) {
    std::visit(
        [&](auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, BoolUndo>) {
            bools_[static_cast<std::size_t>(e.var)].value = Truth::Unknown;
          } else {
            scalars_[static_cast<std::size_t>(e.var)].dom = std::move(e.old);
          }
        },
        trail_.back());
    trail_.pop_back();
  }
  for (int p : agenda_) queued_[static_cast<std::size_t>(p)] = 0;
  agenda_.clear();
  if (trace_) log("backtrack to " + std::to_string(cp));
}

Status Store::propagate() {
  if (failed_) return Status::Inconsistent;
  while (!agenda_.empty()) {
    const int id = agenda_.front();
    agenda_.pop_front();
    queued_[static_cast<std::size_t>(id)] = 0;
    const Status st = run(id);
    if (st != Status::Fixpoint) {
      for (int p : agenda_) queued_[static_cast<std::size_t>(p)] = 0;
      agenda_.clear();
      return st;
    }
  }
  return Status::Fixpoint;
}

Status Store::run(int id) {
  const Prop& p = props_[static_cast<std::size_t>(id)];
  switch (p.kind) {
    case PropKind::And: return run_and(p);
    case PropKind::Equiv: return run_equiv(p);
    case PropKind::Less: return run_less(p);
    case PropKind::Equal: return run_equal(p);
    case PropKind::Element: return run_element(p);
    case PropKind::Ground: return ground_check(p);
  }
  return Status::Fixpoint;
}

#define BDEAD_TRY(expr) \
  if (!(expr)) return Status::Inconsistent

Status Store::run_and(const Prop& p) {
  const Truth r = value(p.r);
  std::size_t unknown = 0;
  Lit last{};
  for (Lit l : p.lits) {
    const Truth t = value(l);
    if (t == Truth::False) {
      BDEAD_TRY(set_lit(p.r, false));
      return Status::Fixpoint;
    }
    if (t == Truth::Unknown) {
      ++unknown;
      last = l;
    }
  }
  if (unknown == 0) {
    BDEAD_TRY(set_lit(p.r, true));
    return Status::Fixpoint;
  }
  if (r == Truth::True) {
    for (Lit l : p.lits) BDEAD_TRY(set_lit(l, true));
  } else if (r == Truth::False && unknown == 1) {
    BDEAD_TRY(set_lit(last, false));
  }
  return Status::Fixpoint;
}

Status Store::run_equiv(const Prop& p) {
  const Lit a = p.lits[0];
  const Lit b = p.lits[1];
  const Truth tr = value(p.r), ta = value(a), tb = value(b);
  auto is = [](Truth t) { return t == Truth::True; };
  if (ta != Truth::Unknown && tb != Truth::Unknown) {
    BDEAD_TRY(set_lit(p.r, ta == tb));
  } else if (tr != Truth::Unknown && ta != Truth::Unknown) {
    BDEAD_TRY(set_lit(b, is(tr) == is(ta)));
  } else if (tr != Truth::Unknown && tb != Truth::Unknown) {
    BDEAD_TRY(set_lit(a, is(tr) == is(tb)));
  }
  return Status::Fixpoint;
}

Status Store::run_less(const Prop& p) {
  const Interval a = forward(p.ta);
  const Interval b = forward(p.tb);
  switch (value(p.r)) {
    case Truth::True:
      BDEAD_TRY(narrow(p.ta, -kInf, sat_add(b.hi, -1)));
      BDEAD_TRY(narrow(p.tb, sat_add(forward(p.ta).lo, 1), kInf));
      break;
    case Truth::False:
      BDEAD_TRY(narrow(p.ta, b.lo, kInf));
      BDEAD_TRY(narrow(p.tb, -kInf, forward(p.ta).hi));
      break;
    case Truth::Unknown:
      if (a.hi < b.lo) {
        BDEAD_TRY(set_lit(p.r, true));
      } else if (a.lo >= b.hi) {
        BDEAD_TRY(set_lit(p.r, false));
      }
      break;
  }
  return ground_check(p);
}

Status Store::run_equal(const Prop& p) {
  const Interval a = forward(p.ta);
  const Interval b = forward(p.tb);
  const Term& ta = terms_[static_cast<std::size_t>(p.ta)];
  const Term& tb = terms_[static_cast<std::size_t>(p.tb)];
  const bool both_vars = ta.kind == TermKind::Var && tb.kind == TermKind::Var;
  bool unsolvable = false;
  const auto single = single_var_solution(p.ta, p.tb, unsolvable);
  switch (value(p.r)) {
    case Truth::True: {
      if (unsolvable) return Status::Inconsistent;
      BDEAD_TRY(narrow(p.ta, b.lo, b.hi));
      BDEAD_TRY(narrow(p.tb, forward(p.ta).lo, forward(p.ta).hi));
      if (both_vars) {
        IntDomain da = scalars_[static_cast<std::size_t>(ta.var)].dom;
        const IntDomain& db = scalars_[static_cast<std::size_t>(tb.var)].dom;
        if (da.size() <= 4096 && db.size() <= 4096) {
          da.keep_only(db.values());
          BDEAD_TRY(update_domain(ta.var, da));
          BDEAD_TRY(update_domain(tb.var, da));
        }
      }
      if (single) {
        IntDomain d = scalars_[static_cast<std::size_t>(single->first)].dom;
        d.assign(single->second);
        BDEAD_TRY(update_domain(single->first, std::move(d)));
      }
      break;
    }
    case Truth::False:
      if (single) {
        IntDomain d = scalars_[static_cast<std::size_t>(single->first)].dom;
        d.remove(single->second);
        BDEAD_TRY(update_domain(single->first, std::move(d)));
      }
      if (a.lo == a.hi && b.lo == b.hi && a.lo == b.lo) return Status::Inconsistent;
      break;
    case Truth::Unknown: {
      bool disjoint = a.hi < b.lo || b.hi < a.lo || unsolvable;
      if (!disjoint && both_vars) {
        const IntDomain& da = scalars_[static_cast<std::size_t>(ta.var)].dom;
        const IntDomain& db = scalars_[static_cast<std::size_t>(tb.var)].dom;
        if (da.size() <= 4096 && db.size() <= 4096) {
          disjoint = true;
          for (std::int64_t v : da.values())
            if (db.contains(v)) {
              disjoint = false;
              break;
            }
        }
      }
      if (!disjoint && single && !scalars_[static_cast<std::size_t>(single->first)].dom.contains(single->second))
        disjoint = true;
      if (disjoint) {
        BDEAD_TRY(set_lit(p.r, false));
      } else if (a.lo == a.hi && b.lo == b.hi && a.lo == b.lo) {
        BDEAD_TRY(set_lit(p.r, true));
      }
      break;
    }
  }
  return ground_check(p);
}

Status Store::run_element(const Prop& p) {
  const int x = p.ta;
  const IntDomain& dom = scalars_[static_cast<std::size_t>(x)].dom;
  auto cand = [&](std::int64_t v) -> const Lit* {
    auto it = std::lower_bound(p.codes.begin(), p.codes.end(), v);
    if (it == p.codes.end() || *it != v) return nullptr;
    return &p.lits[static_cast<std::size_t>(it - p.codes.begin())];
  };
  switch (value(p.r)) {
    case Truth::True: {
      std::vector<std::int64_t> allowed;
      for (std::size_t i = 0; i < p.codes.size(); ++i)
        if (value(p.lits[i]) != Truth::False) allowed.push_back(p.codes[i]);
      IntDomain d = dom;
      d.keep_only(allowed);
      BDEAD_TRY(update_domain(x, std::move(d)));
      const IntDomain& now = scalars_[static_cast<std::size_t>(x)].dom;
      if (now.fixed()) {
        if (const Lit* m = cand(now.value())) BDEAD_TRY(set_lit(*m, true));
      }
      break;
    }
    case Truth::False: {
      IntDomain d = dom;
      for (std::size_t i = 0; i < p.codes.size(); ++i)
        if (value(p.lits[i]) == Truth::True) d.remove(p.codes[i]);
      BDEAD_TRY(update_domain(x, std::move(d)));
      const IntDomain& now = scalars_[static_cast<std::size_t>(x)].dom;
      if (now.fixed()) {
        if (const Lit* m = cand(now.value())) BDEAD_TRY(set_lit(*m, false));
      }
      break;
    }
    case Truth::Unknown: {
      bool possible = false;
      std::uint64_t certain = 0;
      for (std::size_t i = 0; i < p.codes.size(); ++i) {
        if (!dom.contains(p.codes[i])) continue;
        const Truth t = value(p.lits[i]);
        if (t != Truth::False) possible = true;
        if (t == Truth::True) ++certain;
      }
      if (!possible) {
        BDEAD_TRY(set_lit(p.r, false));
      } else if (certain == dom.size()) {
        BDEAD_TRY(set_lit(p.r, true));
      }
      break;
    }
  }
  return Status::Fixpoint;
}

bool Store::ground(const Prop& p) const {
  for (int v : p.scalar_deps)
    if (!scalars_[static_cast<std::size_t>(v)].dom.fixed()) return false;
  for (int s : p.set_deps)
    if (!set_fixed(sets_[static_cast<std::size_t>(s)])) return false;
  return true;
}

Status Store::ground_check(const Prop& p) {
  if (!p.pred || !ground(p)) return Status::Fixpoint;
  Valuation v;
  for (int i : p.scalar_deps) {
    const auto& s = scalars_[static_cast<std::size_t>(i)];
    v.emplace(s.name, decode(s.dom.value(), s.type));
  }
  for (int i : p.set_deps) {
    const auto& s = sets_[static_cast<std::size_t>(i)];
    v.emplace(s.name, set_value(s));
  }
  model::TruthResult r;
  try {
    r = model::eval(p.pred, v, ctx_);
  } catch (const model::EvalError& e) {
    throw Unsupported(e.what());
  }
  if (model::is_wd(r)) {
    if (value(p.r) == Truth::Unknown) return Status::Fixpoint;
    if (!wd_) {
      wd_ = std::get<model::WdError>(r);
      if (p.source) {
        const auto src = model::eval(p.source, v, ctx_);
        if (model::is_wd(src)) wd_ = std::get<model::WdError>(src);
      }
    }
    if (trace_) log("wd " + model::to_string(p.pred));
    return Status::WDError;
  }
  BDEAD_TRY(set_lit(p.r, std::get<bool>(r)));
  return Status::Fixpoint;
}

#undef BDEAD_TRY

const IntDomain& Store::domain(std::string_view name) const {
  auto it = names_.find(name);
  if (it == names_.end() || it->second.first) throw std::invalid_argument("no scalar variable '" + std::string(name) + "'");
  return scalars_[static_cast<std::size_t>(it->second.second)].dom;
}

Truth Store::member_flag(std::string_view name, const Value& element) const {
  auto it = names_.find(name);
  if (it == names_.end() || !it->second.first) throw std::invalid_argument("no set variable '" + std::string(name) + "'");
  const SetVar& s = sets_[static_cast<std::size_t>(it->second.second)];
  auto pos = std::lower_bound(s.universe.begin(), s.universe.end(), element);
  if (pos == s.universe.end() || *pos != element) return Truth::False;
  return bools_[static_cast<std::size_t>(s.flags[static_cast<std::size_t>(pos - s.universe.begin())])].value;
}

Truth Store::truth(const Pred& atom) const {
  const auto key = simplify::normalize_atom(atom);
  auto it = atoms_.find(key.key);
  if (it == atoms_.end()) return Truth::Unknown;
  const Truth t = value(it->second);
  if (t == Truth::Unknown || key.positive) return t;
  return t == Truth::True ? Truth::False : Truth::True;
}

std::string Store::snapshot() const {
  std::ostringstream os;
  for (const auto& s : scalars_) os << s.name << "=" << s.dom.str() << "\n";
  for (const auto& s : sets_) {
    os << s.name << "=";
    for (int f : s.flags) {
      const Truth t = bools_[static_cast<std::size_t>(f)].value;
      os << (t == Truth::True ? '1' : t == Truth::False ? '0' : '?');
    }
    os << "\n";
  }
  for (const auto& b : bools_) os << static_cast<int>(b.value);
  os << "\n";
  for (const auto& [key, lit] : atoms_) os << key << "->" << lit.var << (lit.neg ? "-" : "+") << "\n";
  return os.str();
}

std::optional<Store::Decision> Store::choose() const {
  std::optional<Decision> best;
  double best_estimate = 0;
  for (const auto& [is_set, idx] : order_) {
    double estimate = 0;
    Decision d{is_set, idx, 0};
    if (is_set) {
      const SetVar& s = sets_[static_cast<std::size_t>(idx)];
      int unknown = 0;
      int first = -1;
      for (std::size_t i = 0; i < s.flags.size(); ++i) {
        if (bools_[static_cast<std::size_t>(s.flags[i])].value != Truth::Unknown) continue;
        if (first < 0) first = static_cast<int>(i);
        ++unknown;
      }
      if (unknown == 0) continue;
      estimate = std::ldexp(1.0, std::min(unknown, 1000));
      d.value = first;
    } else {
      const IntDomain& dom = scalars_[static_cast<std::size_t>(idx)].dom;
      if (dom.fixed()) continue;
      estimate = static_cast<double>(dom.size());
      d.value = dom.closest_to_zero();
    }
    if (!best || estimate < best_estimate) {
      best = d;
      best_estimate = estimate;
    }
  }
  return best;
}

bool Store::apply(const Decision& d, bool first_branch) {
  if (d.is_set) {
    const SetVar& s = sets_[static_cast<std::size_t>(d.var)];
    const Lit flag{s.flags[static_cast<std::size_t>(d.value)], false};
    if (trace_)
      log(std::string("decide ") + s.name + (first_branch ? " excludes " : " includes ") +
          model::format_value(s.universe[static_cast<std::size_t>(d.value)], scope_.sorts));
    return set_lit(flag, !first_branch);
  }
  const ScalarVar& v = scalars_[static_cast<std::size_t>(d.var)];
  if (trace_) log("decide " + v.name + (first_branch ? " = " : " /= ") + std::to_string(d.value));
  IntDomain next = v.dom;
  if (first_branch) {
    next.assign(d.value);
  } else {
    next.remove(d.value);
  }
  return update_domain(d.var, std::move(next));
}

Valuation Store::valuation() const {
  Valuation v;
  for (const auto& s : scalars_) v.emplace(s.name, decode(s.dom.value(), s.type));
  for (const auto& s : sets_) v.emplace(s.name, set_value(s));
  return v;
}

std::vector<std::string> Store::variable_names() const {
  std::vector<std::string> out;
  for (const auto& [is_set, idx] : order_)
    out.push_back(is_set ? sets_[static_cast<std::size_t>(idx)].name : scalars_[static_cast<std::size_t>(idx)].name);
  return out;
}

void Store::log(const std::string& line) const {
  if (trace_) *trace_ << "[kernel] " << line << "\n";
}

}  // namespace bdead::kernel
