#include "bdead/cbc.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "bdead/kernel/solve.hpp"
#include "bdead/simplify.hpp"

namespace bdead::cbc {

using model::Op;
namespace ast = model::ast;
using Clock = std::chrono::steady_clock;

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::DeadlockFound: return "deadlock";
    case Verdict::NoDeadlock: return "no deadlock";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

const model::Event& event_named(const model::TypedMachine& m, const std::string& name) {
  const model::Event* e = m->find_event(name);
  if (!e) throw std::invalid_argument("unknown event '" + name + "'");
  return *e;
}

kernel::Scope scope_of(const model::TypedMachine& m) { return {m->sorts, m.scope()}; }

kernel::SolveOptions solve_options(const CheckOptions& opts, std::chrono::milliseconds time) {
  kernel::SolveOptions so;
  so.maxint = opts.maxint;
  so.time = std::max(time, std::chrono::milliseconds{1});
  so.trace = opts.trace;
  return so;
}

Pred guard_of(const model::TypedMachine& m, const std::string& event, const Pred& ai, const CheckOptions& opts) {
  Pred g = model::enabling_predicate(event_named(m, event));
  if (opts.simplify) g = simplify::simplify(g, simplify::make_context(ai, opts.maxint));
  return g;
}

struct Dln {
  std::vector<Pred> conjuncts;
  std::vector<bool> is_guard;
};

Dln dln_parts(const model::TypedMachine& m, const Pred& ai, const std::vector<std::string>& events,
              const CheckOptions& opts) {
  Dln out;
  for (const auto& c : model::conjuncts(ai)) {
    if (c->op == Op::True) continue;
    out.conjuncts.push_back(c);
    out.is_guard.push_back(false);
  }
  std::vector<Pred> negated;
  for (const auto& e : events) negated.push_back(ast::negate(guard_of(m, e, ai, opts)));
  Pred deadlock = ast::conj(negated);
  if (opts.sort) deadlock = sort_conjuncts(deadlock);
  if (events.empty()) return out;
  for (const auto& c : model::conjuncts(deadlock)) {
    if (c->op == Op::True) continue;
    out.conjuncts.push_back(c);
    out.is_guard.push_back(true);
  }
  return out;
}

void count_atoms(const Pred& p, std::map<std::string, int>& freq) {
  if (model::is_atom_op(p->op)) {
    ++freq[simplify::normalize_atom(p).key];
    return;
  }
  if (!model::is_predicate_op(p->op)) return;
  for (const auto& a : p->args) count_atoms(a, freq);
}

Valuation default_values(const model::TypedMachine& m, Valuation v, std::int64_t maxint) {
  model::EvalContext ctx{m->sorts, maxint};
  for (const auto& d : m.scope()) {
    if (v.contains(d.name)) continue;
    switch (d.type.kind()) {
      case model::Ty::Kind::Int: v.emplace(d.name, model::Value::integer(0)); break;
      case model::Ty::Kind::Set: v.emplace(d.name, model::Value::set({})); break;
      default: v.emplace(d.name, model::type_universe(d.type, ctx).front()); break;
    }
  }
  return v;
}

}  // namespace

Pred build_ai(const model::TypedMachine& m, const CheckOptions& opts) {
  std::vector<Pred> parts{model::axioms_predicate(m.machine()), model::invariants_predicate(m.machine())};
  if (opts.goal) parts.push_back(*opts.goal);
  return ast::conj(std::move(parts));
}

std::vector<std::string> filter_events(const model::TypedMachine& m, const Pred& ai,
                                       const std::vector<std::string>& events, const CheckOptions& opts) {
  std::vector<std::string> kept;
  const auto scope = scope_of(m);
  for (const auto& e : events) {
    const Pred q = ast::conj({ai, guard_of(m, e, ai, opts)});
    const auto r = kernel::solve(q, scope, solve_options(opts, opts.event_timeout));
    if (r.outcome != kernel::Outcome::Unsat) kept.push_back(e);
  }
  return kept;
}

Pred build_dln(const model::TypedMachine& m, const Pred& ai, const std::vector<std::string>& events,
               const CheckOptions& opts) {
  return ast::conj(dln_parts(m, ai, events, opts).conjuncts);
}

Pred sort_conjuncts(const Pred& deadlock) {
  std::map<std::string, int> freq;
  count_atoms(deadlock, freq);
  std::vector<Pred> out;
  for (const auto& c : model::conjuncts(deadlock)) {
    if (c->op != Op::Not || c->args[0]->op != Op::And || !model::wd_free(c->args[0])) {
      out.push_back(c);
      continue;
    }
    std::vector<Pred> parts = c->args[0]->args;
    auto score = [&](const Pred& p) {
      return model::is_atom_op(p->op) ? freq[simplify::normalize_atom(p).key] : 0;
    };
    std::stable_sort(parts.begin(), parts.end(), [&](const Pred& a, const Pred& b) { return score(a) > score(b); });
    out.push_back(ast::negate(ast::with_args(c->args[0], std::move(parts))));
  }
  return ast::conj(std::move(out));
}

std::vector<Component> components(const std::vector<Pred>& conjuncts, const std::vector<bool>& is_guard) {
  std::vector<std::size_t> parent(conjuncts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < conjuncts.size(); ++i) {
    for (const auto& x : model::free_vars(conjuncts[i])) {
      auto [it, fresh] = owner.emplace(x, i);
      if (!fresh) {
        const std::size_t a = find(it->second), b = find(i);
        parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::map<std::size_t, Component> by_root;
  for (std::size_t i = 0; i < conjuncts.size(); ++i) {
    Component& c = by_root[find(i)];
    c.conjuncts.push_back(i);
    c.relevant |= is_guard[i];
  }
  std::vector<Component> out;
  for (auto& [root, c] : by_root) {
    std::vector<Pred> parts;
    for (std::size_t i : c.conjuncts) parts.push_back(conjuncts[i]);
    c.pred = ast::conj(std::move(parts));
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<GuardStatus> guard_table(const model::TypedMachine& m, const std::vector<std::string>& events,
                                     const Valuation& v, std::int64_t maxint) {
  const model::EvalContext ctx{m->sorts, maxint};
  std::vector<GuardStatus> out;
  for (const auto& name : events) {
    const model::Event& e = event_named(m, name);
    GuardStatus g{name, false, false, std::nullopt};
    const auto r = model::eval(model::enabling_predicate(e), v, ctx);
    g.wd = model::is_wd(r);
    g.enabled = model::is_true(r);
    if (!g.enabled && !g.wd) {
      std::set<std::string> params;
      for (const auto& p : e.params) params.insert(p.name);
      for (const auto& c : e.guards) {
        const auto fv = model::free_vars(c);
        if (std::any_of(fv.begin(), fv.end(), [&](const std::string& x) { return params.contains(x); })) continue;
        if (model::is_false(model::eval(c, v, ctx))) {
          g.falsified = c;
          break;
        }
      }
      if (!g.falsified) g.falsified = model::enabling_predicate(e);
    }
    out.push_back(std::move(g));
  }
  return out;
}

CbcResult check_deadlock(const model::TypedMachine& m, const CheckOptions& opts) {
  CbcResult res;
  const auto t_start = Clock::now();
  const auto deadline = t_start + opts.timeout;
  auto remaining = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  };

  std::vector<std::string> events;
  if (opts.events) {
    for (const auto& e : *opts.events) events.push_back(event_named(m, e).name);
  } else {
    for (const auto& e : m->events) events.push_back(e.name);
  }
  const Pred ai = build_ai(m, opts);

  auto t0 = Clock::now();
  res.considered = opts.filter ? filter_events(m, ai, events, opts) : events;
  for (const auto& e : events)
    if (std::find(res.considered.begin(), res.considered.end(), e) == res.considered.end()) res.dropped.push_back(e);
  res.filter_ms = ms_since(t0);

  t0 = Clock::now();
  const Dln dln = dln_parts(m, ai, res.considered, opts);
  res.dln = ast::conj(dln.conjuncts);
  if (opts.partition) {
    res.components = components(dln.conjuncts, dln.is_guard);
  } else {
    Component all{res.dln, {}, true};
    for (std::size_t i = 0; i < dln.conjuncts.size(); ++i) all.conjuncts.push_back(i);
    res.components.push_back(std::move(all));
  }
  res.build_ms = ms_since(t0);

  t0 = Clock::now();
  const auto scope = scope_of(m);
  Valuation state;
  std::vector<Pred> skipped;
  bool unknown = false;
  std::optional<model::WdError> wd;
  auto finish = [&](Verdict v) {
    res.verdict = v;
    res.solve_ms = ms_since(t0);
    return res;
  };
  for (const auto& c : res.components) {
    if (opts.drop_irrelevant && !c.relevant) {
      skipped.push_back(c.pred);
      continue;
    }
    const auto r = kernel::solve(c.pred, scope, solve_options(opts, remaining()));
    res.decisions += r.decisions;
    res.bounds_qualified |= r.bounds_clipped;
    switch (r.outcome) {
      case kernel::Outcome::Unsat: return finish(Verdict::NoDeadlock);
      case kernel::Outcome::WDError:
        if (!wd) wd = r.wd;
        break;
      case kernel::Outcome::Unknown:
        unknown = true;
        if (res.reason.empty()) res.reason = r.reason;
        break;
      case kernel::Outcome::Sat: state.insert(r.solution.begin(), r.solution.end()); break;
    }
  }
  if (wd) {
    res.wd = wd;
    res.reason = "well-definedness error in " + model::to_string(wd->where);
    return finish(Verdict::Unknown);
  }
  if (unknown) return finish(Verdict::Unknown);

  if (!skipped.empty()) {
    const auto r = kernel::solve(ast::conj(skipped), scope, solve_options(opts, remaining()));
    res.decisions += r.decisions;
    if (r.outcome == kernel::Outcome::Unsat) {
      res.bounds_qualified |= r.bounds_clipped;
      return finish(Verdict::NoDeadlock);
    }
    if (r.outcome != kernel::Outcome::Sat) {
      res.reason = "could not complete the deadlock state: " +
                   (r.outcome == kernel::Outcome::WDError ? std::string("well-definedness error") : r.reason);
      return finish(Verdict::Unknown);
    }
    state.insert(r.solution.begin(), r.solution.end());
  }
  state = default_values(m, std::move(state), opts.maxint);

  const model::EvalContext ctx{m->sorts, opts.maxint};
  try {
    if (!model::is_true(model::eval(ai, state, ctx))) {
      res.reason = "internal error: state violates axioms or invariants";
      return finish(Verdict::Unknown);
    }
    res.guards = guard_table(m, res.considered, state, opts.maxint);
    for (const auto& g : guard_table(m, res.dropped, state, opts.maxint)) res.guards.push_back(g);
    for (const auto& g : res.guards) {
      if (g.enabled || g.wd) {
        res.reason = "internal error: event " + g.event + " is not disabled in the reported state";
        return finish(Verdict::Unknown);
      }
    }
  } catch (const model::EvalError& e) {
    res.reason = std::string("cannot validate state: ") + e.what();
    return finish(Verdict::Unknown);
  }
  res.state = std::move(state);
  return finish(Verdict::DeadlockFound);
}

}  // namespace bdead::cbc
