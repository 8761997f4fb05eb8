#include "bdead/mc.hpp"

#include <deque>
#include <functional>
#include <unordered_map>

#include "bdead/kernel/solve.hpp"

namespace bdead::mc {

using model::Op;
namespace ast = model::ast;

const char* mc_kind_name(McKind k) {
  switch (k) {
    case McKind::DeadlockFound: return "deadlock";
    case McKind::NoDeadlockExhausted: return "no deadlock";
    case McKind::NoDeadlockWithin: return "no deadlock within bound";
    case McKind::Error: return "error";
  }
  return "?";
}

namespace {

constexpr std::size_t kMaxWarnings = 20;

bool check(const Pred& p, const Valuation& v, const model::EvalContext& ctx, const std::string& what) {
  const auto r = model::eval(p, v, ctx);
  if (model::is_wd(r)) throw WdFailure(std::get<model::WdError>(r), what);
  return std::get<bool>(r);
}

Valuation apply_actions(const model::Event& e, const Valuation& v, const Valuation& params,
                        const model::EvalContext& ctx) {
  Valuation env = v;
  for (const auto& [k, x] : params) env.insert_or_assign(k, x);
  Valuation next = v;
  for (const auto& a : e.actions) {
    auto r = model::eval_expr(a.value, env, ctx);
    if (auto* err = std::get_if<model::WdError>(&r)) throw WdFailure(*err, "action of " + e.name);
    next.insert_or_assign(a.var, std::get<model::Value>(std::move(r)));
  }
  return next;
}

}  // namespace

std::vector<Valuation> initial_states(const model::TypedMachine& m, std::int64_t maxint) {
  const model::EvalContext ctx{m->sorts, maxint};
  const Pred axioms = model::axioms_predicate(m.machine());
  std::vector<Valuation> constants;
  if (m->constants.empty()) {
    if (check(axioms, {}, ctx, "axioms")) constants.emplace_back();
  } else {
    std::vector<Pred> parts{axioms};
    const auto fv = model::free_vars(axioms);
    for (const auto& c : m->constants) {
      if (fv.contains(c.name)) continue;
      const auto id = ast::ident(c.name, c.type);
      parts.push_back(ast::make(Op::Eq, {id, id}));
    }
    std::vector<model::Decl> decls(m->constants.begin(), m->constants.end());
    kernel::SolveOptions so;
    so.maxint = maxint;
    so.time = std::chrono::minutes(1);
    const auto r = kernel::solve_all(ast::conj(parts), {m->sorts, decls}, so, [&](const Valuation& v) {
      constants.push_back(v);
      return true;
    });
    if (r.outcome == kernel::Outcome::WDError) throw WdFailure(*r.wd, "axioms");
    if (r.outcome == kernel::Outcome::Unknown)
      throw std::runtime_error("cannot enumerate constant values: " + r.reason);
  }
  std::vector<Valuation> out;
  for (const auto& c : constants) out.push_back(apply_actions(m->init, c, {}, ctx));
  return out;
}

Successors successors(const model::TypedMachine& m, const Valuation& v, std::optional<std::size_t> cap,
                      std::int64_t maxint) {
  const model::EvalContext ctx{m->sorts, maxint};
  Successors out;
  for (const auto& e : m->events) {
    const Pred guard = ast::conj(e.guards);
    Valuation env = v;
    Valuation params;
    std::function<bool(std::size_t)> bind = [&](std::size_t i) {
      if (i == e.params.size()) {
        if (!check(guard, env, ctx, "guard of " + e.name)) return true;
        if (cap && out.next.size() >= *cap) {
          out.truncated = true;
          return false;
        }
        out.next.push_back({e.name, params, apply_actions(e, v, params, ctx)});
        return true;
      }
      const auto& p = e.params[i];
      for (const auto& x : model::binder_candidates(p.name, p.type, e.guards, env, ctx)) {
        env.insert_or_assign(p.name, x);
        params.insert_or_assign(p.name, x);
        if (!bind(i + 1)) return false;
      }
      env.erase(p.name);
      params.erase(p.name);
      return true;
    };
    if (!bind(0)) break;
  }
  return out;
}

McResult model_check(const model::TypedMachine& m, const McOptions& opts) {
  McResult res;
  const model::EvalContext ctx{m->sorts, opts.maxint};
  const Pred invariants = model::invariants_predicate(m.machine());

  struct Node {
    Valuation state;
    long parent;
    std::string event;
    Valuation params;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::string, std::size_t> seen;
  std::deque<std::size_t> frontier;

  auto trace_to = [&](std::size_t id) {
    std::vector<Transition> t;
    for (long i = static_cast<long>(id); i >= 0; i = nodes[static_cast<std::size_t>(i)].parent) {
      const Node& n = nodes[static_cast<std::size_t>(i)];
      t.push_back({n.event, n.params, n.state});
    }
    return std::vector<Transition>(t.rbegin(), t.rend());
  };
  auto add = [&](Valuation s, long parent, std::string event, Valuation params) {
    auto [it, fresh] = seen.emplace(model::encode_valuation(s), nodes.size());
    if (!fresh) return;
    if (!check(invariants, s, ctx, "invariants") && res.warnings.size() < kMaxWarnings)
      res.warnings.push_back("invariant violated in " + model::format_valuation(s, m->sorts));
    nodes.push_back({std::move(s), parent, std::move(event), std::move(params)});
    frontier.push_back(nodes.size() - 1);
  };

  std::size_t current = 0;
  bool expanding = false;
  try {
    for (auto& s : initial_states(m, opts.maxint)) add(std::move(s), -1, "INITIALISATION", {});
    while (!frontier.empty()) {
      if (res.states_visited >= opts.max_states) {
        res.kind = McKind::NoDeadlockWithin;
        return res;
      }
      if (opts.order == Order::BFS) {
        current = frontier.front();
        frontier.pop_front();
      } else {
        current = frontier.back();
        frontier.pop_back();
      }
      ++res.states_visited;
      expanding = true;
      Successors succ = successors(m, nodes[current].state, opts.max_outdegree, opts.maxint);
      expanding = false;
      res.truncated |= succ.truncated;
      if (succ.next.empty() && (!opts.goal || check(*opts.goal, nodes[current].state, ctx, "goal"))) {
        res.kind = McKind::DeadlockFound;
        res.trace = trace_to(current);
        res.state = nodes[current].state;
        return res;
      }
      for (auto& t : succ.next) add(std::move(t.state), static_cast<long>(current), std::move(t.event), std::move(t.params));
    }
  } catch (const WdFailure& e) {
    res.kind = McKind::Error;
    res.wd = e.error;
    res.reason = e.what();
    if (expanding) {
      res.trace = trace_to(current);
      res.state = nodes[current].state;
    }
    return res;
  } catch (const std::exception& e) {
    res.kind = McKind::Error;
    res.reason = e.what();
    return res;
  }
  res.kind = res.truncated ? McKind::NoDeadlockWithin : McKind::NoDeadlockExhausted;
  return res;
}

}  // namespace bdead::mc
