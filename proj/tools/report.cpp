#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cli.hpp"

namespace bdead::cli {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

const char* result_kind_name(ResultKind k) {
  switch (k) {
    case ResultKind::Deadlock: return "deadlock";
    case ResultKind::NoDeadlock: return "noDeadlock";
    case ResultKind::NoDeadlockWithin: return "noDeadlockWithin";
    case ResultKind::Unknown: return "unknown";
    case ResultKind::WdError: return "wdError";
  }
  return "?";
}

int exit_code(const Report& r) {
  switch (r.kind) {
    case ResultKind::Deadlock: return 1;
    case ResultKind::NoDeadlock:
    case ResultKind::NoDeadlockWithin: return 0;
    case ResultKind::Unknown: return 2;
    case ResultKind::WdError: return 4;
  }
  return 2;
}

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : sep) + x;
  return out;
}

std::vector<std::pair<std::string, std::string>> echo(const RunOptions& o) {
  std::vector<std::pair<std::string, std::string>> out;
  if (o.goal) out.emplace_back("goal", *o.goal);
  if (o.events) out.emplace_back("events", join(*o.events, ","));
  out.emplace_back("maxint", std::to_string(o.maxint));
  if (o.mode == Mode::Cbc) {
    out.emplace_back("timeout", std::to_string(o.timeout_ms));
    out.emplace_back("eventTimeout", std::to_string(o.event_timeout_ms));
    out.emplace_back("simplify", o.no_simplify ? "false" : "true");
    out.emplace_back("sort", o.no_sort ? "false" : "true");
    out.emplace_back("partition", o.no_partition ? "false" : "true");
    out.emplace_back("filter", o.no_filter ? "false" : "true");
    out.emplace_back("dropIrrelevant", o.keep_irrelevant ? "false" : "true");
  } else {
    out.emplace_back("maxStates", std::to_string(o.max_states));
    if (o.max_outdegree) out.emplace_back("maxOutdegree", std::to_string(*o.max_outdegree));
    out.emplace_back("order", o.dfs ? "dfs" : "bfs");
  }
  return out;
}

std::vector<std::string> all_events(const model::TypedMachine& m) {
  std::vector<std::string> out;
  for (const auto& e : m->events) out.push_back(e.name);
  return out;
}

json value_json(const model::Value& v, std::span<const model::SortDecl> sorts) {
  switch (v.kind()) {
    case model::Value::Kind::Int: return v.as_int();
    case model::Value::Kind::Bool: return v.as_bool();
    case model::Value::Kind::Elem: return model::format_value(v, sorts);
    case model::Value::Kind::Set: {
      json arr = json::array();
      for (const auto& e : v.elements()) arr.push_back(value_json(e, sorts));
      return arr;
    }
  }
  return nullptr;
}

json valuation_json(const model::Valuation& v, std::span<const model::SortDecl> sorts) {
  json obj = json::object();
  for (const auto& [k, x] : v) obj[k] = value_json(x, sorts);
  return obj;
}

std::string fmt_ms(double ms) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << ms << " ms";
  return os.str();
}

}  // namespace

Report run_check(const RunOptions& opts, std::ostream& log) {
  const auto t_start = Clock::now();
  Report rep;
  rep.mode = opts.mode;
  rep.options = echo(opts);

  const std::string text = read_file(opts.file);
  const model::TypedMachine tm = model::typecheck(model::parse_machine(text));
  std::optional<model::Pred> goal;
  if (opts.goal) goal = model::typecheck_predicate(model::parse_predicate(*opts.goal), tm);
  rep.machine = tm->name;
  rep.sorts = tm->sorts;
  rep.timings.parse_ms = ms_since(t_start);

  if (opts.mode == Mode::Cbc) {
    cbc::CheckOptions co;
    co.goal = goal;
    co.events = opts.events;
    co.timeout = std::chrono::milliseconds(opts.timeout_ms);
    co.event_timeout = std::chrono::milliseconds(opts.event_timeout_ms);
    co.maxint = opts.maxint;
    co.simplify = !opts.no_simplify;
    co.sort = !opts.no_sort;
    co.partition = !opts.no_partition;
    co.filter = !opts.no_filter;
    co.drop_irrelevant = !opts.keep_irrelevant;
    co.trace = opts.trace_log ? &log : nullptr;
    const cbc::CbcResult r = cbc::check_deadlock(tm, co);
    rep.timings.build_ms = r.filter_ms + r.build_ms;
    rep.timings.solve_ms = r.solve_ms;
    rep.bounds_qualified = r.bounds_qualified;
    rep.dropped_events = r.dropped;
    rep.reason = r.reason;
    switch (r.verdict) {
      case cbc::Verdict::DeadlockFound:
        rep.kind = ResultKind::Deadlock;
        rep.state = r.state;
        rep.guards = r.guards;
        break;
      case cbc::Verdict::NoDeadlock: rep.kind = ResultKind::NoDeadlock; break;
      case cbc::Verdict::Unknown:
        rep.kind = r.wd ? ResultKind::WdError : ResultKind::Unknown;
        rep.wd = r.wd;
        break;
    }
  } else {
    mc::McOptions mo;
    mo.goal = goal;
    mo.max_states = opts.max_states;
    mo.max_outdegree = opts.max_outdegree;
    mo.order = opts.dfs ? mc::Order::DFS : mc::Order::BFS;
    mo.maxint = opts.maxint;
    const auto t0 = Clock::now();
    const mc::McResult r = mc::model_check(tm, mo);
    rep.timings.solve_ms = ms_since(t0);
    rep.states_visited = r.states_visited;
    rep.warnings = r.warnings;
    rep.trace = r.trace;
    rep.reason = r.reason;
    switch (r.kind) {
      case mc::McKind::DeadlockFound:
        rep.kind = ResultKind::Deadlock;
        rep.state = r.state;
        rep.guards = cbc::guard_table(tm, all_events(tm), r.state, opts.maxint);
        break;
      case mc::McKind::NoDeadlockExhausted: rep.kind = ResultKind::NoDeadlock; break;
      case mc::McKind::NoDeadlockWithin: rep.kind = ResultKind::NoDeadlockWithin; break;
      case mc::McKind::Error:
        rep.kind = r.wd ? ResultKind::WdError : ResultKind::Unknown;
        rep.wd = r.wd;
        if (r.wd) rep.state = r.state;
        break;
    }
  }
  rep.timings.total_ms = ms_since(t_start);
  return rep;
}

std::string emit_text(const Report& r) {
  std::ostringstream os;
  os << "machine " << r.machine << " (" << (r.mode == Mode::Cbc ? "cbc" : "mc") << ")\n";
  os << "result: ";
  switch (r.kind) {
    case ResultKind::Deadlock: os << "deadlock found"; break;
    case ResultKind::NoDeadlock: os << "no deadlock"; break;
    case ResultKind::NoDeadlockWithin:
      os << "no deadlock found after visiting " << r.states_visited.value_or(0) << " states";
      break;
    case ResultKind::Unknown: os << "unknown"; break;
    case ResultKind::WdError: os << "well-definedness error"; break;
  }
  if (r.bounds_qualified && r.kind == ResultKind::NoDeadlock) os << " (within integer bounds)";
  os << "\n";
  if (r.wd) os << "  in: " << model::to_string(r.wd->where) << " (" << r.wd->what << ")\n";
  else if (!r.reason.empty()) os << "  reason: " << r.reason << "\n";
  if (r.states_visited && r.kind != ResultKind::NoDeadlockWithin) os << "states visited: " << *r.states_visited << "\n";
  if (!r.trace.empty()) {
    os << "trace:\n";
    for (const auto& t : r.trace) {
      os << "  " << t.event;
      if (!t.params.empty()) os << "(" << model::format_valuation(t.params, r.sorts) << ")";
      os << "\n";
    }
  }
  if (r.state) {
    os << "state:\n";
    for (const auto& [k, v] : *r.state) os << "  " << k << " = " << model::format_value(v, r.sorts) << "\n";
  }
  if (!r.guards.empty()) {
    os << "guards:\n";
    for (const auto& g : r.guards) {
      os << "  " << g.event << ": " << (g.enabled ? "enabled" : g.wd ? "not well-defined" : "disabled");
      if (g.falsified) os << ", " << model::to_string(*g.falsified) << " is FALSE";
      os << "\n";
    }
  }
  if (!r.dropped_events.empty()) os << "filtered events: " << join(r.dropped_events, ", ") << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  os << "time: parse " << fmt_ms(r.timings.parse_ms) << ", build " << fmt_ms(r.timings.build_ms) << ", solve "
     << fmt_ms(r.timings.solve_ms) << ", total " << fmt_ms(r.timings.total_ms) << "\n";
  return os.str();
}

json emit_json(const Report& r) {
  json j;
  j["version"] = r.version;
  j["machine"] = r.machine;
  j["mode"] = r.mode == Mode::Cbc ? "cbc" : "mc";
  json options = json::object();
  for (const auto& [k, v] : r.options) options[k] = v;
  j["options"] = options;

  json res;
  res["kind"] = result_kind_name(r.kind);
  if (r.state) res["state"] = valuation_json(*r.state, r.sorts);
  if (!r.trace.empty()) {
    json trace = json::array();
    for (const auto& t : r.trace)
      trace.push_back({{"event", t.event}, {"params", valuation_json(t.params, r.sorts)},
                       {"state", valuation_json(t.state, r.sorts)}});
    res["trace"] = trace;
  }
  if (r.states_visited) res["statesVisited"] = *r.states_visited;
  res["boundsQualified"] = r.bounds_qualified;
  if (r.wd) res["wd"] = {{"atom", model::to_string(r.wd->where)}, {"what", r.wd->what}};
  if (!r.reason.empty()) res["reason"] = r.reason;
  j["result"] = res;

  json guards = json::array();
  for (const auto& g : r.guards) {
    json e{{"event", g.event}, {"enabled", g.enabled}};
    if (g.falsified) e["falsifiedConjunct"] = model::to_string(*g.falsified);
    guards.push_back(e);
  }
  j["guards"] = guards;
  j["droppedEvents"] = r.dropped_events;
  j["warnings"] = r.warnings;
  j["timings"] = {{"parseMs", r.timings.parse_ms},
                  {"buildMs", r.timings.build_ms},
                  {"solveMs", r.timings.solve_ms},
                  {"totalMs", r.timings.total_ms}};
  return j;
}

}  // namespace bdead::cli
