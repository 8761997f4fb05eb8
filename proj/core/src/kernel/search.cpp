#include "bdead/kernel/solve.hpp"

namespace bdead::kernel {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Sat: return "sat";
    case Outcome::Unsat: return "unsat";
    case Outcome::Unknown: return "unknown";
    case Outcome::WDError: return "wd-error";
  }
  return "?";
}

namespace {

struct BudgetExhausted {
  std::string reason;
};

class Search {
 public:
  Search(Store& store, const Pred& p, const SolveOptions& opts, const std::function<bool(const Valuation&)>* each)
      : store_(store), pred_(p), opts_(opts), each_(each),
        deadline_(std::chrono::steady_clock::now() + opts.time) {}

  // Returns true when the search should stop.
  bool run() {
    check_budget();
    const Status st = store_.propagate();
    if (st == Status::WDError) {
      note_wd(store_.wd_error());
      return false;
    }
    if (st == Status::Inconsistent) return false;
    const auto d = store_.choose();
    if (!d) return leaf();
    for (bool first : {true, false}) {
      const auto cp = store_.checkpoint();
      store_.count_decision();
      if (store_.apply(*d, first) && run()) return true;
      store_.backtrack(cp);
    }
    return false;
  }

  bool found = false;
  Valuation solution;
  std::optional<model::WdError> wd;

 private:
  void check_budget() {
    if (opts_.max_decisions != 0 && store_.decisions() >= opts_.max_decisions)
      throw BudgetExhausted{"decision limit reached"};
    if ((++ticks_ & 63) == 0 && std::chrono::steady_clock::now() > deadline_)
      throw BudgetExhausted{"time limit reached"};
  }

  void note_wd(const std::optional<model::WdError>& e) {
    if (!wd && e) wd = e;
  }

  bool leaf() {
    const Valuation v = store_.valuation();
    model::TruthResult r;
    try {
      r = model::eval(pred_, v, store_.eval_context());
    } catch (const model::EvalError& e) {
      throw Unsupported(e.what());
    }
    if (model::is_wd(r)) {
      note_wd(std::get<model::WdError>(r));
      return false;
    }
    if (!std::get<bool>(r)) return false;
    if (!found) solution = v;
    found = true;
    if (each_) return !(*each_)(v);
    return true;
  }

  Store& store_;
  Pred pred_;
  const SolveOptions& opts_;
  const std::function<bool(const Valuation&)>* each_;
  std::chrono::steady_clock::time_point deadline_;
  std::uint64_t ticks_ = 0;
};

SolveResult run_search(const Pred& p, const Scope& scope, const SolveOptions& opts,
                       const std::function<bool(const Valuation&)>* each) {
  SolveResult res;
  try {
    Store store(scope, p, opts.maxint);
    store.set_trace(opts.trace);
    store.post(p);
    res.bounds_clipped = store.bounds_clipped();
    Search search(store, p, opts, each);
    try {
      search.run();
    } catch (const BudgetExhausted& b) {
      res.decisions = store.decisions();
      if (search.found) {
        res.outcome = Outcome::Sat;
        res.solution = search.solution;
      } else {
        res.outcome = Outcome::Unknown;
        res.reason = b.reason;
      }
      return res;
    }
    res.decisions = store.decisions();
    res.bounds_clipped = store.bounds_clipped();
    if (search.found) {
      res.outcome = Outcome::Sat;
      res.solution = search.solution;
    } else if (search.wd) {
      res.outcome = Outcome::WDError;
      res.wd = search.wd;
    } else {
      res.outcome = Outcome::Unsat;
    }
  } catch (const Unsupported& e) {
    res.outcome = Outcome::Unknown;
    res.reason = e.what();
  }
  return res;
}

}  // namespace

SolveResult solve(const Pred& p, const Scope& scope, const SolveOptions& opts) {
  return run_search(p, scope, opts, nullptr);
}

SolveResult solve_all(const Pred& p, const Scope& scope, const SolveOptions& opts,
                      const std::function<bool(const Valuation&)>& on_model) {
  return run_search(p, scope, opts, &on_model);
}

}  // namespace bdead::kernel
