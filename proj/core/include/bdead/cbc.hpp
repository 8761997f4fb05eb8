#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bdead/eval.hpp"
#include "bdead/machine.hpp"

namespace bdead::cbc {

using model::Pred;
using model::Valuation;

struct CheckOptions {
  std::optional<Pred> goal;                         // typechecked predicate of interest
  std::optional<std::vector<std::string>> events;   // events of interest; all when unset
  std::chrono::milliseconds event_timeout{200};
  std::chrono::milliseconds timeout{10'000};
  std::int64_t maxint = model::kDefaultMaxInt;
  bool filter = true;
  bool simplify = true;
  bool sort = true;
  bool partition = true;
  bool drop_irrelevant = true;
  std::ostream* trace = nullptr;
};

enum class Verdict : std::uint8_t { DeadlockFound, NoDeadlock, Unknown };

const char* verdict_name(Verdict v);

struct GuardStatus {
  std::string event;
  bool enabled = false;
  bool wd = false;
  std::optional<Pred> falsified;  // first guard conjunct that is FALSE
};

struct Component {
  Pred pred;
  std::vector<std::size_t> conjuncts;  // indices into the partitioned formula
  bool relevant = false;               // contains a negated guard
};

struct CbcResult {
  Verdict verdict = Verdict::Unknown;
  Valuation state;                 // DeadlockFound only
  std::vector<GuardStatus> guards;
  bool bounds_qualified = false;
  std::string reason;              // Unknown only
  std::optional<model::WdError> wd;
  std::vector<std::string> considered;
  std::vector<std::string> dropped;  // events shown disabled by the filter
  Pred dln;
  std::vector<Component> components;
  std::uint64_t decisions = 0;
  double build_ms = 0;
  double filter_ms = 0;
  double solve_ms = 0;
};

/// Axioms, invariants and the goal predicate.
Pred build_ai(const model::TypedMachine& m, const CheckOptions& opts);

/// Events whose enabling predicate is not proved unsatisfiable under `ai`.
std::vector<std::string> filter_events(const model::TypedMachine& m, const Pred& ai,
                                       const std::vector<std::string>& events, const CheckOptions& opts);

/// AI & not G_e1 & ... & not G_en over the given events.
Pred build_dln(const model::TypedMachine& m, const Pred& ai, const std::vector<std::string>& events,
               const CheckOptions& opts);

/// Moves the most frequent atoms to the front of each negated guard.
Pred sort_conjuncts(const Pred& deadlock);

/// Connected components of `conjuncts` under shared free identifiers,
/// ordered by their smallest conjunct index.
std::vector<Component> components(const std::vector<Pred>& conjuncts, const std::vector<bool>& is_guard);

CbcResult check_deadlock(const model::TypedMachine& m, const CheckOptions& opts = {});

/// Guard table for `v`, one entry per event in `events`.
std::vector<GuardStatus> guard_table(const model::TypedMachine& m, const std::vector<std::string>& events,
                                     const Valuation& v, std::int64_t maxint);

}  // namespace bdead::cbc
