#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "bdead/kernel/store.hpp"

namespace bdead::kernel {

enum class Outcome : std::uint8_t { Sat, Unsat, Unknown, WDError };

const char* outcome_name(Outcome o);

struct SolveOptions {
  std::int64_t maxint = model::kDefaultMaxInt;
  std::chrono::milliseconds time{10'000};
  std::uint64_t max_decisions = 0;  // 0: unlimited
  std::ostream* trace = nullptr;
};

struct SolveResult {
  Outcome outcome = Outcome::Unknown;
  Valuation solution;                 // Sat only
  std::optional<model::WdError> wd;   // WDError only
  std::uint64_t decisions = 0;
  bool bounds_clipped = false;
  std::string reason;                 // Unknown only
};

/// Searches for a valuation of the free identifiers of `p` that makes it
/// TRUE. Every candidate is confirmed by the evaluator before it is returned.
/// WDError means no model exists but some branch hit an undefined term.
SolveResult solve(const Pred& p, const Scope& scope, const SolveOptions& opts = {});

/// Like solve, but reports every model to `on_model` until it returns false.
/// The outcome is Sat when at least one model was reported.
SolveResult solve_all(const Pred& p, const Scope& scope, const SolveOptions& opts,
                      const std::function<bool(const Valuation&)>& on_model);

}  // namespace bdead::kernel
