#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdead/eval.hpp"
#include "bdead/machine.hpp"

namespace bdead::mc {

using model::Pred;
using model::Valuation;

enum class Order : std::uint8_t { BFS, DFS };

struct McOptions {
  std::uint64_t max_states = 100'000;
  std::optional<Pred> goal;               // only deadlocks satisfying it are reported
  std::optional<std::size_t> max_outdegree;
  Order order = Order::BFS;
  std::int64_t maxint = model::kDefaultMaxInt;
};

struct Transition {
  std::string event;
  Valuation params;
  Valuation state;
};

struct Successors {
  std::vector<Transition> next;
  bool truncated = false;
};

/// Raised when a guard, an action or an axiom is not well-defined.
class WdFailure : public std::runtime_error {
 public:
  WdFailure(model::WdError e, std::string context)
      : std::runtime_error(context + ": " + e.what), error(std::move(e)) {}
  model::WdError error;
};

/// Constant valuations satisfying the axioms, each extended by the
/// initialisation. Throws WdFailure or std::runtime_error.
std::vector<Valuation> initial_states(const model::TypedMachine& m, std::int64_t maxint = model::kDefaultMaxInt);

/// Enabled transitions from `v` in event declaration order.
Successors successors(const model::TypedMachine& m, const Valuation& v, std::optional<std::size_t> cap = std::nullopt,
                      std::int64_t maxint = model::kDefaultMaxInt);

enum class McKind : std::uint8_t { DeadlockFound, NoDeadlockExhausted, NoDeadlockWithin, Error };

const char* mc_kind_name(McKind k);

struct McResult {
  McKind kind = McKind::Error;
  std::vector<Transition> trace;  // first step is the initialisation
  Valuation state;
  std::uint64_t states_visited = 0;
  bool truncated = false;         // some state hit the out-degree cap
  std::vector<std::string> warnings;
  std::optional<model::WdError> wd;
  std::string reason;
};

McResult model_check(const model::TypedMachine& m, const McOptions& opts = {});

}  // namespace bdead::mc
