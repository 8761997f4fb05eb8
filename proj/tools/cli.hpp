#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <iostream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bdead/cbc.hpp"
#include "bdead/mc.hpp"

namespace bdead::cli {

inline constexpr const char* kVersion = "0.3.0";

enum class Mode : std::uint8_t { Cbc, Mc };

struct RunOptions {
  Mode mode = Mode::Cbc;
  std::filesystem::path file;
  std::optional<std::string> goal;
  std::optional<std::vector<std::string>> events;
  std::int64_t timeout_ms = 10'000;
  std::int64_t event_timeout_ms = 200;
  std::int64_t maxint = model::kDefaultMaxInt;
  std::uint64_t max_states = 100'000;
  std::optional<std::size_t> max_outdegree;
  bool dfs = false;
  bool no_simplify = false;
  bool no_partition = false;
  bool no_sort = false;
  bool no_filter = false;
  bool keep_irrelevant = false;
  bool json = false;
  bool trace_log = false;
};

enum class ResultKind : std::uint8_t { Deadlock, NoDeadlock, NoDeadlockWithin, Unknown, WdError };

const char* result_kind_name(ResultKind k);

struct Timings {
  double parse_ms = 0;
  double build_ms = 0;
  double solve_ms = 0;
  double total_ms = 0;
};

/// Everything a run produced; both output formats are rendered from it.
struct Report {
  std::string version = kVersion;
  std::string machine;
  Mode mode = Mode::Cbc;
  std::vector<std::pair<std::string, std::string>> options;
  ResultKind kind = ResultKind::Unknown;
  std::optional<model::Valuation> state;
  std::vector<mc::Transition> trace;
  std::optional<std::uint64_t> states_visited;
  bool bounds_qualified = false;
  std::vector<cbc::GuardStatus> guards;
  std::vector<std::string> dropped_events;
  std::vector<std::string> warnings;
  std::string reason;
  std::optional<model::WdError> wd;
  std::vector<model::SortDecl> sorts;
  Timings timings;
};

/// Exit status of a report: 0 no deadlock, 1 deadlock, 2 unknown, 4 WD error.
int exit_code(const Report& r);

/// Parses, typechecks and runs the requested check. Throws model::InputError
/// for malformed machines and std::runtime_error for unreadable files.
/// With `trace_log` set, kernel trace lines go to `log`.
Report run_check(const RunOptions& opts, std::ostream& log = std::clog);

std::string emit_text(const Report& r);
nlohmann::json emit_json(const Report& r);

/// Flag lines of `FILE.opts`, if present, split into arguments.
std::vector<std::string> sidecar_args(const std::filesystem::path& file);

struct BenchRow {
  std::string model;
  std::string cbc_result;
  double cbc_seconds = 0;
  std::string mc_result;
  double mc_seconds = 0;
  std::optional<std::uint64_t> mc_states;  // set when MC stopped at the state limit
  std::string error;
};

/// Runs both checks on every `.mch` file of `dir`, ordered by file name.
std::vector<BenchRow> bench(const std::filesystem::path& dir, const RunOptions& defaults);
std::string bench_text(const std::vector<BenchRow>& rows);
nlohmann::json bench_json(const std::vector<BenchRow>& rows);

/// Command-line entry point: `bdead cbc|mc FILE [flags]`, `bdead bench DIR`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bdead::cli
