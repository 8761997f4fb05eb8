#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"

namespace bdead::cli {

namespace {

void add_check_flags(CLI::App& app, RunOptions& o) {
  app.add_option("--goal", o.goal, "Predicate of interest restricting deadlock states");
  app.add_option("--events", o.events, "Events of interest")->delimiter(',');
  app.add_option("--timeout", o.timeout_ms, "Global solve budget in milliseconds");
  app.add_option("--event-timeout", o.event_timeout_ms, "Per-event filter budget in milliseconds");
  app.add_option("--maxint", o.maxint, "Integer bound MAXINT")->check(CLI::PositiveNumber);
  app.add_option("--max-states", o.max_states, "Model checker state limit")->check(CLI::PositiveNumber);
  app.add_option("--max-outdegree", o.max_outdegree, "Successors computed per state");
  app.add_flag("--dfs", o.dfs, "Depth-first model checking");
  app.add_flag("--no-simplify", o.no_simplify, "Do not simplify enabling predicates");
  app.add_flag("--no-partition", o.no_partition, "Solve the deadlock formula as one component");
  app.add_flag("--no-sort", o.no_sort, "Keep guard conjuncts in source order");
  app.add_flag("--no-filter", o.no_filter, "Keep events that cannot fire under the goal");
  app.add_flag("--keep-irrelevant", o.keep_irrelevant, "Also solve components without guards");
  app.add_flag("--json", o.json, "Structured report on standard output");
  app.add_flag("--trace-log", o.trace_log, "Kernel trace on standard error");
}

// Parses `[FILE] flags...` for one check into `o`.
void parse_check(const std::vector<std::string>& args, RunOptions& o, bool with_file) {
  CLI::App app("bdead check");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  if (with_file) app.add_option("file", o.file, "Machine file")->required();
  add_check_flags(app, o);
  std::vector<std::string> rev(args.rbegin(), args.rend());
  app.parse(rev);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string word;
  while (is >> std::quoted(word)) out.push_back(word);
  return out;
}

std::string seconds(double ms) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << ms / 1000.0;
  return os.str();
}

std::string verdict_text(const Report& r) {
  switch (r.kind) {
    case ResultKind::Deadlock: return "deadlock";
    case ResultKind::NoDeadlock:
    case ResultKind::NoDeadlockWithin: return "no deadlock";
    case ResultKind::Unknown: return "unknown";
    case ResultKind::WdError: return "wd error";
  }
  return "?";
}

constexpr const char* kUsage =
    "usage: bdead cbc FILE [flags]\n"
    "       bdead mc FILE [flags]\n"
    "       bdead bench DIR [flags]\n";

}  // namespace

std::vector<std::string> sidecar_args(const std::filesystem::path& file) {
  std::vector<std::string> out;
  std::ifstream in(file.string() + ".opts");
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    for (auto& w : split_line(line)) out.push_back(std::move(w));
  }
  return out;
}

std::vector<BenchRow> bench(const std::filesystem::path& dir, const RunOptions& defaults) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".mch") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<BenchRow> rows;
  for (const auto& f : files) {
    BenchRow row;
    row.model = f.stem().string();
    try {
      RunOptions o = defaults;
      parse_check(sidecar_args(f), o, false);
      o.file = f;
      o.mode = Mode::Cbc;
      const Report c = run_check(o);
      row.cbc_result = verdict_text(c);
      row.cbc_seconds = c.timings.total_ms / 1000.0;
      o.mode = Mode::Mc;
      const Report m = run_check(o);
      row.mc_result = verdict_text(m);
      row.mc_seconds = m.timings.total_ms / 1000.0;
      if (m.kind == ResultKind::NoDeadlockWithin) row.mc_states = m.states_visited;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string bench_text(const std::vector<BenchRow>& rows) {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.model.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "model" << "  " << std::setw(9) << "CBC (s)" << std::setw(14)
     << "Result" << std::setw(8) << "MC (s)" << "Result\n";
  std::vector<std::string> notes;
  for (const auto& r : rows) {
    os << std::setw(static_cast<int>(width)) << r.model << "  ";
    if (!r.error.empty()) {
      os << "error: " << r.error << "\n";
      continue;
    }
    std::string mc = r.mc_result;
    if (r.mc_states) {
      notes.push_back("no deadlock found after visiting " + std::to_string(*r.mc_states) + " states");
      mc += std::string(notes.size(), '*');
    }
    os << std::setw(9) << seconds(r.cbc_seconds * 1000) << std::setw(14) << r.cbc_result << std::setw(8)
       << seconds(r.mc_seconds * 1000) << mc << "\n";
  }
  for (std::size_t i = 0; i < notes.size(); ++i) os << std::string(i + 1, '*') << " " << notes[i] << "\n";
  return os.str();
}

nlohmann::json bench_json(const std::vector<BenchRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"model", r.model}};
    if (!r.error.empty()) {
      j["error"] = r.error;
    } else {
      j["cbc"] = {{"seconds", r.cbc_seconds}, {"result", r.cbc_result}};
      j["mc"] = {{"seconds", r.mc_seconds}, {"result", r.mc_result}};
      if (r.mc_states)
        j["mc"]["note"] = "no deadlock found after visiting " + std::to_string(*r.mc_states) + " states";
    }
    arr.push_back(j);
  }
  return {{"version", kVersion}, {"rows", arr}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty() || args[0] == "-h" || args[0] == "--help") {
    (args.empty() ? err : out) << kUsage;
    return args.empty() ? 3 : 0;
  }
  if (args[0] == "--version") {
    out << "bdead " << kVersion << "\n";
    return 0;
  }
  const std::string& cmd = args[0];
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  RunOptions o;
  try {
    if (cmd == "bench") {
      if (rest.empty()) throw CLI::RequiredError("DIR");
      std::filesystem::path dir = rest[0];
      parse_check(std::vector<std::string>(rest.begin() + 1, rest.end()), o, false);
      if (!std::filesystem::is_directory(dir)) {
        err << "bdead: not a directory: " << dir.string() << "\n";
        return 3;
      }
      const auto rows = bench(dir, o);
      if (o.json) {
        out << bench_json(rows).dump(2) << "\n";
      } else {
        out << bench_text(rows);
      }
      return 0;
    }
    if (cmd != "cbc" && cmd != "mc") {
      err << "bdead: unknown command '" << cmd << "'\n" << kUsage;
      return 3;
    }
    o.mode = cmd == "cbc" ? Mode::Cbc : Mode::Mc;
    parse_check(rest, o, true);
    auto with_sidecar = sidecar_args(o.file);
    if (!with_sidecar.empty()) {
      with_sidecar.insert(with_sidecar.end(), rest.begin(), rest.end());
      o = RunOptions{};
      o.mode = cmd == "cbc" ? Mode::Cbc : Mode::Mc;
      parse_check(with_sidecar, o, true);
    }
  } catch (const CLI::CallForHelp&) {
    out << kUsage;
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "bdead: " << e.what() << "\n" << kUsage;
    return 3;
  }

  try {
    const Report r = run_check(o, err);
    if (o.json) {
      out << emit_json(r).dump(2) << "\n";
    } else {
      out << emit_text(r);
    }
    return exit_code(r);
  } catch (const model::InputError& e) {
    err << o.file.string() << ":" << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "bdead: " << e.what() << "\n";
  } catch (const std::runtime_error& e) {
    err << "bdead: " << e.what() << "\n";
  }
  return 3;
}

}  // namespace bdead::cli
