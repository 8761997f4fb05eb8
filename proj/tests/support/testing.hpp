#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bdead/eval.hpp"
#include "bdead/machine.hpp"

namespace bdead::fixture {

inline std::filesystem::path data_dir() { return BDEAD_TEST_DATA; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Path of a model shipped with the tests, looked up in corpus/, models/ and stress/.
inline std::filesystem::path model_path(const std::string& name) {
  for (const char* sub : {"corpus", "models", "stress"}) {
    auto p = data_dir() / sub / (name + ".mch");
    if (std::filesystem::exists(p)) return p;
  }
  throw std::runtime_error("no test model " + name);
}

inline model::TypedMachine load(const std::string& name) {
  return model::typecheck(model::parse_machine(read_text(model_path(name))));
}

inline model::TypedMachine machine(const std::string& text) {
  return model::typecheck(model::parse_machine(text));
}

inline model::Pred pred(const std::string& text, const model::TypedMachine& m) {
  return model::typecheck_predicate(model::parse_predicate(text), m);
}

/// Scope shared by the property tests: small integers, sets over 0..3,
/// one enumerated carrier set and a boolean.
inline const model::TypedMachine& scratch() {
  static const model::TypedMachine m = machine(
      "MACHINE Scratch\n"
      "SETS S = {e1, e2, e3}\n"
      "VARIABLES a, b, s, t, c, f\n"
      "INVARIANTS a : 0..3 ; b : 0..3 ; s <: 0..3 ; t <: 0..3 ; c : S ; f : BOOL\n"
      "EVENTS INITIALISATION = BEGIN a := 0 || b := 0 || s := {} || t := {} || c := e1 || f := FALSE END\n"
      "END\n");
  return m;
}

/// Values of `t` in the small test universe (integers 0..3).
inline std::vector<model::Value> small_values(const model::Ty& t, const model::EvalContext& ctx) {
  using model::Value;
  switch (t.kind()) {
    case model::Ty::Kind::Int: {
      std::vector<Value> out;
      for (int i = 0; i <= 3; ++i) out.push_back(Value::integer(i));
      return out;
    }
    case model::Ty::Kind::Set: {
      const auto base = small_values(t.element(), ctx);
      std::vector<Value> out;
      for (std::size_t mask = 0; mask < (std::size_t{1} << base.size()); ++mask) {
        std::vector<Value> elems;
        for (std::size_t i = 0; i < base.size(); ++i)
          if (mask & (std::size_t{1} << i)) elems.push_back(base[i]);
        out.push_back(Value::set(std::move(elems)));
      }
      return out;
    }
    default: return model::type_universe(t, ctx);
  }
}

/// Calls `f` on every valuation of `names` over the small universe.
inline void for_each_valuation(const model::TypedMachine& m, const std::set<std::string>& names,
                               const model::EvalContext& ctx, const std::function<void(const model::Valuation&)>& f) {
  std::vector<std::pair<std::string, std::vector<model::Value>>> axes;
  for (const auto& n : names) axes.emplace_back(n, small_values(m.find_decl(n)->type, ctx));
  model::Valuation v;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == axes.size()) {
      f(v);
      return;
    }
    for (const auto& x : axes[i].second) {
      v[axes[i].first] = x;
      rec(i + 1);
    }
  };
  rec(0);
}

/// Random predicate text over the scratch scope.
class RandomPred {
 public:
  explicit RandomPred(unsigned seed, bool allow_wd = false) : rng_(seed), allow_wd_(allow_wd) {}

  std::string pred(int depth) {
    const int pick = depth <= 0 ? 0 : uniform(0, 9);
    if (pick <= 3) return atom();
    switch (pick) {
      case 4: return "(" + pred(depth - 1) + " & " + pred(depth - 1) + ")";
      case 5: return "(" + pred(depth - 1) + " or " + pred(depth - 1) + ")";
      case 6: return "(" + pred(depth - 1) + (coin() ? " => " : " <=> ") + pred(depth - 1) + ")";
      case 7: return "not(" + pred(depth - 1) + ")";
      default: return quantifier(depth - 1);
    }
  }

  std::string int_expr(int depth) {
    const int pick = depth <= 0 ? uniform(0, 2) : uniform(0, allow_wd_ ? 9 : 7);
    switch (pick) {
      case 0: return std::to_string(uniform(0, 3));
      case 1:
      case 2: return int_var();
      case 3: return "(" + int_expr(depth - 1) + " + " + int_expr(depth - 1) + ")";
      case 4: return "(" + int_expr(depth - 1) + " - " + int_expr(depth - 1) + ")";
      case 5: return "(" + int_expr(depth - 1) + " * " + std::to_string(uniform(0, 2)) + ")";
      case 6:
      case 7: return "card(" + set_expr(depth - 1) + ")";
      case 8: return "(" + int_expr(depth - 1) + " div " + int_expr(depth - 1) + ")";
      default: return "(" + int_expr(depth - 1) + " mod " + int_expr(depth - 1) + ")";
    }
  }

  std::string set_expr(int depth) {
    const int pick = depth <= 0 ? uniform(0, 3) : uniform(0, 7);
    switch (pick) {
      case 0:
      case 1: return coin() ? "s" : "t";
      case 2: return "{}";
      case 3: return "{" + std::to_string(uniform(0, 3)) + (coin() ? "" : ", " + std::to_string(uniform(0, 3))) + "}";
      case 4: return "(" + std::to_string(uniform(0, 2)) + ".." + int_expr(depth - 1) + ")";
      case 5: return "(" + set_expr(depth - 1) + " \\/ " + set_expr(depth - 1) + ")";
      case 6: return "(" + set_expr(depth - 1) + " /\\ " + set_expr(depth - 1) + ")";
      default: return "(" + set_expr(depth - 1) + " \\ " + set_expr(depth - 1) + ")";
    }
  }

  std::string atom() {
    static const char* const cmp[] = {" = ", " /= ", " < ", " <= ", " > ", " >= "};
    switch (uniform(0, 8)) {
      case 0:
      case 1:
      case 2: return int_expr(1) + cmp[uniform(0, 5)] + int_expr(1);
      case 3: return int_expr(1) + (coin() ? " : " : " /: ") + set_expr(1);
      case 4: return set_expr(1) + " <: " + set_expr(1);
      case 5: return set_expr(1) + (coin() ? " = " : " /= ") + set_expr(1);
      case 6: return "c" + std::string(coin() ? " = " : " /= ") + "e" + std::to_string(uniform(1, 3));
      case 7: return "f = " + std::string(coin() ? "TRUE" : "FALSE");
      default: return coin() ? "TRUE" : "FALSE";
    }
  }

  std::string quantifier(int depth) {
    if (bound_.size() >= 2) return atom();
    const std::string x = bound_.empty() ? "x" : "y";
    bound_.push_back(x);
    std::string out;
    switch (uniform(0, 6)) {
      case 0: out = "#" + x + ".(" + x + " : " + set_expr(1) + " & " + pred(depth) + ")"; break;
      case 1: out = "!" + x + ".(" + x + " : " + set_expr(1) + " => " + pred(depth) + ")"; break;
      case 2: {
        bound_.pop_back();
        const std::string e = int_expr(1);
        bound_.push_back(x);
        out = "#" + x + ".(" + x + " = " + e + " & " + pred(depth) + ")";
        break;
      }
      case 3: out = "#" + x + ".(" + x + " : " + set_expr(1) + ")"; break;
      case 4: {
        bound_.pop_back();
        const std::string e = int_expr(1);
        bound_.push_back(x);
        out = "#" + x + ".(" + x + (coin() ? " > " : " < ") + e + ")";
        break;
      }
      case 5: out = "#" + x + ".(" + pred(depth) + " & " + x + " : " + set_expr(1) + ")"; break;
      default: out = "#" + x + ".(" + x + " : 0..3 & " + pred(depth) + " & " + pred(depth) + ")"; break;
    }
    bound_.pop_back();
    return out;
  }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }

 private:
  std::string int_var() {
    if (!bound_.empty() && coin()) return bound_[static_cast<std::size_t>(uniform(0, static_cast<int>(bound_.size()) - 1))];
    return coin() ? "a" : "b";
  }

  std::mt19937 rng_;
  bool allow_wd_;
  std::vector<std::string> bound_;
};

inline std::string random_machine_text(unsigned seed) {
  std::mt19937 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  struct Var {
    std::string name, inv, init;
  };
  const std::vector<Var> pool = {{"a", "a : 0..3", "0"}, {"b", "b : 0..3", "1"}, {"s", "s <: 0..3", "{}"},
                                 {"c", "c : S", "e1"},   {"f", "f : BOOL", "FALSE"}};
  std::vector<Var> vars;
  for (const auto& v : pool)
    if (uniform(0, 1)) vars.push_back(v);
  if (vars.empty()) vars.push_back(pool[0]);
  while (vars.size() > 3) vars.erase(vars.begin() + uniform(0, static_cast<int>(vars.size()) - 1));
  std::set<std::string> names;
  for (const auto& v : vars) names.insert(v.name);

  RandomPred gen(seed * 7919u + 1);
  // keep only generated formulas whose free identifiers are declared
  auto fits = [&](const std::string& text) {
    for (const char* id : {"a", "b", "s", "t", "c", "f"}) {
      if (names.contains(id)) continue;
      std::string needle = id;
      for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        const bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
        const bool right = pos + 1 >= text.size() || !std::isalnum(static_cast<unsigned char>(text[pos + 1]));
        if (left && right) return false;
      }
    }
    return true;
  };
  auto random_pred = [&](int depth) {
    for (int tries = 0; tries < 200; ++tries) {
      std::string p = gen.pred(depth);
      if (fits(p)) return p;
    }
    return std::string("TRUE");
  };

  std::ostringstream os;
  os << "MACHINE Random" << seed << "\nSETS S = {e1, e2, e3}\nVARIABLES ";
  for (std::size_t i = 0; i < vars.size(); ++i) os << (i ? ", " : "") << vars[i].name;
  os << "\nINVARIANTS\n";
  for (const auto& v : vars) os << "  " << v.inv << " ;\n";
  os << "  " << (uniform(0, 2) == 0 ? random_pred(1) : "TRUE") << "\nEVENTS\n  INITIALISATION = BEGIN ";
  for (std::size_t i = 0; i < vars.size(); ++i) os << (i ? " || " : "") << vars[i].name << " := " << vars[i].init;
  os << " END";
  const int events = uniform(1, 3);
  for (int e = 0; e < events; ++e) {
    os << " ;\n  ev" << e << " = ";
    if (uniform(0, 2) == 0) {
      std::string bound = "TRUE";
      for (int tries = 0; tries < 200; ++tries) {
        bound = gen.int_expr(0);
        if (fits(bound)) break;
        bound = "2";
      }
      static const char* const cmp[] = {" = ", " /= ", " < ", " > "};
      os << "ANY p WHEN p : 0..3 & " << random_pred(1) << " & p" << cmp[uniform(0, 3)] << bound;
    } else {
      os << "WHEN " << random_pred(1);
    }
    os << " THEN skip END";
  }
  os << "\nEND\n";
  return os.str();
}

/// Random machine text: up to three variables over small universes, random
/// extra invariants, and one to three events with random guards. Texts the
/// typechecker rejects (e.g. `card({})`) are skipped.
inline std::string random_machine(unsigned seed) {
  for (unsigned k = 0;; ++k) {
    std::string text = random_machine_text(seed + k * 1'000'003u);
    try {
      model::typecheck(model::parse_machine(text));
      return text;
    } catch (const model::InputError&) {
    }
  }
}

}  // namespace bdead::fixture
