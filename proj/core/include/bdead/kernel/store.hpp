#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bdead/eval.hpp"
#include "bdead/kernel/domain.hpp"
#include "bdead/machine.hpp"

namespace bdead::kernel {

using model::Expr;
using model::Pred;
using model::Value;
using model::Valuation;

enum class Truth : std::uint8_t { Unknown, True, False };

/// Literal over a reification variable; `neg` flips its truth.
struct Lit {
  int var = 0;
  bool neg = false;
  friend Lit operator!(Lit l) { return {l.var, !l.neg}; }
  friend bool operator==(Lit, Lit) = default;
};

enum class Status : std::uint8_t { Fixpoint, Inconsistent, WDError };

struct Scope {
  std::span<const model::SortDecl> sorts;
  std::vector<model::Decl> decls;
};

/// Raised when a formula uses a construct the kernel cannot represent,
/// e.g. a set quantifier over a universe too large to enumerate.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constraint store: variable domains, reified atoms shared by normalized
/// key, a propagation agenda and a trail for chronological backtracking.
class Store {
 public:
  /// Declares one variable per decl that occurs free in `shape`. Initial
  /// integer domains and set universes are inferred from the top-level
  /// conjuncts of `shape`, which must be implied by everything posted later.
  Store(const Scope& scope, const Pred& shape, std::int64_t maxint = model::kDefaultMaxInt);

  void set_trace(std::ostream* out) { trace_ = out; }

  /// Adds `p` (or its negation when `polarity` is false).
  void post(const Pred& p, bool polarity = true);

  /// Runs the agenda to a fixpoint.
  Status propagate();

  bool failed() const { return failed_; }
  const std::optional<model::WdError>& wd_error() const { return wd_; }
  const std::vector<Pred>& posted() const { return posted_; }

  /// Domain of a scalar (integer, boolean or sort) variable.
  const IntDomain& domain(std::string_view name) const;
  /// Membership flag of `element` in set variable `name`.
  Truth member_flag(std::string_view name, const Value& element) const;
  /// Truth of an atom through the sharing table; Unknown when never posted.
  Truth truth(const Pred& atom) const;

  std::uint64_t decisions() const { return decisions_; }
  bool bounds_clipped() const { return clipped_; }
  std::size_t atom_count() const { return atoms_.size(); }

  /// Deterministic dump of domains, flags, reification values and sharing table.
  std::string snapshot() const;

  // --- search interface -------------------------------------------------
  struct Decision {
    bool is_set = false;
    int var = -1;
    std::int64_t value = 0;  // scalar value, or universe index for sets
  };

  /// Undetermined variable with the smallest estimated solution count,
  /// ties broken by declaration order; nullopt when all are fixed.
  std::optional<Decision> choose() const;

  /// First branch: x = v (scalar) or element OUT (set). Second branch: the
  /// complement. Returns false when the change empties a domain.
  bool apply(const Decision& d, bool first_branch);
  void count_decision() { ++decisions_; }

  std::size_t checkpoint() const { return trail_.size(); }
  void backtrack(std::size_t checkpoint);

  /// Valuation of all variables; requires choose() == nullopt.
  Valuation valuation() const;
  std::vector<std::string> variable_names() const;
  const model::EvalContext& eval_context() const { return ctx_; }

 private:
  struct ScalarVar {
    std::string name;
    model::Ty type;
    IntDomain dom;
    std::vector<int> subs;
    bool clipped = false;
  };
  struct SetVar {
    std::string name;
    model::Ty type;
    std::vector<Value> universe;  // sorted
    std::vector<int> flags;       // reification variable per universe element
    bool clipped = false;
  };
  struct BoolVar {
    Truth value = Truth::Unknown;
    std::vector<int> subs;
    std::string label;
  };
  enum class TermKind : std::uint8_t { Const, Var, Neg, Add, Sub, Mul, Card, Opaque };
  struct Term {
    TermKind kind = TermKind::Const;
    std::int64_t c = 0;
    int var = -1;
    int a = -1;
    int b = -1;
    std::vector<Lit> members;
    Expr expr;
  };
  enum class PropKind : std::uint8_t { And, Equiv, Less, Equal, Element, Ground };
  struct Prop {
    PropKind kind;
    Lit r;
    std::vector<Lit> lits;             // And: conjuncts; Equiv: {a, b}; Element: member lits
    std::vector<std::int64_t> codes;   // Element: candidate values (sorted)
    int ta = -1;                       // Less/Equal: terms; Element: scalar var
    int tb = -1;
    Pred pred;                         // Less/Equal/Ground: formula matching r
    Pred source;                       // as written, for error reports
    std::vector<int> scalar_deps;
    std::vector<int> set_deps;
  };
  struct Interval {
    std::int64_t lo;
    std::int64_t hi;
  };
  struct BoolUndo {
    int var;
  };
  struct DomUndo {
    int var;
    IntDomain old;
  };
  using TrailEntry = std::variant<BoolUndo, DomUndo>;

  // variables
  void declare(const model::Decl& d);
  void infer_scope(const Pred& shape);
  std::int64_t encode(const Value& v) const;
  Value decode(std::int64_t code, const model::Ty& t) const;
  int sort_index(const std::string& name) const;
  bool set_fixed(const SetVar& s) const;
  Value set_value(const SetVar& s) const;

  // booleans
  int new_bool(std::string label);
  Lit const_lit(bool v) const { return {0, !v}; }
  Truth value(Lit l) const;
  bool set_lit(Lit l, bool v);
  bool update_domain(int var, IntDomain next);
  void enqueue(int prop);
  void enqueue_all(const std::vector<int>& subs);
  int add_prop(Prop p);

  // posting
  Lit reify(const Pred& p);
  Lit reify_atom(const Pred& p);
  Lit reify_quantifier(const Pred& q);
  Lit make_and(std::vector<Lit> xs);
  Lit make_or(std::vector<Lit> xs);
  Lit make_equiv(Lit a, Lit b);
  Lit compare_terms(const Pred& source, const Expr& lhs, const Expr& rhs, bool less);
  Lit membership(const Pred& atom, const Expr& e, const Expr& s);
  Lit set_equality(const Expr& a, const Expr& b);
  Lit subset(const Expr& a, const Expr& b);
  Lit member(const Expr& s, const Value& u);
  Lit equals_value(const Expr& e, const Value& u);
  Lit ground_prop(const Pred& p);
  std::vector<Value> universe(const Expr& s, bool& clipped);
  std::vector<Value> possible_values(const Expr& e, const model::Ty& t, bool& clipped);
  std::optional<std::vector<Value>> binder_range(const Pred& q);
  void deps_of(const Pred& p, std::vector<int>& scalars, std::vector<int>& sets) const;
  Expr literal(const Value& v, const model::Ty& t) const;

  // terms
  int compile(const Expr& e);
  Interval forward(int t) const;
  bool narrow(int t, std::int64_t lo, std::int64_t hi);
  bool linear(int t, std::int64_t coef, std::map<int, std::int64_t>& vars, std::int64_t& k) const;
  std::optional<std::pair<int, std::int64_t>> single_var_solution(int ta, int tb, bool& unsolvable) const;

  // propagators
  Status run(int prop);
  Status run_and(const Prop& p);
  Status run_equiv(const Prop& p);
  Status run_less(const Prop& p);
  Status run_equal(const Prop& p);
  Status run_element(const Prop& p);
  Status ground_check(const Prop& p);
  bool ground(const Prop& p) const;

  void log(const std::string& line) const;

  Scope scope_;
  model::EvalContext ctx_;
  std::vector<ScalarVar> scalars_;
  std::vector<SetVar> sets_;
  std::vector<std::pair<bool, int>> order_;  // declaration order: (is_set, index)
  std::map<std::string, std::pair<bool, int>, std::less<>> names_;
  std::vector<BoolVar> bools_;
  std::vector<Term> terms_;
  std::vector<Prop> props_;
  std::map<std::string, Lit, std::less<>> atoms_;  // sharing table
  std::unordered_map<std::string, Lit> members_;
  std::unordered_map<std::string, int> term_memo_;
  std::deque<int> agenda_;
  std::vector<char> queued_;
  std::vector<TrailEntry> trail_;
  std::vector<Pred> posted_;
  std::optional<model::WdError> wd_;
  std::uint64_t decisions_ = 0;
  bool failed_ = false;
  bool clipped_ = false;
  std::ostream* trace_ = nullptr;
};

}  // namespace bdead::kernel
