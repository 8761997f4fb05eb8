// Unification-based type inference, identifier resolution and
// alpha-renaming of binders.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "bdead/machine.hpp"

namespace bdead::model {

const Event* Machine::find_event(std::string_view name) const {
  for (const auto& e : events)
    if (e.name == name) return &e;
  return nullptr;
}

std::vector<Decl> TypedMachine::scope() const {
  std::vector<Decl> out = m_.constants;
  out.insert(out.end(), m_.variables.begin(), m_.variables.end());
  return out;
}

const Decl* TypedMachine::find_decl(std::string_view name) const {
  for (const auto& d : m_.constants)
    if (d.name == name) return &d;
  for (const auto& d : m_.variables)
    if (d.name == name) return &d;
  return nullptr;
}

namespace {

class Inference {
 public:
  int fresh() {
    terms_.push_back({Kind::Var, {}, -1, -1});
    return static_cast<int>(terms_.size()) - 1;
  }
  int integer() { return make(Kind::Int, {}, -1); }
  int boolean() { return make(Kind::Bool, {}, -1); }
  int sort(const std::string& name) { return make(Kind::Sort, name, -1); }
  int set_of(int elem) { return make(Kind::Set, {}, elem); }

  int from_ty(const Ty& t) {
    switch (t.kind()) {
      case Ty::Kind::Int: return integer();
      case Ty::Kind::Bool: return boolean();
      case Ty::Kind::Sort: return sort(t.sort_name());
      case Ty::Kind::Set: return set_of(from_ty(t.element()));
      case Ty::Kind::Unknown: break;
    }
    return fresh();
  }

  void unify(int a, int b, SourcePos pos) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    Term& ta = terms_[static_cast<std::size_t>(a)];
    Term& tb = terms_[static_cast<std::size_t>(b)];
    if (ta.kind == Kind::Var) {
      if (occurs(a, b)) mismatch(a, b, pos);
      ta.link = b;
      return;
    }
    if (tb.kind == Kind::Var) {
      if (occurs(b, a)) mismatch(a, b, pos);
      tb.link = a;
      return;
    }
    if (ta.kind != tb.kind) mismatch(a, b, pos);
    if (ta.kind == Kind::Sort && ta.sort != tb.sort) mismatch(a, b, pos);
    if (ta.kind == Kind::Set) unify(ta.elem, tb.elem, pos);
  }

  std::optional<Ty> resolve(int t) {
    t = find(t);
    const Term& term = terms_[static_cast<std::size_t>(t)];
    switch (term.kind) {
      case Kind::Var: return std::nullopt;
      case Kind::Int: return Ty::integer();
      case Kind::Bool: return Ty::boolean();
      case Kind::Sort: return Ty::sort(term.sort);
      case Kind::Set: {
        auto e = resolve(term.elem);
        if (!e) return std::nullopt;
        return Ty::set_of(*e);
      }
    }
    return std::nullopt;
  }

  std::string show(int t) {
    t = find(t);
    const Term& term = terms_[static_cast<std::size_t>(t)];
    switch (term.kind) {
      case Kind::Var: return "?";
      case Kind::Int: return "INT";
      case Kind::Bool: return "BOOL";
      case Kind::Sort: return term.sort;
      case Kind::Set: return "POW(" + show(term.elem) + ")";
    }
    return "?";
  }

 private:
  enum class Kind : std::uint8_t { Var, Int, Bool, Sort, Set };
  struct Term {
    Kind kind;
    std::string sort;
    int elem;
    int link;
  };

  int make(Kind k, std::string sort, int elem) {
    terms_.push_back({k, std::move(sort), elem, -1});
    return static_cast<int>(terms_.size()) - 1;
  }

  int find(int t) {
    while (terms_[static_cast<std::size_t>(t)].kind == Kind::Var &&
           terms_[static_cast<std::size_t>(t)].link >= 0)
      t = terms_[static_cast<std::size_t>(t)].link;
    return t;
  }

  bool occurs(int var, int t) {
    t = find(t);
    if (t == var) return true;
    const Term& term = terms_[static_cast<std::size_t>(t)];
    return term.kind == Kind::Set && occurs(var, term.elem);
  }

  [[noreturn]] void mismatch(int a, int b, SourcePos pos) {
    throw TypeError("type mismatch: " + show(a) + " vs " + show(b), pos);
  }

  std::vector<Term> terms_;
};

// Identifier classes visible to a formula.
struct Symbols {
  std::map<std::string, std::pair<int, int>, std::less<>> elements;  // name -> (sort, index)
  std::map<std::string, int, std::less<>> sorts;
  std::set<std::string, std::less<>> declared;  // every global name, for renaming
};

class Checker {
 public:
  Checker(const Symbols& syms, Inference& inf) : syms_(syms), inf_(inf) {}

  void add_global(const std::string& name, int tvar) { globals_[name] = tvar; }
  void set_params(std::vector<std::pair<std::string, int>> params) { params_ = std::move(params); }
  void add_reserved(const std::string& name) { used_.insert(name); }

  // Pass 1: constraint generation. Returns the type variable of an expression.
  int infer(const NodePtr& n) {
    const int t = infer_impl(n);
    types_[n.get()] = t;
    return t;
  }

  void infer_pred(const NodePtr& n) { infer_pred_impl(n); }

  // Pass 2: rebuild with resolved types, resolved identifiers and renamed binders.
  NodePtr rebuild(const NodePtr& n) {
    auto out = std::make_shared<Node>(*n);
    if (n->op == Op::Ident) {
      if (auto r = lookup_rename(n->name)) {
        out->name = *r;
      } else if (auto e = syms_.elements.find(n->name); e != syms_.elements.end() && !is_local(n->name)) {
        out->op = Op::ElemLit;
        out->sort = e->second.first;
        out->num = e->second.second;
      } else if (auto s = syms_.sorts.find(n->name); s != syms_.sorts.end() && !is_local(n->name)) {
        out->op = Op::SortSet;
        out->sort = s->second;
      }
    }
    if (is_quantifier(n->op)) {
      const std::string fresh = fresh_name(n->name);
      out->name = fresh;
      out->binder_type = resolved(binder_types_.at(n.get()), n->pos, n->name);
      renames_.emplace_back(n->name, fresh);
      out->args = {rebuild(n->args[0])};
      renames_.pop_back();
      return out;
    }
    std::vector<NodePtr> args;
    args.reserve(n->args.size());
    for (const auto& a : n->args) args.push_back(rebuild(a));
    out->args = std::move(args);
    if (!is_predicate_op(n->op)) out->type = resolved(types_.at(n.get()), n->pos, "expression");
    return out;
  }

  /// Chooses a binder name that shadows nothing visible.
  std::string fresh_name(const std::string& base) {
    std::string name = base;
    while (syms_.declared.contains(name) || used_.contains(name) || is_local(name)) name += "'";
    return name;
  }

  void push_rename(const std::string& from, const std::string& to) { renames_.emplace_back(from, to); }
  void clear_renames() { renames_.clear(); }

  Ty resolved(int tvar, SourcePos pos, const std::string& what) {
    auto t = inf_.resolve(tvar);
    if (!t) throw TypeError("cannot infer type of " + what, pos);
    return *t;
  }

 private:
  bool is_local(const std::string& name) const {
    for (const auto& [from, to] : renames_)
      if (from == name || to == name) return true;
    return false;
  }

  std::optional<std::string> lookup_rename(const std::string& name) const {
    for (auto it = renames_.rbegin(); it != renames_.rend(); ++it)
      if (it->first == name) return it->second;
    return std::nullopt;
  }

  int lookup(const NodePtr& n) {
    for (auto it = binders_.rbegin(); it != binders_.rend(); ++it)
      if (it->first == n->name) return it->second;
    for (const auto& [name, t] : params_)
      if (name == n->name) return t;
    if (auto g = globals_.find(n->name); g != globals_.end()) return g->second;
    if (auto e = syms_.elements.find(n->name); e != syms_.elements.end())
      return inf_.sort(sort_name(e->second.first));
    if (auto s = syms_.sorts.find(n->name); s != syms_.sorts.end())
      return inf_.set_of(inf_.sort(n->name));
    throw TypeError("unknown identifier '" + n->name + "'", n->pos);
  }

  std::string sort_name(int index) const {
    for (const auto& [name, i] : syms_.sorts)
      if (i == index) return name;
    return {};
  }

  int infer_impl(const NodePtr& n) {
    const SourcePos pos = n->pos;
    switch (n->op) {
      case Op::IntLit: return inf_.integer();
      case Op::BoolLit: return inf_.boolean();
      case Op::Ident: return lookup(n);
      case Op::ElemLit: return inf_.sort(sort_name(n->sort));
      case Op::SortSet: return inf_.set_of(inf_.sort(n->name));
      case Op::IntSet: return inf_.set_of(inf_.integer());
      case Op::BoolSet: return inf_.set_of(inf_.boolean());
      case Op::Neg:
        inf_.unify(infer(n->args[0]), inf_.integer(), pos);
        return inf_.integer();
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Mod:
        inf_.unify(infer(n->args[0]), inf_.integer(), n->args[0]->pos);
        inf_.unify(infer(n->args[1]), inf_.integer(), n->args[1]->pos);
        return inf_.integer();
      case Op::Card:
        inf_.unify(infer(n->args[0]), inf_.set_of(inf_.fresh()), pos);
        return inf_.integer();
      case Op::EmptySet: return inf_.set_of(inf_.fresh());
      case Op::SetLit: {
        const int elem = inf_.fresh();
        for (const auto& a : n->args) inf_.unify(infer(a), elem, a->pos);
        return inf_.set_of(elem);
      }
      case Op::Interval:
        inf_.unify(infer(n->args[0]), inf_.integer(), pos);
        inf_.unify(infer(n->args[1]), inf_.integer(), pos);
        return inf_.set_of(inf_.integer());
      case Op::Union:
      case Op::Inter:
      case Op::Diff: {
        const int t = inf_.set_of(inf_.fresh());
        inf_.unify(infer(n->args[0]), t, pos);
        inf_.unify(infer(n->args[1]), t, pos);
        return t;
      }
      default:
        throw TypeError("predicate used where an expression is expected", pos);
    }
  }

  void infer_pred_impl(const NodePtr& n) {
    const SourcePos pos = n->pos;
    switch (n->op) {
      case Op::True:
      case Op::False:
        return;
      case Op::Eq:
      case Op::Neq:
        inf_.unify(infer(n->args[0]), infer(n->args[1]), pos);
        return;
      case Op::Lt:
      case Op::Le:
      case Op::Gt:
      case Op::Ge:
        inf_.unify(infer(n->args[0]), inf_.integer(), pos);
        inf_.unify(infer(n->args[1]), inf_.integer(), pos);
        return;
      case Op::In:
      case Op::NotIn: {
        const int e = infer(n->args[0]);
        inf_.unify(infer(n->args[1]), inf_.set_of(e), pos);
        return;
      }
      case Op::Subset: {
        const int t = inf_.set_of(inf_.fresh());
        inf_.unify(infer(n->args[0]), t, pos);
        inf_.unify(infer(n->args[1]), t, pos);
        return;
      }
      case Op::And:
      case Op::Or:
      case Op::Implies:
      case Op::Equiv:
      case Op::Not:
        for (const auto& a : n->args) infer_pred_impl(a);
        return;
      case Op::Exists:
      case Op::Forall: {
        const int t = n->binder_type.known() ? inf_.from_ty(n->binder_type) : inf_.fresh();
        binder_types_[n.get()] = t;
        binders_.emplace_back(n->name, t);
        infer_pred_impl(n->args[0]);
        binders_.pop_back();
        return;
      }
      default:
        throw TypeError("expression used where a predicate is expected", pos);
    }
  }

  const Symbols& syms_;
  Inference& inf_;
  std::map<std::string, int, std::less<>> globals_;
  std::vector<std::pair<std::string, int>> params_;
  std::vector<std::pair<std::string, int>> binders_;
  std::vector<std::pair<std::string, std::string>> renames_;
  std::set<std::string, std::less<>> used_;
  std::unordered_map<const Node*, int> types_;
  std::unordered_map<const Node*, int> binder_types_;
};

Symbols collect_symbols(const Machine& m) {
  Symbols syms;
  auto declare = [&](const std::string& name, SourcePos pos, const char* what) {
    if (!syms.declared.insert(name).second)
      throw TypeError(std::string("duplicate declaration of ") + what + " '" + name + "'", pos);
  };
  for (std::size_t i = 0; i < m.sorts.size(); ++i) {
    const auto& s = m.sorts[i];
    if (s.elements.empty()) throw TypeError("carrier set '" + s.name + "' is empty", {});
    declare(s.name, {}, "carrier set");
    syms.sorts[s.name] = static_cast<int>(i);
    for (std::size_t j = 0; j < s.elements.size(); ++j) {
      declare(s.elements[j], {}, "set element");
      syms.elements[s.elements[j]] = {static_cast<int>(i), static_cast<int>(j)};
    }
  }
  for (const auto& c : m.constants) declare(c.name, c.pos, "constant");
  for (const auto& v : m.variables) declare(v.name, v.pos, "variable");
  std::set<std::string> events;
  for (const auto& e : m.events) {
    if (e.name == "INITIALISATION" || !events.insert(e.name).second)
      throw TypeError("duplicate event '" + e.name + "'", e.pos);
  }
  return syms;
}

void check_assignments(const Event& e, const std::set<std::string>& variables, bool must_cover) {
  std::set<std::string> assigned;
  for (const auto& a : e.actions) {
    if (!variables.contains(a.var))
      throw TypeError("'" + a.var + "' is not a variable and cannot be assigned", a.pos);
    if (!assigned.insert(a.var).second)
      throw TypeError("variable '" + a.var + "' assigned twice in event " + e.name, a.pos);
  }
  if (must_cover) {
    for (const auto& v : variables)
      if (!assigned.contains(v))
        throw TypeError("INITIALISATION does not assign variable '" + v + "'", e.pos);
  }
}

}  // namespace

TypedMachine typecheck(const Machine& m) {
  const Symbols syms = collect_symbols(m);
  Inference inf;
  Checker ck(syms, inf);

  std::map<std::string, int> tvars;
  for (const auto& c : m.constants) tvars[c.name] = inf.fresh();
  std::set<std::string> variable_names;
  for (const auto& v : m.variables) {
    tvars[v.name] = inf.fresh();
    variable_names.insert(v.name);
  }

  // Axioms may only mention constants.
  for (const auto& c : m.constants) ck.add_global(c.name, tvars[c.name]);
  for (const auto& a : m.axioms) {
    for (const auto& v : free_vars(a.pred))
      if (variable_names.contains(v)) throw TypeError("axiom " + a.label + " mentions variable '" + v + "'", a.pred->pos);
    ck.infer_pred(a.pred);
  }
  for (const auto& v : m.variables) ck.add_global(v.name, tvars[v.name]);
  for (const auto& i : m.invariants) ck.infer_pred(i.pred);

  check_assignments(m.init, variable_names, true);
  auto infer_event = [&](const Event& e) {
    std::vector<std::pair<std::string, int>> params;
    std::set<std::string> seen;
    for (const auto& p : e.params) {
      if (!seen.insert(p.name).second) throw TypeError("duplicate parameter '" + p.name + "'", p.pos);
      params.emplace_back(p.name, p.type.known() ? inf.from_ty(p.type) : inf.fresh());
    }
    ck.set_params(params);
    for (const auto& g : e.guards) ck.infer_pred(g);
    for (const auto& a : e.actions) inf.unify(tvars[a.var], ck.infer(a.value), a.pos);
    ck.set_params({});
    return params;
  };
  infer_event(m.init);
  std::vector<std::vector<std::pair<std::string, int>>> event_params;
  for (const auto& e : m.events) {
    check_assignments(e, variable_names, false);
    event_params.push_back(infer_event(e));
  }

  Machine out = m;
  for (auto& c : out.constants) c.type = ck.resolved(tvars[c.name], c.pos, "constant '" + c.name + "'");
  for (auto& v : out.variables) v.type = ck.resolved(tvars[v.name], v.pos, "variable '" + v.name + "'");
  for (auto& a : out.axioms) a.pred = ck.rebuild(a.pred);
  for (auto& i : out.invariants) i.pred = ck.rebuild(i.pred);

  auto rebuild_event = [&](Event& e, const std::vector<std::pair<std::string, int>>& params) {
    ck.clear_renames();
    for (std::size_t i = 0; i < e.params.size(); ++i) {
      const std::string fresh = ck.fresh_name(e.params[i].name);
      e.params[i].type = ck.resolved(params[i].second, e.params[i].pos, "parameter '" + e.params[i].name + "'");
      ck.push_rename(e.params[i].name, fresh);
      e.params[i].name = fresh;
    }
    for (auto& g : e.guards) g = ck.rebuild(g);
    for (auto& a : e.actions) a.value = ck.rebuild(a.value);
    ck.clear_renames();
  };
  rebuild_event(out.init, {});
  for (std::size_t i = 0; i < out.events.size(); ++i) rebuild_event(out.events[i], event_params[i]);
  return TypedMachine(std::move(out));
}

Pred typecheck_predicate(const Pred& p, const TypedMachine& tm) {
  const Symbols syms = collect_symbols(tm.machine());
  Inference inf;
  Checker ck(syms, inf);
  for (const auto& d : tm.scope()) ck.add_global(d.name, inf.from_ty(d.type));
  ck.infer_pred(p);
  return ck.rebuild(p);
}

Pred enabling_predicate(const Event& e) {
  Pred body = ast::conj(e.guards);
  for (auto it = e.params.rbegin(); it != e.params.rend(); ++it)
    body = ast::quantifier(Op::Exists, it->name, it->type, body, it->pos);
  return body;
}

Pred axioms_predicate(const Machine& m) {
  std::vector<Pred> parts;
  for (const auto& a : m.axioms) parts.push_back(a.pred);
  return ast::conj(std::move(parts));
}

Pred invariants_predicate(const Machine& m) {
  std::vector<Pred> parts;
  for (const auto& i : m.invariants) parts.push_back(i.pred);
  return ast::conj(std::move(parts));
}

namespace {

std::string guard_text(const Pred& g) {
  const std::string s = to_string(g);
  switch (g->op) {
    case Op::Or:
    case Op::Implies:
    case Op::Equiv:
    case Op::And:
      return "(" + s + ")";
    default:
      return s;
  }
}

void print_labeled(const std::vector<LabeledPred>& items, std::string& out) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += "  " + items[i].label + ": " + to_string(items[i].pred);
    out += i + 1 < items.size() ? " ;\n" : "\n";
  }
}

void print_actions(const Event& e, std::string& out) {
  if (e.actions.empty()) {
    out += "skip";
    return;
  }
  for (std::size_t i = 0; i < e.actions.size(); ++i) {
    if (i) out += " || ";
    out += e.actions[i].var + " := " + to_string(e.actions[i].value);
  }
}

}  // namespace

std::string print_machine(const Machine& m) {
  std::string out = "MACHINE " + m.name + "\n";
  if (!m.sorts.empty()) {
    out += "SETS\n";
    for (std::size_t i = 0; i < m.sorts.size(); ++i) {
      out += "  " + m.sorts[i].name + " = {";
      for (std::size_t j = 0; j < m.sorts[i].elements.size(); ++j) {
        if (j) out += ", ";
        out += m.sorts[i].elements[j];
      }
      out += i + 1 < m.sorts.size() ? "} ;\n" : "}\n";
    }
  }
  auto names = [](const std::vector<Decl>& ds) {
    std::string s;
    for (std::size_t i = 0; i < ds.size(); ++i) s += (i ? ", " : "  ") + ds[i].name;
    return s + "\n";
  };
  if (!m.constants.empty()) out += "CONSTANTS\n" + names(m.constants);
  if (!m.axioms.empty()) {
    out += "AXIOMS\n";
    print_labeled(m.axioms, out);
  }
  if (!m.variables.empty()) out += "VARIABLES\n" + names(m.variables);
  if (!m.invariants.empty()) {
    out += "INVARIANTS\n";
    print_labeled(m.invariants, out);
  }
  out += "EVENTS\n  INITIALISATION = BEGIN ";
  print_actions(m.init, out);
  out += " END\n";
  for (const auto& e : m.events) {
    out += "  " + e.name + " = ";
    if (!e.params.empty()) {
      out += "ANY ";
      for (std::size_t i = 0; i < e.params.size(); ++i) {
        if (i) out += ", ";
        out += e.params[i].name;
        if (e.params[i].type.known()) out += ":" + e.params[i].type.str();
      }
      out += " ";
    }
    if (!e.guards.empty()) {
      out += "WHEN ";
      for (std::size_t i = 0; i < e.guards.size(); ++i) {
        if (i) out += " & ";
        out += guard_text(e.guards[i]);
      }
      out += " THEN ";
    } else if (!e.params.empty()) {
      out += "THEN ";
    } else {
      out += "BEGIN ";
    }
    print_actions(e, out);
    out += " END\n";
  }
  out += "END\n";
  return out;
}

}  // namespace bdead::model
