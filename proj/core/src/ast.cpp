#include "bdead/ast.hpp"

#include <stdexcept>

namespace bdead::model {

bool is_predicate_op(Op op) { return op >= Op::True; }

bool is_atom_op(Op op) {
  switch (op) {
    case Op::Eq:
    case Op::Neq:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::In:
    case Op::NotIn:
    case Op::Subset:
      return true;
    default:
      return false;
  }
}

bool is_quantifier(Op op) { return op == Op::Exists || op == Op::Forall; }

const char* op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "div";
    case Op::Mod: return "mod";
    case Op::Interval: return "..";
    case Op::Union: return "\\/";
    case Op::Inter: return "/\\";
    case Op::Diff: return "\\";
    case Op::Eq: return "=";
    case Op::Neq: return "/=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::In: return ":";
    case Op::NotIn: return "/:";
    case Op::Subset: return "<:";
    case Op::And: return "&";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Equiv: return "<=>";
    default: return "?";
  }
}

namespace ast {

NodePtr int_lit(std::int64_t v, SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->op = Op::IntLit;
  n->num = v;
  n->type = Ty::integer();
  n->pos = pos;
  return n;
}

NodePtr bool_lit(bool v, SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->op = Op::BoolLit;
  n->num = v ? 1 : 0;
  n->type = Ty::boolean();
  n->pos = pos;
  return n;
}

NodePtr elem_lit(int sort, int index, std::string name, SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->op = Op::ElemLit;
  n->sort = sort;
  n->num = index;
  n->name = std::move(name);
  n->pos = pos;
  return n;
}

NodePtr ident(std::string name, Ty type, SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->op = Op::Ident;
  n->name = std::move(name);
  n->type = std::move(type);
  n->pos = pos;
  return n;
}

NodePtr truth(bool v, SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->op = v ? Op::True : Op::False;
  n->pos = pos;
  return n;
}

NodePtr make(Op op, std::vector<NodePtr> args, Ty type, SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  n->type = std::move(type);
  n->pos = pos;
  return n;
}

NodePtr quantifier(Op op, std::string binder, Ty binder_type, NodePtr body, SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->name = std::move(binder);
  n->binder_type = std::move(binder_type);
  n->args = {std::move(body)};
  n->pos = pos;
  return n;
}

NodePtr negate(NodePtr p) {
  if (p->op == Op::True) return truth(false, p->pos);
  if (p->op == Op::False) return truth(true, p->pos);
  return make(Op::Not, {std::move(p)});
}

NodePtr conj(std::vector<NodePtr> parts) {
  if (parts.empty()) return truth(true);
  if (parts.size() == 1) return parts.front();
  return make(Op::And, std::move(parts));
}

NodePtr disj(std::vector<NodePtr> parts) {
  if (parts.empty()) return truth(false);
  if (parts.size() == 1) return parts.front();
  return make(Op::Or, std::move(parts));
}

NodePtr with_args(const NodePtr& n, std::vector<NodePtr> args) {
  auto copy = std::make_shared<Node>(*n);
  copy->args = std::move(args);
  return copy;
}

}  // namespace ast

namespace {

void collect_conjuncts(const NodePtr& p, std::vector<NodePtr>& out) {
  if (p->op == Op::And) {
    for (const auto& a : p->args) collect_conjuncts(a, out);
  } else {
    out.push_back(p);
  }
}

void collect_free(const NodePtr& p, std::set<std::string>& bound, std::set<std::string>& out) {
  if (p->op == Op::Ident) {
    if (!bound.contains(p->name)) out.insert(p->name);
    return;
  }
  if (is_quantifier(p->op)) {
    bool fresh = bound.insert(p->name).second;
    collect_free(p->args[0], bound, out);
    if (fresh) bound.erase(p->name);
    return;
  }
  for (const auto& a : p->args) collect_free(a, bound, out);
}

bool occurs_free_impl(const std::string& name, const NodePtr& p) {
  if (p->op == Op::Ident) return p->name == name;
  if (is_quantifier(p->op) && p->name == name) return false;
  for (const auto& a : p->args)
    if (occurs_free_impl(name, a)) return true;
  return false;
}

// Binding strength used by the printer; larger binds tighter.
int precedence(Op op) {
  switch (op) {
    case Op::Equiv: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Union:
    case Op::Inter:
    case Op::Diff: return 11;
    case Op::Interval: return 12;
    case Op::Add:
    case Op::Sub: return 13;
    case Op::Mul:
    case Op::Div:
    case Op::Mod: return 14;
    case Op::Neg: return 15;
    default: return 20;
  }
}

void print(const NodePtr& p, std::string& out);

void print_child(const NodePtr& child, bool parens, std::string& out) {
  if (parens) out += "(";
  print(child, out);
  if (parens) out += ")";
}

void print(const NodePtr& p, std::string& out) {
  const int prec = precedence(p->op);
  switch (p->op) {
    case Op::IntLit:
      out += std::to_string(p->num);
      return;
    case Op::BoolLit:
      out += p->num ? "TRUE" : "FALSE";
      return;
    case Op::ElemLit:
    case Op::Ident:
    case Op::SortSet:
      out += p->name;
      return;
    case Op::IntSet:
      out += p->num == 0 ? "INT" : (p->num == 1 ? "NAT" : "NAT1");
      return;
    case Op::BoolSet:
      out += "BOOL";
      return;
    case Op::True:
      out += "TRUE";
      return;
    case Op::False:
      out += "FALSE";
      return;
    case Op::EmptySet:
      out += "{}";
      return;
    case Op::Neg: {
      const auto& a = p->args[0];
      out += "-";
      print_child(a, a->op != Op::Ident, out);
      return;
    }
    case Op::Card:
      out += "card(";
      print(p->args[0], out);
      out += ")";
      return;
    case Op::SetLit:
      out += "{";
      for (std::size_t i = 0; i < p->args.size(); ++i) {
        if (i) out += ", ";
        print(p->args[i], out);
      }
      out += "}";
      return;
    case Op::Not:
      out += "not(";
      print(p->args[0], out);
      out += ")";
      return;
    case Op::Exists:
    case Op::Forall:
      out += p->op == Op::Exists ? "#" : "!";
      out += p->name;
      if (p->binder_type.known()) out += ":" + p->binder_type.str();
      out += ".(";
      print(p->args[0], out);
      out += ")";
      return;
    case Op::And:
    case Op::Or:
      for (std::size_t i = 0; i < p->args.size(); ++i) {
        if (i) out += p->op == Op::And ? " & " : " or ";
        print_child(p->args[i], precedence(p->args[i]->op) <= prec, out);
      }
      return;
    case Op::Implies:
      print_child(p->args[0], precedence(p->args[0]->op) <= prec, out);
      out += " => ";
      print_child(p->args[1], precedence(p->args[1]->op) < prec, out);
      return;
    case Op::Interval:
      print_child(p->args[0], precedence(p->args[0]->op) <= prec, out);
      out += "..";
      print_child(p->args[1], precedence(p->args[1]->op) <= prec, out);
      return;
    default:
      break;
  }
  if (is_atom_op(p->op)) {
    // relational operands are expressions, never parenthesised predicates
    print_child(p->args[0], false, out);
    out += " ";
    out += op_symbol(p->op);
    out += " ";
    print_child(p->args[1], false, out);
    return;
  }
  // left-associative binary operators
  print_child(p->args[0], precedence(p->args[0]->op) < prec, out);
  out += " ";
  out += op_symbol(p->op);
  out += " ";
  print_child(p->args[1], precedence(p->args[1]->op) <= prec, out);
}

}  // namespace

std::vector<NodePtr> conjuncts(const NodePtr& p) {
  std::vector<NodePtr> out;
  collect_conjuncts(p, out);
  return out;
}

std::set<std::string> free_vars(const NodePtr& p) {
  std::set<std::string> bound, out;
  collect_free(p, bound, out);
  return out;
}

bool occurs_free(const std::string& name, const NodePtr& p) { return occurs_free_impl(name, p); }

bool wd_free(const NodePtr& p) {
  if (p->op == Op::Div || p->op == Op::Mod) return false;
  for (const auto& a : p->args)
    if (!wd_free(a)) return false;
  return true;
}

int compare(const Node& a, const Node& b) {
  if (a.op != b.op) return a.op < b.op ? -1 : 1;
  if (a.num != b.num) return a.num < b.num ? -1 : 1;
  if (a.sort != b.sort) return a.sort < b.sort ? -1 : 1;
  if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (int c = compare(*a.args[i], *b.args[i]); c != 0) return c;
  }
  return 0;
}

bool same(const NodePtr& a, const NodePtr& b) { return a == b || compare(*a, *b) == 0; }

std::size_t node_count(const NodePtr& p) {
  std::size_t n = 1;
  for (const auto& a : p->args) n += node_count(a);
  return n;
}

std::size_t quantifier_count(const NodePtr& p) {
  std::size_t n = is_quantifier(p->op) ? 1 : 0;
  for (const auto& a : p->args) n += quantifier_count(a);
  return n;
}

std::string to_string(const NodePtr& p) {
  std::string out;
  print(p, out);
  return out;
}

}  // namespace bdead::model
