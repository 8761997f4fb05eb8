#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "bdead/value.hpp"

namespace bdead::model {

/// Node kinds. Expressions and predicates share one tree type; the
/// typechecker guarantees each node is used in the right position.
enum class Op : std::uint8_t {
  // expressions
  IntLit,
  BoolLit,
  ElemLit,   // sort element; `sort`/`num` hold the encoding, `name` the spelling
  Ident,
  IntSet,    // INT, NAT, NAT1 (num = 0, 1, 2)
  SortSet,   // a carrier set used as an expression
  BoolSet,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Card,
  EmptySet,
  SetLit,
  Interval,
  Union,
  Inter,
  Diff,
  // predicates
  True,
  False,
  Eq,
  Neq,
  Lt,
  Le,
  Gt,
  Ge,
  In,
  NotIn,
  Subset,
  And,
  Or,
  Implies,
  Equiv,
  Not,
  Exists,
  Forall,
};

struct SourcePos {
  int line = 0;
  int column = 0;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;
using Expr = NodePtr;
using Pred = NodePtr;

struct Node {
  Op op = Op::True;
  std::int64_t num = 0;
  int sort = -1;
  std::string name;           // identifier, binder, element or sort name
  std::vector<NodePtr> args;
  Ty type;                    // expression type (unknown before typechecking)
  Ty binder_type;             // quantifiers only
  SourcePos pos;
};

bool is_predicate_op(Op op);
bool is_atom_op(Op op);
bool is_quantifier(Op op);
const char* op_symbol(Op op);

namespace ast {

NodePtr int_lit(std::int64_t v, SourcePos pos = {});
NodePtr bool_lit(bool v, SourcePos pos = {});
NodePtr elem_lit(int sort, int index, std::string name, SourcePos pos = {});
NodePtr ident(std::string name, Ty type = {}, SourcePos pos = {});
NodePtr truth(bool v, SourcePos pos = {});
NodePtr make(Op op, std::vector<NodePtr> args, Ty type = {}, SourcePos pos = {});
NodePtr quantifier(Op op, std::string binder, Ty binder_type, NodePtr body, SourcePos pos = {});
NodePtr negate(NodePtr p);

/// Conjunction of `parts`; TRUE when empty, the single part when one.
NodePtr conj(std::vector<NodePtr> parts);
NodePtr disj(std::vector<NodePtr> parts);

/// Copy of `n` with replaced children.
NodePtr with_args(const NodePtr& n, std::vector<NodePtr> args);

}  // namespace ast

/// Top-level conjuncts of `p`, flattening nested conjunctions.
std::vector<NodePtr> conjuncts(const NodePtr& p);

std::set<std::string> free_vars(const NodePtr& p);
bool occurs_free(const std::string& name, const NodePtr& p);

/// True when no sub-expression can raise a well-definedness error.
bool wd_free(const NodePtr& p);

/// Structural total order: constructor tag first, then payload, then children.
int compare(const Node& a, const Node& b);
bool same(const NodePtr& a, const NodePtr& b);

std::size_t node_count(const NodePtr& p);
std::size_t quantifier_count(const NodePtr& p);

/// ASCII rendering accepted by the parser.
std::string to_string(const NodePtr& p);

}  // namespace bdead::model
