#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bdead/ast.hpp"
#include "bdead/value.hpp"

namespace bdead::model {

/// Raised for malformed input; carries the 1-based source position.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, SourcePos pos)
      : std::runtime_error(format(what, pos)), pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  static std::string format(const std::string& what, SourcePos pos) {
    return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what;
  }
  SourcePos pos_;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class TypeError : public InputError {
 public:
  using InputError::InputError;
};

struct Decl {
  std::string name;
  Ty type;
  SourcePos pos;
};

struct LabeledPred {
  std::string label;
  Pred pred;
};

struct Assignment {
  std::string var;
  Expr value;
  SourcePos pos;
};

struct Event {
  std::string name;
  std::vector<Decl> params;
  std::vector<Pred> guards;        // conjunction g1 & ... & gj
  std::vector<Assignment> actions;  // simultaneous
  SourcePos pos;
};

struct Machine {
  std::string name;
  std::vector<SortDecl> sorts;
  std::vector<Decl> constants;
  std::vector<LabeledPred> axioms;
  std::vector<Decl> variables;
  std::vector<LabeledPred> invariants;
  Event init;
  std::vector<Event> events;

  const Event* find_event(std::string_view name) const;
};

/// A machine whose nodes all carry types, whose identifiers are resolved
/// (sort elements become ElemLit, carrier sets SortSet) and whose binders
/// never shadow another identifier.
class TypedMachine {
 public:
  explicit TypedMachine(Machine m) : m_(std::move(m)) {}
  const Machine& machine() const { return m_; }
  const Machine* operator->() const { return &m_; }

  /// Constants followed by variables, in declaration order.
  std::vector<Decl> scope() const;
  const Decl* find_decl(std::string_view name) const;

 private:
  Machine m_;
};

Machine parse_machine(std::string_view text);

/// Parses a stand-alone predicate, e.g. a goal given on the command line.
Pred parse_predicate(std::string_view text);

TypedMachine typecheck(const Machine& m);

/// Typechecks `p` against the constants and variables of `m`.
Pred typecheck_predicate(const Pred& p, const TypedMachine& m);

/// Existential closure of the event's guards over its parameters.
Pred enabling_predicate(const Event& e);

Pred axioms_predicate(const Machine& m);
Pred invariants_predicate(const Machine& m);

std::string print_machine(const Machine& m);

}  // namespace bdead::model
