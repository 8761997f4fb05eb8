#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bdead::model {

/// An enumerated carrier set, e.g. `PROC = {p1, p2}`. Elements are encoded
/// as (sort index, element index) pairs.
struct SortDecl {
  std::string name;
  std::vector<std::string> elements;
};

/// Static type of an expression. `Unknown` only occurs on nodes that have
/// not been through the typechecker yet.
class Ty {
 public:
  enum class Kind : std::uint8_t { Unknown, Int, Bool, Sort, Set };

  Ty() = default;
  static Ty integer();
  static Ty boolean();
  static Ty sort(std::string name);
  static Ty set_of(Ty element);

  Kind kind() const { return kind_; }
  bool known() const { return kind_ != Kind::Unknown; }
  bool is_set() const { return kind_ == Kind::Set; }
  const std::string& sort_name() const { return sort_; }
  const Ty& element() const { return *elem_; }

  friend bool operator==(const Ty& a, const Ty& b);

  /// ASCII form as accepted by the parser: INT, BOOL, S, POW(T).
  std::string str() const;

 private:
  Kind kind_ = Kind::Unknown;
  std::string sort_;
  std::shared_ptr<const Ty> elem_;
};

/// Ground value: integer, boolean, sort element or finite set of values.
/// Sets are kept sorted and duplicate free, so equality is structural.
class Value {
 public:
  enum class Kind : std::uint8_t { Int, Bool, Elem, Set };

  Value() = default;
  static Value integer(std::int64_t v);
  static Value boolean(bool b);
  static Value element(int sort, int index);
  static Value set(std::vector<Value> elems);

  Kind kind() const { return kind_; }
  std::int64_t as_int() const { return num_; }
  bool as_bool() const { return num_ != 0; }
  int sort() const { return sort_; }
  int index() const { return static_cast<int>(num_); }
  const std::vector<Value>& elements() const { return elems_; }

  bool contains(const Value& v) const;
  bool subset_of(const Value& other) const;

  friend std::strong_ordering operator<=>(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

 private:
  Kind kind_ = Kind::Int;
  int sort_ = -1;
  std::int64_t num_ = 0;
  std::vector<Value> elems_;
};

Value set_union(const Value& a, const Value& b);
Value set_intersection(const Value& a, const Value& b);
Value set_difference(const Value& a, const Value& b);

/// Assignment of ground values to identifiers. std::map keeps field order
/// sorted, which gives the canonical state encoding used by the model checker.
using Valuation = std::map<std::string, Value>;

std::string format_value(const Value& v, std::span<const SortDecl> sorts);
std::string format_valuation(const Valuation& v, std::span<const SortDecl> sorts);

/// Canonical single-line encoding; equal valuations give equal strings.
std::string encode_valuation(const Valuation& v);

}  // namespace bdead::model
