#include "bdead/value.hpp"

#include <algorithm>
#include <sstream>

namespace bdead::model {

Ty Ty::integer() {
  Ty t;
  t.kind_ = Kind::Int;
  return t;
}

Ty Ty::boolean() {
  Ty t;
  t.kind_ = Kind::Bool;
  return t;
}

Ty Ty::sort(std::string name) {
  Ty t;
  t.kind_ = Kind::Sort;
  t.sort_ = std::move(name);
  return t;
}

Ty Ty::set_of(Ty element) {
  Ty t;
  t.kind_ = Kind::Set;
  t.elem_ = std::make_shared<const Ty>(std::move(element));
  return t;
}

bool operator==(const Ty& a, const Ty& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Ty::Kind::Sort:
      return a.sort_ == b.sort_;
    case Ty::Kind::Set:
      return *a.elem_ == *b.elem_;
    default:
      return true;
  }
}

std::string Ty::str() const {
  switch (kind_) {
    case Kind::Unknown:
      return "?";
    case Kind::Int:
      return "INT";
    case Kind::Bool:
      return "BOOL";
    case Kind::Sort:
      return sort_;
    case Kind::Set:
      return "POW(" + elem_->str() + ")";
  }
  return "?";
}

Value Value::integer(std::int64_t v) {
  Value r;
  r.kind_ = Kind::Int;
  r.num_ = v;
  return r;
}

Value Value::boolean(bool b) {
  Value r;
  r.kind_ = Kind::Bool;
  r.num_ = b ? 1 : 0;
  return r;
}

Value Value::element(int sort, int index) {
  Value r;
  r.kind_ = Kind::Elem;
  r.sort_ = sort;
  r.num_ = index;
  return r;
}

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  Value r;
  r.kind_ = Kind::Set;
  r.elems_ = std::move(elems);
  return r;
}

bool Value::contains(const Value& v) const {
  return std::binary_search(elems_.begin(), elems_.end(), v);
}

bool Value::subset_of(const Value& other) const {
  return std::includes(other.elems_.begin(), other.elems_.end(), elems_.begin(), elems_.end());
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  switch (a.kind_) {
    case Value::Kind::Int:
    case Value::Kind::Bool:
      return a.num_ <=> b.num_;
    case Value::Kind::Elem:
      if (a.sort_ != b.sort_) return a.sort_ <=> b.sort_;
      return a.num_ <=> b.num_;
    case Value::Kind::Set:
      return std::lexicographical_compare_three_way(a.elems_.begin(), a.elems_.end(),
                                                    b.elems_.begin(), b.elems_.end());
  }
  return std::strong_ordering::equal;
}

Value set_union(const Value& a, const Value& b) {
  std::vector<Value> out;
  std::set_union(a.elements().begin(), a.elements().end(), b.elements().begin(),
                 b.elements().end(), std::back_inserter(out));
  return Value::set(std::move(out));
}

Value set_intersection(const Value& a, const Value& b) {
  std::vector<Value> out;
  std::set_intersection(a.elements().begin(), a.elements().end(), b.elements().begin(),
                        b.elements().end(), std::back_inserter(out));
  return Value::set(std::move(out));
}

Value set_difference(const Value& a, const Value& b) {
  std::vector<Value> out;
  std::set_difference(a.elements().begin(), a.elements().end(), b.elements().begin(),
                      b.elements().end(), std::back_inserter(out));
  return Value::set(std::move(out));
}

std::string format_value(const Value& v, std::span<const SortDecl> sorts) {
  switch (v.kind()) {
    case Value::Kind::Int:
      return std::to_string(v.as_int());
    case Value::Kind::Bool:
      return v.as_bool() ? "TRUE" : "FALSE";
    case Value::Kind::Elem:
      if (v.sort() >= 0 && static_cast<std::size_t>(v.sort()) < sorts.size()) {
        const auto& s = sorts[static_cast<std::size_t>(v.sort())];
        if (v.index() >= 0 && static_cast<std::size_t>(v.index()) < s.elements.size())
          return s.elements[static_cast<std::size_t>(v.index())];
      }
      return "#" + std::to_string(v.sort()) + "." + std::to_string(v.index());
    case Value::Kind::Set: {
      if (v.elements().empty()) return "{}";
      std::string out = "{";
      bool first = true;
      for (const auto& e : v.elements()) {
        if (!first) out += ",";
        first = false;
        out += format_value(e, sorts);
      }
      return out + "}";
    }
  }
  return "?";
}

std::string format_valuation(const Valuation& v, std::span<const SortDecl> sorts) {
  std::string out;
  for (const auto& [name, value] : v) {
    if (!out.empty()) out += " & ";
    out += name + "=" + format_value(value, sorts);
  }
  return out.empty() ? "(empty)" : out;
}

namespace {

void encode(std::ostringstream& os, const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int:
      os << 'i' << v.as_int();
      break;
    case Value::Kind::Bool:
      os << (v.as_bool() ? 'T' : 'F');
      break;
    case Value::Kind::Elem:
      os << 'e' << v.sort() << '.' << v.index();
      break;
    case Value::Kind::Set:
      os << '[';
      for (const auto& e : v.elements()) {
        encode(os, e);
        os << ',';
      }
      os << ']';
      break;
  }
}

}  // namespace

std::string encode_valuation(const Valuation& v) {
  std::ostringstream os;
  for (const auto& [name, value] : v) {
    os << name << '=';
    encode(os, value);
    os << ';';
  }
  return os.str();
}

}  // namespace bdead::model
