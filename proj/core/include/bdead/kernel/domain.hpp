#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bdead::kernel {

/// Finite integer domain: an interval with a sorted set of holes.
/// Booleans and sort elements use the same representation with encoded values.
class IntDomain {
 public:
  IntDomain() = default;
  IntDomain(std::int64_t lo, std::int64_t hi) : lo_(lo), hi_(hi) {}
  static IntDomain of_values(std::vector<std::int64_t> values);

  bool empty() const { return lo_ > hi_; }
  bool fixed() const { return lo_ == hi_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  std::int64_t value() const { return lo_; }
  std::uint64_t size() const;
  bool contains(std::int64_t v) const;
  const std::vector<std::int64_t>& holes() const { return holes_; }

  /// Each mutator returns true when the domain changed.
  bool remove(std::int64_t v);
  bool restrict(std::int64_t lo, std::int64_t hi);
  bool assign(std::int64_t v);
  bool intersect(const IntDomain& other);
  /// Keeps only members of `sorted_values`.
  bool keep_only(const std::vector<std::int64_t>& sorted_values);

  std::vector<std::int64_t> values() const;

  /// Value of the domain closest to zero, preferring the non-negative one.
  std::int64_t closest_to_zero() const;

  std::string str() const;

  friend bool operator==(const IntDomain&, const IntDomain&) = default;

 private:
  void normalise();

  std::int64_t lo_ = 0;
  std::int64_t hi_ = -1;
  std::vector<std::int64_t> holes_;
};

}  // namespace bdead::kernel
