#include "bdead/kernel/domain.hpp"

#include <algorithm>

namespace bdead::kernel {

IntDomain IntDomain::of_values(std::vector<std::int64_t> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty()) return {};
  IntDomain d(values.front(), values.back());
  std::size_t k = 0;
  for (std::int64_t v = d.lo_; v <= d.hi_; ++v) {
    if (values[k] == v) {
      ++k;
    } else {
      d.holes_.push_back(v);
    }
  }
  return d;
}

std::uint64_t IntDomain::size() const {
  if (empty()) return 0;
  return static_cast<std::uint64_t>(hi_ - lo_) + 1 - holes_.size();
}

bool IntDomain::contains(std::int64_t v) const {
  return v >= lo_ && v <= hi_ && !std::binary_search(holes_.begin(), holes_.end(), v);
}

void IntDomain::normalise() {
  while (!holes_.empty() && lo_ <= hi_ && holes_.front() == lo_) {
    holes_.erase(holes_.begin());
    ++lo_;
  }
  while (!holes_.empty() && lo_ <= hi_ && holes_.back() == hi_) {
    holes_.pop_back();
    --hi_;
  }
  if (lo_ > hi_) holes_.clear();
}

bool IntDomain::remove(std::int64_t v) {
  if (!contains(v)) return false;
  if (v == lo_) {
    ++lo_;
  } else if (v == hi_) {
    --hi_;
  } else {
    holes_.insert(std::lower_bound(holes_.begin(), holes_.end(), v), v);
  }
  normalise();
  return true;
}

bool IntDomain::restrict(std::int64_t lo, std::int64_t hi) {
  if (empty()) return false;
  if (lo <= lo_ && hi >= hi_) return false;
  lo_ = std::max(lo_, lo);
  hi_ = std::min(hi_, hi);
  if (lo_ > hi_) {
    holes_.clear();
    return true;
  }
  holes_.erase(std::remove_if(holes_.begin(), holes_.end(), [&](std::int64_t h) { return h < lo_ || h > hi_; }),
               holes_.end());
  normalise();
  return true;
}

bool IntDomain::assign(std::int64_t v) {
  if (fixed() && lo_ == v) return false;
  if (!contains(v)) {
    lo_ = 0;
    hi_ = -1;
    holes_.clear();
    return true;
  }
  lo_ = hi_ = v;
  holes_.clear();
  return true;
}

bool IntDomain::intersect(const IntDomain& other) {
  bool changed = restrict(other.lo_, other.hi_);
  for (std::int64_t h : other.holes_) changed |= remove(h);
  return changed;
}

bool IntDomain::keep_only(const std::vector<std::int64_t>& sorted_values) {
  if (empty()) return false;
  std::vector<std::int64_t> kept;
  for (std::int64_t v : sorted_values)
    if (contains(v)) kept.push_back(v);
  IntDomain next = of_values(std::move(kept));
  if (next == *this) return false;
  *this = std::move(next);
  return true;
}

std::vector<std::int64_t> IntDomain::values() const {
  std::vector<std::int64_t> out;
  if (empty()) return out;
  out.reserve(size());
  std::size_t k = 0;
  for (std::int64_t v = lo_; v <= hi_; ++v) {
    if (k < holes_.size() && holes_[k] == v) {
      ++k;
      continue;
    }
    out.push_back(v);
  }
  return out;
}

std::int64_t IntDomain::closest_to_zero() const {
  if (lo_ >= 0) return lo_;
  if (hi_ <= 0) return hi_;
  for (std::int64_t d = 0;; ++d) {
    if (contains(d)) return d;
    if (contains(-d)) return -d;
  }
}

std::string IntDomain::str() const {
  if (empty()) return "{}";
  if (fixed()) return std::to_string(lo_);
  std::string s = std::to_string(lo_) + ".." + std::to_string(hi_);
  if (!holes_.empty()) {
    s += " \\ {";
    for (std::size_t i = 0; i < holes_.size(); ++i) s += (i ? "," : "") + std::to_string(holes_[i]);
    s += "}";
  }
  return s;
}

}  // namespace bdead::kernel
