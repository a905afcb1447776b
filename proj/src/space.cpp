#include "ergocap/space.hpp"

#include <bit>
#include <set>

namespace ergocap {

FiniteSpace::FiniteSpace(int n, std::vector<std::string> labels)
    : n_(n), labels_(std::move(labels)) {
  if (n < 1 || n > kMaxPoints)
    throw Error("FiniteSpace: point count must be in [1," +
                std::to_string(kMaxPoints) + "], got " + std::to_string(n));
  if (!labels_.empty()) {
    if (static_cast<int>(labels_.size()) != n)
      throw Error("FiniteSpace: label count does not match point count");
    std::set<std::string> uniq(labels_.begin(), labels_.end());
    if (static_cast<int>(uniq.size()) != n)
      throw Error("FiniteSpace: labels must be distinct");
  }
}

std::string FiniteSpace::label(int point) const {
  if (point < 0 || point >= n_) throw Error("FiniteSpace: point out of range");
  if (!labels_.empty()) return labels_[point];
  return std::to_string(point);
}

Event::Event(std::uint32_t mask, int n) : mask_(mask), n_(n) {
  if (n < 1 || n > FiniteSpace::kMaxPoints) throw Error("Event: bad space size");
  if (mask >> n) throw Error("Event: mask uses bits beyond the space");
}

int Event::size() const { return std::popcount(mask_); }

bool Event::is_full() const { return mask_ == Event::full(n_).mask_; }

Event Event::complement() const {
  return Event(~mask_ & ((1u << n_) - 1u), n_);
}

void Event::check_same_space(const Event& other) const {
  if (n_ != other.n_) throw SpaceMismatch("Event: operands on different spaces");
}

Event Event::unite(const Event& other) const {
  check_same_space(other);
  return Event(mask_ | other.mask_, n_);
}

Event Event::intersect(const Event& other) const {
  check_same_space(other);
  return Event(mask_ & other.mask_, n_);
}

Event Event::difference(const Event& other) const {
  check_same_space(other);
  return Event(mask_ & ~other.mask_, n_);
}

bool Event::subset_of(const Event& other) const {
  check_same_space(other);
  return (mask_ & ~other.mask_) == 0;
}

std::string Event::bits() const {
  std::string out(static_cast<std::size_t>(n_), '0');
  for (int i = 0; i < n_; ++i)
    if (contains(i)) out[static_cast<std::size_t>(i)] = '1';
  return out;
}

Event Event::from_bits(const std::string& bits) {
  int n = static_cast<int>(bits.size());
  std::uint32_t mask = 0;
  for (int i = 0; i < n; ++i) {
    char c = bits[static_cast<std::size_t>(i)];
    if (c == '1')
      mask |= (1u << i);
    else if (c != '0')
      throw Error("Event: bad bit string '" + bits + "'");
  }
  return Event(mask, n);
}

Event Event::full(int n) { return Event((1u << n) - 1u, n); }

Event Event::singleton(int point, int n) {
  if (point < 0 || point >= n) throw Error("Event: point out of range");
  return Event(1u << point, n);
}

Event Event::of_points(std::initializer_list<int> points, int n) {
  std::uint32_t mask = 0;
  for (int p : points) {
    if (p < 0 || p >= n) throw Error("Event: point out of range");
    mask |= (1u << p);
  }
  return Event(mask, n);
}

}  // namespace ergocap
