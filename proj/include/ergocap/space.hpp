#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergocap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// A set function value is outside [0,1] or violates the capacity axioms.
struct InvalidSetFunction : Error {
  using Error::Error;
};
/// Two objects live on different spaces.
struct SpaceMismatch : Error {
  using Error::Error;
};
/// An exhaustive scan would exceed the configured size cap.
struct SizeCapExceeded : Error {
  using Error::Error;
};
/// A verification routine was called on inputs that fail its hypotheses.
struct HypothesisFailure : Error {
  using Error::Error;
};

/// Finite measurable space: n points, full power set as the event algebra.
class FiniteSpace {
 public:
  static constexpr int kMaxPoints = 16;

  explicit FiniteSpace(int n, std::vector<std::string> labels = {});

  int n() const { return n_; }
  std::uint32_t full_mask() const { return (n_ == 32 ? ~0u : (1u << n_) - 1u); }
  std::uint32_t event_count() const { return 1u << n_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(int point) const;

  friend bool operator==(const FiniteSpace& a, const FiniteSpace& b) {
    return a.n_ == b.n_;
  }

 private:
  int n_;
  std::vector<std::string> labels_;
};

/// An event as a membership mask over the points of a FiniteSpace.
class Event {
 public:
  Event(std::uint32_t mask, int n);

  std::uint32_t mask() const { return mask_; }
  int n() const { return n_; }
  int size() const;
  bool contains(int point) const { return (mask_ >> point) & 1u; }
  bool is_empty() const { return mask_ == 0; }
  bool is_full() const;

  Event complement() const;
  Event unite(const Event& other) const;
  Event intersect(const Event& other) const;
  Event difference(const Event& other) const;
  bool subset_of(const Event& other) const;

  /// Membership string, character i = point i ("0110...").
  std::string bits() const;
  static Event from_bits(const std::string& bits);

  static Event empty(int n) { return Event(0, n); }
  static Event full(int n);
  static Event singleton(int point, int n);
  static Event of_points(std::initializer_list<int> points, int n);

  friend bool operator==(const Event& a, const Event& b) {
    return a.n_ == b.n_ && a.mask_ == b.mask_;
  }

 private:
  void check_same_space(const Event& other) const;
  std::uint32_t mask_;
  int n_;
};

}  // namespace ergocap
