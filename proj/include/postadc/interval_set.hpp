#pragma once

#include <limits>
#include <string>
#include <vector>

namespace postadc {

//! One interval of the real line, possibly unbounded. Openness flags are
//! carried for reporting; numeric predicates treat every interval as
//! closed, since boundary points have probability zero under the
//! continuous response model.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;
};

//! Sorted union of disjoint intervals with lo < hi each.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> intervals);

  static IntervalSet all_reals();
  static IntervalSet single(double lo, double hi, bool lo_open = false,
                            bool hi_open = false);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  int size() const { return static_cast<int>(intervals_.size()); }

  bool contains(double z, double tol = 0.0) const;

  //! Distance from z to the nearest finite endpoint (+inf if none).
  double distance_to_endpoint(double z) const;

  //! True when every interval of *this lies inside some interval of other,
  //! with endpoint slack tol.
  bool subset_of(const IntervalSet& other, double tol = 0.0) const;

  IntervalSet intersect(const IntervalSet& other) const;

  double hull_lo() const;
  double hull_hi() const;

  std::string str() const;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace postadc
