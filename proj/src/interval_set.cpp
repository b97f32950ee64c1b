#include "postadc/interval_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "postadc/errors.hpp"

namespace postadc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
  for (const Interval& iv : intervals) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo < iv.hi)) {
      throw ConfigError("IntervalSet: interval must satisfy lo < hi");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const Interval& iv : intervals) {
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
      Interval& last = intervals_.back();
      if (iv.lo == last.hi) last.hi_open = false;  // touching endpoints close
      if (iv.hi > last.hi) {
        last.hi = iv.hi;
        last.hi_open = iv.hi_open;
      } else if (iv.hi == last.hi) {
        last.hi_open = last.hi_open && iv.hi_open;
      }
    } else {
      intervals_.push_back(iv);
    }
  }
}

IntervalSet IntervalSet::all_reals() { return IntervalSet({Interval{}}); }

IntervalSet IntervalSet::single(double lo, double hi, bool lo_open,
                                bool hi_open) {
  return IntervalSet({Interval{lo, hi, lo_open, hi_open}});
}

bool IntervalSet::contains(double z, double tol) const {
  for (const Interval& iv : intervals_) {
    if (z >= iv.lo - tol && z <= iv.hi + tol) return true;
  }
  return false;
}

double IntervalSet::distance_to_endpoint(double z) const {
  double best = kInf;
  for (const Interval& iv : intervals_) {
    if (std::isfinite(iv.lo)) best = std::min(best, std::fabs(z - iv.lo));
    if (std::isfinite(iv.hi)) best = std::min(best, std::fabs(z - iv.hi));
  }
  return best;
}

bool IntervalSet::subset_of(const IntervalSet& other, double tol) const {
  for (const Interval& iv : intervals_) {
    bool covered = false;
    for (const Interval& jv : other.intervals_) {
      if (iv.lo >= jv.lo - tol && iv.hi <= jv.hi + tol) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  for (const Interval& a : intervals_) {
    for (const Interval& b : other.intervals_) {
      const double lo = std::max(a.lo, b.lo);
      const double hi = std::min(a.hi, b.hi);
      if (lo < hi) {
        Interval iv;
        iv.lo = lo;
        iv.hi = hi;
        iv.lo_open = (a.lo > b.lo) ? a.lo_open : b.lo_open;
        iv.hi_open = (a.hi < b.hi) ? a.hi_open : b.hi_open;
        out.push_back(iv);
      }
    }
  }
  return IntervalSet(std::move(out));
}

double IntervalSet::hull_lo() const {
  return intervals_.empty() ? kInf : intervals_.front().lo;
}

double IntervalSet::hull_hi() const {
  return intervals_.empty() ? -kInf : intervals_.back().hi;
}

std::string IntervalSet::str() const {
  if (intervals_.empty()) return "{}";
  std::string out;
  char buf[80];
  for (const Interval& iv : intervals_) {
    if (!out.empty()) out += " u ";
    std::snprintf(buf, sizeof(buf), "%c%.10g, %.10g%c", iv.lo_open ? '(' : '[',
                  iv.lo, iv.hi, iv.hi_open ? ')' : ']');
    out += buf;
  }
  return out;
}

}  // namespace postadc
