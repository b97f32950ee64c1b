#pragma once

#include <Eigen/Dense>
#include <vector>

namespace postadc {

//! Finite query domain: M points in [0,1]^d, one per row, in a fixed
//! deterministic order.
struct CandidateSet {
  int dim = 0;
  Eigen::MatrixXd points;   // M x dim
  int points_per_axis = 0;  // for generated grids, else 0

  int size() const { return static_cast<int>(points.rows()); }
  Eigen::VectorXd point(int i) const { return points.row(i).transpose(); }
};

//! Axis-aligned grid {0, 1/(m-1), ..., 1}^d in row-major order over axes
//! (last axis varies fastest).
CandidateSet make_grid(int dim, int m_per_axis);

//! Side length of the sliding hypercube, base^(1/d).
double side_length_for_dim(int dim, double base);

//! One realizable sliding-window index set over the queried points.
//! Identity is the member set; the anchor is a witness that reproduces it.
struct Window {
  std::vector<int> steps;  // sorted 0-based step indices, nonempty
  Eigen::VectorXd anchor;  // lower corner of a witnessing hypercube
  double side = 0.0;
};

//! Index set of queried points inside the hypercube [anchor, anchor+side]^d.
std::vector<int> window_members(const Eigen::MatrixXd& queried_points,
                                const Eigen::VectorXd& anchor, double side);

//! All distinct nonempty index sets realizable by some anchor in R^d,
//! sorted by member set in lexicographic order.
//!
//! Per axis, the member set changes only where an axis anchor crosses a
//! queried coordinate x or x - side, so scanning those breakpoints (and
//! the gaps between them) per axis and taking the cartesian product over
//! axes visits every realizable set.
std::vector<Window> enumerate_windows(const Eigen::MatrixXd& queried_points,
                                      double side);

}  // namespace postadc
