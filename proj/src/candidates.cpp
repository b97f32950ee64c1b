#include "postadc/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "postadc/errors.hpp"

namespace postadc {

CandidateSet make_grid(int dim, int m_per_axis) {
  if (dim < 1) throw ConfigError("make_grid: dim must be >= 1");
  if (m_per_axis < 2) throw ConfigError("make_grid: m_per_axis must be >= 2");

  long total = 1;
  for (int j = 0; j < dim; ++j) {
    total *= m_per_axis;
    if (total > 10'000'000) throw ConfigError("make_grid: grid too large");
  }

  CandidateSet set;
  set.dim = dim;
  set.points_per_axis = m_per_axis;
  set.points.resize(total, dim);
  const double step = 1.0 / (m_per_axis - 1);
  for (long i = 0; i < total; ++i) {
    long rest = i;
    for (int j = dim - 1; j >= 0; --j) {
      set.points(i, j) = static_cast<double>(rest % m_per_axis) * step;
      rest /= m_per_axis;
    }
  }
  return set;
}

double side_length_for_dim(int dim, double base) {
  if (dim < 1) throw ConfigError("side_length_for_dim: dim must be >= 1");
  if (!(base > 0.0 && base < 1.0)) {
    throw ConfigError("side_length_for_dim: base must lie in (0,1)");
  }
  return std::pow(base, 1.0 / dim);
}

std::vector<int> window_members(const Eigen::MatrixXd& queried_points,
                                const Eigen::VectorXd& anchor, double side) {
  std::vector<int> members;
  const int n = static_cast<int>(queried_points.rows());
  const int d = static_cast<int>(queried_points.cols());
  for (int t = 0; t < n; ++t) {
    bool inside = true;
    for (int j = 0; j < d; ++j) {
      const double x = queried_points(t, j);
      if (x < anchor[j] || x > anchor[j] + side) {
        inside = false;
        break;
      }
    }
    if (inside) members.push_back(t);
  }
  return members;
}

namespace {

// Anchor values on one axis at which membership can change, plus one
// representative inside each gap. Membership of coordinate x holds for
// anchor s in the closed interval [x - side, x].
std::vector<double> axis_anchor_candidates(const Eigen::MatrixXd& pts,
                                           int axis, double side) {
  std::vector<double> brk;
  const int n = static_cast<int>(pts.rows());
  brk.reserve(2 * n);
  for (int t = 0; t < n; ++t) {
    brk.push_back(pts(t, axis));
    brk.push_back(pts(t, axis) - side);
  }
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end()), brk.end());

  std::vector<double> out;
  out.reserve(2 * brk.size());
  for (std::size_t i = 0; i < brk.size(); ++i) {
    out.push_back(brk[i]);
    if (i + 1 < brk.size()) out.push_back(0.5 * (brk[i] + brk[i + 1]));
  }
  return out;
}

}  // namespace

std::vector<Window> enumerate_windows(const Eigen::MatrixXd& queried_points,
                                      double side) {
  if (queried_points.rows() == 0) {
    throw ConfigError("enumerate_windows: no queried points");
  }
  if (!(side > 0.0)) throw ConfigError("enumerate_windows: side must be > 0");
  const int d = static_cast<int>(queried_points.cols());

  std::vector<std::vector<double>> axis_candidates(d);
  for (int j = 0; j < d; ++j) {
    axis_candidates[j] = axis_anchor_candidates(queried_points, j, side);
  }

  std::map<std::vector<int>, Eigen::VectorXd> distinct;
  Eigen::VectorXd anchor(d);
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    for (int j = 0; j < d; ++j) anchor[j] = axis_candidates[j][idx[j]];
    std::vector<int> members = window_members(queried_points, anchor, side);
    if (!members.empty()) distinct.try_emplace(std::move(members), anchor);

    int j = d - 1;
    while (j >= 0 && ++idx[j] == axis_candidates[j].size()) idx[j--] = 0;
    if (j < 0) break;
  }

  // std::map keys are already in lexicographic member-set order.
  std::vector<Window> out;
  out.reserve(distinct.size());
  for (auto& [steps, a] : distinct) {
    out.push_back(Window{steps, a, side});
  }
  return out;
}

}  // namespace postadc
