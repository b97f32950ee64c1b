#include "postadc/objectives.hpp"

#include <cmath>
#include <numbers>

#include "postadc/errors.hpp"

namespace postadc {

namespace {

double sinc(double t) {
  if (t == 0.0) return 1.0;
  const double pt = std::numbers::pi * t;
  return std::sin(pt) / pt;
}

double base_template(ObjectiveFamily family, double u) {
  switch (family) {
    case ObjectiveFamily::Sinc:
      return sinc(10.0 * (u - 0.5));
    case ObjectiveFamily::Cos:
      return -std::cos(2.0 * std::numbers::pi * u);
    case ObjectiveFamily::Chirp:
      return std::sin(2.0 * std::numbers::pi * u * u);
    case ObjectiveFamily::Bump:
      return std::exp(-(u - 0.7) * (u - 0.7) / (2.0 * 0.08 * 0.08));
    case ObjectiveFamily::Peak:
      return 1.0 - std::fabs(u - 0.4);
    case ObjectiveFamily::NegativeForrester: {
      const double w = 6.0 * u - 2.0;
      return -(w * w) * std::sin(12.0 * u - 4.0);
    }
    case ObjectiveFamily::ConstantZero:
      return 0.0;
  }
  return 0.0;
}

}  // namespace

ObjectiveFamily parse_objective_family(const std::string& name) {
  if (name == "sinc") return ObjectiveFamily::Sinc;
  if (name == "cos") return ObjectiveFamily::Cos;
  if (name == "chirp") return ObjectiveFamily::Chirp;
  if (name == "bump") return ObjectiveFamily::Bump;
  if (name == "peak") return ObjectiveFamily::Peak;
  if (name == "negative_forrester") return ObjectiveFamily::NegativeForrester;
  if (name == "constant_zero") return ObjectiveFamily::ConstantZero;
  throw ConfigError("unknown objective family: " + name);
}

std::string objective_family_name(ObjectiveFamily family) {
  switch (family) {
    case ObjectiveFamily::Sinc: return "sinc";
    case ObjectiveFamily::Cos: return "cos";
    case ObjectiveFamily::Chirp: return "chirp";
    case ObjectiveFamily::Bump: return "bump";
    case ObjectiveFamily::Peak: return "peak";
    case ObjectiveFamily::NegativeForrester: return "negative_forrester";
    case ObjectiveFamily::ConstantZero: return "constant_zero";
  }
  return "?";
}

Eigen::VectorXd synth_objective(const ObjectiveSpec& spec,
                                const CandidateSet& candidates) {
  if (spec.amplitude < 0.0) {
    throw ConfigError("synth_objective: amplitude must be >= 0");
  }
  const int m = candidates.size();
  if (spec.family == ObjectiveFamily::ConstantZero) {
    return Eigen::VectorXd::Zero(m);
  }

  Eigen::VectorXd raw(m);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < candidates.dim; ++j) {
      acc += base_template(spec.family, candidates.points(i, j));
    }
    raw[i] = acc / candidates.dim;
  }

  const double lo = raw.minCoeff();
  const double hi = raw.maxCoeff();
  if (!(hi > lo)) {
    throw NumericalError("synth_objective: degenerate rescale, max == min");
  }
  // Affine map sending [lo, hi] onto [-1, 1], then the amplitude.
  return spec.amplitude * (2.0 * raw.array() - (hi + lo)) / (hi - lo);
}

}  // namespace postadc
