#pragma once

#include <Eigen/Dense>
#include <string>

#include "postadc/candidates.hpp"

namespace postadc {

enum class ObjectiveFamily {
  Sinc,
  Cos,
  Chirp,
  Bump,
  Peak,
  NegativeForrester,
  ConstantZero,
};

ObjectiveFamily parse_objective_family(const std::string& name);
std::string objective_family_name(ObjectiveFamily family);

struct ObjectiveSpec {
  ObjectiveFamily family = ObjectiveFamily::ConstantZero;
  double amplitude = 0.0;
};

//! Mean vector over the candidate set: the coordinate-aggregated template
//! (1/d) sum_j g(x_j), min-max rescaled to [-1, 1] over the candidates and
//! multiplied by the amplitude. constant_zero is the all-zero vector.
Eigen::VectorXd synth_objective(const ObjectiveSpec& spec,
                                const CandidateSet& candidates);

}  // namespace postadc
