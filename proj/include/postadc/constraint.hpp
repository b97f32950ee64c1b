#pragma once

#include <string>

namespace postadc {

enum class Sense { LE, LT, GE, GT };

//! One linear condition c + d_coef * z (sense) 0 on the slice parameter z,
//! tagged with its provenance (step / candidate / window identifiers).
struct LinearConstraint {
  double c = 0.0;
  double d_coef = 0.0;
  Sense sense = Sense::LE;
  std::string tag;
};

inline const char* sense_str(Sense s) {
  switch (s) {
    case Sense::LE: return "<=";
    case Sense::LT: return "<";
    case Sense::GE: return ">=";
    case Sense::GT: return ">";
  }
  return "?";
}

}  // namespace postadc
