#pragma once

#include <random>

#include "hyperbench/tensor.hpp"

// Deterministic random tensor generators for verification drivers and
// property tests.  Raw engine words are mapped to [0,1) directly so that
// streams are identical across standard-library implementations.

namespace hyperbench {

class TensorSampler {
 public:
  explicit TensorSampler(unsigned seed) : gen_(seed) {}

  double uniform() { return double(gen_()) / 4294967296.0; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Deformation gradient with det F drawn uniformly from [det_lo, det_hi].
  Tensor2 deformation_gradient(double det_lo, double det_hi) {
    while (true) {
      Tensor2 F = Tensor2::identity();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) F(i, j) += 0.4 * (2.0 * uniform() - 1.0);
      double d = F.det();
      if (d < 0.05) continue;
      double target = uniform(det_lo, det_hi);
      return std::cbrt(target / d) * F;
    }
  }

  Tensor2 rotation_matrix() {
    std::array<double, 3> axis{2.0 * uniform() - 1.0, 2.0 * uniform() - 1.0,
                               2.0 * uniform() - 1.0};
    if (axis[0] == 0.0 && axis[1] == 0.0 && axis[2] == 0.0) axis[2] = 1.0;
    return rotation(axis, uniform(-3.141592653589793, 3.141592653589793));
  }

  SymTensor2 symmetric(double amplitude = 1.0) {
    SymTensor2 s;
    for (int k = 0; k < 6; ++k) s[k] = amplitude * (2.0 * uniform() - 1.0);
    return s;
  }

  SymTensor2 spd(double shift = 0.1) {
    Tensor2 G;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) G(i, j) = 2.0 * uniform() - 1.0;
    SymTensor2 s = SymTensor2::sym_part(G.transpose() * G);
    s[0] += shift;
    s[1] += shift;
    s[2] += shift;
    return s;
  }

 private:
  std::mt19937 gen_;
};

}  // namespace hyperbench
