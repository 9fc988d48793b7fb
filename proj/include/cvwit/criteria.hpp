#pragma once

#include <vector>

#include "cvwit/fock.hpp"
#include "cvwit/partitions.hpp"

namespace cvwit {

// Transpose of the Fock indices belonging to `block`. Hermiticity preserved.
Matrix partial_transpose(const DensityMatrix& dm, const std::vector<int>& block);

struct PptReport {
  Partition bipartition;
  double min_eigenvalue = 0.0;
  bool entangled = false;  // min_eigenvalue < -tau
};

PptReport ppt_check(const DensityMatrix& dm, const std::vector<int>& block,
                    double tau = tol::ppt);

// Minimum partial-transpose eigenvalue of a pure state across (block,
// complement), computed from the Schmidt values: -s1*s2 (0 for product
// states). Equal to the dense result, at SVD cost.
double pure_pt_min_eig(const Vector& psi, const ModeRegister& reg,
                       const std::vector<int>& block);

// True iff every size->=2 block of `structure` is internally entangled: the
// reduced block state has a PPT-negative partial transpose across every
// bipartition of the block. All-singleton structures pass vacuously.
bool ppt_filter(const DensityMatrix& dm, const Partition& structure,
                double tau = tol::ppt);

struct VanLoockReport {
  double v = 0.0;  // 1/(N-1) - Var(u) - Var(v); > 0 flags full inseparability
  double u_variance = 0.0;
  double v_variance = 0.0;
  std::vector<double> h;  // x coefficients
  std::vector<double> g;  // p coefficients
};

// u = x_1 + sum_{k>=2} x_k/sqrt(N-1), v = p_1 - sum_{k>=2} p_k/sqrt(N-1).
VanLoockReport van_loock_V(const DensityMatrix& dm);

}  // namespace cvwit
