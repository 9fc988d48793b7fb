#include "cvwit/criteria.hpp"

#include <algorithm>
#include <cmath>

namespace cvwit {

Matrix partial_transpose(const DensityMatrix& dm,
                         const std::vector<int>& block) {
  if (block.empty()) throw ValidationError("partial_transpose: empty block");
  std::vector<bool> in_block(dm.reg.num_modes, false);
  for (int m : block) {
    if (m < 0 || m >= dm.reg.num_modes)
      throw ValidationError("partial_transpose: mode out of range");
    in_block[m] = true;
  }

  const auto& reg = dm.reg;
  Matrix out(reg.total_dim, reg.total_dim);
  // Swap the block digits between row and column indices.
  for (long i = 0; i < reg.total_dim; ++i) {
    for (long j = 0; j < reg.total_dim; ++j) {
      long ti = 0, tj = 0;
      for (int m = 0; m < reg.num_modes; ++m) {
        const long s = reg.stride(m);
        const int di = reg.digit(i, m);
        const int dj = reg.digit(j, m);
        if (in_block[m]) {
          ti += dj * s;
          tj += di * s;
        } else {
          ti += di * s;
          tj += dj * s;
        }
      }
      out(ti, tj) = dm.rho(i, j);
    }
  }
  return out;
}

PptReport ppt_check(const DensityMatrix& dm, const std::vector<int>& block,
                    double tau) {
  std::vector<int> rest;
  for (int m = 0; m < dm.reg.num_modes; ++m)
    if (std::find(block.begin(), block.end(), m) == block.end())
      rest.push_back(m);
  if (rest.empty() || block.empty())
    throw ValidationError("ppt_check: block must be a proper nonempty subset");

  PptReport report;
  report.bipartition = Partition::from_blocks({block, rest});
  if (dm.pure) {
    report.min_eigenvalue = pure_pt_min_eig(*dm.pure, dm.reg, block);
  } else {
    const Matrix pt = partial_transpose(dm, block);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pt, Eigen::EigenvaluesOnly);
    report.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  report.entangled = report.min_eigenvalue < -tau;
  return report;
}

double pure_pt_min_eig(const Vector& psi, const ModeRegister& reg,
                       const std::vector<int>& block) {
  std::vector<int> a(block);
  std::sort(a.begin(), a.end());
  std::vector<int> b;
  for (int m = 0; m < reg.num_modes; ++m)
    if (!std::binary_search(a.begin(), a.end(), m)) b.push_back(m);
  if (a.empty() || b.empty())
    throw ValidationError("pure_pt_min_eig: block must be a proper subset");

  const int d = reg.cutoff;
  long dim_a = 1, dim_b = 1;
  for (size_t i = 0; i < a.size(); ++i) dim_a *= d;
  for (size_t i = 0; i < b.size(); ++i) dim_b *= d;

  Matrix reshaped(dim_a, dim_b);
  for (long i = 0; i < reg.total_dim; ++i) {
    long ia = 0, ib = 0;
    for (int m : a) ia = ia * d + reg.digit(i, m);
    for (int m : b) ib = ib * d + reg.digit(i, m);
    reshaped(ia, ib) = psi(i);
  }

  Eigen::JacobiSVD<Matrix> svd(reshaped);
  const auto& s = svd.singularValues();
  // PT spectrum of a pure state is {s_i^2} u {+- s_i s_j}; the minimum is
  // -s1*s2.
  if (s.size() < 2) return 0.0;
  return -s(0) * s(1);
}

bool ppt_filter(const DensityMatrix& dm, const Partition& structure,
                double tau) {
  for (const auto& block : structure.blocks) {
    const int nb = static_cast<int>(block.size());
    if (nb < 2) continue;

    const bool whole = nb == dm.reg.num_modes;
    DensityMatrix local = whole ? dm : partial_trace(dm, block);

    // Detect purity of the reduced state so the Schmidt shortcut applies.
    std::optional<Vector> local_pure = local.pure;
    if (!local_pure) {
      const double purity = (local.rho * local.rho).trace().real();
      if (purity > 1.0 - 1e-10) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(local.rho);
        local_pure = es.eigenvectors().col(local.rho.rows() - 1);
      }
    }

    for (const auto& cut : bipartitions(nb)) {
      // Map block-local bipartition indices back to local register modes.
      const std::vector<int>& half = cut.blocks.front();
      double min_eig;
      if (local_pure) {
        min_eig = pure_pt_min_eig(*local_pure, local.reg, half);
      } else {
        const Matrix pt = partial_transpose(local, half);
        Eigen::SelfAdjointEigenSolver<Matrix> es(pt, Eigen::EigenvaluesOnly);
        min_eig = es.eigenvalues().minCoeff();
      }
      if (min_eig >= -tau) return false;
    }
  }
  return true;
}

VanLoockReport van_loock_V(const DensityMatrix& dm) {
  const int n = dm.reg.num_modes;
  if (n < 2) throw ValidationError("van_loock_V: need at least two modes");
  const double w = 1.0 / std::sqrt(double(n - 1));

  VanLoockReport report;
  report.h.assign(n, w);
  report.g.assign(n, -w);
  report.h[0] = 1.0;
  report.g[0] = 1.0;

  const auto quad = quadratures(dm.reg.cutoff);
  auto quad_combo_var = [&](const std::vector<double>& coef, const Matrix& op) {
    // Var of sum_k coef_k O_k, evaluated as <O^2> - <O>^2 on rho.
    Matrix orho = Matrix::Zero(dm.reg.total_dim, dm.reg.total_dim);
    for (int m = 0; m < n; ++m)
      if (coef[m] != 0.0)
        orho += coef[m] * apply_local_cols(op, m, dm.reg, dm.rho);
    const double mean = orho.trace().real();
    Matrix o2rho = Matrix::Zero(dm.reg.total_dim, dm.reg.total_dim);
    for (int m = 0; m < n; ++m)
      if (coef[m] != 0.0)
        o2rho += coef[m] * apply_local_cols(op, m, dm.reg, orho);
    return o2rho.trace().real() - mean * mean;
  };

  report.u_variance = quad_combo_var(report.h, quad.x);
  report.v_variance = quad_combo_var(report.g, quad.p);
  report.v = 1.0 / double(n - 1) - report.u_variance - report.v_variance;
  return report;
}

}  // namespace cvwit
