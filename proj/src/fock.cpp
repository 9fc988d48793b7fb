#include "cvwit/fock.hpp"

#include <algorithm>
#include <cmath>

namespace cvwit {

ModeRegister::ModeRegister(int n_modes, int d) : num_modes(n_modes), cutoff(d) {
  if (n_modes < 1) throw ValidationError("ModeRegister: need at least one mode");
  if (d < 2) throw ValidationError("ModeRegister: cutoff must be at least 2");
  total_dim = 1;
  for (int j = 0; j < n_modes; ++j) {
    total_dim *= d;
    if (total_dim > (1L << 24))
      throw ValidationError("ModeRegister: total dimension too large");
  }
}

long ModeRegister::stride(int mode) const {
  long s = 1;
  for (int j = mode + 1; j < num_modes; ++j) s *= cutoff;
  return s;
}

int ModeRegister::digit(long index, int mode) const {
  return static_cast<int>((index / stride(mode)) % cutoff);
}

int default_cutoff(int num_modes) {
  switch (num_modes) {
    case 1:
    case 2:
      return 10;
    case 3:
      return 8;
    case 4:
      return 6;
    default:
      return 5;
  }
}

Matrix ladder(int cutoff) {
  if (cutoff < 2) throw ValidationError("ladder: cutoff must be at least 2");
  Matrix a = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

QuadraturePair quadratures(int cutoff) {
  const Matrix a = ladder(cutoff);
  const Matrix ad = a.adjoint();
  const double s = 1.0 / std::sqrt(2.0);
  QuadraturePair q;
  q.x = s * (a + ad);
  q.p = (a - ad) * Complex(0.0, -s);
  return q;
}

Matrix embed_local(const Matrix& op, int mode, const ModeRegister& reg) {
  if (op.rows() != reg.cutoff || op.cols() != reg.cutoff)
    throw ValidationError("embed_local: operator dimension mismatch");
  if (mode < 0 || mode >= reg.num_modes)
    throw ValidationError("embed_local: mode out of range");

  const long dim = reg.total_dim;
  const long s = reg.stride(mode);
  const int d = reg.cutoff;
  Matrix out = Matrix::Zero(dim, dim);
  // Iterate over the joint index of all other modes; within each slice the
  // embedding is a dense d x d block on a strided lattice.
  const long outer = dim / (s * d);  // slower-than-mode digits
  for (long hi = 0; hi < outer; ++hi) {
    for (long lo = 0; lo < s; ++lo) {
      const long base = hi * s * d + lo;
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n)
          out(base + m * s, base + n * s) = op(m, n);
    }
  }
  return out;
}

void apply_local(const Matrix& op, int mode, const ModeRegister& reg,
                 const Vector& in, Vector& out) {
  if (op.rows() != reg.cutoff || op.cols() != reg.cutoff)
    throw ValidationError("apply_local: operator dimension mismatch");
  if (mode < 0 || mode >= reg.num_modes)
    throw ValidationError("apply_local: mode out of range");
  if (in.size() != reg.total_dim)
    throw ValidationError("apply_local: vector dimension mismatch");

  const long s = reg.stride(mode);
  const int d = reg.cutoff;
  out.resize(reg.total_dim);
  const long outer = reg.total_dim / (s * d);
  for (long hi = 0; hi < outer; ++hi) {
    for (long lo = 0; lo < s; ++lo) {
      const long base = hi * s * d + lo;
      for (int m = 0; m < d; ++m) {
        Complex acc = 0.0;
        for (int n = 0; n < d; ++n) acc += op(m, n) * in(base + n * s);
        out(base + m * s) = acc;
      }
    }
  }
}

Vector apply_local(const Matrix& op, int mode, const ModeRegister& reg,
                   const Vector& in) {
  Vector out;
  apply_local(op, mode, reg, in, out);
  return out;
}

Matrix apply_local_cols(const Matrix& op, int mode, const ModeRegister& reg,
                        const Matrix& in) {
  Matrix out(in.rows(), in.cols());
  Vector col;
  for (Eigen::Index c = 0; c < in.cols(); ++c) {
    Vector v = in.col(c);
    apply_local(op, mode, reg, v, col);
    out.col(c) = col;
  }
  return out;
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tau) {
  return m.rows() == m.cols() && hermiticity_defect(m) < tau;
}

DensityMatrix density_from_matrix(Matrix rho, const ModeRegister& reg) {
  if (rho.rows() != reg.total_dim || rho.cols() != reg.total_dim)
    throw ValidationError("density_from_matrix: dimension mismatch");
  if (hermiticity_defect(rho) > tol::hermiticity)
    throw ValidationError("density_from_matrix: input not Hermitian");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > tol::leakage)
    throw LeakageError("density_from_matrix: trace deviates beyond leakage policy");
  rho /= tr;
  rho = (rho + rho.adjoint().eval()) / 2.0;
  return DensityMatrix{std::move(rho), reg, std::nullopt};
}

DensityMatrix density_from_pure(Vector psi, const ModeRegister& reg) {
  if (psi.size() != reg.total_dim)
    throw ValidationError("density_from_pure: dimension mismatch");
  const double nrm = psi.norm();
  if (std::abs(nrm - 1.0) > tol::leakage)
    throw LeakageError("density_from_pure: norm deviates beyond leakage policy");
  psi /= nrm;
  Matrix rho = psi * psi.adjoint();
  return DensityMatrix{std::move(rho), reg, std::move(psi)};
}

DensityMatrix partial_trace(const DensityMatrix& dm, std::vector<int> keep) {
  if (keep.empty()) throw ValidationError("partial_trace: empty keep set");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int m : keep)
    if (m < 0 || m >= dm.reg.num_modes)
      throw ValidationError("partial_trace: mode out of range");

  const int n_keep = static_cast<int>(keep.size());
  if (n_keep == dm.reg.num_modes) return dm;

  std::vector<int> traced;
  for (int m = 0; m < dm.reg.num_modes; ++m)
    if (!std::binary_search(keep.begin(), keep.end(), m)) traced.push_back(m);

  const ModeRegister sub(n_keep, dm.reg.cutoff);
  const int d = dm.reg.cutoff;

  // Strides of kept / traced modes in the full register.
  std::vector<long> keep_stride(n_keep), tr_stride(traced.size());
  for (int i = 0; i < n_keep; ++i) keep_stride[i] = dm.reg.stride(keep[i]);
  for (size_t i = 0; i < traced.size(); ++i) tr_stride[i] = dm.reg.stride(traced[i]);

  long tr_dim = 1;
  for (size_t i = 0; i < traced.size(); ++i) tr_dim *= d;

  Matrix out = Matrix::Zero(sub.total_dim, sub.total_dim);
  for (long a = 0; a < sub.total_dim; ++a) {
    long base_a = 0;
    for (int i = 0; i < n_keep; ++i)
      base_a += sub.digit(a, i) * keep_stride[i];
    for (long b = 0; b < sub.total_dim; ++b) {
      long base_b = 0;
      for (int i = 0; i < n_keep; ++i)
        base_b += sub.digit(b, i) * keep_stride[i];
      Complex acc = 0.0;
      for (long t = 0; t < tr_dim; ++t) {
        long off = 0;
        long rem = t;
        for (size_t i = traced.size(); i-- > 0;) {
          off += (rem % d) * tr_stride[i];
          rem /= d;
        }
        acc += dm.rho(base_a + off, base_b + off);
      }
      out(a, b) = acc;
    }
  }
  return DensityMatrix{std::move(out), sub, std::nullopt};
}

SpectralDecomposition spectral_decompose(const DensityMatrix& dm) {
  if (hermiticity_defect(dm.rho) > tol::hermiticity)
    throw ValidationError("spectral_decompose: state not Hermitian");

  SpectralDecomposition out;
  const long dim = dm.reg.total_dim;

  if (dm.pure) {
    // Known pure state: eigenbasis is the state plus an orthonormal
    // completion (Householder QR of the single column).
    Eigen::HouseholderQR<Matrix> qr(*dm.pure);
    Matrix q = qr.householderQ();
    q.col(0) = *dm.pure;  // fix the arbitrary phase of the first column
    out.vecs = std::move(q);
    out.p = RealVector::Zero(dim);
    out.p(0) = 1.0;
    out.rank = 1;
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(dm.rho);
  if (es.info() != Eigen::Success)
    throw ValidationError("spectral_decompose: eigensolver failed");

  RealVector vals = es.eigenvalues().reverse();
  Matrix vecs = es.eigenvectors().rowwise().reverse();

  double neg = vals.minCoeff();
  if (neg < -tol::positivity)
    throw ValidationError("spectral_decompose: state not positive semidefinite");
  for (long k = 0; k < dim; ++k)
    if (vals(k) < 0.0) vals(k) = 0.0;

  const double sum = vals.sum();
  if (std::abs(sum - 1.0) > tol::leakage)
    throw LeakageError("spectral_decompose: eigenvalue sum deviates from 1");
  vals /= sum;

  out.rank = 0;
  for (long k = 0; k < dim; ++k)
    if (vals(k) > tol::eig_clip) ++out.rank;
  out.p = std::move(vals);
  out.vecs = std::move(vecs);
  return out;
}

}  // namespace cvwit
