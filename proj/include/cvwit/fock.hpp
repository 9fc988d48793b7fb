#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cvwit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Numerical tolerances shared across the library.
namespace tol {
inline constexpr double hermiticity = 1e-10;
inline constexpr double trace_one = 1e-8;
inline constexpr double positivity = 1e-8;      // allowed negative eigenvalue
inline constexpr double reconstruction = 1e-8;
inline constexpr double eig_clip = 1e-12;       // eigenvalues below count as 0
inline constexpr double leakage = 1e-6;         // trace deviation -> reject
inline constexpr double pos_subspace_rel = 1e-9;
inline constexpr double intersection = 1e-7;
inline constexpr double certification_rel = 1e-7;
inline constexpr double ppt = 1e-10;
}  // namespace tol

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LeakageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// N modes, each truncated to Fock levels 0..d-1. Mode 0 is the
// slowest-varying index of the product basis: the global basis index of the
// occupation (n_0, ..., n_{N-1}) is sum_j n_j * d^(N-1-j).
struct ModeRegister {
  int num_modes = 0;
  int cutoff = 0;
  long total_dim = 0;

  ModeRegister() = default;
  ModeRegister(int n_modes, int d);

  long stride(int mode) const;
  int digit(long index, int mode) const;
  bool operator==(const ModeRegister&) const = default;
};

// Default truncation keeping d^N at desk scale (dim <= ~3200).
int default_cutoff(int num_modes);

// Annihilation operator on the truncated single-mode basis.
Matrix ladder(int cutoff);

struct QuadraturePair {
  Matrix x;  // (a + a†)/sqrt(2), vacuum variance 1/2
  Matrix p;  // (a - a†)/(i sqrt(2))
};
QuadraturePair quadratures(int cutoff);

// I ⊗ ... ⊗ op ⊗ ... ⊗ I with `op` acting on `mode`.
Matrix embed_local(const Matrix& op, int mode, const ModeRegister& reg);

// Applies the embedding of a single-mode operator to a vector (or to every
// column of a matrix) without materializing the d^N x d^N embedding.
void apply_local(const Matrix& op, int mode, const ModeRegister& reg,
                 const Vector& in, Vector& out);
Vector apply_local(const Matrix& op, int mode, const ModeRegister& reg,
                   const Vector& in);
Matrix apply_local_cols(const Matrix& op, int mode, const ModeRegister& reg,
                        const Matrix& in);

struct DensityMatrix {
  Matrix rho;
  ModeRegister reg;
  // Set when the state is known pure; rho = pure * pure†.
  std::optional<Vector> pure;

  bool is_pure_hint() const { return pure.has_value(); }
};

// Validating constructors. Throws ValidationError on non-Hermitian input and
// LeakageError when the trace deviates from 1 by more than tol::leakage;
// smaller deviations are renormalized away.
DensityMatrix density_from_matrix(Matrix rho, const ModeRegister& reg);
DensityMatrix density_from_pure(Vector psi, const ModeRegister& reg);

// Reduced state on the kept modes (sorted ascending). Trace preserved.
DensityMatrix partial_trace(const DensityMatrix& dm, std::vector<int> keep);

struct SpectralDecomposition {
  RealVector p;  // descending, clipped at zero, sums to 1
  Matrix vecs;   // orthonormal columns, matching order
  int rank = 0;  // number of eigenvalues above tol::eig_clip
};

SpectralDecomposition spectral_decompose(const DensityMatrix& dm);

// Checks, never throws.
double hermiticity_defect(const Matrix& m);
bool is_hermitian(const Matrix& m, double tau = tol::hermiticity);

}  // namespace cvwit
