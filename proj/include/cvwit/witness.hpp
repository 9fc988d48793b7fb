#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cvwit/fock.hpp"
#include "cvwit/observables.hpp"
#include "cvwit/partitions.hpp"

namespace cvwit {

// F_Q[rho, A] = 2 sum_{k,l: p_k+p_l>clip} (p_k-p_l)^2/(p_k+p_l) |<k|A|l>|^2.
// For pure states this equals 4 Var(A).
double qfi_scalar(const SpectralDecomposition& decomp, const Matrix& a);

// Real part of the Hermitian QFI matrix over the observable index space.
RealMatrix qfi_matrix(const SpectralDecomposition& decomp,
                      const ObservableSet& set);

// Gamma_ij = Re<A_i A_j> - <A_i><A_j>. With a mask partition, entries that
// couple observables living on modes in different blocks are zeroed, which
// equals evaluating the covariance on the block product state.
RealMatrix cov_matrix(const DensityMatrix& dm, const ObservableSet& set,
                      const Partition* mask = nullptr);

RealMatrix mask_cov(RealMatrix gamma, const ObservableSet& set,
                    const Partition& mask);

// M_K = Q - 4 Gamma_masked(K), via the spectral-sum QFI route.
RealMatrix witness_matrix(const DensityMatrix& dm, const ObservableSet& set,
                          const Partition& k);

// Orthonormal basis of the span of eigenvectors with eigenvalue above
// tau_rel * ||M||_2. Degenerate clusters enter as whole eigenspaces.
RealMatrix positive_subspace(const RealMatrix& m,
                             double tau_rel = tol::pos_subspace_rel);

// Numerical intersection of subspaces given by orthonormal bases: the
// eigenvectors of the averaged projector with eigenvalue within tau of 1.
RealMatrix intersect_subspaces(const std::vector<RealMatrix>& bases,
                               double tau = tol::intersection);

struct StructureCertificate {
  Partition structure;
  std::vector<Partition> targets;
  RealVector c_opt;                // unit norm; empty when no candidate exists
  double g = 0.0;                  // min over targets of c^T M_l c
  std::vector<double> per_target;  // one W value per target
  double threshold = 0.0;          // certification threshold (rel. to ||Q||)
  int intersection_dim = 0;
  bool full_space_fallback = false;  // Step 3 ran on the full index space
  std::string status;  // "ok", "no_targets", "empty_positive_subspace",
                       // "empty_intersection", "no_positive_candidate"

  bool has_candidate() const { return c_opt.size() > 0; }
  bool certified() const { return has_candidate() && g > threshold; }
};

// Step 3: candidates are the positive-eigenvalue eigenvectors of
// P^T (sum_l M_l) P, followed by a greedy exact max-min refinement over the
// 2-planes spanned by pairs of candidates (needed when the structure has
// several blocks and the sum is block diagonal, so no single eigenvector
// covers every target). Returns the direction maximizing g = min_l W(M_l, c).
StructureCertificate optimize_common_operator(const std::vector<RealMatrix>& ms,
                                              const RealMatrix& p_basis);

// g and per-target values of an explicit coefficient direction.
std::pair<double, std::vector<double>> evaluate_candidate(
    const std::vector<RealMatrix>& ms, const RealVector& c);

// Direct scalar route: F_Q[rho, A] - 4 Var(prod_blocks rho_H, A), fully
// independent of the index-space matrix machinery.
double evaluate_witness(const DensityMatrix& dm, const Matrix& a,
                        const Partition& k);

// Product of the reduced block states of `k`, in global mode order.
DensityMatrix block_product(const DensityMatrix& dm, const Partition& k);

// Per-state cache of the index-space matrices. For pure states the QFI
// matrix is taken as 4 Gamma (exact identity); mixed states go through the
// spectral sum.
class StatePipeline {
 public:
  StatePipeline(const DensityMatrix& dm, const ObservableSet& set);

  const RealMatrix& qfi() const { return q_; }
  const RealMatrix& cov_full() const { return gamma_; }
  double qfi_spectral_norm() const { return q_norm_; }
  RealMatrix witness(const Partition& k) const;

 private:
  const ObservableSet& set_;
  RealMatrix q_;
  RealMatrix gamma_;
  double q_norm_ = 0.0;
};

struct WitnessOptions {
  TargetMode target_mode = TargetMode::bipartitions_splitting;
  double cert_rel = tol::certification_rel;
  // Optional extra candidate (e.g. the previous order's optimum padded into
  // the current index space); evaluated and pair-refined against the Step-3
  // result, so g can only improve. Guarantees ladder monotonicity end to end.
  const RealVector* warm_start = nullptr;
};

// Full three-step pipeline for one state and one hypothesized structure.
// The strict subspace intersection of Step 2 is generically empty (distinct
// low-dimensional subspaces of the index space rarely share exact vectors);
// when that happens, Step 3 is rerun over the full index space as the
// trivial enlargement of P. The final certificate is still gated by the
// rigorous check g = min_l c^T M_l c > threshold, so the relaxation can
// never produce a false positive.
StructureCertificate certify_structure(const DensityMatrix& dm,
                                       const ObservableSet& set,
                                       const Partition& structure,
                                       const WitnessOptions& opts = {});

}  // namespace cvwit
