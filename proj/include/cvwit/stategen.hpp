#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "cvwit/fock.hpp"
#include "cvwit/partitions.hpp"
#include "cvwit/rng.hpp"

namespace cvwit {

// One random Gaussian circuit: G = U(phi) (prod_i S_i(xi_i) D_i(alpha_i)) V(phi)
// with per-mode complex squeeze/displacement parameters and optional passive
// (photon-number conserving) layers given by their Hermitian generators h,
// realized as exp(i sum_jk h_jk a_j† a_k).
struct GaussianCircuitSpec {
  std::vector<Complex> squeeze;
  std::vector<Complex> displace;
  std::optional<Eigen::MatrixXcd> passive_in;   // V, applied first
  std::optional<Eigen::MatrixXcd> passive_out;  // U, applied last
};

// Magnitudes uniform in [0, param_max], phases uniform; each passive layer
// present independently with probability 1/2, h = scale * (G + G†)/2 with
// complex-normal G entries.
GaussianCircuitSpec draw_gaussian_spec(int num_modes, Rng& rng,
                                       double param_max = 0.05,
                                       double passive_scale = 0.1);

// Single-mode gate matrices (exact exponentials on the truncated space).
Matrix squeeze_op(Complex xi, int cutoff);     // exp((xi* a^2 - xi a†^2)/2)
Matrix displace_op(Complex alpha, int cutoff); // exp(alpha a† - alpha* a)

// Global unitary matrix of the circuit (test-scale dims).
Matrix gaussian_unitary(const GaussianCircuitSpec& spec,
                        const ModeRegister& reg);

// Applies the circuit to a state vector without materializing the global
// matrix; passive layers act through a truncated Taylor series of the
// (exactly anti-Hermitian) generator.
Vector apply_gaussian(const GaussianCircuitSpec& spec, const ModeRegister& reg,
                      Vector psi);

// Normalized superposition of Fock states with total photon number <= rank,
// i.i.d. rotationally-symmetric complex coefficients; resamples until some
// total-number-`rank` coefficient keeps magnitude >= 1e-3, so the stellar
// rank is exactly `rank`.
Vector random_core_state(const ModeRegister& reg, int stellar_rank, Rng& rng);

struct LossSpec {
  std::vector<double> eta;  // per-mode efficiency in [0, 1]
  static LossSpec uniform(int num_modes, double eta);
};

// Per-mode binomial Kraus channel; completely positive and trace preserving.
DensityMatrix apply_loss(const DensityMatrix& dm, const LossSpec& loss);

// Kraus operator A_k for one mode: A_k|n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k>.
Matrix loss_kraus(int k, double eta, int cutoff);

// Independent (core state + Gaussian circuit) pure states per structure
// block, tensored in global mode order. With `ppt_filter` every block of
// size >= 2 is resampled until internally entangled across all of its
// bipartitions (PPT criterion; Schmidt form for pure states). Throws
// GenerationError after max_resamples rejected draws.
Vector random_structured_pure(const ModeRegister& reg,
                              const Partition& structure, int stellar_rank,
                              std::uint64_t seed, bool ppt_filter = true,
                              int max_resamples = 200,
                              int* resamples = nullptr);

DensityMatrix random_structured_state(const ModeRegister& reg,
                                      const Partition& structure,
                                      int stellar_rank,
                                      const std::optional<LossSpec>& loss,
                                      std::uint64_t seed,
                                      bool ppt_filter = true,
                                      int max_resamples = 200,
                                      int* resamples = nullptr);

struct SpdcSpec {
  std::array<double, 3> chi_t{};  // couplings, each in [0, 0.04]
};
SpdcSpec draw_spdc_spec(Rng& rng, double chi_max = 0.04);

// H = chi1 a b^2 + chi2 b c^2 + chi3 c a^2 + h.c. on a 3-mode register.
Matrix spdc_hamiltonian(const SpdcSpec& spec, const ModeRegister& reg);

// exp(-iH)|000> via dense Hermitian exponentiation.
Vector spdc_state(const SpdcSpec& spec, const ModeRegister& reg);

}  // namespace cvwit
