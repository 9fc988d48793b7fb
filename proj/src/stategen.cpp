#include "cvwit/stategen.hpp"

#include <algorithm>
#include <cmath>

#include "cvwit/criteria.hpp"

namespace cvwit {

namespace {

// exp(sign * i * H) for Hermitian H, by eigendecomposition.
Matrix exp_i_hermitian(const Matrix& h, double sign) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw ValidationError("exp_i_hermitian: eigensolver failed");
  Vector phases(es.eigenvalues().size());
  for (long i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex(0.0, sign * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// y = (sum_jk h_jk a_j† a_k) v
Vector passive_generator_apply(const Eigen::MatrixXcd& h,
                               const ModeRegister& reg, const Matrix& a,
                               const Matrix& ad, const Vector& v) {
  const int n = reg.num_modes;
  Vector out = Vector::Zero(v.size());
  Vector lowered, raised;
  for (int k = 0; k < n; ++k) {
    apply_local(a, k, reg, v, lowered);
    for (int j = 0; j < n; ++j) {
      if (h(j, k) == Complex(0.0)) continue;
      apply_local(ad, j, reg, lowered, raised);
      out += h(j, k) * raised;
    }
  }
  return out;
}

// exp(i sum h_jk a_j† a_k) v via Taylor series; the truncated generator is
// exactly Hermitian, so the map is exactly unitary.
Vector apply_passive(const Eigen::MatrixXcd& h, const ModeRegister& reg,
                     Vector v) {
  const Matrix a = ladder(reg.cutoff);
  const Matrix ad = a.adjoint();
  const double norm0 = v.norm();
  Vector term = v;
  for (int k = 1; k <= 400; ++k) {
    term = passive_generator_apply(h, reg, a, ad, term) * Complex(0.0, 1.0 / k);
    v += term;
    if (term.norm() < 1e-17 * norm0) return v;
  }
  throw ValidationError("apply_passive: Taylor series did not converge");
}

Matrix passive_generator_global(const Eigen::MatrixXcd& h,
                                const ModeRegister& reg) {
  const Matrix a = ladder(reg.cutoff);
  const Matrix ad = a.adjoint();
  Matrix gen = Matrix::Zero(reg.total_dim, reg.total_dim);
  for (int j = 0; j < reg.num_modes; ++j)
    for (int k = 0; k < reg.num_modes; ++k) {
      if (h(j, k) == Complex(0.0)) continue;
      gen += h(j, k) *
             (embed_local(ad, j, reg) * embed_local(a, k, reg));
    }
  return gen;
}

double binom(int n, int k) {
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc *= double(n - k + i) / double(i);
  return acc;
}

}  // namespace

GaussianCircuitSpec draw_gaussian_spec(int num_modes, Rng& rng,
                                       double param_max, double passive_scale) {
  GaussianCircuitSpec spec;
  spec.squeeze.reserve(num_modes);
  spec.displace.reserve(num_modes);
  for (int i = 0; i < num_modes; ++i)
    spec.squeeze.push_back(rng.uniform_polar(param_max));
  for (int i = 0; i < num_modes; ++i)
    spec.displace.push_back(rng.uniform_polar(param_max));

  auto draw_passive = [&]() {
    Eigen::MatrixXcd g(num_modes, num_modes);
    for (int i = 0; i < num_modes; ++i)
      for (int j = 0; j < num_modes; ++j) g(i, j) = rng.complex_normal();
    return (passive_scale * (g + g.adjoint()) / 2.0).eval();
  };
  // Presence is decided independently per layer; draw the flag first so the
  // stream layout is stable.
  const bool has_in = rng.bernoulli(0.5);
  if (has_in) spec.passive_in = draw_passive();
  const bool has_out = rng.bernoulli(0.5);
  if (has_out) spec.passive_out = draw_passive();
  return spec;
}

Matrix squeeze_op(Complex xi, int cutoff) {
  const Matrix a = ladder(cutoff);
  const Matrix a2 = a * a;
  // K = (xi* a^2 - xi a†^2)/2 is anti-Hermitian; exp(K) = exp(-i (iK)).
  const Matrix k = (std::conj(xi) * a2 - xi * a2.adjoint()) / 2.0;
  return exp_i_hermitian(Complex(0.0, 1.0) * k, -1.0);
}

Matrix displace_op(Complex alpha, int cutoff) {
  const Matrix a = ladder(cutoff);
  const Matrix k = alpha * a.adjoint() - std::conj(alpha) * a;
  return exp_i_hermitian(Complex(0.0, 1.0) * k, -1.0);
}

Vector apply_gaussian(const GaussianCircuitSpec& spec, const ModeRegister& reg,
                      Vector psi) {
  const int n = reg.num_modes;
  if (static_cast<int>(spec.squeeze.size()) != n ||
      static_cast<int>(spec.displace.size()) != n)
    throw ValidationError("apply_gaussian: parameter count mismatch");

  if (spec.passive_in) psi = apply_passive(*spec.passive_in, reg, std::move(psi));
  for (int i = 0; i < n; ++i) {
    psi = apply_local(displace_op(spec.displace[i], reg.cutoff), i, reg, psi);
    psi = apply_local(squeeze_op(spec.squeeze[i], reg.cutoff), i, reg, psi);
  }
  if (spec.passive_out)
    psi = apply_passive(*spec.passive_out, reg, std::move(psi));

  const double nrm = psi.norm();
  if (std::abs(nrm - 1.0) > tol::leakage)
    throw LeakageError("apply_gaussian: truncation leakage");
  return psi / nrm;
}

Matrix gaussian_unitary(const GaussianCircuitSpec& spec,
                        const ModeRegister& reg) {
  const int n = reg.num_modes;
  Matrix u = Matrix::Identity(reg.total_dim, reg.total_dim);
  if (spec.passive_in)
    u = exp_i_hermitian(passive_generator_global(*spec.passive_in, reg), 1.0);
  for (int i = 0; i < n; ++i) {
    u = embed_local(displace_op(spec.displace[i], reg.cutoff), i, reg) * u;
    u = embed_local(squeeze_op(spec.squeeze[i], reg.cutoff), i, reg) * u;
  }
  if (spec.passive_out)
    u = exp_i_hermitian(passive_generator_global(*spec.passive_out, reg), 1.0) *
        u;
  return u;
}

Vector random_core_state(const ModeRegister& reg, int stellar_rank, Rng& rng) {
  if (stellar_rank < 0 || stellar_rank > 2)
    throw ValidationError("random_core_state: rank must be 0, 1 or 2");
  if (stellar_rank >= reg.cutoff)
    throw ValidationError("random_core_state: rank must be below the cutoff");

  // Basis states with total photon number <= rank, in index order.
  std::vector<long> support;
  std::vector<bool> top_rank;  // total == rank
  for (long i = 0; i < reg.total_dim; ++i) {
    int total = 0;
    for (int m = 0; m < reg.num_modes; ++m) total += reg.digit(i, m);
    if (total <= stellar_rank) {
      support.push_back(i);
      top_rank.push_back(total == stellar_rank);
    }
  }

  for (int attempt = 0; attempt < 100; ++attempt) {
    Vector psi = Vector::Zero(reg.total_dim);
    for (long idx : support) psi(idx) = rng.complex_normal();
    psi.normalize();
    double top = 0.0;
    for (size_t s = 0; s < support.size(); ++s)
      if (top_rank[s]) top = std::max(top, std::abs(psi(support[s])));
    if (top >= 1e-3) return psi;
  }
  throw GenerationError("random_core_state: could not realize exact rank");
}

LossSpec LossSpec::uniform(int num_modes, double eta) {
  LossSpec spec;
  spec.eta.assign(num_modes, eta);
  return spec;
}

Matrix loss_kraus(int k, double eta, int cutoff) {
  if (eta < 0.0 || eta > 1.0)
    throw ValidationError("loss_kraus: eta must be in [0, 1]");
  Matrix out = Matrix::Zero(cutoff, cutoff);
  for (int n = k; n < cutoff; ++n) {
    const double keep = (n - k == 0) ? 1.0 : std::pow(eta, n - k);
    const double lost = (k == 0) ? 1.0 : std::pow(1.0 - eta, k);
    out(n - k, n) = std::sqrt(binom(n, k) * keep * lost);
  }
  return out;
}

DensityMatrix apply_loss(const DensityMatrix& dm, const LossSpec& loss) {
  if (static_cast<int>(loss.eta.size()) != dm.reg.num_modes)
    throw ValidationError("apply_loss: eta count mismatch");
  for (double eta : loss.eta)
    if (eta < 0.0 || eta > 1.0)
      throw ValidationError("apply_loss: eta must be in [0, 1]");

  if (std::all_of(loss.eta.begin(), loss.eta.end(),
                  [](double e) { return e == 1.0; }))
    return dm;

  Matrix rho = dm.rho;
  for (int m = 0; m < dm.reg.num_modes; ++m) {
    if (loss.eta[m] == 1.0) continue;
    Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
    for (int k = 0; k < dm.reg.cutoff; ++k) {
      const Matrix e = loss_kraus(k, loss.eta[m], dm.reg.cutoff);
      const Matrix left = apply_local_cols(e, m, dm.reg, rho);
      acc += apply_local_cols(e, m, dm.reg, left.adjoint()).adjoint();
    }
    rho = std::move(acc);
  }
  return density_from_matrix(std::move(rho), dm.reg);
}

Vector random_structured_pure(const ModeRegister& reg,
                              const Partition& structure, int stellar_rank,
                              std::uint64_t seed, bool ppt_filter,
                              int max_resamples, int* resamples) {
  if (structure.num_modes() != reg.num_modes)
    throw ValidationError("random_structured_pure: structure/register mismatch");

  if (resamples) *resamples = 0;
  Rng rng(seed);
  std::vector<Vector> block_states;
  block_states.reserve(structure.blocks.size());

  for (const auto& block : structure.blocks) {
    const int nb = static_cast<int>(block.size());
    const ModeRegister sub(nb, reg.cutoff);
    int rejects = 0;
    while (true) {
      const Vector core = random_core_state(sub, stellar_rank, rng);
      const auto spec = draw_gaussian_spec(nb, rng);
      Vector psi;
      try {
        psi = apply_gaussian(spec, sub, core);
      } catch (const LeakageError&) {
        if (resamples) ++*resamples;
        if (++rejects > max_resamples)
          throw GenerationError("random_structured_pure: leakage resample budget");
        continue;
      }

      bool accept = true;
      if (ppt_filter && nb >= 2) {
        for (const auto& cut : bipartitions(nb)) {
          if (pure_pt_min_eig(psi, sub, cut.blocks.front()) >= -tol::ppt) {
            accept = false;
            break;
          }
        }
      }
      if (accept) {
        block_states.push_back(std::move(psi));
        break;
      }
      if (resamples) ++*resamples;
      if (++rejects > max_resamples)
        throw GenerationError("random_structured_pure: PPT resample budget");
    }
  }

  // Tensor the blocks in global mode order.
  const int d = reg.cutoff;
  Vector psi(reg.total_dim);
  for (long i = 0; i < reg.total_dim; ++i) {
    Complex val = 1.0;
    for (size_t bi = 0; bi < structure.blocks.size(); ++bi) {
      long sub_idx = 0;
      for (int m : structure.blocks[bi]) sub_idx = sub_idx * d + reg.digit(i, m);
      val *= block_states[bi](sub_idx);
      if (val == Complex(0.0)) break;
    }
    psi(i) = val;
  }
  return psi;
}

DensityMatrix random_structured_state(const ModeRegister& reg,
                                      const Partition& structure,
                                      int stellar_rank,
                                      const std::optional<LossSpec>& loss,
                                      std::uint64_t seed, bool ppt_filter,
                                      int max_resamples, int* resamples) {
  const Vector psi = random_structured_pure(reg, structure, stellar_rank, seed,
                                            ppt_filter, max_resamples,
                                            resamples);
  DensityMatrix dm = density_from_pure(psi, reg);
  if (loss) dm = apply_loss(dm, *loss);
  return dm;
}

SpdcSpec draw_spdc_spec(Rng& rng, double chi_max) {
  SpdcSpec spec;
  for (auto& c : spec.chi_t) c = rng.uniform(0.0, chi_max);
  return spec;
}

Matrix spdc_hamiltonian(const SpdcSpec& spec, const ModeRegister& reg) {
  if (reg.num_modes != 3)
    throw ValidationError("spdc_hamiltonian: exactly three modes required");
  for (double c : spec.chi_t)
    if (c < 0.0 || c > 0.04 + 1e-12)
      throw ValidationError("spdc_hamiltonian: coupling outside [0, 0.04]");

  const Matrix a1 = embed_local(ladder(reg.cutoff), 0, reg);
  const Matrix b1 = embed_local(ladder(reg.cutoff), 1, reg);
  const Matrix c1 = embed_local(ladder(reg.cutoff), 2, reg);
  Matrix h = spec.chi_t[0] * (a1 * b1 * b1) + spec.chi_t[1] * (b1 * c1 * c1) +
             spec.chi_t[2] * (c1 * a1 * a1);
  h += h.adjoint().eval();
  return h;
}

Vector spdc_state(const SpdcSpec& spec, const ModeRegister& reg) {
  const Matrix h = spdc_hamiltonian(spec, reg);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw ValidationError("spdc_state: eigensolver failed");
  const Vector coeffs = es.eigenvectors().row(0).adjoint();  // V† |000>
  Vector phased(coeffs.size());
  for (long i = 0; i < coeffs.size(); ++i)
    phased(i) = std::exp(Complex(0.0, -es.eigenvalues()(i))) * coeffs(i);
  Vector psi = es.eigenvectors() * phased;
  const double nrm = psi.norm();
  if (std::abs(nrm - 1.0) > tol::leakage)
    throw LeakageError("spdc_state: truncation leakage");
  return psi / nrm;
}

}  // namespace cvwit
