#include <doctest.h>

#include "cvwit/fock.hpp"
#include "cvwit/rng.hpp"

using namespace cvwit;

namespace {

// Independent Kronecker-product oracle for embed_local.
Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix random_matrix(long n, Rng& rng) {
  Matrix m(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) m(i, j) = rng.complex_normal();
  return m;
}

Vector random_state(long n, Rng& rng) {
  Vector v(n);
  for (long i = 0; i < n; ++i) v(i) = rng.complex_normal();
  v.normalize();
  return v;
}

}  // namespace

TEST_CASE("mode register strides and digits") {
  const ModeRegister reg(3, 4);
  CHECK(reg.total_dim == 64);
  CHECK(reg.stride(0) == 16);  // mode 0 is slowest-varying
  CHECK(reg.stride(1) == 4);
  CHECK(reg.stride(2) == 1);
  // index of occupation (1, 2, 3)
  const long idx = 1 * 16 + 2 * 4 + 3;
  CHECK(reg.digit(idx, 0) == 1);
  CHECK(reg.digit(idx, 1) == 2);
  CHECK(reg.digit(idx, 2) == 3);
}

TEST_CASE("default cutoffs") {
  CHECK(default_cutoff(1) == 10);
  CHECK(default_cutoff(2) == 10);
  CHECK(default_cutoff(3) == 8);
  CHECK(default_cutoff(4) == 6);
  CHECK(default_cutoff(5) == 5);
}

TEST_CASE("ladder matrix elements") {
  const Matrix a = ladder(5);
  for (int n = 1; n < 5; ++n) CHECK(a(n - 1, n).real() == doctest::Approx(std::sqrt(double(n))));
  CHECK(a.cwiseAbs().sum() == doctest::Approx((a.diagonal(1).cwiseAbs()).sum()));
}

TEST_CASE("quadrature commutator on the retained block") {
  const int d = 8;
  const auto [x, p] = quadratures(d);
  CHECK(is_hermitian(x));
  CHECK(is_hermitian(p));
  const Matrix comm = x * p - p * x;
  // [x, p] = i on every level except the top truncation corner.
  for (int n = 0; n < d - 1; ++n) {
    CHECK(comm(n, n).imag() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(comm(n, n).real()) < 1e-12);
  }
}

TEST_CASE("embed_local matches the Kronecker oracle") {
  Rng rng(11);
  const ModeRegister reg(3, 3);
  const Matrix op = random_matrix(3, rng);
  const Matrix eye = Matrix::Identity(3, 3);
  CHECK((embed_local(op, 0, reg) - kron(kron(op, eye), eye)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((embed_local(op, 1, reg) - kron(kron(eye, op), eye)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((embed_local(op, 2, reg) - kron(kron(eye, eye), op)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("apply_local agrees with the materialized embedding") {
  Rng rng(12);
  const ModeRegister reg(3, 4);
  for (int mode = 0; mode < 3; ++mode) {
    const Matrix op = random_matrix(4, rng);
    const Vector v = random_state(reg.total_dim, rng);
    const Vector direct = embed_local(op, mode, reg) * v;
    CHECK((apply_local(op, mode, reg, v) - direct).norm() < 1e-12);

    Matrix cols(reg.total_dim, 2);
    cols.col(0) = v;
    cols.col(1) = random_state(reg.total_dim, rng);
    const Matrix via_cols = apply_local_cols(op, mode, reg, cols);
    CHECK((via_cols.col(0) - direct).norm() < 1e-12);
    CHECK((via_cols.col(1) - embed_local(op, mode, reg) * cols.col(1)).norm() < 1e-12);
  }
}

TEST_CASE("density validation") {
  const ModeRegister reg(1, 4);
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = 1.0;

  SUBCASE("valid density accepted") {
    const auto dm = density_from_matrix(rho, reg);
    CHECK(dm.rho.trace().real() == doctest::Approx(1.0));
  }
  SUBCASE("non-Hermitian rejected") {
    rho(0, 1) = 0.5;  // no conjugate partner
    CHECK_THROWS_AS(density_from_matrix(rho, reg), ValidationError);
  }
  SUBCASE("trace leakage rejected") {
    rho(0, 0) = 0.9;
    CHECK_THROWS_AS(density_from_matrix(rho, reg), LeakageError);
  }
  SUBCASE("small trace deviation renormalized") {
    rho(0, 0) = 1.0 + 1e-9;
    const auto dm = density_from_matrix(rho, reg);
    CHECK(std::abs(dm.rho.trace().real() - 1.0) < 1e-14);
  }
}

TEST_CASE("partial trace of the Bell-like state") {
  // (|00> + |11>)/sqrt(2): both reductions are maximally mixed on {0,1}.
  const ModeRegister reg(2, 3);
  Vector psi = Vector::Zero(9);
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(4) = 1.0 / std::sqrt(2.0);  // |11> at index 1*3+1
  const auto dm = density_from_pure(psi, reg);

  for (int keep : {0, 1}) {
    const auto red = partial_trace(dm, {keep});
    CHECK(red.rho.rows() == 3);
    CHECK(red.rho(0, 0).real() == doctest::Approx(0.5));
    CHECK(red.rho(1, 1).real() == doctest::Approx(0.5));
    CHECK(std::abs(red.rho(0, 1)) < 1e-14);
    CHECK(std::abs(red.rho(2, 2)) < 1e-14);
  }
}

TEST_CASE("partial trace preserves trace and is consistent on products") {
  Rng rng(13);
  const ModeRegister reg(3, 3);
  const Vector v = random_state(reg.total_dim, rng);
  const auto dm = density_from_pure(v, reg);
  const auto red = partial_trace(dm, {0, 2});
  CHECK(red.rho.trace().real() == doctest::Approx(1.0));
  CHECK(is_hermitian(red.rho));
  // Tracing everything out except one mode, twice, equals the one-shot trace.
  const auto red2 = partial_trace(red, {0});  // mode 0 of the kept pair
  const auto direct = partial_trace(dm, {0});
  CHECK((red2.rho - direct.rho).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("spectral decomposition reconstructs the state") {
  Rng rng(14);
  const ModeRegister reg(2, 4);

  SUBCASE("pure hint: rank one with completed basis") {
    const Vector v = random_state(reg.total_dim, rng);
    const auto decomp = spectral_decompose(density_from_pure(v, reg));
    CHECK(decomp.rank == 1);
    CHECK(decomp.p(0) == doctest::Approx(1.0));
    CHECK(std::abs(std::abs(decomp.vecs.col(0).dot(v)) - 1.0) < 1e-12);
    // Completed basis is orthonormal.
    const Matrix gram = decomp.vecs.adjoint() * decomp.vecs;
    CHECK((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("mixed state round trip") {
    Matrix rho = Matrix::Zero(reg.total_dim, reg.total_dim);
    for (int k = 0; k < 3; ++k) {
      const Vector v = random_state(reg.total_dim, rng);
      rho += (k + 1.0) * (v * v.adjoint());
    }
    rho /= rho.trace().real();
    const auto dm = density_from_matrix(rho, reg);
    const auto decomp = spectral_decompose(dm);
    Matrix rebuilt = Matrix::Zero(reg.total_dim, reg.total_dim);
    for (int k = 0; k < decomp.rank; ++k)
      rebuilt += decomp.p(k) * (decomp.vecs.col(k) * decomp.vecs.col(k).adjoint());
    CHECK((rebuilt - dm.rho).cwiseAbs().maxCoeff() < tol::reconstruction);
    // Probabilities descending.
    for (int k = 1; k < decomp.rank; ++k) CHECK(decomp.p(k) <= decomp.p(k - 1) + 1e-15);
  }
}

TEST_CASE("rng determinism and stream separation") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(a.uniform() != c.uniform());
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
}

TEST_CASE("box-muller normals have sane moments") {
  Rng rng(7);
  double sum = 0.0, sum2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sum2 / n - 1.0) < 0.05);
}
