#include <doctest.h>

#include "cvwit/observables.hpp"
#include "cvwit/rng.hpp"

using namespace cvwit;

TEST_CASE("per-mode ladder sizes and labels") {
  CHECK(per_mode_count(1) == 2);
  CHECK(per_mode_count(2) == 5);
  CHECK(per_mode_count(3) == 9);
  CHECK(per_mode_count(4) == 14);
  CHECK_THROWS_AS(per_mode_count(5), ValidationError);

  const auto l1 = per_mode_labels(1);
  REQUIRE(l1.size() == 2);
  CHECK(l1[0] == "x");
  CHECK(l1[1] == "p");
  const auto l2 = per_mode_labels(2);
  CHECK(l2[2] == "x2");
  CHECK(l2[4] == "sym_xp");
  const auto l4 = per_mode_labels(4);
  CHECK(l4.back() == "sym_x2p2");
}

TEST_CASE("observable set layout is mode-major with prefix ladders") {
  const ModeRegister reg(3, 5);
  const auto set2 = build_observable_set(reg, 2);
  CHECK(set2.size() == 15);
  CHECK(set2.per_mode() == 5);
  for (int i = 0; i < set2.size(); ++i) CHECK(set2.mode_of(i) == i / 5);

  // The order-1 ladder is a per-mode prefix of the order-2 ladder.
  const auto set1 = build_observable_set(reg, 1);
  for (int m = 0; m < 3; ++m)
    for (int j = 0; j < 2; ++j) {
      const auto& lo = set1.ops[m * 2 + j];
      const auto& hi = set2.ops[m * 5 + j];
      CHECK(lo.label == hi.label);
      CHECK((lo.local_op - hi.local_op).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("all local observables are Hermitian") {
  const ModeRegister reg(2, 7);
  for (int order = 1; order <= 4; ++order) {
    const auto set = build_observable_set(reg, order);
    for (const auto& op : set.ops) CHECK(is_hermitian(op.local_op));
  }
}

TEST_CASE("symmetrized products match their definitions") {
  const int d = 9;
  const auto [x, p] = quadratures(d);
  const ModeRegister reg(1, d);
  const auto set = build_observable_set(reg, 4);
  auto local = [&](const std::string& label) -> const Matrix& {
    for (const auto& op : set.ops)
      if (op.label == label) return op.local_op;
    throw std::runtime_error("missing label " + label);
  };
  CHECK((local("x2") - x * x).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((local("sym_xp") - (x * p + p * x) / 2.0).cwiseAbs().maxCoeff() < 1e-13);
  const Matrix x2 = x * x, p2 = p * p;
  CHECK((local("sym_xpp") - (x * p2 + p2 * x) / 2.0).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((local("sym_pxx") - (p * x2 + x2 * p) / 2.0).cwiseAbs().maxCoeff() < 1e-13);
  const Matrix x3 = x2 * x, p3 = p2 * p;
  CHECK((local("sym_x3p") - (x3 * p + p * x3) / 2.0).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((local("sym_x2p2") - (x2 * p2 + p2 * x2) / 2.0).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("assemble_generator is linear and Hermitian") {
  Rng rng(5);
  const ModeRegister reg(2, 4);
  const auto set = build_observable_set(reg, 2);
  RealVector c1(set.size()), c2(set.size());
  for (int i = 0; i < set.size(); ++i) {
    c1(i) = rng.normal();
    c2(i) = rng.normal();
  }
  const Matrix a1 = assemble_generator(set, c1);
  const Matrix a2 = assemble_generator(set, c2);
  const Matrix sum = assemble_generator(set, c1 + c2);
  CHECK((sum - a1 - a2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(is_hermitian(a1));

  RealVector wrong(set.size() + 1);
  CHECK_THROWS_AS(assemble_generator(set, wrong.setZero()), ValidationError);
}

TEST_CASE("coefficient labels match the layout") {
  const ModeRegister reg(2, 4);
  const auto set = build_observable_set(reg, 1);
  const auto labels = coefficient_labels(set);
  REQUIRE(labels.size() == 4);
  CHECK(labels[0] == "mode0:x");
  CHECK(labels[1] == "mode0:p");
  CHECK(labels[2] == "mode1:x");
  CHECK(labels[3] == "mode1:p");
}

TEST_CASE("pad_coefficients zero-extends per-mode blocks") {
  Rng rng(6);
  const int n_modes = 3;
  RealVector c(2 * n_modes);
  for (long i = 0; i < c.size(); ++i) c(i) = rng.normal();
  const RealVector padded = pad_coefficients(c, 1, 2, n_modes);
  REQUIRE(padded.size() == 5 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    CHECK(padded(m * 5 + 0) == c(m * 2 + 0));
    CHECK(padded(m * 5 + 1) == c(m * 2 + 1));
    CHECK(padded(m * 5 + 2) == 0.0);
    CHECK(padded(m * 5 + 3) == 0.0);
    CHECK(padded(m * 5 + 4) == 0.0);
  }

  // Padding then assembling equals assembling the original generator.
  const ModeRegister reg(n_modes, 4);
  const auto set1 = build_observable_set(reg, 1);
  const auto set2 = build_observable_set(reg, 2);
  const Matrix low = assemble_generator(set1, c);
  const Matrix high = assemble_generator(set2, padded);
  CHECK((low - high).cwiseAbs().maxCoeff() < 1e-13);

  CHECK_THROWS_AS(pad_coefficients(c, 2, 1, n_modes), ValidationError);
  CHECK_THROWS_AS(pad_coefficients(c, 2, 3, n_modes), ValidationError);
}
