#include "cvwit/observables.hpp"

namespace cvwit {

int per_mode_count(int order) {
  switch (order) {
    case 1:
      return 2;
    case 2:
      return 5;
    case 3:
      return 9;
    case 4:
      return 14;
    default:
      throw ValidationError("observable order must be in 1..4");
  }
}

std::vector<std::string> per_mode_labels(int order) {
  static const std::vector<std::string> all = {
      "x",  "p",  "x2", "p2", "sym_xp",  "x3",      "p3",
      "sym_xpp", "sym_pxx", "x4", "p4", "sym_x3p", "sym_xp3", "sym_x2p2"};
  const int n = per_mode_count(order);
  return {all.begin(), all.begin() + n};
}

namespace {

Matrix sym(const Matrix& a, const Matrix& b) { return (a * b + b * a) / 2.0; }

std::vector<Matrix> local_ladder(int cutoff, int order) {
  const auto [x, p] = quadratures(cutoff);
  std::vector<Matrix> ops = {x, p};
  if (order >= 2) {
    ops.push_back(x * x);
    ops.push_back(p * p);
    ops.push_back(sym(x, p));
  }
  if (order >= 3) {
    const Matrix x2 = x * x, p2 = p * p;
    ops.push_back(x2 * x);
    ops.push_back(p2 * p);
    ops.push_back(sym(x, p2));  // (xp^2 + p^2 x)/2
    ops.push_back(sym(p, x2));  // (px^2 + x^2 p)/2
  }
  if (order >= 4) {
    const Matrix x2 = x * x, p2 = p * p;
    const Matrix x3 = x2 * x, p3 = p2 * p;
    ops.push_back(x2 * x2);
    ops.push_back(p2 * p2);
    ops.push_back(sym(x3, p));
    ops.push_back(sym(x, p3));
    ops.push_back(sym(x2, p2));
  }
  // The symmetrized products are Hermitian by construction; fold away the
  // remaining floating-point asymmetry.
  for (auto& o : ops) o = ((o + o.adjoint()) / 2.0).eval();
  return ops;
}

}  // namespace

ObservableSet build_observable_set(const ModeRegister& reg, int order) {
  const auto labels = per_mode_labels(order);
  const auto locals = local_ladder(reg.cutoff, order);

  ObservableSet set;
  set.reg = reg;
  set.order = order;
  set.ops.reserve(static_cast<size_t>(reg.num_modes) * locals.size());
  for (int j = 0; j < reg.num_modes; ++j)
    for (size_t m = 0; m < locals.size(); ++m)
      set.ops.push_back(LocalObservable{j, labels[m], locals[m]});
  return set;
}

Matrix ObservableSet::global(int index) const {
  const auto& o = ops.at(index);
  return embed_local(o.local_op, o.mode, reg);
}

Matrix assemble_generator(const ObservableSet& set, const RealVector& c) {
  if (c.size() != set.size())
    throw ValidationError("assemble_generator: coefficient length mismatch");
  Matrix acc = Matrix::Zero(set.reg.total_dim, set.reg.total_dim);
  for (int i = 0; i < set.size(); ++i) {
    if (c(i) == 0.0) continue;
    acc += c(i) * set.global(i);
  }
  return acc;
}

RealVector pad_coefficients(const RealVector& c, int from_order, int to_order,
                            int num_modes) {
  const int nf = per_mode_count(from_order);
  const int nt = per_mode_count(to_order);
  if (c.size() != static_cast<long>(nf) * num_modes)
    throw ValidationError("pad_coefficients: coefficient length mismatch");
  if (nt < nf)
    throw ValidationError("pad_coefficients: target order below source order");
  RealVector out = RealVector::Zero(static_cast<long>(nt) * num_modes);
  for (int m = 0; m < num_modes; ++m)
    out.segment(static_cast<long>(m) * nt, nf) =
        c.segment(static_cast<long>(m) * nf, nf);
  return out;
}

std::vector<std::string> coefficient_labels(const ObservableSet& set) {
  std::vector<std::string> out;
  out.reserve(set.ops.size());
  for (const auto& o : set.ops)
    out.push_back("mode" + std::to_string(o.mode) + ":" + o.label);
  return out;
}

}  // namespace cvwit
