#pragma once

#include <string>
#include <vector>

#include "cvwit/fock.hpp"

namespace cvwit {

// One entry of the local observable ladder: a Hermitian d x d matrix acting
// on a single mode. The global operator is its identity-padded embedding.
struct LocalObservable {
  int mode = 0;
  std::string label;
  Matrix local_op;
};

// Ordered ladder of local observables, mode-major (all observables of mode 0
// first). The order-k ladder is a per-mode prefix of the order-(k+1) one.
struct ObservableSet {
  ModeRegister reg;
  int order = 1;
  std::vector<LocalObservable> ops;

  int size() const { return static_cast<int>(ops.size()); }
  int per_mode() const { return size() / reg.num_modes; }
  int mode_of(int index) const { return ops.at(index).mode; }
  const std::string& label_of(int index) const { return ops.at(index).label; }

  // Materializes the d^N x d^N embedding of observable `index`.
  Matrix global(int index) const;
};

// Per-mode labels of the order-k ladder:
// order 1: x p
// order 2: + x2 p2 sym_xp
// order 3: + x3 p3 sym_xpp sym_pxx
// order 4: + x4 p4 sym_x3p sym_xp3 sym_x2p2
std::vector<std::string> per_mode_labels(int order);
int per_mode_count(int order);

ObservableSet build_observable_set(const ModeRegister& reg, int order);

// A(c) = sum_j sum_m c_j^(m) S_j^(m), materialized globally. c is mode-major
// and must match the set length.
Matrix assemble_generator(const ObservableSet& set, const RealVector& c);

// Flat labels "mode<j>:<label>" matching the coefficient layout.
std::vector<std::string> coefficient_labels(const ObservableSet& set);

// Zero-pads a mode-major coefficient vector of the order-`from` ladder into
// the order-`to` layout (the lower-order labels are a per-mode prefix).
RealVector pad_coefficients(const RealVector& c, int from_order, int to_order,
                            int num_modes);

}  // namespace cvwit
