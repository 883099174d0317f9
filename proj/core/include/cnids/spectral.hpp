#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cnids/matrix.hpp"
#include "cnids/topology.hpp"

namespace cnids {

/// Eigenvalues of a symmetric matrix, sorted non-increasing
/// (lambda_1 >= ... >= lambda_n).
struct Spectrum {
  std::vector<double> eigenvalues;

  double largest() const { return eigenvalues.front(); }
  double smallest() const { return eigenvalues.back(); }
  /// lambda_{n-1}: for the Laplacian of a connected graph this is the
  /// smallest nonzero eigenvalue (the algebraic connectivity).
  double second_smallest() const { return eigenvalues[eigenvalues.size() - 2]; }
};

/// Full spectrum by cyclic Jacobi rotations. The input must be symmetric
/// within 1e-12; sweeps run until the off-diagonal norm drops below 1e-10
/// (hard error after 100 sweeps, which the small well-conditioned matrices
/// in scope never approach).
Spectrum symmetric_eigenvalues(const SquareMatrix& m);

enum class WeightScheme { metropolis, best_constant, local_degree, max_degree, custom };

const char* to_string(WeightScheme scheme);
WeightScheme weight_scheme_from_string(const std::string& name);

/// Symmetric consensus matrix with the same off-diagonal sparsity as the
/// graph, unit row sums, and ||W - J||_2 < 1 (see
/// verify_convergence_conditions).
struct WeightMatrix {
  WeightScheme scheme = WeightScheme::custom;
  SquareMatrix entries;
};

/// W_ij = 1 / (1 + max(d_i, d_j)) on edges; diagonal fills each row to 1.
WeightMatrix metropolis_weights(const Topology& t);

/// W = I - alpha L with alpha = 2 / (lambda_1(L) + lambda_{n-1}(L)), the
/// constant edge weight minimizing the spectral norm of W - J.
WeightMatrix best_constant_weights(const Topology& t);

/// W_ij = 1 / max(d_i, d_j) on edges; diagonal fills each row to 1.
WeightMatrix local_degree_weights(const Topology& t);

/// W_ij = 1 / d_max on edges; diagonal is 1 - d_i / d_max.
WeightMatrix max_degree_weights(const Topology& t);

WeightMatrix make_weights(WeightScheme scheme, const Topology& t);

/// ||m||_2. Symmetric inputs use the Jacobi spectrum directly; anything else
/// falls back to the Gram-matrix singular-value route, so slightly
/// asymmetric user-supplied matrices can still be diagnosed.
double spectral_norm(const SquareMatrix& m);

/// Convergence conditions on a consensus matrix. Failures are reported, not
/// thrown. Tolerance 1e-9 throughout; the norm check requires
/// ||W - J||_2 < 1 - 1e-9 so a numerically-exact norm of 1 never slips
/// through as convergent.
struct ConditionReport {
  bool sparsity_matches = false;  // off-diagonal support within the adjacency
  bool symmetric = false;
  bool rows_sum_to_one = false;
  bool spectral_norm_ok = false;
  double norm = 0.0;  // ||W - J||_2

  bool all_pass() const { return sparsity_matches && symmetric && rows_sum_to_one && spectral_norm_ok; }
};

ConditionReport verify_convergence_conditions(const WeightMatrix& w, const Topology& t);

/// n rows of n comma-separated decimals, full round-trip precision.
void write_csv(const SquareMatrix& m, std::ostream& out);
SquareMatrix matrix_from_csv(std::istream& in);

}  // namespace cnids
