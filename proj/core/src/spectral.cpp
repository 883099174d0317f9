#include "cnids/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "text_util.hpp"

namespace cnids {

namespace {

constexpr double kSymmetryInputTol = 1e-12;
constexpr double kOffDiagonalTarget = 1e-10;
constexpr int kMaxSweeps = 100;
constexpr double kConditionTol = 1e-9;

double off_diagonal_norm(const SquareMatrix& a) {
  const int n = a.size();
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

// One cyclic sweep of Jacobi rotations over the upper triangle.
void jacobi_sweep(SquareMatrix& a) {
  const int n = a.size();
  for (int p = 0; p < n - 1; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      const double diff = a(q, q) - a(p, p);
      double t;
      if (std::abs(apq) < 1e-300 * std::abs(diff)) {
        t = apq / diff;  // rotation angle underflows the exact formula
      } else {
        const double theta = diff / (2.0 * apq);
        t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
      }
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;

      const double app = a(p, p);
      const double aqq = a(q, q);
      a(p, p) = app - t * apq;
      a(q, q) = aqq + t * apq;
      a(p, q) = 0.0;
      a(q, p) = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == p || k == q) continue;
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(p, k) = a(k, p);
        a(k, q) = s * akp + c * akq;
        a(q, k) = a(k, q);
      }
    }
  }
}

Spectrum eigenvalues_unchecked(SquareMatrix a) {
  const int n = a.size();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= kOffDiagonalTarget) break;
    jacobi_sweep(a);
    if (sweep == kMaxSweeps - 1 && off_diagonal_norm(a) > kOffDiagonalTarget)
      throw std::runtime_error("Jacobi eigensolver failed to converge in " +
                               std::to_string(kMaxSweeps) + " sweeps");
  }
  Spectrum s;
  s.eigenvalues.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s.eigenvalues[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), std::greater<double>());
  return s;
}

}  // namespace

Spectrum symmetric_eigenvalues(const SquareMatrix& m) {
  if (m.size() < 1) throw std::invalid_argument("empty matrix has no spectrum");
  if (m.max_abs_asymmetry() > kSymmetryInputTol)
    throw std::invalid_argument("matrix is not symmetric");
  return eigenvalues_unchecked(m);
}

const char* to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::metropolis: return "metropolis";
    case WeightScheme::best_constant: return "best-constant";
    case WeightScheme::local_degree: return "local-degree";
    case WeightScheme::max_degree: return "max-degree";
    case WeightScheme::custom: return "custom";
  }
  return "custom";
}

WeightScheme weight_scheme_from_string(const std::string& name) {
  if (name == "metropolis") return WeightScheme::metropolis;
  if (name == "best-constant" || name == "best_constant") return WeightScheme::best_constant;
  if (name == "local-degree" || name == "local_degree") return WeightScheme::local_degree;
  if (name == "max-degree" || name == "max_degree") return WeightScheme::max_degree;
  if (name == "custom") return WeightScheme::custom;
  throw std::invalid_argument("unknown weight scheme: " + name);
}

WeightMatrix metropolis_weights(const Topology& t) {
  const int n = t.size();
  SquareMatrix w(n);
  for (int i = 0; i < n; ++i) {
    double off_sum = 0.0;
    for (int j : t.neighbors(i)) {
      const double wij = 1.0 / (1.0 + static_cast<double>(std::max(t.degree(i), t.degree(j))));
      w(i, j) = wij;
      off_sum += wij;
    }
    w(i, i) = 1.0 - off_sum;
  }
  return {WeightScheme::metropolis, std::move(w)};
}

WeightMatrix best_constant_weights(const Topology& t) {
  const int n = t.size();
  if (n == 1) return {WeightScheme::best_constant, SquareMatrix::identity(1)};
  const Spectrum spectrum = symmetric_eigenvalues(laplacian(t));
  const double alpha = 2.0 / (spectrum.largest() + spectrum.second_smallest());
  SquareMatrix w(n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = 1.0 - alpha * static_cast<double>(t.degree(i));
    for (int j : t.neighbors(i)) w(i, j) = alpha;
  }
  return {WeightScheme::best_constant, std::move(w)};
}

WeightMatrix local_degree_weights(const Topology& t) {
  const int n = t.size();
  SquareMatrix w(n);
  for (int i = 0; i < n; ++i) {
    double off_sum = 0.0;
    for (int j : t.neighbors(i)) {
      const double wij = 1.0 / static_cast<double>(std::max(t.degree(i), t.degree(j)));
      w(i, j) = wij;
      off_sum += wij;
    }
    w(i, i) = 1.0 - off_sum;
  }
  return {WeightScheme::local_degree, std::move(w)};
}

WeightMatrix max_degree_weights(const Topology& t) {
  const int n = t.size();
  if (n == 1) return {WeightScheme::max_degree, SquareMatrix::identity(1)};
  const double d_max = static_cast<double>(t.max_degree());
  SquareMatrix w(n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = 1.0 - static_cast<double>(t.degree(i)) / d_max;
    for (int j : t.neighbors(i)) w(i, j) = 1.0 / d_max;
  }
  return {WeightScheme::max_degree, std::move(w)};
}

WeightMatrix make_weights(WeightScheme scheme, const Topology& t) {
  switch (scheme) {
    case WeightScheme::metropolis: return metropolis_weights(t);
    case WeightScheme::best_constant: return best_constant_weights(t);
    case WeightScheme::local_degree: return local_degree_weights(t);
    case WeightScheme::max_degree: return max_degree_weights(t);
    case WeightScheme::custom: break;
  }
  throw std::invalid_argument("custom weight matrices are loaded, not generated");
}

double spectral_norm(const SquareMatrix& m) {
  const int n = m.size();
  if (n < 1) throw std::invalid_argument("empty matrix has no norm");
  if (m.max_abs_asymmetry() <= kSymmetryInputTol) {
    const Spectrum s = eigenvalues_unchecked(m);
    return std::max(std::abs(s.largest()), std::abs(s.smallest()));
  }
  // singular value route: ||M||_2 = sqrt(lambda_max(M^T M))
  SquareMatrix gram(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double sum = 0.0;
      for (int k = 0; k < n; ++k) sum += m(k, i) * m(k, j);
      gram(i, j) = sum;
      gram(j, i) = sum;
    }
  }
  const Spectrum s = eigenvalues_unchecked(gram);
  return std::sqrt(std::max(0.0, s.largest()));
}

ConditionReport verify_convergence_conditions(const WeightMatrix& w, const Topology& t) {
  const int n = t.size();
  if (w.entries.size() != n)
    throw std::invalid_argument("weight matrix size does not match the topology");

  ConditionReport report;

  report.sparsity_matches = true;
  for (int i = 0; i < n && report.sparsity_matches; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || t.has_edge(i, j)) continue;
      if (std::abs(w.entries(i, j)) > kConditionTol) {
        report.sparsity_matches = false;
        break;
      }
    }
  }

  report.symmetric = w.entries.max_abs_asymmetry() <= kConditionTol;

  report.rows_sum_to_one = true;
  for (int i = 0; i < n; ++i) {
    if (std::abs(w.entries.row_sum(i) - 1.0) > kConditionTol) {
      report.rows_sum_to_one = false;
      break;
    }
  }

  SquareMatrix deviation = w.entries;
  const double j_entry = 1.0 / static_cast<double>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) deviation(i, j) -= j_entry;
  report.norm = spectral_norm(deviation);
  report.spectral_norm_ok = report.norm < 1.0 - kConditionTol;

  return report;
}

void write_csv(const SquareMatrix& m, std::ostream& out) {
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j > 0) out << ',';
      out << detail::format_double(m(i, j));
    }
    out << '\n';
  }
}

SquareMatrix matrix_from_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& field : fields) {
      double v = 0.0;
      if (!detail::parse_double(field, v))
        throw std::runtime_error("matrix CSV line " + std::to_string(line_no) +
                                 ": invalid number '" + field + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw std::runtime_error("matrix CSV is empty");
  for (const auto& row : rows)
    if (row.size() != n) throw std::runtime_error("matrix CSV is not square");
  SquareMatrix m(static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return m;
}

}  // namespace cnids
