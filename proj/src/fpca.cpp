#include "efcp/fpca.hpp"

#include <cmath>

#include <algorithm>

#include <Eigen/Dense>

#include "efcp/errors.hpp"

namespace efcp {

namespace {

struct WeightedEig {
  std::vector<double> eigenvalues;              // descending, clamped
  std::vector<std::vector<double>> directions;  // weighted-orthonormal
};

// Eigen-decomposition of the weighted covariance operator
// K = scale * sum (x_i - mean)(x_i - mean)^T, via the symmetrized matrix
// B = W^{1/2} K W^{1/2}; directions are mapped back with W^{-1/2} so they
// are orthonormal in the weighted inner product and the eigenvalues match
// the functional operator's.
WeightedEig weighted_covariance_eig(const std::vector<std::vector<double>>& rows,
                                    const std::vector<double>& weights,
                                    const std::vector<double>* mean,
                                    bool with_directions) {
  const std::size_t n = rows.size();
  const std::size_t m = rows.front().size();
  Eigen::MatrixXd x(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      x(i, j) = rows[i][j] - (mean ? (*mean)[j] : 0.0);
    }
  }
  Eigen::VectorXd sqw(m);
  for (std::size_t j = 0; j < m; ++j) sqw(j) = std::sqrt(weights[j]);

  const double scale = 1.0 / static_cast<double>(n - 1);
  const Eigen::MatrixXd xs = x * sqw.asDiagonal();
  const Eigen::MatrixXd b = scale * (xs.transpose() * xs);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.compute(b, with_directions ? Eigen::ComputeEigenvectors
                                    : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw numerical_error("covariance eigendecomposition failed");
  }

  WeightedEig out;
  out.eigenvalues.resize(m);
  for (std::size_t l = 0; l < m; ++l) {
    // Eigen returns ascending order.
    out.eigenvalues[l] = std::max(0.0, solver.eigenvalues()(m - 1 - l));
  }
  if (with_directions) {
    out.directions.assign(m, std::vector<double>(m));
    for (std::size_t l = 0; l < m; ++l) {
      for (std::size_t j = 0; j < m; ++j) {
        out.directions[l][j] = solver.eigenvectors()(j, m - 1 - l) / sqw(j);
      }
      // Deterministic sign: largest-magnitude coordinate positive.
      auto& dir = out.directions[l];
      const auto it =
          std::max_element(dir.begin(), dir.end(), [](double a, double b) {
            return std::fabs(a) < std::fabs(b);
          });
      if (*it < 0.0) {
        for (double& v : dir) v = -v;
      }
    }
  }
  return out;
}

FpcaResult assemble(FpcaKind kind, const Grid& grid,
                    const std::vector<std::vector<double>>& rows,
                    const std::vector<double>& weights,
                    std::vector<double> mean, const ComponentSelector& sel) {
  WeightedEig eig = weighted_covariance_eig(rows, weights, &mean, true);
  const std::size_t p = select_components(eig.eigenvalues, sel);

  FpcaResult res;
  res.kind = kind;
  res.grid = grid;
  res.mean = std::move(mean);
  res.weights = weights;
  res.eigenvalues.assign(eig.eigenvalues.begin(), eig.eigenvalues.begin() + p);
  res.directions.assign(eig.directions.begin(), eig.directions.begin() + p);
  res.scores.assign(rows.size(), std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t l = 0; l < p; ++l) {
      double s = 0.0;
      for (std::size_t j = 0; j < weights.size(); ++j) {
        s += weights[j] * (rows[i][j] - res.mean[j]) * res.directions[l][j];
      }
      res.scores[i][l] = s;
    }
  }
  return res;
}

}  // namespace

std::size_t select_components(const std::vector<double>& eigenvalues,
                              const ComponentSelector& sel) {
  if (eigenvalues.empty()) {
    throw invalid_input_error("select_components: empty eigenvalues");
  }
  if (sel.kind == ComponentSelector::Kind::fixed) {
    if (sel.fixed_count < 1) {
      throw invalid_input_error("component count must be positive");
    }
    std::size_t positive = 0;
    for (double l : eigenvalues) {
      if (l > 1e-12) ++positive;
    }
    return std::min<std::size_t>(static_cast<std::size_t>(sel.fixed_count),
                                 positive);
  }
  if (!(sel.fraction > 0.0 && sel.fraction <= 1.0)) {
    throw invalid_input_error("cumulative fraction must lie in (0, 1]");
  }
  double total = 0.0;
  for (double l : eigenvalues) total += l;
  if (total <= 0.0) return 1;
  double cum = 0.0;
  for (std::size_t p = 0; p < eigenvalues.size(); ++p) {
    cum += eigenvalues[p];
    if (cum / total >= sel.fraction) return p + 1;
  }
  return eigenvalues.size();
}

FpcaResult vertical_fpca(const AlignmentResult& ar,
                         const ComponentSelector& sel) {
  const std::size_t n = ar.aligned_q.size();
  if (n < 2) {
    throw invalid_input_error("vertical_fpca needs at least two samples");
  }
  const Grid& grid = ar.aligned_q.front().grid;
  const std::size_t t = grid.num_points;

  std::vector<std::vector<double>> rows(n, std::vector<double>(t + 1));
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(ar.aligned_q[i].values.begin(), ar.aligned_q[i].values.end(),
              rows[i].begin());
    rows[i][t] = ar.aligned_q[i].f0;
  }
  std::vector<double> weights = quad_weights(t, grid.spacing());
  weights.push_back(1.0);  // the f(0) coordinate is Euclidean

  std::vector<double> mean(t + 1, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j <= t; ++j) mean[j] += r[j];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  return assemble(FpcaKind::vertical, grid, rows, weights, std::move(mean),
                  sel);
}

FpcaResult horizontal_fpca(const std::vector<ShootingVector>& vs,
                           const ComponentSelector& sel, bool center) {
  const std::size_t n = vs.size();
  if (n < 2) {
    throw invalid_input_error("horizontal_fpca needs at least two samples");
  }
  const Grid& grid = vs.front().grid;
  const std::size_t t = grid.num_points;
  for (const auto& v : vs) {
    if (v.values.size() != t || v.base.values != vs.front().base.values) {
      throw invalid_input_error(
          "horizontal_fpca requires a common base point for all vectors");
    }
  }
  std::vector<std::vector<double>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = vs[i].values;
  const std::vector<double> weights = quad_weights(t, grid.spacing());

  std::vector<double> mean(t, 0.0);
  if (center) {
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < t; ++j) mean[j] += r[j];
    }
    for (double& m : mean) m /= static_cast<double>(n);
  }
  return assemble(FpcaKind::horizontal, grid, rows, weights, std::move(mean),
                  sel);
}

std::vector<double> covariance_eigenvalues(
    const std::vector<std::vector<double>>& rows,
    const std::vector<double>& weights, bool center) {
  if (rows.size() < 2) {
    throw invalid_input_error("covariance needs at least two samples");
  }
  const std::size_t m = rows.front().size();
  if (weights.size() != m) {
    throw invalid_input_error("covariance: weight/sample size mismatch");
  }
  std::vector<double> mean(m, 0.0);
  if (center) {
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < m; ++j) mean[j] += r[j];
    }
    for (double& v : mean) v /= static_cast<double>(rows.size());
  }
  return weighted_covariance_eig(rows, weights, &mean, false).eigenvalues;
}

}  // namespace efcp
