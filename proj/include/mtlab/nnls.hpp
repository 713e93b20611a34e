#pragma once

// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "mtlab/errors.hpp"

namespace mtlab {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 0,
                       double tolerance = 0.0) {
  const Eigen::Index cols = a.cols();
  if (a.rows() != b.size()) throw DomainError("nnls: row count mismatch");
  if (max_iterations <= 0) max_iterations = static_cast<int>(30 * cols + 30);
  if (tolerance <= 0.0)
    tolerance = 10.0 * std::numeric_limits<double>::epsilon() * a.cwiseAbs().maxCoeff() * std::max<Eigen::Index>(a.rows(), cols);

  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(cols);
  std::vector<bool> passive(cols, false);

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < cols; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    Eigen::VectorXd sol = sub.colPivHouseholderQr().solve(b);
    z = Eigen::VectorXd::Zero(cols);
    for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = sol[static_cast<Eigen::Index>(k)];
  };

  Eigen::VectorXd w = a.transpose() * (b - a * out.x);
  int iter = 0;
  while (iter < max_iterations) {
    // most positive dual among the active (zero) set
    Eigen::Index enter = -1;
    double best = tolerance;
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!passive[j] && w[j] > best) {
        best = w[j];
        enter = j;
      }
    if (enter < 0) {
      out.converged = true;
      break;
    }
    passive[enter] = true;

    Eigen::VectorXd z;
    solve_passive(z);
    if (z[enter] <= 0.0) {
      // numerically degenerate entering column; skip it for this sweep
      passive[enter] = false;
      w[enter] = 0.0;
      ++iter;
      continue;
    }
    bool feasible = false;
    bool first = true;
    while (true) {
      ++iter;
      if (!first) solve_passive(z);
      first = false;
      feasible = true;
      for (Eigen::Index j = 0; j < cols; ++j)
        if (passive[j] && z[j] <= 0.0) feasible = false;
      if (feasible) break;
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < cols; ++j)
        if (passive[j] && z[j] <= 0.0) alpha = std::min(alpha, out.x[j] / (out.x[j] - z[j]));
      out.x += alpha * (z - out.x);
      for (Eigen::Index j = 0; j < cols; ++j)
        if (passive[j] && std::abs(out.x[j]) <= tolerance) {
          passive[j] = false;
          out.x[j] = 0.0;
        }
      if (iter >= max_iterations) break;
    }
    if (!feasible) break;
    out.x = z;
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!passive[j]) out.x[j] = 0.0;
    w = a.transpose() * (b - a * out.x);
  }
  out.iterations = iter;
  out.residual_norm = (a * out.x - b).norm();
  return out;
}

}  // namespace mtlab
