#pragma once

// Exact PCA by eigendecomposition of the sample covariance; the datasets
// here are small enough that nothing iterative is needed.

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace pigan {

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;       // k x dim, orthonormal rows
  Eigen::VectorXd explained;        // variance per component, non-increasing

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t k() const { return static_cast<std::size_t>(components.rows()); }
};

// Top-k principal components of the samples. Requires n >= 2 and
// k <= min(dim, n-1).
PcaModel pca_fit(const std::vector<std::vector<double>>& samples,
                 std::size_t k);

std::vector<double> pca_project(const PcaModel& model,
                                std::span<const double> x);

}  // namespace pigan
