#include "pigan/pca.hpp"

#include <stdexcept>

namespace pigan {

PcaModel pca_fit(const std::vector<std::vector<double>>& samples,
                 std::size_t k) {
  if (samples.size() < 2)
    throw std::invalid_argument("pca_fit: need at least 2 samples");
  const std::size_t n = samples.size();
  const std::size_t dim = samples.front().size();
  if (k == 0 || k > dim || k > n - 1)
    throw std::invalid_argument("pca_fit: k must satisfy 1 <= k <= min(dim, n-1)");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    if (samples[i].size() != dim)
      throw std::invalid_argument("pca_fit: ragged samples");
    for (std::size_t j = 0; j < dim; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = samples[i][j];
  }

  Eigen::VectorXd mean = m.colwise().mean();
  Eigen::MatrixXd centered = m.rowwise() - mean.transpose();
  Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose());

  // SelfAdjointEigenSolver returns eigenvalues in increasing order; take the
  // top k from the back.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("pca_fit: eigendecomposition failed");

  PcaModel model;
  model.mean = std::move(mean);
  model.components.resize(static_cast<Eigen::Index>(k),
                          static_cast<Eigen::Index>(dim));
  model.explained.resize(static_cast<Eigen::Index>(k));
  const Eigen::Index last = es.eigenvalues().size() - 1;
  for (std::size_t i = 0; i < k; ++i) {
    const Eigen::Index src = last - static_cast<Eigen::Index>(i);
    model.components.row(static_cast<Eigen::Index>(i)) =
        es.eigenvectors().col(src).transpose();
    model.explained[static_cast<Eigen::Index>(i)] =
        std::max(0.0, es.eigenvalues()[src]);
  }
  return model;
}

std::vector<double> pca_project(const PcaModel& model,
                                std::span<const double> x) {
  if (x.size() != model.dim())
    throw std::invalid_argument("pca_project: dimension mismatch");
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = x[i];
  Eigen::VectorXd proj = model.components * (v - model.mean);
  return std::vector<double>(proj.data(), proj.data() + proj.size());
}

}  // namespace pigan
