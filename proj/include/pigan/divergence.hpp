#pragma once

// Exact information-theoretic primitives over discrete distributions.
// All logarithms are natural (nats) and 0*ln(0) := 0. These functions are
// used both inside the training losses and as brute-force verification of
// the regularizer identities on enumerable generators.

#include <vector>

#include "pigan/prob.hpp"

namespace pigan {

// H(p) = -sum p_i ln p_i.
double entropy(const ProbVector& p);

// KL(p || q) = sum p_i ln(p_i / q_i). Returns +infinity when p puts mass
// where q has none (a distinguished signal, not an error); throws on
// support size mismatch.
double kl(const ProbVector& p, const ProbVector& q);

// Weighted Jensen-Shannon divergence: sum_i w_i KL(p_i || sum_j w_j p_j).
// Bounded by H(w); zero iff all components are equal.
double jsd_weighted(const std::vector<ProbVector>& dists,
                    const MixtureWeights& w);

// I(X;C) for the joint p(c,x) = w_c * conditionals[c](x), computed directly
// from the definition (a second algebraic route; equals jsd_weighted).
double mutual_information(const std::vector<ProbVector>& conditionals,
                          const MixtureWeights& w);

// Posterior over components for the observation at x_index:
// post_i = w_i p_i(x) / sum_j w_j p_j(x). Throws when the mixture puts no
// mass on x_index.
ProbVector membership_posterior(const std::vector<ProbVector>& conditionals,
                                const MixtureWeights& w, std::size_t x_index);

// sum_i w_i E_{x~p_i}[ln post_i(x)]; together with H(w) this reconstructs
// the mutual information.
double cross_entropy_regularizer(const std::vector<ProbVector>& conditionals,
                                 const MixtureWeights& w);

// Total variation distance between two empirical score samples, estimated
// on a shared equal-width binning of [0, 1].
double tvd_empirical(const ScoreSample& a, const ScoreSample& b,
                     std::size_t n_bins = 100);

// Squared Frechet (Wasserstein-2) distance between two Gaussians:
// ||mu1-mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2}). The matrix square root is
// taken by eigendecomposition of the symmetrized product; eigenvalues in
// [-1e-10, 0) are clamped to zero and anything more negative throws.
double frechet_distance(const GaussianStats& s1, const GaussianStats& s2);

// Exact value of the regularized minimax objective on a discrete support:
//   sum_c w_c sum_x [ data_c(x) ln D(x,c) + gen_c(x) ln(1 - D(x,c)) ]
//   + lambda * JSD_w(gen_1, ..., gen_N)
// d_scores[c][x] must lie strictly inside (0, 1).
double regularized_objective(const std::vector<ProbVector>& data_dists,
                             const std::vector<ProbVector>& gen_dists,
                             const std::vector<std::vector<double>>& d_scores,
                             const MixtureWeights& w, double lambda);

// Per-code optimal discriminator D*(x,c) = data_c(x) / (data_c(x)+gen_c(x));
// symbols with no mass on either side get 1/2.
std::vector<std::vector<double>> optimal_discriminator_scores(
    const std::vector<ProbVector>& data_dists,
    const std::vector<ProbVector>& gen_dists);

}  // namespace pigan
