#pragma once

#include "sfs/types.hpp"

#include <optional>

namespace sfs {

/// Similarity graph with locally scaled Gaussian weights.
struct SimilarityGraph {
    Matrix W;        // symmetric, zero diagonal, entries in [0,1]
    Vector degrees;  // row sums of W, all positive
    Vector sigma;    // local scales used to build W
    int k_local = 7;

    void validate() const;
};

// Local scales from the k-th nearest neighbor (Euclidean ranking, ties by
// lower index). With a diagonal scaling S given, returns the scaled form
// sigma'_i = (x_i - x^(k)_i)^T S (x_i - x^(k)_i); without it, the Euclidean
// form sigma_i = ||x_i - x^(k)_i||_2. A zero scale (duplicate rows) is an
// error naming the offending pair.
Vector local_scales(const Matrix& X, int k, const std::optional<Vector>& S = std::nullopt);

// W_ij = exp(-(x_i-x_j)^T S (x_i-x_j) / (sigma_i sigma_j)) for i != j.
// When sparsify_k is set, only entries where j is among i's sparsify_k
// nearest neighbors (or vice versa) are kept; degrees are recomputed.
SimilarityGraph similarity_matrix(const Matrix& X, const Vector& S, const Vector& sigma,
                                  std::optional<int> sparsify_k = std::nullopt);

/// L = D - W together with the degree diagonal D.
std::pair<Matrix, Matrix> laplacian(const SimilarityGraph& g);

}  // namespace sfs
