#pragma once

#include "sfs/types.hpp"

#include <optional>

namespace sfs {

/// Transductive spectral embedding of train + test rows.
struct Embedding {
    Matrix U;            // (N+n) x ell coordinates, columns D'-orthonormal
    Vector eigenvalues;  // ell smallest nonzero eigenvalues, ascending
    Index train_rows = 0;
    Index test_rows = 0;
    int ell = 0;
};

/// Z = [X; Y] * diag(s_half), train rows first.
Matrix apply_scaling(const Matrix& X, const Matrix& Y, const Vector& s_half);

// Locally scaled similarity graph over all rows of Z (Euclidean scales from
// the k_local-th neighbor, sparsify_k-NN sparsified), then the generalized
// eigenproblem L' u = lambda' D' u. Returns the eigenvectors of the ell
// smallest eigenvalues above the zero threshold 1e-10 * lambda_max,
// D'-normalized, with a deterministic per-column sign. Duplicate rows are
// perturbed by a tiny deterministic jitter before the graph is built.
Embedding spectral_embed(const Matrix& Z, int ell, int k_local = 7,
                         std::optional<int> sparsify_k = 7, Index train_rows = -1);

}  // namespace sfs
