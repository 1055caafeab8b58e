#include "sfs/embed.hpp"

#include "sfs/dataset.hpp"
#include "sfs/graph.hpp"
#include "sfs/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace sfs {

Matrix apply_scaling(const Matrix& X, const Matrix& Y, const Vector& s_half) {
    if (X.cols() != Y.cols() && Y.rows() > 0)
        throw InvalidInput("apply_scaling: train/test feature counts differ");
    if (s_half.size() != X.cols())
        throw InvalidInput("apply_scaling: scaling length != feature count");
    Matrix Z(X.rows() + Y.rows(), X.cols());
    Z.topRows(X.rows()) = X;
    if (Y.rows() > 0) Z.bottomRows(Y.rows()) = Y;
    for (Index j = 0; j < Z.cols(); ++j) Z.col(j) *= s_half[j];
    return Z;
}

namespace {

// Duplicate rows give zero local scales; nudge them apart deterministically.
Matrix deduplicate(const Matrix& Z, int k_local) {
    const Matrix D = pairwise_sqdist(Z);
    const auto nbr = kth_neighbor(D, k_local);
    bool any_zero = false;
    for (Index i = 0; i < Z.rows(); ++i)
        if (D(i, nbr[static_cast<size_t>(i)]) <= 0.0) any_zero = true;
    if (!any_zero) return Z;

    double scale = std::sqrt(Z.array().square().mean());
    if (!(scale > 0.0)) scale = 1.0;
    Matrix out = Z;
    for (Index i = 0; i < out.rows(); ++i) {
        std::uint64_t state = static_cast<std::uint64_t>(i) * 0x9e3779b97f4a7c15ULL + 17ULL;
        for (Index j = 0; j < out.cols(); ++j)
            out(i, j) += 1e-9 * scale * (rng::uniform01(state) - 0.5);
    }
    return out;
}

}  // namespace

Embedding spectral_embed(const Matrix& Z_in, int ell, int k_local,
                         std::optional<int> sparsify_k, Index train_rows) {
    const Index n = Z_in.rows();
    if (ell < 1) throw InvalidInput("spectral_embed: ell >= 1 required");
    if (n <= ell + 1) throw InvalidInput("spectral_embed: need more rows than ell + 1");
    if (n <= k_local) throw InvalidInput("spectral_embed: need more rows than k_local");

    const Matrix Z = deduplicate(Z_in, k_local);
    const Vector sigma = local_scales(Z, k_local);
    const Vector ones = Vector::Ones(Z.cols());
    const SimilarityGraph g = similarity_matrix(Z, ones, sigma, sparsify_k);
    auto [L, D] = laplacian(g);

    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(L, D);
    if (es.info() != Eigen::Success)
        throw NumericalError("spectral_embed: generalized eigensolver failed");
    const Vector& lam = es.eigenvalues();
    const Matrix& V = es.eigenvectors();  // columns D-orthonormal

    const double lam_max = lam[n - 1];
    const double zero_thr = 1e-10 * lam_max;
    Index zero_count = 0;
    while (zero_count < n && lam[zero_count] <= zero_thr) ++zero_count;
    if (zero_count > static_cast<Index>(ell) + 1)
        throw NumericalError("spectral_embed: graph disconnected into " +
                             std::to_string(zero_count) + " components");
    if (n - zero_count < static_cast<Index>(ell))
        throw NumericalError("spectral_embed: only " + std::to_string(n - zero_count) +
                             " nonzero eigenvalues available for ell=" + std::to_string(ell));

    Embedding emb;
    emb.ell = ell;
    emb.U.resize(n, ell);
    emb.eigenvalues.resize(ell);
    for (int a = 0; a < ell; ++a) {
        Vector col = V.col(zero_count + a);
        // deterministic sign: largest-magnitude entry positive, lowest index wins ties
        Index best = 0;
        for (Index i = 1; i < n; ++i)
            if (std::abs(col[i]) > std::abs(col[best])) best = i;
        if (col[best] < 0.0) col = -col;
        emb.U.col(a) = col;
        emb.eigenvalues[a] = lam[zero_count + a];
    }
    emb.train_rows = train_rows >= 0 ? train_rows : n;
    emb.test_rows = n - emb.train_rows;
    return emb;
}

}  // namespace sfs
