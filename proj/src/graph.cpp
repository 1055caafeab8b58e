#include "sfs/graph.hpp"

#include "sfs/kernels.hpp"

#include <cmath>
#include <string>

namespace sfs {

void SimilarityGraph::validate() const {
    const Index n = W.rows();
    if (W.cols() != n) throw InvalidInput("graph: W not square");
    if (degrees.size() != n || sigma.size() != n)
        throw InvalidInput("graph: degree/sigma length mismatch");
    for (Index i = 0; i < n; ++i) {
        if (!(degrees[i] > 0.0)) throw NumericalError("graph: nonpositive degree at node " + std::to_string(i + 1));
        if (!(sigma[i] > 0.0)) throw NumericalError("graph: nonpositive local scale at node " + std::to_string(i + 1));
    }
}

Vector local_scales(const Matrix& X, int k, const std::optional<Vector>& S) {
    const Index n = X.rows();
    if (n <= k) throw InvalidInput("local_scales: need n > k");
    const Matrix De = pairwise_sqdist(X);  // Euclidean ranking in both forms
    const auto nbr = kth_neighbor(De, k);

    Vector sig(n);
    if (S) {
        if (S->size() != X.cols()) throw InvalidInput("local_scales: scaling length != feature count");
        for (Index i = 0; i < n; ++i) {
            const Index j = nbr[static_cast<size_t>(i)];
            double acc = 0.0;
            for (Index f = 0; f < X.cols(); ++f) {
                const double d = X(i, f) - X(j, f);
                acc += (*S)[f] * d * d;
            }
            sig[i] = acc;
        }
    } else {
        for (Index i = 0; i < n; ++i) sig[i] = std::sqrt(De(i, nbr[static_cast<size_t>(i)]));
    }
    for (Index i = 0; i < n; ++i)
        if (!(sig[i] > 0.0))
            throw InvalidInput("local_scales: duplicate rows " + std::to_string(i + 1) + " and " +
                               std::to_string(nbr[static_cast<size_t>(i)] + 1) + " give zero scale");
    return sig;
}

SimilarityGraph similarity_matrix(const Matrix& X, const Vector& S, const Vector& sigma,
                                  std::optional<int> sparsify_k) {
    const Index n = X.rows();
    if (sigma.size() != n) throw InvalidInput("similarity_matrix: sigma length != sample count");
    for (Index i = 0; i < n; ++i)
        if (!(sigma[i] > 0.0)) throw InvalidInput("similarity_matrix: nonpositive sigma at node " + std::to_string(i + 1));
    for (Index f = 0; f < S.size(); ++f)
        if (S[f] < 0.0) throw InvalidInput("similarity_matrix: negative scaling entry");

    const Matrix D = pairwise_quadform(X, S);
    Matrix W = gaussian_weights(D, sigma);
    if (sparsify_k) {
        const auto keep = knn_mask(D, *sparsify_k);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                if (!keep(i, j)) W(i, j) = 0.0;
    }

    SimilarityGraph g;
    g.W = std::move(W);
    g.degrees = row_sums(g.W);
    g.sigma = sigma;
    g.validate();
    return g;
}

std::pair<Matrix, Matrix> laplacian(const SimilarityGraph& g) {
    Matrix D = Matrix::Zero(g.W.rows(), g.W.cols());
    D.diagonal() = g.degrees;
    Matrix L = D - g.W;
    return {std::move(L), std::move(D)};
}

}  // namespace sfs
