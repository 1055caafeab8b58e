#include "sfs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sfs {

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

inline double quadform_diff(const Matrix& X, const Vector& s, Index i, Index j) {
    const Index m = X.cols();
    double acc = 0.0;
    for (Index k = 0; k < m; ++k) {
        const double d = X(i, k) - X(j, k);
        acc += s[k] * d * d;
    }
    return acc;
}

}  // namespace

Matrix pairwise_quadform_serial(const Matrix& X, const Vector& s) {
    if (s.size() != X.cols()) throw InvalidInput("pairwise_quadform: scale length != feature count");
    const Index n = X.rows();
    Matrix D(n, n);
    for (Index i = 0; i < n; ++i) {
        D(i, i) = 0.0;
        for (Index j = 0; j < i; ++j) {
            const double v = quadform_diff(X, s, i, j);
            D(i, j) = v;
            D(j, i) = v;
        }
    }
    return D;
}

Matrix pairwise_quadform(const Matrix& X, const Vector& s) {
    if (s.size() != X.cols()) throw InvalidInput("pairwise_quadform: scale length != feature count");
    const Index n = X.rows();
    Matrix D(n, n);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        D(i, i) = 0.0;
        for (Index j = 0; j < i; ++j) D(i, j) = quadform_diff(X, s, i, j);
    }
    // mirror after the parallel fill so each entry is computed exactly once
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) D(i, j) = D(j, i);
    return D;
}

Matrix pairwise_sqdist(const Matrix& X) {
    return pairwise_quadform(X, Vector::Ones(X.cols()));
}

namespace {

Index kth_neighbor_of_row(const Matrix& D, Index i, int k) {
    const Index n = D.rows();
    // indices sorted by (distance, index); self excluded
    std::vector<Index> idx;
    idx.reserve(static_cast<size_t>(n) - 1);
    for (Index j = 0; j < n; ++j)
        if (j != i) idx.push_back(j);
    std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), [&](Index a, Index b) {
        if (D(i, a) != D(i, b)) return D(i, a) < D(i, b);
        return a < b;
    });
    return idx[static_cast<size_t>(k - 1)];
}

}  // namespace

std::vector<Index> kth_neighbor_serial(const Matrix& D, int k) {
    const Index n = D.rows();
    if (k < 1 || k >= n) throw InvalidInput("kth_neighbor: need 1 <= k < n");
    std::vector<Index> out(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) out[static_cast<size_t>(i)] = kth_neighbor_of_row(D, i, k);
    return out;
}

std::vector<Index> kth_neighbor(const Matrix& D, int k) {
    const Index n = D.rows();
    if (k < 1 || k >= n) throw InvalidInput("kth_neighbor: need 1 <= k < n");
    std::vector<Index> out(static_cast<size_t>(n));
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) out[static_cast<size_t>(i)] = kth_neighbor_of_row(D, i, k);
    return out;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> knn_mask(const Matrix& D, int k) {
    const Index n = D.rows();
    if (k < 1 || k >= n) throw InvalidInput("knn_mask: need 1 <= k < n");
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> keep(n, n);
    keep.setConstant(false);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        std::vector<Index> idx;
        idx.reserve(static_cast<size_t>(n) - 1);
        for (Index j = 0; j < n; ++j)
            if (j != i) idx.push_back(j);
        std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](Index a, Index b) {
            if (D(i, a) != D(i, b)) return D(i, a) < D(i, b);
            return a < b;
        });
        for (int t = 0; t < k; ++t) keep(i, idx[static_cast<size_t>(t)]) = true;
    }
    // symmetrize: keep an edge if either endpoint selected it
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const bool e = keep(i, j) || keep(j, i);
            keep(i, j) = e;
            keep(j, i) = e;
        }
    return keep;
}

Matrix gaussian_weights_serial(const Matrix& D, const Vector& sigma) {
    const Index n = D.rows();
    Matrix W(n, n);
    for (Index i = 0; i < n; ++i) {
        W(i, i) = 0.0;
        for (Index j = 0; j < n; ++j)
            if (j != i) W(i, j) = std::exp(-D(i, j) / (sigma[i] * sigma[j]));
    }
    return W;
}

Matrix gaussian_weights(const Matrix& D, const Vector& sigma) {
    const Index n = D.rows();
    Matrix W(n, n);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        W(i, i) = 0.0;
        for (Index j = 0; j < n; ++j)
            if (j != i) W(i, j) = std::exp(-D(i, j) / (sigma[i] * sigma[j]));
    }
    return W;
}

Vector row_sums(const Matrix& W) {
    const Index n = W.rows();
    Vector d(n);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (Index j = 0; j < W.cols(); ++j) acc += W(i, j);
        d[i] = acc;
    }
    return d;
}

}  // namespace sfs
