#include "sfs/pencil.hpp"

#include <cmath>
#include <string>

namespace sfs {

void BinarySplit::set_balance(double balance) {
    if (!(balance > 0.0)) throw InvalidInput("split: balance parameter must be positive");
    b = balance;
    v.resize(t.size());
    for (Index i = 0; i < t.size(); ++i) v[i] = t[i] > 0 ? 1.0 : -b;
}

BinarySplit BinarySplit::flipped() const {
    BinarySplit out;
    out.num_classes = num_classes;
    out.t = -t;
    for (int c = 1; c <= num_classes; ++c)
        if (positive_classes.count(c) == 0) out.positive_classes.insert(c);
    return out;
}

namespace {

BinarySplit split_from_positive(const std::vector<int>& labels, int K, const std::set<int>& positive) {
    BinarySplit s;
    s.positive_classes = positive;
    s.num_classes = K;
    s.t.resize(static_cast<Index>(labels.size()));
    bool has_pos = false, has_neg = false;
    for (size_t i = 0; i < labels.size(); ++i) {
        const bool in = positive.count(labels[i]) > 0;
        s.t[static_cast<Index>(i)] = in ? 1 : -1;
        (in ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg)
        throw InvalidInput("make_splits: single-signed split (positive classes cover none or all samples)");
    return s;
}

}  // namespace

SplitScheme make_splits(const std::vector<int>& labels, int K, SplitMode mode) {
    if (K < 2) throw InvalidInput("make_splits: K >= 2 required");
    for (int lab : labels)
        if (lab < 1 || lab > K) throw InvalidInput("make_splits: label outside {1..K}");

    SplitScheme scheme;
    scheme.mode = mode;
    if (mode == SplitMode::OnePerClass) {
        if (K == 2) {
            scheme.splits.push_back(split_from_positive(labels, K, {1}));
        } else {
            for (int c = 1; c <= K; ++c) scheme.splits.push_back(split_from_positive(labels, K, {c}));
        }
    } else {
        int r = 0;
        while ((1 << r) < K) ++r;
        if (r == 0) r = 1;
        for (int p = 0; p < r; ++p) {
            std::set<int> positive;
            for (int c = 1; c <= K; ++c)
                if ((c - 1) & (1 << p)) positive.insert(c);
            scheme.splits.push_back(split_from_positive(labels, K, positive));
        }
        // the r-bit pattern per class is the binary code of c-1, unique by
        // construction; single-signed splits were rejected above
    }
    return scheme;
}

double balance_param(const BinarySplit& split, const SimilarityGraph& graph_unscaled) {
    if (split.t.size() != graph_unscaled.degrees.size())
        throw InvalidInput("balance_param: split and graph size mismatch");
    double pos = 0.0, neg = 0.0;
    for (Index i = 0; i < split.t.size(); ++i)
        (split.t[i] > 0 ? pos : neg) += graph_unscaled.degrees[i];
    if (!(neg > 0.0)) throw NumericalError("balance_param: zero degree mass on the negative side");
    return pos / neg;
}

namespace {

// Fill row i of A and x_hat. x_{i,j} entries are (x_ik - x_jk)^2.
inline void pencil_row(const Matrix& X, const Vector& v, const Vector& sigma, Index i,
                       Matrix& A, Matrix& xhat) {
    const Index n = X.rows();
    const Index m = X.cols();
    for (Index k = 0; k < m; ++k) {
        A(i, k) = 0.0;
        xhat(i, k) = 0.0;
    }
    for (Index j = 0; j < n; ++j) {
        const double cv = v[j] / sigma[j];
        const double cu = 1.0 / sigma[j];
        for (Index k = 0; k < m; ++k) {
            const double d = X(i, k) - X(j, k);
            const double sq = d * d;
            A(i, k) += cv * sq;
            xhat(i, k) += cu * sq;
        }
    }
    const double ri = 1.0 / sigma[i];
    for (Index k = 0; k < m; ++k) {
        A(i, k) *= ri;
        xhat(i, k) *= ri;
    }
}

PencilPair assemble_impl(const Matrix& X, const Vector& v, const Vector& sigma, bool parallel) {
    const Index n = X.rows();
    const Index m = X.cols();
    if (v.size() != n || sigma.size() != n)
        throw InvalidInput("assemble_pencil: v/sigma length != sample count");
    for (Index i = 0; i < n; ++i)
        if (!(sigma[i] > 0.0)) throw InvalidInput("assemble_pencil: nonpositive sigma");

    Matrix A(n, m), xhat(n, m);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (Index i = 0; i < n; ++i) pencil_row(X, v, sigma, i, A, xhat);
    } else {
        for (Index i = 0; i < n; ++i) pencil_row(X, v, sigma, i, A, xhat);
    }

    const double vsum = v.sum();
    PencilPair p;
    p.A_full.resize(n + 1, m + 1);
    p.B_full.resize(n + 1, m + 1);
    p.A_full.topLeftCorner(n, m) = A;
    for (Index i = 0; i < n; ++i) {
        p.A_full(i, m) = vsum - v[i];                      // alpha
        p.B_full.row(i).head(m) = v[i] * xhat.row(i);      // B
        p.B_full(i, m) = (n - 1) * v[i];                   // beta
    }
    Vector gamma = Vector::Zero(m);
    for (Index i = 0; i < n; ++i) gamma += v[i] * xhat.row(i).transpose();
    p.A_full.row(n).head(m) = gamma.transpose();
    p.A_full(n, m) = (n - 1) * vsum;                       // rho
    p.B_full.row(n).setZero();

    if (!p.A_full.allFinite() || !p.B_full.allFinite())
        throw NumericalError("assemble_pencil: non-finite entries (degenerate local scales)");
    return p;
}

}  // namespace

PencilPair assemble_pencil(const Matrix& X, const Vector& v, const Vector& sigma) {
    return assemble_impl(X, v, sigma, true);
}

PencilPair assemble_pencil_serial(const Matrix& X, const Vector& v, const Vector& sigma) {
    return assemble_impl(X, v, sigma, false);
}

PencilPair stack_pencils(const std::vector<PencilPair>& pairs) {
    if (pairs.empty()) throw InvalidInput("stack_pencils: empty input");
    const Index cols = pairs.front().cols();
    Index rows = 0;
    for (const auto& p : pairs) {
        if (p.cols() != cols) throw InvalidInput("stack_pencils: mismatched column counts");
        rows += p.rows();
    }
    PencilPair out;
    out.A_full.resize(rows, cols);
    out.B_full.resize(rows, cols);
    Index at = 0;
    for (const auto& p : pairs) {
        out.A_full.middleRows(at, p.rows()) = p.A_full;
        out.B_full.middleRows(at, p.rows()) = p.B_full;
        at += p.rows();
    }
    return out;
}

}  // namespace sfs
