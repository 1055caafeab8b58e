#pragma once

#include "sfs/graph.hpp"
#include "sfs/types.hpp"

#include <set>
#include <vector>

namespace sfs {

/// One binary split of the classes with its prescribed indicator vector.
struct BinarySplit {
    std::set<int> positive_classes;
    int num_classes = 0;
    Eigen::VectorXi t;   // +1 on the positive side, -1 elsewhere
    double b = 0.0;      // balance parameter; 0 means "not set yet"
    Vector v;            // entries in {1, -b}; empty until the balance is set

    /// Fill b and the indicator v from t.
    void set_balance(double balance);

    /// Same split with the two sides exchanged (t negated, balance cleared).
    BinarySplit flipped() const;
};

enum class SplitMode { OnePerClass, BinaryCode };

struct SplitScheme {
    std::vector<BinarySplit> splits;
    SplitMode mode = SplitMode::OnePerClass;

    int r() const { return static_cast<int>(splits.size()); }
};

/// The (n+1)x(m+1) pencil matrices of one binary split.
struct PencilPair {
    Matrix A_full;
    Matrix B_full;

    Index rows() const { return A_full.rows(); }
    Index cols() const { return A_full.cols(); }
};

// Build the split scheme. OnePerClass emits K splits {1},..,{K} (a single
// split for K = 2); BinaryCode encodes class c as the binary representation
// of c-1 over ceil(log2 K) bits, bit p set -> positive in split p+1, and
// rejects schemes with a single-signed split.
SplitScheme make_splits(const std::vector<int>& labels, int K, SplitMode mode);

/// b = sum of degrees on the positive side / sum on the negative side,
/// evaluated on the unscaled (S = identity) training graph.
double balance_param(const BinarySplit& split, const SimilarityGraph& graph_unscaled);

// Assemble the pencil for indicator v and Euclidean local scales sigma.
// Row i of A is (X_i v)^T with X_i = [x_{i,1}/(s_i s_1), ..., x_{i,n}/(s_i s_n)],
// where the k-th entry of x_{i,j} is (x_ik - x_jk)^2; the last column is
// alpha_i = sum(v) - v_i. Row i of B is v_i x_hat_i^T with
// x_hat_i = sum_j x_{i,j}/(s_i s_j); last column beta = (n-1) v. The last row
// of A carries the constraint [gamma^T, rho], the last row of B is zero.
PencilPair assemble_pencil(const Matrix& X, const Vector& v, const Vector& sigma);
PencilPair assemble_pencil_serial(const Matrix& X, const Vector& v, const Vector& sigma);

/// Vertical concatenation of the per-split pencils.
PencilPair stack_pencils(const std::vector<PencilPair>& pairs);

}  // namespace sfs
