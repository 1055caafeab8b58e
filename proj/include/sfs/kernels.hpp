#pragma once

#include "sfs/types.hpp"

#include <vector>

namespace sfs {

/// Bound the number of OpenMP threads used by the parallel kernels.
/// n <= 0 leaves the runtime default in place.
void set_threads(int n);

/// Number of threads the parallel kernels will use (1 without OpenMP).
int max_threads();

// Pairwise quadratic-form distances D(i,j) = (x_i - x_j)^T diag(s) (x_i - x_j).
// s may carry negative entries (signed scaling factors); the diagonal is zero.
// The *_serial variants are reference implementations kept for testing and
// benchmarking; both orders of evaluation are fixed so results are bitwise
// identical.
Matrix pairwise_quadform(const Matrix& X, const Vector& s);
Matrix pairwise_quadform_serial(const Matrix& X, const Vector& s);

/// Euclidean pairwise squared distances (quadratic form with s = 1).
Matrix pairwise_sqdist(const Matrix& X);

// Index of the k-th nearest neighbor of every row under the distance matrix D
// (self excluded, ties broken by lower index). k is 1-based: k = 1 is the
// nearest neighbor.
std::vector<Index> kth_neighbor(const Matrix& D, int k);
std::vector<Index> kth_neighbor_serial(const Matrix& D, int k);

// Boolean mask keeping entry (i,j) when j is among the k nearest neighbors of
// i or vice versa (symmetrized kNN graph). Diagonal is false.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> knn_mask(const Matrix& D, int k);

// W(i,j) = exp(-D(i,j) / (sigma_i * sigma_j)) off the diagonal, 0 on it.
Matrix gaussian_weights(const Matrix& D, const Vector& sigma);
Matrix gaussian_weights_serial(const Matrix& D, const Vector& sigma);

/// Row sums with a fixed left-to-right reduction order per row.
Vector row_sums(const Matrix& W);

}  // namespace sfs
