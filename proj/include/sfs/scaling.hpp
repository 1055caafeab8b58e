#pragma once

#include "sfs/types.hpp"

#include <string>

namespace sfs {

enum class IntegrationMethod { Pca, Arithmetic, Geometric, Rms, Harmonic };

IntegrationMethod integration_from_string(const std::string& name);
std::string to_string(IntegrationMethod m);

/// Candidate factors and their integration into one diagonal scaling.
struct ScalingResult {
    Matrix candidates;   // m x r, entry (i,p) = sqrt(|s_i^(p)|)
    Vector integrated;   // m, the s_i^{1/2}
    IntegrationMethod method = IntegrationMethod::Rms;
    int pca_clamped = 0;  // entries clamped to 0 by the PCA variant
};

/// Candidate matrix from raw per-split factor vectors: entry = sqrt(|s|).
Matrix candidates_from_factors(const std::vector<Vector>& per_split_s);

// Collapse the m x r candidate matrix to one factor per feature. Harmonic
// requires strictly positive candidates (a zero entry is an error); geometric
// maps a zero candidate to a zero result for that feature.
Vector integrate(const Matrix& candidates, IntegrationMethod method, int* pca_clamped = nullptr);

/// S^{1/2} = diag(integrated), S = diag(integrated^2). Entries must be >= 0.
std::pair<Matrix, Matrix> to_scaling_matrix(const Vector& integrated);

}  // namespace sfs
