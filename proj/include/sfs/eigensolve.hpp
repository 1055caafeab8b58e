#pragma once

#include "sfs/pencil.hpp"
#include "sfs/types.hpp"

namespace sfs {

enum class SolveStatus { Converged, NoEigenvalueBelowOne, DegenerateNormalization };

struct PencilSolveOptions {
    double target = 1.0;
    double accept_rel_tol = 1e-6;  // admissible when sigma_min <= tol * (||A||_F + ||B||_F)
    int grid_points = 400;
    double window_below = 2.0;     // search interval [target - window_below, target - edge_offset]
    double edge_offset = 1e-6;
    int refine_iters = 48;         // golden-section steps; bracket shrinks below 1e-10
};

/// Result of a pencil solve. When status is Converged the eigenvector w is
/// rescaled so its last entry is -1 and s carries its first m entries.
struct PencilSolution {
    double mu = 0.0;
    Vector w;
    Vector s;
    double residual = 0.0;   // ||(A - mu B) w|| / ((||A||_F + |mu| ||B||_F) ||w||)
    double sigma_min = 0.0;  // smallest singular value of A - mu B at mu
    SolveStatus status = SolveStatus::Converged;
};

// Solve A w = mu B w for the eigenvalue closest to but below the target.
// Wide pencils are first reduced onto the joint row space of A and B. The
// search evaluates sigma_min(A - mu B) on a uniform grid, refines every local
// minimum by golden section, and accepts refined minima under the threshold;
// among those the largest mu wins. When none qualifies the global minimizer
// is returned with status NoEigenvalueBelowOne (the minimal-perturbation
// estimate).
PencilSolution solve_pencil(const PencilPair& p, const PencilSolveOptions& opts = {});

/// Relative residual of a candidate eigenpair on the full-size pencil.
double pencil_residual(const PencilPair& p, double mu, const Vector& w);

}  // namespace sfs
