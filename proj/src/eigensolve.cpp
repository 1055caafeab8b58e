#include "sfs/eigensolve.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace sfs {

double pencil_residual(const PencilPair& p, double mu, const Vector& w) {
    if (w.size() != p.cols()) throw InvalidInput("residual: vector length != pencil columns");
    const double wnorm = w.norm();
    if (wnorm == 0.0) throw InvalidInput("residual: zero vector");
    const double num = (p.A_full * w - mu * (p.B_full * w)).norm();
    const double den = (p.A_full.norm() + std::abs(mu) * p.B_full.norm()) * wnorm;
    return num / den;
}

namespace {

struct ReducedPencil {
    const Matrix& A;
    const Matrix& B;

    double sigma_min(double mu) const {
        const Matrix M = A - mu * B;
        Eigen::JacobiSVD<Matrix> svd(M);
        return svd.singularValues()[svd.singularValues().size() - 1];
    }

    Vector min_vector(double mu) const {
        const Matrix M = A - mu * B;
        Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
        return svd.matrixV().col(M.cols() - 1);
    }
};

struct Candidate {
    double mu;
    double sigma;
};

// Golden-section minimization with a fixed iteration count; returns the best
// evaluated point (ties resolved toward lower mu).
Candidate refine_minimum(const ReducedPencil& gp, double a, double b, int iters) {
    constexpr double invphi = 0.6180339887498949;
    Candidate best{a, gp.sigma_min(a)};
    auto consider = [&](double mu, double s) {
        if (s < best.sigma || (s == best.sigma && mu < best.mu)) best = {mu, s};
    };
    consider(b, gp.sigma_min(b));
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = gp.sigma_min(c);
    double fd = gp.sigma_min(d);
    consider(c, fc);
    consider(d, fd);
    for (int it = 0; it < iters; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = gp.sigma_min(c);
            consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = gp.sigma_min(d);
            consider(d, fd);
        }
    }
    return best;
}

}  // namespace

PencilSolution solve_pencil(const PencilPair& p, const PencilSolveOptions& opts) {
    if (!p.A_full.allFinite() || !p.B_full.allFinite())
        throw InvalidInput("solve_pencil: non-finite pencil entries");
    if (p.B_full.rows() != p.rows() || p.B_full.cols() != p.cols())
        throw InvalidInput("solve_pencil: A and B dimensions differ");
    if (opts.grid_points < 3) throw InvalidInput("solve_pencil: grid too small");

    const double normA = p.A_full.norm();
    const double normB = p.B_full.norm();
    const double accept_abs = opts.accept_rel_tol * (normA + normB);

    // Wide pencils: restrict eigenvectors to the joint row space. Components
    // orthogonal to every row of A and B are annihilated by A - mu B for any
    // mu, so nothing is lost and the reduced pencil becomes solvable.
    Matrix A = p.A_full;
    Matrix B = p.B_full;
    Matrix Q;  // cols x q basis, empty when no reduction happened
    if (p.rows() < p.cols()) {
        Matrix stacked(2 * p.rows(), p.cols());
        stacked.topRows(p.rows()) = A;
        stacked.bottomRows(p.rows()) = B;
        Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        Index q = 0;
        for (Index i = 0; i < sv.size(); ++i)
            if (sv[i] > sv[0] * 1e-12) ++q;
        if (q == 0) throw NumericalError("solve_pencil: zero pencil");
        Q = svd.matrixV().leftCols(q);
        A = p.A_full * Q;
        B = p.B_full * Q;
    }

    const ReducedPencil gp{A, B};

    const double lo = opts.target - opts.window_below;
    const double hi = opts.target - opts.edge_offset;
    const int N = opts.grid_points;
    const double step = (hi - lo) / (N - 1);

    std::vector<double> vals(static_cast<size_t>(N));
#pragma omp parallel for schedule(static)
    for (int j = 0; j < N; ++j) vals[static_cast<size_t>(j)] = gp.sigma_min(lo + j * step);

    // local minima of the sampled curve, largest mu first
    std::vector<int> minima;
    for (int j = N - 1; j >= 0; --j) {
        const double left = j > 0 ? vals[static_cast<size_t>(j - 1)] : std::numeric_limits<double>::infinity();
        const double right = j < N - 1 ? vals[static_cast<size_t>(j + 1)] : std::numeric_limits<double>::infinity();
        if (vals[static_cast<size_t>(j)] <= left && vals[static_cast<size_t>(j)] <= right)
            minima.push_back(j);
    }

    Candidate accepted{0.0, -1.0};
    bool have_accepted = false;
    Candidate global{lo, vals[0]};
    for (int j = 0; j < N; ++j) {
        const double v = vals[static_cast<size_t>(j)];
        const double mu = lo + j * step;
        if (v < global.sigma || (v == global.sigma && mu < global.mu)) global = {mu, v};
    }
    for (int j : minima) {
        const double a = std::max(lo, lo + (j - 1) * step);
        const double b = std::min(hi, lo + (j + 1) * step);
        const Candidate c = refine_minimum(gp, a, b, opts.refine_iters);
        if (c.sigma < global.sigma || (c.sigma == global.sigma && c.mu < global.mu)) global = c;
        if (!have_accepted && c.sigma <= accept_abs) {
            accepted = c;
            have_accepted = true;
            break;  // minima are visited from the top; the first hit is the largest mu
        }
    }

    const Candidate chosen = have_accepted ? accepted : global;

    PencilSolution sol;
    sol.mu = chosen.mu;
    sol.sigma_min = chosen.sigma;
    Vector wr = gp.min_vector(chosen.mu);
    Vector w = Q.size() > 0 ? Vector(Q * wr) : wr;
    sol.status = have_accepted ? SolveStatus::Converged : SolveStatus::NoEigenvalueBelowOne;

    const Index last = w.size() - 1;
    if (std::abs(w[last]) < 1e-8 * w.norm()) {
        sol.status = SolveStatus::DegenerateNormalization;
        sol.w = w;
        sol.s = w.head(last);
        sol.residual = pencil_residual(p, sol.mu, w);
        return sol;
    }
    w *= -1.0 / w[last];
    sol.w = w;
    sol.s = w.head(last);
    sol.residual = pencil_residual(p, sol.mu, w);
    return sol;
}

}  // namespace sfs
