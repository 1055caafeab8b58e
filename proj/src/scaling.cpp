#include "sfs/scaling.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sfs {

IntegrationMethod integration_from_string(const std::string& name) {
    if (name == "pca") return IntegrationMethod::Pca;
    if (name == "arithmetic") return IntegrationMethod::Arithmetic;
    if (name == "geometric") return IntegrationMethod::Geometric;
    if (name == "rms") return IntegrationMethod::Rms;
    if (name == "harmonic") return IntegrationMethod::Harmonic;
    throw InvalidInput("unknown integration method '" + name + "'");
}

std::string to_string(IntegrationMethod m) {
    switch (m) {
        case IntegrationMethod::Pca: return "pca";
        case IntegrationMethod::Arithmetic: return "arithmetic";
        case IntegrationMethod::Geometric: return "geometric";
        case IntegrationMethod::Rms: return "rms";
        case IntegrationMethod::Harmonic: return "harmonic";
    }
    return "?";
}

Matrix candidates_from_factors(const std::vector<Vector>& per_split_s) {
    if (per_split_s.empty()) throw InvalidInput("candidates_from_factors: no factor vectors");
    const Index m = per_split_s.front().size();
    Matrix c(m, static_cast<Index>(per_split_s.size()));
    for (size_t p = 0; p < per_split_s.size(); ++p) {
        if (per_split_s[p].size() != m)
            throw InvalidInput("candidates_from_factors: inconsistent factor lengths");
        for (Index i = 0; i < m; ++i)
            c(i, static_cast<Index>(p)) = std::sqrt(std::abs(per_split_s[p][i]));
    }
    return c;
}

Vector integrate(const Matrix& candidates, IntegrationMethod method, int* pca_clamped) {
    const Index m = candidates.rows();
    const Index r = candidates.cols();
    if (m < 1 || r < 1) throw InvalidInput("integrate: empty candidate matrix");
    if (!candidates.allFinite()) throw InvalidInput("integrate: non-finite candidate factor");
    if (pca_clamped) *pca_clamped = 0;

    Vector out(m);
    switch (method) {
        case IntegrationMethod::Arithmetic:
            out = candidates.rowwise().mean();
            break;
        case IntegrationMethod::Rms:
            out = (candidates.array().square().rowwise().mean()).sqrt();
            break;
        case IntegrationMethod::Geometric:
            for (Index i = 0; i < m; ++i) {
                bool zero = false;
                double logsum = 0.0;
                for (Index p = 0; p < r; ++p) {
                    const double c = candidates(i, p);
                    if (c < 0.0) throw InvalidInput("integrate: negative candidate factor");
                    if (c == 0.0) { zero = true; break; }
                    logsum += std::log(c);
                }
                out[i] = zero ? 0.0 : std::exp(logsum / static_cast<double>(r));
            }
            break;
        case IntegrationMethod::Harmonic:
            for (Index i = 0; i < m; ++i) {
                double inv = 0.0;
                for (Index p = 0; p < r; ++p) {
                    const double c = candidates(i, p);
                    if (c == 0.0) throw InvalidInput("integrate: zero candidate factor");
                    inv += 1.0 / c;
                }
                out[i] = static_cast<double>(r) / inv;
            }
            break;
        case IntegrationMethod::Pca: {
            // M = sum_i (s_i - mean)(s_i - mean)^T over candidate rows, top
            // eigenvector phi; result s_i^{1/2} = s_i . phi, sign fixed so the
            // total is nonnegative, then clamped at zero from below.
            const Vector mean = candidates.colwise().mean();
            Matrix centered = candidates.rowwise() - mean.transpose();
            Matrix M = centered.transpose() * centered;
            Eigen::SelfAdjointEigenSolver<Matrix> es(M);
            Vector phi = es.eigenvectors().col(r - 1);
            Vector proj = candidates * phi;
            if (proj.sum() < 0.0) proj = -proj;
            for (Index i = 0; i < m; ++i) {
                if (proj[i] < 0.0) {
                    proj[i] = 0.0;
                    if (pca_clamped) ++(*pca_clamped);
                }
            }
            out = proj;
            break;
        }
    }
    return out;
}

std::pair<Matrix, Matrix> to_scaling_matrix(const Vector& integrated) {
    for (Index i = 0; i < integrated.size(); ++i)
        if (integrated[i] < 0.0) throw InvalidInput("to_scaling_matrix: negative entry");
    Matrix s_half = Matrix::Zero(integrated.size(), integrated.size());
    s_half.diagonal() = integrated;
    Matrix s = Matrix::Zero(integrated.size(), integrated.size());
    s.diagonal() = integrated.array().square();
    return {std::move(s), std::move(s_half)};
}

}  // namespace sfs
