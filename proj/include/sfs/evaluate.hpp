#pragma once

#include "sfs/dataset.hpp"
#include "sfs/eigensolve.hpp"
#include "sfs/pencil.hpp"
#include "sfs/scaling.hpp"
#include "sfs/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sfs {

// ---- classifiers on embedded coordinates ----

/// Majority label among the k Euclidean nearest training rows; ties go to the
/// class with the smaller cumulative distance, then the smaller class id.
std::vector<int> knn_predict(const Matrix& train_coords, const std::vector<int>& train_labels,
                             const Matrix& test_coords, int k);

struct LogisticFitInfo {
    double gradient_norm = 0.0;  // of the ridged loss at the accepted optimum
    int iterations = 0;
};

/// Multinomial logistic regression (damped Newton, gradient tolerance 1e-8,
/// L2 ridge 1e-6), argmax class probability. Deterministic.
std::vector<int> logistic_predict(const Matrix& train_coords, const std::vector<int>& train_labels,
                                  const Matrix& test_coords, LogisticFitInfo* info = nullptr);

// ---- metrics (percent) ----

double oa(const std::vector<int>& truth, const std::vector<int>& pred, int K = 0);
double aa(const std::vector<int>& truth, const std::vector<int>& pred, int K);

/// Normalized mutual information with natural-log entropies and the geometric
/// mean denominator; empty when either marginal entropy is zero.
std::optional<double> nmi(const std::vector<int>& truth, const std::vector<int>& pred);

// ---- pipeline ----

enum class Classifier { Knn, Logistic };
enum class NoEigenvaluePolicy { MinPerturb, Abort };

struct PipelineConfig {
    SplitMode split_mode = SplitMode::OnePerClass;
    IntegrationMethod integration = IntegrationMethod::Rms;
    int k_local = 7;
    std::optional<int> sparsify_k = 7;
    std::optional<int> fixed_ell;            // bypasses the inner CV when set
    std::vector<int> ell_grid = {1, 2, 3, 5, 8, 13, 21, 34};
    Classifier classifier = Classifier::Knn;
    int knn_k = 1;
    int outer_folds = 5;
    int inner_folds = 4;
    std::uint64_t seed = 1;
    PencilSolveOptions solver;
    NoEigenvaluePolicy on_no_eigenvalue = NoEigenvaluePolicy::MinPerturb;
    bool stacked = false;         // solve the r pencils jointly as one stacked system
    bool force_identity = false;  // skip factor learning, S = I
};

/// Per-split solver diagnostics of one factor-learning pass.
struct SplitDiagnostics {
    double mu = 0.0;
    double residual = 0.0;
    double sigma_min = 0.0;
    SolveStatus status = SolveStatus::Converged;
};

/// Learned factors on one training set.
struct FactorResult {
    ScalingResult scaling;
    std::vector<SplitDiagnostics> splits;
};

/// Learn per-split candidate factors on (X, labels) and integrate them.
FactorResult learn_factors(const Matrix& X, const std::vector<int>& labels, int K,
                           const PipelineConfig& cfg);

struct FoldResult {
    int fold = 0;
    double oa = 0.0;
    double aa = 0.0;
    std::optional<double> nmi;
    int chosen_ell = 0;
    Vector integrated_factors;
    std::vector<SplitDiagnostics> splits;
    double seconds = 0.0;
    std::optional<std::string> error;  // set when the fold aborted
};

struct EvalReport {
    std::vector<FoldResult> folds;
    double oa_mean = 0.0, oa_std = 0.0;
    double aa_mean = 0.0, aa_std = 0.0;
    std::optional<double> nmi_mean, nmi_std;
    std::vector<int> ell_grid_used;
    double seconds = 0.0;
    std::uint64_t seed = 0;
};

// Outer stratified CV around the full method: per fold an inner CV on the
// training portion picks ell by mean inner OA (ties to the smaller ell), then
// factors are learned on the whole training portion, train + test rows are
// embedded together and the test rows classified.
EvalReport run_pipeline(const Dataset& ds, const PipelineConfig& cfg);

}  // namespace sfs
