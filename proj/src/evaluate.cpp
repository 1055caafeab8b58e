#include "sfs/evaluate.hpp"

#include "sfs/embed.hpp"
#include "sfs/graph.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace sfs {

std::vector<int> knn_predict(const Matrix& train_coords, const std::vector<int>& train_labels,
                             const Matrix& test_coords, int k) {
    const Index n = train_coords.rows();
    if (n == 0) throw InvalidInput("knn_predict: empty training set");
    if (static_cast<Index>(train_labels.size()) != n)
        throw InvalidInput("knn_predict: label count mismatch");
    if (k < 1 || k > n) throw InvalidInput("knn_predict: need 1 <= k <= n_train");
    if (test_coords.cols() != train_coords.cols())
        throw InvalidInput("knn_predict: dimension mismatch");

    std::vector<int> pred(static_cast<size_t>(test_coords.rows()));
#pragma omp parallel for schedule(static)
    for (Index t = 0; t < test_coords.rows(); ++t) {
        std::vector<Index> idx(static_cast<size_t>(n));
        std::iota(idx.begin(), idx.end(), Index{0});
        std::vector<double> dist(static_cast<size_t>(n));
        for (Index i = 0; i < n; ++i)
            dist[static_cast<size_t>(i)] = (train_coords.row(i) - test_coords.row(t)).squaredNorm();
        std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](Index a, Index b) {
            if (dist[static_cast<size_t>(a)] != dist[static_cast<size_t>(b)])
                return dist[static_cast<size_t>(a)] < dist[static_cast<size_t>(b)];
            return a < b;
        });
        std::map<int, int> votes;
        std::map<int, double> cum;
        for (int j = 0; j < k; ++j) {
            const int lab = train_labels[static_cast<size_t>(idx[static_cast<size_t>(j)])];
            votes[lab]++;
            cum[lab] += std::sqrt(dist[static_cast<size_t>(idx[static_cast<size_t>(j)])]);
        }
        int best = 0;
        for (const auto& [lab, count] : votes) {
            if (best == 0) { best = lab; continue; }
            if (count > votes[best] ||
                (count == votes[best] && cum[lab] < cum[best]) ||
                (count == votes[best] && cum[lab] == cum[best] && lab < best))
                best = lab;
        }
        pred[static_cast<size_t>(t)] = best;
    }
    return pred;
}

namespace {

struct LogisticModel {
    Matrix W;     // K x (d+1), last column is the intercept
    Vector mean;  // training-feature centering applied before the fit
    int K = 0;
    LogisticFitInfo info;
};

LogisticModel fit_logistic(const Matrix& X_raw, const std::vector<int>& labels, int K,
                           double ridge = 1e-6, double tol = 1e-8, int max_iter = 100) {
    const Index n = X_raw.rows();
    const Index d = X_raw.cols();
    const Index p = d + 1;
    // centering keeps the intercept ridge symmetric under reflections
    const Vector mean = X_raw.colwise().mean();
    const Matrix X = X_raw.rowwise() - mean.transpose();
    Matrix Xb(n, p);
    Xb.leftCols(d) = X;
    Xb.col(d).setOnes();

    Matrix W = Matrix::Zero(K, p);
    auto probabilities = [&](const Matrix& Wc) {
        Matrix logits = Xb * Wc.transpose();  // n x K
        Matrix P(n, K);
        for (Index i = 0; i < n; ++i) {
            const double mx = logits.row(i).maxCoeff();
            double sum = 0.0;
            for (int c = 0; c < K; ++c) {
                P(i, c) = std::exp(logits(i, c) - mx);
                sum += P(i, c);
            }
            P.row(i) /= sum;
        }
        return P;
    };
    auto loss = [&](const Matrix& Wc) {
        const Matrix P = probabilities(Wc);
        double nll = 0.0;
        for (Index i = 0; i < n; ++i)
            nll -= std::log(std::max(P(i, labels[static_cast<size_t>(i)] - 1), 1e-300));
        return nll / static_cast<double>(n) + 0.5 * ridge * Wc.squaredNorm();
    };

    double grad_norm = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const Matrix P = probabilities(W);
        Matrix G = Matrix::Zero(K, p);
        for (Index i = 0; i < n; ++i) {
            for (int c = 0; c < K; ++c) {
                const double coef = P(i, c) - (labels[static_cast<size_t>(i)] == c + 1 ? 1.0 : 0.0);
                G.row(c) += coef * Xb.row(i);
            }
        }
        G /= static_cast<double>(n);
        G += ridge * W;
        grad_norm = G.norm();
        if (grad_norm <= tol) return {W, mean, K, {grad_norm, it}};

        // Newton step on the flattened K*p system
        const Index dim = static_cast<Index>(K) * p;
        Matrix H = Matrix::Zero(dim, dim);
        for (Index i = 0; i < n; ++i) {
            for (int c = 0; c < K; ++c) {
                for (int e = 0; e < K; ++e) {
                    const double coef = P(i, c) * ((c == e ? 1.0 : 0.0) - P(i, e));
                    if (coef == 0.0) continue;
                    H.block(c * p, e * p, p, p).noalias() +=
                        (coef / static_cast<double>(n)) * (Xb.row(i).transpose() * Xb.row(i));
                }
            }
        }
        H += ridge * Matrix::Identity(dim, dim);
        Vector g(dim);
        for (int c = 0; c < K; ++c) g.segment(c * p, p) = G.row(c).transpose();
        Vector step = H.ldlt().solve(g);

        const double f0 = loss(W);
        double alpha = 1.0;
        Matrix Wn = W;
        for (int half = 0; half < 40; ++half) {
            for (int c = 0; c < K; ++c)
                Wn.row(c) = W.row(c) - alpha * step.segment(c * p, p).transpose();
            if (loss(Wn) <= f0) break;
            alpha *= 0.5;
        }
        W = Wn;
    }
    const Matrix P = probabilities(W);
    Matrix G = Matrix::Zero(K, p);
    for (Index i = 0; i < n; ++i)
        for (int c = 0; c < K; ++c)
            G.row(c) += (P(i, c) - (labels[static_cast<size_t>(i)] == c + 1 ? 1.0 : 0.0)) * Xb.row(i);
    G /= static_cast<double>(n);
    G += ridge * W;
    if (G.norm() > tol)
        throw NumericalError("logistic_predict: no convergence, final gradient norm " +
                             std::to_string(G.norm()));
    return {W, mean, K, {G.norm(), max_iter}};
}

}  // namespace

std::vector<int> logistic_predict(const Matrix& train_coords, const std::vector<int>& train_labels,
                                  const Matrix& test_coords, LogisticFitInfo* info) {
    if (train_coords.rows() == 0) throw InvalidInput("logistic_predict: empty training set");
    int K = 0;
    for (int lab : train_labels) K = std::max(K, lab);
    if (K < 2) throw InvalidInput("logistic_predict: need at least 2 classes");

    const LogisticModel model = fit_logistic(train_coords, train_labels, K);
    if (info) *info = model.info;
    const Matrix centered = test_coords.rowwise() - model.mean.transpose();
    Matrix Xb(centered.rows(), centered.cols() + 1);
    Xb.leftCols(centered.cols()) = centered;
    Xb.col(centered.cols()).setOnes();
    const Matrix logits = Xb * model.W.transpose();

    std::vector<int> pred(static_cast<size_t>(test_coords.rows()));
    for (Index i = 0; i < logits.rows(); ++i) {
        int best = 1;
        for (int c = 2; c <= K; ++c)
            if (logits(i, c - 1) > logits(i, best - 1)) best = c;
        pred[static_cast<size_t>(i)] = best;
    }
    return pred;
}

namespace {

void check_labels(const std::vector<int>& truth, const std::vector<int>& pred, int K) {
    if (truth.size() != pred.size()) throw InvalidInput("metrics: length mismatch");
    if (truth.empty()) throw InvalidInput("metrics: empty label vectors");
    if (K > 0) {
        for (int lab : truth)
            if (lab < 1 || lab > K) throw InvalidInput("metrics: true label outside {1..K}");
        for (int lab : pred)
            if (lab < 1 || lab > K) throw InvalidInput("metrics: predicted label outside {1..K}");
    }
}

}  // namespace

double oa(const std::vector<int>& truth, const std::vector<int>& pred, int K) {
    check_labels(truth, pred, K);
    size_t hits = 0;
    for (size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == pred[i]) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

double aa(const std::vector<int>& truth, const std::vector<int>& pred, int K) {
    if (K < 1) throw InvalidInput("aa: K >= 1 required");
    check_labels(truth, pred, K);
    std::vector<int> total(static_cast<size_t>(K), 0), correct(static_cast<size_t>(K), 0);
    for (size_t i = 0; i < truth.size(); ++i) {
        total[static_cast<size_t>(truth[i] - 1)]++;
        if (truth[i] == pred[i]) correct[static_cast<size_t>(truth[i] - 1)]++;
    }
    double acc = 0.0;
    int present = 0;
    for (int c = 0; c < K; ++c) {
        if (total[static_cast<size_t>(c)] == 0)
            throw InvalidInput("aa: class " + std::to_string(c + 1) + " absent from true labels");
        acc += static_cast<double>(correct[static_cast<size_t>(c)]) / total[static_cast<size_t>(c)];
        ++present;
    }
    return 100.0 * acc / static_cast<double>(present);
}

std::optional<double> nmi(const std::vector<int>& truth, const std::vector<int>& pred) {
    check_labels(truth, pred, 0);
    const double n = static_cast<double>(truth.size());
    std::map<int, double> ct, cp;
    std::map<std::pair<int, int>, double> joint;
    for (size_t i = 0; i < truth.size(); ++i) {
        ct[truth[i]] += 1.0;
        cp[pred[i]] += 1.0;
        joint[{truth[i], pred[i]}] += 1.0;
    }
    auto entropy = [&](const std::map<int, double>& counts) {
        double h = 0.0;
        for (const auto& [_, c] : counts) {
            const double q = c / n;
            h -= q * std::log(q);
        }
        return h;
    };
    const double ht = entropy(ct);
    const double hp = entropy(cp);
    if (ht == 0.0 || hp == 0.0) return std::nullopt;
    double mi = 0.0;
    for (const auto& [key, c] : joint) {
        const double q = c / n;
        mi += q * std::log(q * n * n / (ct.at(key.first) * cp.at(key.second)));
    }
    return std::clamp(100.0 * mi / std::sqrt(ht * hp), 0.0, 100.0);
}

// ---- pipeline ----

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t state = seed ^ (salt * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    rng::next(state);
    return rng::next(state);
}

Dataset subset(const Dataset& ds, const std::vector<Index>& rows) {
    Dataset out;
    out.X.resize(static_cast<Index>(rows.size()), ds.m());
    out.labels.resize(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Index>(i)) = ds.X.row(rows[i]);
        out.labels[i] = ds.labels[static_cast<size_t>(rows[i])];
    }
    out.num_classes = ds.num_classes;
    out.feature_names = ds.feature_names;
    out.class_names = ds.class_names;
    return out;
}

std::vector<int> classify(const PipelineConfig& cfg, const Matrix& tr, const std::vector<int>& ytr,
                          const Matrix& te) {
    if (cfg.classifier == Classifier::Knn) return knn_predict(tr, ytr, te, cfg.knn_k);
    return logistic_predict(tr, ytr, te);
}

std::vector<int> valid_ell_grid(const PipelineConfig& cfg, Index n_train, Index n_total, Index m) {
    const Index search_max = m < n_train ? m : n_train;
    const Index hard_max = n_total - 2;  // spectral_embed needs n_total > ell + 1
    std::vector<int> grid;
    if (cfg.fixed_ell) {
        grid.push_back(*cfg.fixed_ell);
    } else {
        for (int e : cfg.ell_grid)
            if (e >= 1 && e <= search_max && e <= hard_max) grid.push_back(e);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
    if (grid.empty()) throw InvalidInput("run_pipeline: empty ell grid after range capping");
    return grid;
}

}  // namespace

FactorResult learn_factors(const Matrix& X, const std::vector<int>& labels, int K,
                           const PipelineConfig& cfg) {
    FactorResult out;
    if (cfg.force_identity) {
        out.scaling.integrated = Vector::Ones(X.cols());
        out.scaling.method = cfg.integration;
        return out;
    }

    const Vector sigma_euclid = local_scales(X, cfg.k_local);
    const Vector ones = Vector::Ones(X.cols());
    const Vector sigma_scaled = local_scales(X, cfg.k_local, ones);
    const SimilarityGraph unscaled = similarity_matrix(X, ones, sigma_scaled);

    SplitScheme scheme = make_splits(labels, K, cfg.split_mode);
    std::vector<PencilPair> pencils;
    for (auto& split : scheme.splits) {
        split.set_balance(balance_param(split, unscaled));
        pencils.push_back(assemble_pencil(X, split.v, sigma_euclid));
    }

    auto handle = [&](const PencilSolution& sol, int split_index) -> Vector {
        SplitDiagnostics diag{sol.mu, sol.residual, sol.sigma_min, sol.status};
        out.splits.push_back(diag);
        if (sol.status == SolveStatus::DegenerateNormalization)
            throw NumericalError("split " + std::to_string(split_index + 1) +
                                 ": degenerate eigenvector normalization");
        if (sol.status == SolveStatus::NoEigenvalueBelowOne &&
            cfg.on_no_eigenvalue == NoEigenvaluePolicy::Abort)
            throw NumericalError("split " + std::to_string(split_index + 1) +
                                 ": no eigenvalue below one (sigma_min " +
                                 std::to_string(sol.sigma_min) + ")");
        return sol.s;
    };

    std::vector<Vector> factors;
    if (cfg.stacked) {
        const PencilPair joint = stack_pencils(pencils);
        factors.push_back(handle(solve_pencil(joint, cfg.solver), 0));
    } else {
        for (size_t p = 0; p < pencils.size(); ++p)
            factors.push_back(handle(solve_pencil(pencils[p], cfg.solver), static_cast<int>(p)));
    }

    out.scaling.candidates = candidates_from_factors(factors);
    out.scaling.method = cfg.integration;
    out.scaling.integrated = integrate(out.scaling.candidates, cfg.integration, &out.scaling.pca_clamped);
    return out;
}

namespace {

int pick_ell_by_inner_cv(const Dataset& train_ds, const std::vector<int>& grid,
                         const PipelineConfig& cfg, std::uint64_t inner_seed) {
    if (grid.size() == 1) return grid.front();
    const int ell_max = *std::max_element(grid.begin(), grid.end());
    const FoldPlan plan = kfold_split(train_ds, cfg.inner_folds, inner_seed);

    std::map<int, double> mean_oa;
    for (int e : grid) mean_oa[e] = 0.0;
    for (int g = 1; g <= cfg.inner_folds; ++g) {
        const auto tr_idx = plan.train_indices(g);
        const auto va_idx = plan.test_indices(g);
        const Dataset tr = subset(train_ds, tr_idx);
        const Dataset va = subset(train_ds, va_idx);

        const FactorResult fr = learn_factors(tr.X, tr.labels, train_ds.num_classes, cfg);
        const Matrix Z = apply_scaling(tr.X, va.X, fr.scaling.integrated);
        const Embedding emb = spectral_embed(Z, ell_max, cfg.k_local, cfg.sparsify_k, tr.n());
        for (int e : grid) {
            const Matrix trc = emb.U.topRows(tr.n()).leftCols(e);
            const Matrix vac = emb.U.bottomRows(va.n()).leftCols(e);
            const auto pred = classify(cfg, trc, tr.labels, vac);
            mean_oa[e] += oa(va.labels, pred, train_ds.num_classes);
        }
    }
    int best = grid.front();
    for (int e : grid)
        if (mean_oa[e] > mean_oa[best] + 1e-12) best = e;  // ties keep the smaller ell
    return best;
}

}  // namespace

EvalReport run_pipeline(const Dataset& ds, const PipelineConfig& cfg) {
    ds.validate();
    if (cfg.outer_folds < 2 || cfg.inner_folds < 2)
        throw InvalidInput("run_pipeline: need at least 2 outer and inner folds");

    const auto t_start = std::chrono::steady_clock::now();
    const FoldPlan outer = kfold_split(ds, cfg.outer_folds, cfg.seed);

    EvalReport report;
    report.seed = cfg.seed;

    for (int f = 1; f <= cfg.outer_folds; ++f) {
        const auto t_fold = std::chrono::steady_clock::now();
        FoldResult fr;
        fr.fold = f;
        try {
            const auto tr_idx = outer.train_indices(f);
            const auto te_idx = outer.test_indices(f);
            const Dataset tr = subset(ds, tr_idx);
            const Dataset te = subset(ds, te_idx);

            const auto grid = valid_ell_grid(cfg, tr.n(), ds.n(), ds.m());
            if (f == 1) report.ell_grid_used = grid;
            fr.chosen_ell = pick_ell_by_inner_cv(tr, grid, cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(f)));

            const FactorResult fres = learn_factors(tr.X, tr.labels, ds.num_classes, cfg);
            fr.integrated_factors = fres.scaling.integrated;
            fr.splits = fres.splits;

            const Matrix Z = apply_scaling(tr.X, te.X, fres.scaling.integrated);
            const Embedding emb = spectral_embed(Z, fr.chosen_ell, cfg.k_local, cfg.sparsify_k, tr.n());
            const auto pred = classify(cfg, emb.U.topRows(tr.n()), tr.labels, emb.U.bottomRows(te.n()));

            fr.oa = oa(te.labels, pred, ds.num_classes);
            fr.aa = aa(te.labels, pred, ds.num_classes);
            fr.nmi = nmi(te.labels, pred);
        } catch (const NumericalError& e) {
            fr.error = e.what();
        }
        fr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_fold).count();
        report.folds.push_back(std::move(fr));
    }

    // aggregate over completed folds; sample standard deviation
    std::vector<const FoldResult*> done;
    for (const auto& f : report.folds)
        if (!f.error) done.push_back(&f);
    if (done.empty())
        throw NumericalError("run_pipeline: every fold aborted; first error: " +
                             *report.folds.front().error);
    auto mean_std = [&](auto getter) {
        double mean = 0.0;
        for (auto* f : done) mean += getter(*f);
        mean /= static_cast<double>(done.size());
        double var = 0.0;
        for (auto* f : done) var += (getter(*f) - mean) * (getter(*f) - mean);
        const double sd = done.size() > 1 ? std::sqrt(var / static_cast<double>(done.size() - 1)) : 0.0;
        return std::make_pair(mean, sd);
    };
    std::tie(report.oa_mean, report.oa_std) = mean_std([](const FoldResult& f) { return f.oa; });
    std::tie(report.aa_mean, report.aa_std) = mean_std([](const FoldResult& f) { return f.aa; });
    const bool nmi_defined = std::all_of(done.begin(), done.end(),
                                         [](const FoldResult* f) { return f->nmi.has_value(); });
    if (nmi_defined) {
        auto [m, s] = mean_std([](const FoldResult& f) { return *f.nmi; });
        report.nmi_mean = m;
        report.nmi_std = s;
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

}  // namespace sfs
