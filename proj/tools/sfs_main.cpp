// sfs: spectral feature scaling for multiclass classification.
// Subcommands: generate (synthetic rings CSV), run (cross-validated
// evaluation, JSON report), scale (factor extraction only).

#include "sfs/dataset.hpp"
#include "sfs/embed.hpp"
#include "sfs/evaluate.hpp"
#include "sfs/kernels.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using json = nlohmann::ordered_json;

namespace {

struct DatasetSpec {
    std::string source = "synthetic";  // "csv" | "synthetic"
    std::string path;
    std::string label_column = "label";
    sfs::RingConfig rings;
};

struct CliConfig {
    DatasetSpec dataset;
    std::string split_mode = "one_per_class";
    std::string integration = "rms";
    int k_local = 7;
    int sparsify_k = 7;  // 0 disables sparsification
    int fixed_ell = 0;   // 0 means CV over the grid
    std::vector<int> ell_grid = {1, 2, 3, 5, 8, 13, 21, 34};
    std::string classifier = "knn";
    int knn_k = 1;
    int outer_folds = 5;
    int inner_folds = 4;
    std::uint64_t seed = 1;
    sfs::PencilSolveOptions solver;
    std::string on_no_eigenvalue = "min_perturb";
    bool stacked = false;
    bool force_identity = false;
    bool standardize = false;
    int threads = 0;
};

json config_to_json(const CliConfig& c) {
    json j;
    j["dataset"] = {{"source", c.dataset.source},
                    {"path", c.dataset.path},
                    {"label_column", c.dataset.label_column},
                    {"rings",
                     {{"samples_per_class", c.dataset.rings.samples_per_class},
                      {"num_classes", c.dataset.rings.num_classes},
                      {"num_features", c.dataset.rings.num_features},
                      {"noise_variance", c.dataset.rings.noise_variance},
                      {"seed", c.dataset.rings.seed}}}};
    j["split_mode"] = c.split_mode;
    j["integration"] = c.integration;
    j["k_local"] = c.k_local;
    j["sparsify_k"] = c.sparsify_k;
    j["ell"] = c.fixed_ell > 0 ? json{{"mode", "fixed"}, {"value", c.fixed_ell}}
                               : json{{"mode", "cv"}, {"grid", c.ell_grid}};
    j["classifier"] = {{"kind", c.classifier}, {"k", c.knn_k}};
    j["cv"] = {{"outer_folds", c.outer_folds}, {"inner_folds", c.inner_folds}};
    j["seed"] = c.seed;
    j["solver"] = {{"target", c.solver.target},
                   {"accept_rel_tol", c.solver.accept_rel_tol},
                   {"grid_points", c.solver.grid_points},
                   {"window_below", c.solver.window_below},
                   {"edge_offset", c.solver.edge_offset},
                   {"refine_iters", c.solver.refine_iters},
                   {"on_no_eigenvalue", c.on_no_eigenvalue}};
    j["stacked"] = c.stacked;
    j["force_identity"] = c.force_identity;
    j["standardize"] = c.standardize;
    j["threads"] = c.threads;
    return j;
}

void config_from_json(const json& j, CliConfig& c) {
    if (j.contains("dataset")) {
        const auto& d = j["dataset"];
        c.dataset.source = d.value("source", c.dataset.source);
        c.dataset.path = d.value("path", c.dataset.path);
        c.dataset.label_column = d.value("label_column", c.dataset.label_column);
        if (d.contains("rings")) {
            const auto& r = d["rings"];
            c.dataset.rings.samples_per_class = r.value("samples_per_class", c.dataset.rings.samples_per_class);
            c.dataset.rings.num_classes = r.value("num_classes", c.dataset.rings.num_classes);
            c.dataset.rings.num_features = r.value("num_features", c.dataset.rings.num_features);
            c.dataset.rings.noise_variance = r.value("noise_variance", c.dataset.rings.noise_variance);
            c.dataset.rings.seed = r.value("seed", c.dataset.rings.seed);
        }
    }
    c.split_mode = j.value("split_mode", c.split_mode);
    c.integration = j.value("integration", c.integration);
    c.k_local = j.value("k_local", c.k_local);
    c.sparsify_k = j.value("sparsify_k", c.sparsify_k);
    if (j.contains("ell")) {
        const auto& e = j["ell"];
        if (e.value("mode", "cv") == "fixed") {
            c.fixed_ell = e.value("value", 0);
        } else {
            c.fixed_ell = 0;
            if (e.contains("grid")) c.ell_grid = e["grid"].get<std::vector<int>>();
        }
    }
    if (j.contains("classifier")) {
        c.classifier = j["classifier"].value("kind", c.classifier);
        c.knn_k = j["classifier"].value("k", c.knn_k);
    }
    if (j.contains("cv")) {
        c.outer_folds = j["cv"].value("outer_folds", c.outer_folds);
        c.inner_folds = j["cv"].value("inner_folds", c.inner_folds);
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        c.solver.target = s.value("target", c.solver.target);
        c.solver.accept_rel_tol = s.value("accept_rel_tol", c.solver.accept_rel_tol);
        c.solver.grid_points = s.value("grid_points", c.solver.grid_points);
        c.solver.window_below = s.value("window_below", c.solver.window_below);
        c.solver.edge_offset = s.value("edge_offset", c.solver.edge_offset);
        c.solver.refine_iters = s.value("refine_iters", c.solver.refine_iters);
        c.on_no_eigenvalue = s.value("on_no_eigenvalue", c.on_no_eigenvalue);
    }
    c.stacked = j.value("stacked", c.stacked);
    c.force_identity = j.value("force_identity", c.force_identity);
    c.standardize = j.value("standardize", c.standardize);
    c.threads = j.value("threads", c.threads);
}

sfs::PipelineConfig to_pipeline_config(const CliConfig& c) {
    sfs::PipelineConfig p;
    if (c.split_mode == "one_per_class") p.split_mode = sfs::SplitMode::OnePerClass;
    else if (c.split_mode == "binary_code") p.split_mode = sfs::SplitMode::BinaryCode;
    else throw sfs::InvalidInput("unknown split mode '" + c.split_mode + "'");
    p.integration = sfs::integration_from_string(c.integration);
    p.k_local = c.k_local;
    p.sparsify_k = c.sparsify_k > 0 ? std::optional<int>(c.sparsify_k) : std::nullopt;
    if (c.fixed_ell > 0) p.fixed_ell = c.fixed_ell;
    p.ell_grid = c.ell_grid;
    if (c.classifier == "knn") p.classifier = sfs::Classifier::Knn;
    else if (c.classifier == "logistic") p.classifier = sfs::Classifier::Logistic;
    else throw sfs::InvalidInput("unknown classifier '" + c.classifier + "'");
    p.knn_k = c.knn_k;
    p.outer_folds = c.outer_folds;
    p.inner_folds = c.inner_folds;
    p.seed = c.seed;
    p.solver = c.solver;
    if (c.on_no_eigenvalue == "min_perturb") p.on_no_eigenvalue = sfs::NoEigenvaluePolicy::MinPerturb;
    else if (c.on_no_eigenvalue == "abort") p.on_no_eigenvalue = sfs::NoEigenvaluePolicy::Abort;
    else throw sfs::InvalidInput("unknown on_no_eigenvalue policy '" + c.on_no_eigenvalue + "'");
    p.stacked = c.stacked;
    p.force_identity = c.force_identity;
    return p;
}

void standardize_in_place(sfs::Dataset& ds) {
    for (sfs::Index j = 0; j < ds.m(); ++j) {
        const double mean = ds.X.col(j).mean();
        const double sd = std::sqrt((ds.X.col(j).array() - mean).square().sum() /
                                    static_cast<double>(ds.n() - 1));
        ds.X.col(j).array() -= mean;
        if (sd > 0.0) ds.X.col(j) /= sd;
    }
}

sfs::Dataset load_dataset(const CliConfig& c) {
    sfs::Dataset ds;
    if (c.dataset.source == "csv") {
        if (c.dataset.path.empty()) throw sfs::InvalidInput("no input CSV path given");
        ds = sfs::load_csv(c.dataset.path, c.dataset.label_column);
    } else if (c.dataset.source == "synthetic") {
        ds = sfs::generate_rings(c.dataset.rings);
    } else {
        throw sfs::InvalidInput("unknown dataset source '" + c.dataset.source + "'");
    }
    if (c.standardize) standardize_in_place(ds);
    return ds;
}

std::string status_name(sfs::SolveStatus s) {
    switch (s) {
        case sfs::SolveStatus::Converged: return "converged";
        case sfs::SolveStatus::NoEigenvalueBelowOne: return "no_eigenvalue_below_one";
        case sfs::SolveStatus::DegenerateNormalization: return "degenerate_normalization";
    }
    return "?";
}

json report_to_json(const sfs::EvalReport& rep, const CliConfig& cfg) {
    json j;
    j["schema_version"] = 1;
    j["oa_mean"] = rep.oa_mean;
    j["oa_std"] = rep.oa_std;
    j["aa_mean"] = rep.aa_mean;
    j["aa_std"] = rep.aa_std;
    j["nmi_mean"] = rep.nmi_mean ? json(*rep.nmi_mean) : json(nullptr);
    j["nmi_std"] = rep.nmi_std ? json(*rep.nmi_std) : json(nullptr);
    j["ell_grid"] = rep.ell_grid_used;
    json folds = json::array();
    for (const auto& f : rep.folds) {
        json jf;
        jf["fold"] = f.fold;
        if (f.error) {
            jf["error"] = *f.error;
        } else {
            jf["oa"] = f.oa;
            jf["aa"] = f.aa;
            jf["nmi"] = f.nmi ? json(*f.nmi) : json(nullptr);
            jf["chosen_ell"] = f.chosen_ell;
            jf["integrated_factors"] = std::vector<double>(
                f.integrated_factors.data(), f.integrated_factors.data() + f.integrated_factors.size());
            json splits = json::array();
            for (const auto& s : f.splits)
                splits.push_back({{"mu", s.mu},
                                  {"residual", s.residual},
                                  {"sigma_min", s.sigma_min},
                                  {"status", status_name(s.status)}});
            jf["splits"] = splits;
        }
        jf["seconds"] = f.seconds;
        folds.push_back(jf);
    }
    j["folds"] = folds;
    j["config_echo"] = config_to_json(cfg);
    j["seed"] = rep.seed;
    j["timing"] = {{"total_seconds", rep.seconds}};
    return j;
}

void write_json(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << std::endl;
        return;
    }
    std::ofstream out(path);
    if (!out) throw sfs::InvalidInput("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

// Fig. 3/4-style scatter data for one fold: every row of the fold-1 embedding
// with true label, prediction and train/test flag.
void emit_plot_files(const sfs::Dataset& ds, const CliConfig& cfg, const sfs::EvalReport& rep,
                     const std::string& prefix) {
    const sfs::PipelineConfig pcfg = to_pipeline_config(cfg);
    const sfs::FoldPlan plan = sfs::kfold_split(ds, pcfg.outer_folds, pcfg.seed);
    const sfs::FoldResult* fold1 = nullptr;
    for (const auto& f : rep.folds)
        if (!f.error) { fold1 = &f; break; }
    if (!fold1) return;

    const auto tr_idx = plan.train_indices(fold1->fold);
    const auto te_idx = plan.test_indices(fold1->fold);
    sfs::Matrix Xtr(static_cast<sfs::Index>(tr_idx.size()), ds.m());
    sfs::Matrix Xte(static_cast<sfs::Index>(te_idx.size()), ds.m());
    std::vector<int> ytr, yte;
    for (size_t i = 0; i < tr_idx.size(); ++i) {
        Xtr.row(static_cast<sfs::Index>(i)) = ds.X.row(tr_idx[i]);
        ytr.push_back(ds.labels[static_cast<size_t>(tr_idx[i])]);
    }
    for (size_t i = 0; i < te_idx.size(); ++i) {
        Xte.row(static_cast<sfs::Index>(i)) = ds.X.row(te_idx[i]);
        yte.push_back(ds.labels[static_cast<size_t>(te_idx[i])]);
    }
    const sfs::FactorResult fr = sfs::learn_factors(Xtr, ytr, ds.num_classes, pcfg);
    const sfs::Matrix Z = sfs::apply_scaling(Xtr, Xte, fr.scaling.integrated);
    const sfs::Embedding emb =
        sfs::spectral_embed(Z, fold1->chosen_ell, pcfg.k_local, pcfg.sparsify_k, Xtr.rows());
    std::vector<int> pred_tr, pred_te;
    if (pcfg.classifier == sfs::Classifier::Knn) {
        pred_tr = sfs::knn_predict(emb.U.topRows(Xtr.rows()), ytr, emb.U.topRows(Xtr.rows()), pcfg.knn_k);
        pred_te = sfs::knn_predict(emb.U.topRows(Xtr.rows()), ytr, emb.U.bottomRows(Xte.rows()), pcfg.knn_k);
    } else {
        pred_tr = sfs::logistic_predict(emb.U.topRows(Xtr.rows()), ytr, emb.U.topRows(Xtr.rows()));
        pred_te = sfs::logistic_predict(emb.U.topRows(Xtr.rows()), ytr, emb.U.bottomRows(Xte.rows()));
    }

    std::ofstream sc(prefix + "_embedding.csv");
    if (!sc) throw sfs::InvalidInput("cannot write '" + prefix + "_embedding.csv'");
    sc.precision(17);
    sc << "row_id";
    for (int a = 1; a <= emb.ell; ++a) sc << ",u" << a;
    sc << ",true_label,predicted_label,set\n";
    for (sfs::Index i = 0; i < emb.U.rows(); ++i) {
        const bool is_train = i < Xtr.rows();
        const sfs::Index orig = is_train ? tr_idx[static_cast<size_t>(i)]
                                         : te_idx[static_cast<size_t>(i - Xtr.rows())];
        sc << orig;
        for (int a = 0; a < emb.ell; ++a) sc << ',' << emb.U(i, a);
        const int truth = is_train ? ytr[static_cast<size_t>(i)]
                                   : yte[static_cast<size_t>(i - Xtr.rows())];
        const int pred = is_train ? pred_tr[static_cast<size_t>(i)]
                                  : pred_te[static_cast<size_t>(i - Xtr.rows())];
        sc << ',' << truth << ',' << pred << ',' << (is_train ? "train" : "test") << '\n';
    }

    std::ofstream fa(prefix + "_factors.csv");
    if (!fa) throw sfs::InvalidInput("cannot write '" + prefix + "_factors.csv'");
    fa.precision(17);
    fa << "feature";
    for (const auto& f : rep.folds)
        if (!f.error) fa << ",fold" << f.fold;
    fa << ",mean_abs\n";
    for (sfs::Index j = 0; j < ds.m(); ++j) {
        fa << (j + 1);
        double acc = 0.0;
        int cnt = 0;
        for (const auto& f : rep.folds) {
            if (f.error) continue;
            fa << ',' << std::abs(f.integrated_factors[j]);
            acc += std::abs(f.integrated_factors[j]);
            ++cnt;
        }
        fa << ',' << (cnt > 0 ? acc / cnt : 0.0) << '\n';
    }
}

int cmd_generate(const CliConfig& cfg, const std::string& output) {
    const sfs::Dataset ds = sfs::generate_rings(cfg.dataset.rings);
    sfs::save_csv(ds, output, cfg.dataset.label_column);
    std::cout << "wrote " << output << ": " << ds.n() << " samples, " << ds.m()
              << " features, " << ds.num_classes << " classes (noise variance "
              << cfg.dataset.rings.noise_variance << ", seed " << cfg.dataset.rings.seed << ")\n";
    return 0;
}

int cmd_run(CliConfig cfg, const std::string& output, const std::string& plots_prefix,
            const std::string& sweep_spec, const std::string& sweep_output) {
    sfs::set_threads(cfg.threads);

    if (!sweep_spec.empty()) {
        if (cfg.dataset.source != "synthetic")
            throw sfs::InvalidInput("--variance-sweep requires the synthetic dataset");
        double lo = 0, hi = 0, step = 1;
        char c1 = 0, c2 = 0;
        std::istringstream ss(sweep_spec);
        if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
            throw sfs::InvalidInput("--variance-sweep expects LO:HI:STEP");
        std::ofstream out(sweep_output);
        if (!out) throw sfs::InvalidInput("cannot write '" + sweep_output + "'");
        out.precision(17);
        out << "variance,oa_mean,aa_mean,nmi_mean\n";
        for (double v = lo; v <= hi + 1e-12; v += step) {
            CliConfig c = cfg;
            c.dataset.rings.noise_variance = v;
            const sfs::Dataset ds = load_dataset(c);
            const sfs::EvalReport rep = sfs::run_pipeline(ds, to_pipeline_config(c));
            out << v << ',' << rep.oa_mean << ',' << rep.aa_mean << ','
                << (rep.nmi_mean ? std::to_string(*rep.nmi_mean) : "nan") << '\n';
            std::cout << "variance " << v << ": OA " << rep.oa_mean << " AA " << rep.aa_mean << '\n';
        }
        std::cout << "wrote " << sweep_output << '\n';
        return 0;
    }

    const sfs::Dataset ds = load_dataset(cfg);
    const sfs::EvalReport rep = sfs::run_pipeline(ds, to_pipeline_config(cfg));
    write_json(report_to_json(rep, cfg), output);
    if (!plots_prefix.empty()) emit_plot_files(ds, cfg, rep, plots_prefix);
    std::cerr << "OA " << rep.oa_mean << " +- " << rep.oa_std << ", AA " << rep.aa_mean
              << " +- " << rep.aa_std << '\n';
    return 0;
}

int cmd_scale(CliConfig cfg, const std::string& output) {
    sfs::set_threads(cfg.threads);
    const sfs::Dataset ds = load_dataset(cfg);
    const sfs::PipelineConfig pcfg = to_pipeline_config(cfg);
    const sfs::FactorResult fr = sfs::learn_factors(ds.X, ds.labels, ds.num_classes, pcfg);

    json j;
    j["schema_version"] = 1;
    j["integration"] = cfg.integration;
    j["num_splits"] = fr.scaling.candidates.cols();
    json splits = json::array();
    for (size_t p = 0; p < fr.splits.size(); ++p)
        splits.push_back({{"split", p + 1},
                          {"mu", fr.splits[p].mu},
                          {"residual", fr.splits[p].residual},
                          {"sigma_min", fr.splits[p].sigma_min},
                          {"status", status_name(fr.splits[p].status)}});
    j["splits"] = splits;
    json cand = json::array();
    for (sfs::Index i = 0; i < fr.scaling.candidates.rows(); ++i) {
        json row = json::array();
        for (sfs::Index p = 0; p < fr.scaling.candidates.cols(); ++p)
            row.push_back(fr.scaling.candidates(i, p));
        cand.push_back(row);
    }
    j["candidates"] = cand;
    j["integrated"] = std::vector<double>(fr.scaling.integrated.data(),
                                          fr.scaling.integrated.data() + fr.scaling.integrated.size());
    j["pca_clamped"] = fr.scaling.pca_clamped;
    j["config_echo"] = config_to_json(cfg);
    write_json(j, output);
    return 0;
}

void add_dataset_flags(CLI::App* app, CliConfig& cfg, bool* synthetic_flag) {
    app->add_option("-i,--input", cfg.dataset.path, "input CSV path (sets source=csv)");
    app->add_option("--label-column", cfg.dataset.label_column, "label column name");
    if (synthetic_flag)
        app->add_flag("--synthetic", *synthetic_flag, "use the synthetic ring dataset");
    app->add_option("--samples", cfg.dataset.rings.samples_per_class, "ring samples per class");
    app->add_option("--classes", cfg.dataset.rings.num_classes, "ring class count");
    app->add_option("--features", cfg.dataset.rings.num_features, "ring feature count");
    app->add_option("--noise-variance", cfg.dataset.rings.noise_variance, "ring noise variance");
    app->add_option("--data-seed", cfg.dataset.rings.seed, "ring generator seed");
}

void add_method_flags(CLI::App* app, CliConfig& cfg) {
    app->add_option("--split-mode", cfg.split_mode, "one_per_class | binary_code");
    app->add_option("--integration", cfg.integration, "pca|arithmetic|geometric|rms|harmonic");
    app->add_option("--k-local", cfg.k_local, "local-scale neighbor index");
    app->add_option("--sparsify-k", cfg.sparsify_k, "kNN sparsification of the embedding graph (0 = off)");
    app->add_option("--seed", cfg.seed, "cross-validation seed");
    app->add_option("--threads", cfg.threads, "bound internal parallelism (0 = runtime default)");
    app->add_option("--solver-tol", cfg.solver.accept_rel_tol, "relative sigma_min acceptance threshold");
    app->add_option("--solver-grid", cfg.solver.grid_points, "mu grid points");
    app->add_option("--on-no-eigenvalue", cfg.on_no_eigenvalue, "min_perturb | abort");
    app->add_flag("--stacked", cfg.stacked, "solve the stacked pencil instead of per-split");
    app->add_flag("--force-identity", cfg.force_identity, "skip factor learning (S = I)");
    app->add_flag("--standardize", cfg.standardize, "standardize features before the run");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral feature scaling (SFS) for multiclass classification"};
    app.require_subcommand(1);

    CliConfig cfg;
    std::string output;
    std::string config_path;
    std::string plots_prefix;
    std::string sweep_spec;
    std::string sweep_output = "variance_sweep.csv";
    bool synthetic_flag = false;

    auto* gen = app.add_subcommand("generate", "write a synthetic ring dataset as CSV");
    add_dataset_flags(gen, cfg, nullptr);
    gen->add_option("--seed", cfg.dataset.rings.seed, "generator seed (alias of --data-seed)");
    gen->add_option("-o,--output", output, "output CSV path")->required();

    auto* run = app.add_subcommand("run", "cross-validated evaluation, JSON report");
    add_dataset_flags(run, cfg, &synthetic_flag);
    add_method_flags(run, cfg);
    run->add_option("--ell", cfg.fixed_ell, "fixed reduced dimension (0 = select by inner CV)");
    run->add_option("--ell-grid", cfg.ell_grid, "inner-CV grid for ell")->delimiter(',');
    run->add_option("--classifier", cfg.classifier, "knn | logistic");
    run->add_option("--knn-k", cfg.knn_k, "k for the kNN classifier");
    run->add_option("--folds", cfg.outer_folds, "outer CV folds");
    run->add_option("--inner-folds", cfg.inner_folds, "inner CV folds");
    run->add_option("--config", config_path, "JSON config file (flags override)");
    run->add_option("-o,--output", output, "report JSON path (default: stdout)");
    run->add_option("--emit-plots", plots_prefix, "write embedding/factor CSVs with this prefix");
    run->add_option("--variance-sweep", sweep_spec, "sweep ring noise variance LO:HI:STEP");
    run->add_option("--sweep-output", sweep_output, "variance sweep CSV path");

    auto* scale = app.add_subcommand("scale", "extract scaling factors from training data");
    add_dataset_flags(scale, cfg, &synthetic_flag);
    add_method_flags(scale, cfg);
    scale->add_option("--config", config_path, "JSON config file (flags override)");
    scale->add_option("-o,--output", output, "factor JSON path (default: stdout)");

    // Parse once to capture --config, then re-parse so flags override the file.
    try {
        app.parse(argc, argv);
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw sfs::InvalidInput("cannot open config '" + config_path + "'");
            json j = json::parse(in);
            if (j.contains("config_echo")) j = j["config_echo"];
            CliConfig file_cfg;
            config_from_json(j, file_cfg);
            cfg = file_cfg;
            synthetic_flag = false;
            app.clear();
            app.parse(argc, argv);
        }
        if (synthetic_flag)
            cfg.dataset.source = "synthetic";
        else if (!cfg.dataset.path.empty())
            cfg.dataset.source = "csv";

        if (gen->parsed()) return cmd_generate(cfg, output);
        if (run->parsed()) return cmd_run(cfg, output, plots_prefix, sweep_spec, sweep_output);
        if (scale->parsed()) return cmd_scale(cfg, output);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
