#include "sfs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace sfs {

namespace rng {

std::uint64_t next(std::uint64_t& state) {
    // SplitMix64
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(next(state) >> 11) * 0x1.0p-53;
}

double gauss(std::uint64_t& state) {
    const double u1 = uniform01(state);
    const double u2 = uniform01(state);
    const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 in [0,1) => 1-u1 in (0,1]
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rng

void Dataset::validate() const {
    if (n() < 2) throw InvalidInput("dataset: need at least 2 samples");
    if (m() < 1) throw InvalidInput("dataset: need at least 1 feature");
    if (static_cast<Index>(labels.size()) != n())
        throw InvalidInput("dataset: label count != sample count");
    if (num_classes < 2) throw InvalidInput("dataset: fewer than 2 classes");
    std::vector<int> counts(static_cast<size_t>(num_classes), 0);
    for (int lab : labels) {
        if (lab < 1 || lab > num_classes)
            throw InvalidInput("dataset: label outside {1.." + std::to_string(num_classes) + "}");
        counts[static_cast<size_t>(lab - 1)]++;
    }
    for (int c = 0; c < num_classes; ++c)
        if (counts[static_cast<size_t>(c)] == 0)
            throw InvalidInput("dataset: class " + std::to_string(c + 1) + " has no samples");
    for (Index i = 0; i < n(); ++i)
        for (Index j = 0; j < m(); ++j)
            if (!std::isfinite(X(i, j)))
                throw InvalidInput("dataset: non-finite value at row " + std::to_string(i + 1) +
                                   ", column " + std::to_string(j + 1));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("load_csv: cannot open file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("load_csv: empty file '" + path + "'");
    const auto header = split_csv_line(line);

    Index label_col = -1;
    std::vector<std::string> feature_names;
    std::vector<Index> feature_cols;
    for (Index c = 0; c < static_cast<Index>(header.size()); ++c) {
        if (trim(header[static_cast<size_t>(c)]) == label_column) {
            if (label_col >= 0) throw InvalidInput("load_csv: duplicate label column '" + label_column + "'");
            label_col = c;
        } else {
            feature_names.push_back(trim(header[static_cast<size_t>(c)]));
            feature_cols.push_back(c);
        }
    }
    if (label_col < 0)
        throw InvalidInput("load_csv: label column '" + label_column + "' not found");
    if (feature_cols.empty()) throw InvalidInput("load_csv: no feature columns");

    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    Index lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw InvalidInput("load_csv: row " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
        std::vector<double> row(feature_cols.size());
        for (size_t f = 0; f < feature_cols.size(); ++f) {
            const std::string cell = trim(cells[static_cast<size_t>(feature_cols[f])]);
            try {
                size_t used = 0;
                row[f] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw InvalidInput("load_csv: non-numeric cell at row " + std::to_string(lineno) +
                                   ", column '" + feature_names[f] + "'");
            }
            if (!std::isfinite(row[f]))
                throw InvalidInput("non-finite value at row " + std::to_string(lineno) +
                                   ", column " + feature_names[f]);
        }
        rows.push_back(std::move(row));
        raw_labels.push_back(trim(cells[static_cast<size_t>(label_col)]));
    }
    if (rows.size() < 2) throw InvalidInput("load_csv: need at least 2 data rows");

    // re-encode labels to {1..K} preserving first appearance
    std::unordered_map<std::string, int> code;
    std::vector<std::string> class_names;
    std::vector<int> labels(rows.size());
    for (size_t i = 0; i < raw_labels.size(); ++i) {
        auto it = code.find(raw_labels[i]);
        if (it == code.end()) {
            code.emplace(raw_labels[i], static_cast<int>(class_names.size() + 1));
            class_names.push_back(raw_labels[i]);
            labels[i] = static_cast<int>(class_names.size());
        } else {
            labels[i] = it->second;
        }
    }
    if (class_names.size() < 2) throw InvalidInput("load_csv: fewer than 2 classes");

    Dataset ds;
    ds.X.resize(static_cast<Index>(rows.size()), static_cast<Index>(feature_cols.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            ds.X(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    ds.labels = std::move(labels);
    ds.num_classes = static_cast<int>(class_names.size());
    ds.feature_names = std::move(feature_names);
    ds.class_names = std::move(class_names);
    ds.validate();
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path, const std::string& label_column) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("save_csv: cannot open '" + path + "' for writing");
    out.precision(17);
    for (Index j = 0; j < ds.m(); ++j) {
        if (j < static_cast<Index>(ds.feature_names.size()) && !ds.feature_names[static_cast<size_t>(j)].empty())
            out << ds.feature_names[static_cast<size_t>(j)];
        else
            out << "f" << (j + 1);
        out << ',';
    }
    out << label_column << '\n';
    for (Index i = 0; i < ds.n(); ++i) {
        for (Index j = 0; j < ds.m(); ++j) out << ds.X(i, j) << ',';
        const int lab = ds.labels[static_cast<size_t>(i)];
        if (lab >= 1 && lab <= static_cast<int>(ds.class_names.size()))
            out << ds.class_names[static_cast<size_t>(lab - 1)];
        else
            out << lab;
        out << '\n';
    }
    if (!out) throw NumericalError("save_csv: write failed for '" + path + "'");
}

namespace ring_constants {

// In-plane layout (u = stagger axis, w = chain axis) and feature carriers.
// Solved so that for the default 3-class config the expected per-feature
// variances of features 1..3 are 0.35, 2.01 and 0.19:
//   Var(u) = (2/3)*DU^2 + (1+RADIAL_SD^2)/2 * A1^2        = 0.30
//   Var(w) = (2/3)*DW^2 + (1+RADIAL_SD^2)/2 * A2^2        = 2.2502
//   Cov(u,w) = (2/3)*DU*DW                                 = 0.4961
//   Var(f_k) = p_k^2 Var(u) + q_k^2 Var(w) + 2 p_k q_k Cov(u,w)
// Adjacent rings intersect (normalized center offset sqrt(0.787^2 + 1.8^2)
// = 1.965 < 2); rings of classes 1 and 3 are disjoint.
constexpr double A1 = 0.571691;   // ring semi-axis along u
constexpr double A2 = 0.918887;   // ring semi-axis along w
constexpr double DU = 0.449921;   // center spacing along u
constexpr double DW = 1.653997;   // center spacing along w
constexpr double RADIAL_SD = 0.1;
constexpr double P_AXIS[3] = {0.35, 0.0, 0.795822};       // u carrier
constexpr double Q_AXIS[3] = {0.303865, 0.94518, 0.0};    // w carrier

}  // namespace ring_constants

Dataset generate_rings(const RingConfig& cfg) {
    if (cfg.samples_per_class < 1) throw InvalidInput("generate_rings: samples_per_class >= 1 required");
    if (cfg.num_classes < 2) throw InvalidInput("generate_rings: num_classes >= 2 required");
    if (cfg.num_features < 3) throw InvalidInput("generate_rings: num_features >= 3 required");
    if (!(cfg.noise_variance > 0.0)) throw InvalidInput("generate_rings: noise_variance > 0 required");

    namespace rc = ring_constants;
    const int K = cfg.num_classes;
    const Index n = static_cast<Index>(cfg.samples_per_class) * K;
    const Index m = cfg.num_features;
    const double noise_sd = std::sqrt(cfg.noise_variance);

    Dataset ds;
    ds.X.resize(n, m);
    ds.labels.resize(static_cast<size_t>(n));
    ds.num_classes = K;
    for (Index j = 0; j < m; ++j) ds.feature_names.push_back("f" + std::to_string(j + 1));
    for (int c = 1; c <= K; ++c) ds.class_names.push_back(std::to_string(c));

    std::uint64_t state = cfg.seed;
    Index row = 0;
    for (int c = 1; c <= K; ++c) {
        const double off = c - (K + 1) / 2.0;
        for (int s = 0; s < cfg.samples_per_class; ++s, ++row) {
            const double theta = 2.0 * std::numbers::pi * rng::uniform01(state);
            const double radial = 1.0 + rc::RADIAL_SD * rng::gauss(state);
            const double u = off * rc::DU + radial * rc::A1 * std::cos(theta);
            const double w = off * rc::DW + radial * rc::A2 * std::sin(theta);
            for (int k = 0; k < 3; ++k) ds.X(row, k) = u * rc::P_AXIS[k] + w * rc::Q_AXIS[k];
            for (Index f = 3; f < m; ++f) ds.X(row, f) = noise_sd * rng::gauss(state);
            ds.labels[static_cast<size_t>(row)] = c;
        }
    }
    ds.validate();
    return ds;
}

std::vector<Index> FoldPlan::test_indices(int fold) const {
    std::vector<Index> out;
    for (size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(static_cast<Index>(i));
    return out;
}

std::vector<Index> FoldPlan::train_indices(int fold) const {
    std::vector<Index> out;
    for (size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(static_cast<Index>(i));
    return out;
}

FoldPlan kfold_split(const Dataset& ds, int k, std::uint64_t seed) {
    ds.validate();
    if (k < 2) throw InvalidInput("kfold_split: k >= 2 required");

    std::vector<std::vector<Index>> by_class(static_cast<size_t>(ds.num_classes));
    for (Index i = 0; i < ds.n(); ++i)
        by_class[static_cast<size_t>(ds.labels[static_cast<size_t>(i)] - 1)].push_back(i);
    for (int c = 0; c < ds.num_classes; ++c)
        if (static_cast<int>(by_class[static_cast<size_t>(c)].size()) < k)
            throw InvalidInput("kfold_split: class " + std::to_string(c + 1) + " has " +
                               std::to_string(by_class[static_cast<size_t>(c)].size()) +
                               " samples, fewer than k=" + std::to_string(k));

    FoldPlan plan;
    plan.assignments.assign(static_cast<size_t>(ds.n()), 0);
    plan.k = k;
    plan.seed = seed;

    std::uint64_t state = seed;
    for (int c = 0; c < ds.num_classes; ++c) {
        auto& idx = by_class[static_cast<size_t>(c)];
        // Fisher-Yates with the deterministic stream
        for (size_t i = idx.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(rng::next(state) % i);
            std::swap(idx[i - 1], idx[j]);
        }
        // deal round-robin, rotating the starting fold per class
        for (size_t i = 0; i < idx.size(); ++i) {
            const int fold = static_cast<int>((i + static_cast<size_t>(c)) % static_cast<size_t>(k)) + 1;
            plan.assignments[static_cast<size_t>(idx[i])] = fold;
        }
    }
    return plan;
}

}  // namespace sfs
