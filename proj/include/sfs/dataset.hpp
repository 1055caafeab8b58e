#pragma once

#include "sfs/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sfs {

/// Labeled sample matrix. Labels are contiguous class ids in {1..K}; the raw
/// label strings seen at ingestion are kept in class_names (class id c maps to
/// class_names[c-1]).
struct Dataset {
    Matrix X;                               // n x m feature values
    std::vector<int> labels;                // n class ids in {1..K}
    int num_classes = 0;
    std::vector<std::string> feature_names; // m names (may be empty)
    std::vector<std::string> class_names;   // K raw labels, first-appearance order

    Index n() const { return X.rows(); }
    Index m() const { return X.cols(); }

    /// Throws InvalidInput when a structural invariant is violated.
    void validate() const;
};

/// Configuration of the synthetic ring generator.
struct RingConfig {
    int samples_per_class = 200;
    int num_classes = 3;
    int num_features = 10;   // >= 3; features 4.. are pure noise
    double noise_variance = 1.0;
    std::uint64_t seed = 1;
};

/// Stratified fold assignment: assignments[i] in {1..k}.
struct FoldPlan {
    std::vector<int> assignments;
    int k = 0;
    std::uint64_t seed = 0;

    std::vector<Index> test_indices(int fold) const;
    std::vector<Index> train_indices(int fold) const;
};

/// Parse a CSV file with a header row into a Dataset. All columns except
/// label_column must be numeric; labels are re-encoded to {1..K} in order of
/// first appearance.
Dataset load_csv(const std::string& path, const std::string& label_column = "label");

/// Write a dataset as CSV (feature columns, then the label column). Labels are
/// written as class_names entries when present, class ids otherwise.
void save_csv(const Dataset& ds, const std::string& path, const std::string& label_column = "label");

// Synthetic dataset of num_classes noisy rings embedded in the first three
// features, remaining features i.i.d. Gaussian noise. Deterministic in the
// seed (own uniform/Box-Muller sampling, not std::*_distribution).
//
// Geometry: two in-plane coordinates u, w; class c has center
// off*(DU, DW) with off = c - (K+1)/2, and a point at angle theta is
// center + (1+eta)*(A1 cos(theta), A2 sin(theta)) with radial noise
// eta ~ N(0, 0.1^2). Features 1..3 are u*p + w*q for the carrier vectors
// p, q below; the constants are solved so that the expected variances of
// features 1..3 are 0.35, 2.01 and 0.19 for the default 3-class config,
// adjacent rings intersect and rings 1/3 stay disjoint.
Dataset generate_rings(const RingConfig& cfg);

/// Stratified k-fold split, deterministic in the seed.
FoldPlan kfold_split(const Dataset& ds, int k, std::uint64_t seed);

namespace rng {

/// Uniform double in [0,1) from the top 53 bits of the generator.
double uniform01(std::uint64_t& state);

/// Standard normal via Box-Muller; consumes exactly two uniforms.
double gauss(std::uint64_t& state);

/// SplitMix64 step, used both as the generator and to derive substreams.
std::uint64_t next(std::uint64_t& state);

}  // namespace rng

}  // namespace sfs
