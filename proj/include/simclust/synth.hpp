#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "simclust/store.hpp"

/**
 * @file synth.hpp
 * @brief Seeded synthetic embedding stores with a known super-cluster
 * structure.
 *
 * Super-cluster means sit on a scaled simplex (pairwise distance
 * `super_separation`), class means are drawn around their super mean with
 * standard deviation `class_spread`, and vectors around their class mean with
 * `intra_sigma`. Afterwards every value is shifted by one common constant so
 * the whole store is componentwise positive. Randomness comes from
 * std::mt19937_64 seeded with `seed`.
 */

namespace simclust {

struct SynthSpec {
    int k_super = 2;
    int classes_per_super = 3;
    int dim = 8;
    int n_per_class = 20;
    double intra_sigma = 0.1;
    double class_spread = 0.2;
    double super_separation = 1.0;
    std::uint64_t seed = 0;

    /// Throws ValidationError on non-positive counts or scales, or when
    /// dim < max(2, k_super).
    void validate() const;
};

Json synth_spec_to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const Json& doc);

struct SyntheticStore {
    DatasetStore store;
    /// Parallel to store.classes(): the super-cluster each class was drawn from.
    std::vector<int> ground_truth;

    Json ground_truth_json() const;
};

/// Class names are "s<super>_c<class>". Pure function of `spec`.
SyntheticStore generate(const SynthSpec& spec);

struct Separation {
    double intra_max = 0.0;
    double inter_min = 0.0;
};

/// Largest centroid cosine distance between classes of the same super
/// cluster and smallest between classes of different ones. A side with no
/// pairs reports 0.
Separation measure_separation(const DatasetStore& store, const std::map<std::string, int>& ground_truth);

Separation measure_separation(const SyntheticStore& synth);

}  // namespace simclust
