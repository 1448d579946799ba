#include "simclust/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "simclust/error.hpp"
#include "simclust/similarity.hpp"

namespace simclust {

void SynthSpec::validate() const {
    if (k_super < 1 || classes_per_super < 1 || n_per_class < 1) {
        throw ValidationError("synth spec counts must be at least 1");
    }
    if (dim < 2 || dim < k_super) {
        throw ValidationError("synth spec dim must be at least 2 and at least k_super");
    }
    const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(intra_sigma) || !positive(class_spread) || !positive(super_separation)) {
        throw ValidationError("synth spec intra_sigma, class_spread and super_separation must be positive");
    }
}

Json synth_spec_to_json(const SynthSpec& spec) {
    return Json{{"k_super", spec.k_super},
                {"classes_per_super", spec.classes_per_super},
                {"dim", spec.dim},
                {"n_per_class", spec.n_per_class},
                {"intra_sigma", spec.intra_sigma},
                {"class_spread", spec.class_spread},
                {"super_separation", spec.super_separation},
                {"seed", spec.seed}};
}

SynthSpec synth_spec_from_json(const Json& doc) {
    SynthSpec spec;
    try {
        spec.k_super = doc.value("k_super", spec.k_super);
        spec.classes_per_super = doc.value("classes_per_super", spec.classes_per_super);
        spec.dim = doc.value("dim", spec.dim);
        spec.n_per_class = doc.value("n_per_class", spec.n_per_class);
        spec.intra_sigma = doc.value("intra_sigma", spec.intra_sigma);
        spec.class_spread = doc.value("class_spread", spec.class_spread);
        spec.super_separation = doc.value("super_separation", spec.super_separation);
        spec.seed = doc.value("seed", spec.seed);
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed synth spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

Json SyntheticStore::ground_truth_json() const {
    Json doc = Json::object();
    for (std::size_t i = 0; i < store.size(); ++i) {
        doc[store[i].name()] = ground_truth[i];
    }
    return doc;
}

SyntheticStore generate(const SynthSpec& spec) {
    spec.validate();
    const auto dim = static_cast<std::size_t>(spec.dim);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Scaled standard basis vectors: |a e_i - a e_j| = a * sqrt(2).
    const double axis = spec.super_separation / std::sqrt(2.0);

    const auto n_classes = static_cast<std::size_t>(spec.k_super) * spec.classes_per_super;
    std::vector<std::vector<double>> values(n_classes);
    std::vector<std::string> names;
    std::vector<int> truth;
    double lowest = std::numeric_limits<double>::infinity();

    for (int s = 0; s < spec.k_super; ++s) {
        std::vector<double> super_mean(dim, 0.0);
        if (spec.k_super > 1) {
            super_mean[s] = axis;
        }
        for (int c = 0; c < spec.classes_per_super; ++c) {
            std::vector<double> class_mean(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                class_mean[j] = super_mean[j] + spec.class_spread * normal(rng);
            }
            auto& rows = values[names.size()];
            rows.reserve(dim * spec.n_per_class);
            for (int r = 0; r < spec.n_per_class; ++r) {
                for (std::size_t j = 0; j < dim; ++j) {
                    const double v = class_mean[j] + spec.intra_sigma * normal(rng);
                    lowest = std::min(lowest, v);
                    rows.push_back(v);
                }
            }
            names.push_back("s" + std::to_string(s) + "_c" + std::to_string(c));
            truth.push_back(s);
        }
    }

    // One common shift keeps relative geometry while making every component
    // at least intra_sigma.
    const double shift = spec.intra_sigma - lowest;
    std::vector<ClassEmbeddings> classes;
    classes.reserve(n_classes);
    for (std::size_t i = 0; i < n_classes; ++i) {
        std::vector<float> shifted(values[i].size());
        for (std::size_t j = 0; j < shifted.size(); ++j) {
            shifted[j] = static_cast<float>(values[i][j] + shift);
        }
        classes.emplace_back(names[i], dim, std::move(shifted));
    }

    return SyntheticStore{DatasetStore(dim, std::move(classes), "synth:seed=" + std::to_string(spec.seed)),
                          std::move(truth)};
}

Separation measure_separation(const DatasetStore& store, const std::map<std::string, int>& ground_truth) {
    std::vector<int> super(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        const auto it = ground_truth.find(store[i].name());
        if (it == ground_truth.end()) {
            throw ValidationError("ground truth has no entry for class '" + store[i].name() + "'");
        }
        super[i] = it->second;
    }
    if (ground_truth.size() != store.size()) {
        throw ValidationError("ground truth names classes that are not in the store");
    }

    const auto centroids = compute_centroids(store);
    Separation out;
    bool have_inter = false;
    for (std::size_t i = 0; i < store.size(); ++i) {
        for (std::size_t j = i + 1; j < store.size(); ++j) {
            const double d = cosine_distance(centroids.centroid(i), centroids.centroid(j));
            if (super[i] == super[j]) {
                out.intra_max = std::max(out.intra_max, d);
            } else if (!have_inter || d < out.inter_min) {
                out.inter_min = d;
                have_inter = true;
            }
        }
    }
    return out;
}

Separation measure_separation(const SyntheticStore& synth) {
    std::map<std::string, int> truth;
    for (std::size_t i = 0; i < synth.store.size(); ++i) {
        truth[synth.store[i].name()] = synth.ground_truth[i];
    }
    return measure_separation(synth.store, truth);
}

}  // namespace simclust
