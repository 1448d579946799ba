#include "simclust/eval.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "parallel.hpp"
#include "simclust/error.hpp"

namespace simclust {

TrainTestSplit split_train_test(const DatasetStore& store, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ValidationError("test fraction must lie strictly between 0 and 1");
    }
    std::mt19937_64 rng(seed);
    std::vector<ClassEmbeddings> train_classes;
    std::vector<TestSample> test;

    for (const auto& cls : store.classes()) {
        const std::size_t n = cls.size();
        if (n < 2) {
            throw ValidationError("class '" + cls.name() + "' has " + std::to_string(n)
                                  + " vector(s); at least two are needed to split");
        }
        const auto wanted = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
        const std::size_t n_test = std::clamp<std::size_t>(wanted, 1, n - 1);

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<bool> is_test(n, false);
        for (std::size_t i = 0; i < n_test; ++i) {
            is_test[order[i]] = true;
        }

        std::vector<float> kept;
        kept.reserve((n - n_test) * cls.dim());
        for (std::size_t r = 0; r < n; ++r) {
            const auto row = cls.row(r);
            if (is_test[r]) {
                test.push_back(TestSample{to_feature_vector(row), cls.name()});
            } else {
                kept.insert(kept.end(), row.begin(), row.end());
            }
        }
        train_classes.emplace_back(cls.name(), cls.dim(), std::move(kept));
    }
    return TrainTestSplit{DatasetStore(store.dim(), std::move(train_classes), store.source_tag()), std::move(test)};
}

// ---------------------------------------------------------------------------

ClassPrediction Pipeline::predict(std::span<const double> query) const {
    return predict_class(query, split, cluster_centroids, heads, config.mode);
}

std::vector<ClassEmbeddings> cluster_classes(const DatasetStore& store, const ClusterSplit& split, int cluster) {
    std::vector<ClassEmbeddings> out;
    for (const auto& name : split.members(cluster)) {
        const auto idx = store.index_of(name);
        if (!idx) {
            throw ValidationError("split names class '" + name + "' which is not in the store");
        }
        out.push_back(store[*idx]);
    }
    return out;
}

std::vector<std::shared_ptr<const Head>> train_cluster_heads(const DatasetStore& store, const ClusterSplit& split,
                                                             const PipelineConfig& config) {
    std::vector<std::shared_ptr<const Head>> heads(split.k);
    detail::parallel_for(heads.size(), config.threads, [&](std::size_t c) {
        const auto classes = cluster_classes(store, split, static_cast<int>(c));
        heads[c] = train_head(config.head_kind, classes, config.train);
    });
    return heads;
}

Pipeline build_pipeline(DatasetStore train, ClusterSplit split, const PipelineConfig& config) {
    auto sim = build_similarity_matrix(train, config.threads);
    validate_split(split, sim.centroids.names());
    auto cluster_sets = cluster_centroid_sets(split, sim.centroids);
    auto heads = train_cluster_heads(train, split, config);
    return Pipeline{std::move(train),        std::move(sim.centroids), std::move(sim.matrix), std::move(split),
                    std::move(cluster_sets), std::move(heads),         config};
}

Pipeline build_pipeline(DatasetStore train, const PipelineConfig& config) {
    auto sim = build_similarity_matrix(train, config.threads);
    auto ward = ward_cluster(sim.matrix, config.k);
    auto cluster_sets = cluster_centroid_sets(ward.split, sim.centroids);
    auto heads = train_cluster_heads(train, ward.split, config);
    return Pipeline{std::move(train),        std::move(sim.centroids), std::move(sim.matrix), std::move(ward.split),
                    std::move(cluster_sets), std::move(heads),         config};
}

std::shared_ptr<const Head> train_monolithic(const DatasetStore& store, const PipelineConfig& config) {
    return train_head(config.head_kind, store.classes(), config.train);
}

// ---------------------------------------------------------------------------

Json eval_report_to_json(const EvalReport& report) {
    Json per_cluster = Json::object();
    for (std::size_t c = 0; c < report.per_cluster_top1.size(); ++c) {
        const auto& v = report.per_cluster_top1[c];
        per_cluster[std::to_string(c)] = v ? Json(*v) : Json(nullptr);
    }
    return Json{{"routing_accuracy", report.routing_accuracy},
                {"end_to_end_top1", report.end_to_end_top1},
                {"monolithic_top1", report.monolithic_top1},
                {"per_cluster_top1", std::move(per_cluster)},
                {"n_eval", report.n_eval},
                {"separation", {{"intra_max", report.separation.intra_max}, {"inter_min", report.separation.inter_min}}},
                {"notes", report.notes}};
}

EvalReport evaluate(const Pipeline& pipeline, const Head& monolithic, std::span<const TestSample> test) {
    if (test.empty()) {
        throw ValidationError("evaluation needs at least one test vector");
    }
    const auto& split = pipeline.split;
    if (pipeline.heads.size() != static_cast<std::size_t>(split.k)) {
        throw ValidationError("pipeline has " + std::to_string(pipeline.heads.size()) + " heads for "
                              + std::to_string(split.k) + " clusters");
    }
    for (int c = 0; c < split.k; ++c) {
        if (!pipeline.heads[c]) {
            throw ValidationError("cluster " + std::to_string(c) + " has no trained head");
        }
    }
    if (monolithic.dim() != pipeline.store.dim()) {
        throw ValidationError("monolithic head dim does not match the store");
    }

    std::size_t routed = 0;
    std::size_t end_to_end = 0;
    std::size_t mono = 0;
    std::vector<std::size_t> cluster_total(split.k, 0);
    std::vector<std::size_t> cluster_hits(split.k, 0);

    for (const auto& sample : test) {
        const auto home = split.cluster_of(sample.class_name);
        if (!home) {
            throw ValidationError("test class '" + sample.class_name + "' is not part of the split");
        }
        if (sample.vector.size() != pipeline.store.dim()) {
            throw ValidationError("test vector of class '" + sample.class_name + "' has dim "
                                  + std::to_string(sample.vector.size()));
        }
        const auto prediction = pipeline.predict(sample.vector);
        routed += prediction.routing.chosen_cluster == *home;
        end_to_end += prediction.class_name == sample.class_name;
        mono += monolithic.predict(sample.vector) == sample.class_name;

        ++cluster_total[*home];
        cluster_hits[*home] += pipeline.heads[*home]->predict(sample.vector) == sample.class_name;
    }

    const double n = static_cast<double>(test.size());
    EvalReport report;
    report.n_eval = test.size();
    report.routing_accuracy = static_cast<double>(routed) / n;
    report.end_to_end_top1 = static_cast<double>(end_to_end) / n;
    report.monolithic_top1 = static_cast<double>(mono) / n;
    for (int c = 0; c < split.k; ++c) {
        if (cluster_total[c] > 0) {
            report.per_cluster_top1.emplace_back(static_cast<double>(cluster_hits[c])
                                                 / static_cast<double>(cluster_total[c]));
        } else {
            report.per_cluster_top1.emplace_back(std::nullopt);
        }
    }

    std::map<std::string, int> membership;
    for (std::size_t i = 0; i < split.classes.size(); ++i) {
        membership[split.classes[i]] = split.assignments[i];
    }
    report.separation = measure_separation(pipeline.store, membership);

    const auto sizes = split.cluster_sizes();
    report.notes.push_back("k=" + std::to_string(split.k) + ", head=" + to_string(pipeline.config.head_kind)
                           + ", routing=" + to_string(pipeline.config.mode));
    report.notes.push_back("largest cluster trains " + std::to_string(*std::max_element(sizes.begin(), sizes.end()))
                           + " of " + std::to_string(split.classes.size()) + " classes");
    return report;
}

EvaluationRun run_evaluation(const DatasetStore& store, const PipelineConfig& config, double test_fraction,
                             std::uint64_t seed) {
    auto parts = split_train_test(store, test_fraction, seed);
    auto pipeline = build_pipeline(std::move(parts.train), config);
    auto monolithic = train_monolithic(pipeline.store, config);
    auto report = evaluate(pipeline, *monolithic, parts.test);
    return EvaluationRun{std::move(pipeline), std::move(monolithic), std::move(parts.test), std::move(report)};
}

// ---------------------------------------------------------------------------

Json extension_report_to_json(const ExtensionReport& report) {
    return Json{{"class_name", report.class_name},
                {"cluster", report.cluster},
                {"retrained_classes", report.retrained_classes},
                {"total_classes", report.total_classes}};
}

ExtensionResult extend_and_retrain(const Pipeline& pipeline, const ClassEmbeddings& new_class) {
    if (pipeline.store.index_of(new_class.name())) {
        throw ValidationError("class '" + new_class.name() + "' already exists");
    }
    if (new_class.dim() != pipeline.store.dim()) {
        throw ValidationError("new class has dim " + std::to_string(new_class.dim()) + ", store dim is "
                              + std::to_string(pipeline.store.dim()));
    }

    auto new_centroid = compute_centroid(new_class);
    const int target = assign_new_class(new_centroid, pipeline.split, pipeline.centroids);

    std::vector<ClassEmbeddings> classes = pipeline.store.classes();
    classes.push_back(new_class);
    DatasetStore store(pipeline.store.dim(), std::move(classes), pipeline.store.source_tag());

    ClusterSplit split = pipeline.split;
    split.classes.push_back(new_class.name());
    split.assignments.push_back(target);
    split.merge_heights.reset();

    CentroidSet centroids = pipeline.centroids;
    centroids.push_back(new_class.name(), new_centroid);
    auto matrix = similarity_matrix(centroids, pipeline.config.threads);

    auto cluster_sets = pipeline.cluster_centroids;
    cluster_sets[target].push_back(new_class.name(), std::move(new_centroid));

    auto heads = pipeline.heads;
    const auto retrain = cluster_classes(store, split, target);
    heads[target] = train_head(pipeline.config.head_kind, retrain, pipeline.config.train);

    ExtensionReport report{new_class.name(), target, retrain.size(), store.size()};
    return ExtensionResult{Pipeline{std::move(store), std::move(centroids), std::move(matrix), std::move(split),
                                    std::move(cluster_sets), std::move(heads), pipeline.config},
                           std::move(report)};
}

long peak_rss_kib() {
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) != 0) {
        return 0;
    }
    return usage.ru_maxrss;
}

}  // namespace simclust
