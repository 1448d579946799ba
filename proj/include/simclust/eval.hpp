#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simclust/clustering.hpp"
#include "simclust/heads.hpp"
#include "simclust/routing.hpp"
#include "simclust/similarity.hpp"
#include "simclust/store.hpp"
#include "simclust/synth.hpp"

/**
 * @file eval.hpp
 * @brief End-to-end pipeline assembly and evaluation: clustered heads with
 * routing versus one head trained on every class, plus the workflow for
 * adding a class by retraining a single cluster.
 */

namespace simclust {

struct TestSample {
    FeatureVector vector;
    std::string class_name;
};

struct TrainTestSplit {
    DatasetStore train;
    std::vector<TestSample> test;
};

/// Stratified split: each class sends round(n * test_fraction) vectors to the
/// test set, clamped to [1, n - 1]. Classes with fewer than two vectors are
/// rejected.
TrainTestSplit split_train_test(const DatasetStore& store, double test_fraction, std::uint64_t seed);

struct PipelineConfig {
    int k = 2;
    HeadKind head_kind = HeadKind::nearest_centroid;
    TrainConfig train;
    AggregateMode mode = AggregateMode::mean;
    unsigned threads = 1;
};

/// Every artifact of the clustered pipeline, built from one training store.
struct Pipeline {
    DatasetStore store;
    CentroidSet centroids;
    SimilarityMatrix matrix;
    ClusterSplit split;
    std::vector<CentroidSet> cluster_centroids;
    std::vector<std::shared_ptr<const Head>> heads;
    PipelineConfig config;

    ClassPrediction predict(std::span<const double> query) const;
};

/// Classes of `cluster`, in split order.
std::vector<ClassEmbeddings> cluster_classes(const DatasetStore& store, const ClusterSplit& split, int cluster);

/// Heads for every cluster of `split`, trained independently (in parallel
/// when config.threads > 1).
std::vector<std::shared_ptr<const Head>> train_cluster_heads(const DatasetStore& store, const ClusterSplit& split,
                                                             const PipelineConfig& config);

/// Builds the Ward split at config.k plus one head per cluster.
Pipeline build_pipeline(DatasetStore train, const PipelineConfig& config);

/// Assembles a pipeline around an existing split (e.g. a fixture file).
Pipeline build_pipeline(DatasetStore train, ClusterSplit split, const PipelineConfig& config);

/// One head over all classes of the store.
std::shared_ptr<const Head> train_monolithic(const DatasetStore& store, const PipelineConfig& config);

struct EvalReport {
    double routing_accuracy = 0.0;
    double end_to_end_top1 = 0.0;
    double monolithic_top1 = 0.0;
    /// Accuracy of each cluster's head on its own classes' test vectors
    /// (perfect routing). Empty when a cluster has no test vectors.
    std::vector<std::optional<double>> per_cluster_top1;
    std::size_t n_eval = 0;
    Separation separation;
    std::vector<std::string> notes;
};

Json eval_report_to_json(const EvalReport& report);

/// Throws ValidationError for an empty test set or a test class unknown to
/// the pipeline.
EvalReport evaluate(const Pipeline& pipeline, const Head& monolithic, std::span<const TestSample> test);

struct EvaluationRun {
    Pipeline pipeline;
    std::shared_ptr<const Head> monolithic;
    std::vector<TestSample> test;
    EvalReport report;
};

/// split_train_test + build_pipeline + train_monolithic + evaluate.
EvaluationRun run_evaluation(const DatasetStore& store, const PipelineConfig& config, double test_fraction,
                             std::uint64_t seed);

struct ExtensionReport {
    std::string class_name;
    int cluster = 0;
    std::size_t retrained_classes = 0;
    std::size_t total_classes = 0;
};

Json extension_report_to_json(const ExtensionReport& report);

struct ExtensionResult {
    Pipeline pipeline;
    ExtensionReport report;
};

/// Adds `new_class` to the cluster chosen by assign_new_class and retrains
/// only that cluster's head. Every other head is carried over unchanged (the
/// same object). The split's merge heights are dropped since the dendrogram
/// no longer describes the class set.
ExtensionResult extend_and_retrain(const Pipeline& pipeline, const ClassEmbeddings& new_class);

/// Peak resident set size of this process in KiB, or 0 when unavailable.
long peak_rss_kib();

}  // namespace simclust
