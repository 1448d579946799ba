#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "simclust/heads.hpp"
#include "simclust/similarity.hpp"
#include "simclust/store.hpp"

/**
 * @file routing.hpp
 * @brief Picks the sub-dataset cluster for a query feature vector and hands
 * the same vector to that cluster's head.
 */

namespace simclust {

/// How per-class similarities are combined into one cluster score. `mean`
/// is the default; `sum` favours clusters with more classes.
enum class AggregateMode { mean, sum };

std::string to_string(AggregateMode mode);
AggregateMode parse_aggregate_mode(std::string_view text);

struct RoutingDecision {
    int chosen_cluster = 0;
    /// Aggregated cosine similarity per cluster id; larger is closer.
    std::vector<double> scores;
    AggregateMode mode = AggregateMode::mean;

    bool operator==(const RoutingDecision&) const = default;
};

Json routing_decision_to_json(const RoutingDecision& decision);

/// Scores every cluster by aggregating the cosine similarity of `query` to
/// each of its class centroids and returns the argmax (ties to the lowest
/// cluster id). Throws DomainError for a zero-norm query and
/// ValidationError for an empty or mismatched centroid set.
RoutingDecision select_cluster(std::span<const double> query, std::span<const CentroidSet> cluster_centroids,
                               AggregateMode mode = AggregateMode::mean);

struct ClassPrediction {
    std::string class_name;
    RoutingDecision routing;
};

/// Routes `query`, then evaluates only the chosen cluster's head on the same
/// vector. `heads[c]` serves cluster c and must cover exactly that cluster's
/// classes.
ClassPrediction predict_class(std::span<const double> query, const ClusterSplit& split,
                              std::span<const CentroidSet> cluster_centroids,
                              std::span<const std::shared_ptr<const Head>> heads,
                              AggregateMode mode = AggregateMode::mean);

}  // namespace simclust
