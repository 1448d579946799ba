#include "simclust/routing.hpp"

#include <algorithm>

#include "simclust/error.hpp"

namespace simclust {

std::string to_string(AggregateMode mode) {
    return mode == AggregateMode::sum ? "sum" : "mean";
}

AggregateMode parse_aggregate_mode(std::string_view text) {
    if (text == "mean") {
        return AggregateMode::mean;
    }
    if (text == "sum") {
        return AggregateMode::sum;
    }
    throw ValidationError("unknown aggregate mode '" + std::string(text) + "' (expected mean or sum)");
}

Json routing_decision_to_json(const RoutingDecision& decision) {
    Json scores = Json::object();
    for (std::size_t c = 0; c < decision.scores.size(); ++c) {
        scores[std::to_string(c)] = decision.scores[c];
    }
    return Json{{"chosen_cluster", decision.chosen_cluster},
                {"scores", std::move(scores)},
                {"aggregate_mode", to_string(decision.mode)}};
}

RoutingDecision select_cluster(std::span<const double> query, std::span<const CentroidSet> cluster_centroids,
                               AggregateMode mode) {
    if (cluster_centroids.empty()) {
        throw ValidationError("routing needs at least one cluster");
    }
    if (!(squared_norm(query) > 0.0)) {
        throw DomainError("cannot route a zero-norm query");
    }

    RoutingDecision decision;
    decision.mode = mode;
    decision.scores.reserve(cluster_centroids.size());
    for (std::size_t c = 0; c < cluster_centroids.size(); ++c) {
        const auto& set = cluster_centroids[c];
        if (set.empty()) {
            throw ValidationError("cluster " + std::to_string(c) + " has no centroids");
        }
        if (set.dim() != query.size()) {
            throw ValidationError("query has dim " + std::to_string(query.size()) + ", cluster "
                                  + std::to_string(c) + " centroids have dim " + std::to_string(set.dim()));
        }
        double total = 0.0;
        for (std::size_t i = 0; i < set.size(); ++i) {
            total += cosine_similarity(query, set.centroid(i));
        }
        decision.scores.push_back(mode == AggregateMode::mean ? total / static_cast<double>(set.size()) : total);
    }

    // max_element returns the first maximum, i.e. the lowest cluster id on ties.
    decision.chosen_cluster =
        static_cast<int>(std::max_element(decision.scores.begin(), decision.scores.end()) - decision.scores.begin());
    return decision;
}

ClassPrediction predict_class(std::span<const double> query, const ClusterSplit& split,
                              std::span<const CentroidSet> cluster_centroids,
                              std::span<const std::shared_ptr<const Head>> heads, AggregateMode mode) {
    if (cluster_centroids.size() != static_cast<std::size_t>(split.k)) {
        throw ValidationError("split has " + std::to_string(split.k) + " clusters but "
                              + std::to_string(cluster_centroids.size()) + " centroid sets were given");
    }
    ClassPrediction out;
    out.routing = select_cluster(query, cluster_centroids, mode);

    const auto chosen = static_cast<std::size_t>(out.routing.chosen_cluster);
    if (chosen >= heads.size() || !heads[chosen]) {
        throw ValidationError("no head for cluster " + std::to_string(chosen));
    }
    const Head& head = *heads[chosen];
    if (head.dim() != query.size()) {
        throw ValidationError("head for cluster " + std::to_string(chosen) + " expects dim "
                              + std::to_string(head.dim()) + ", query has " + std::to_string(query.size()));
    }
    out.class_name = head.predict(query);
    return out;
}

}  // namespace simclust
