#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "simclust/similarity.hpp"
#include "simclust/store.hpp"

/**
 * @file clustering.hpp
 * @brief Ward-linkage agglomerative clustering of classes over their
 * similarity-matrix rows, and assignment of new classes to existing clusters.
 */

namespace simclust {

/// One agglomeration step. Node ids follow the usual convention: leaves are
/// 0..n-1 in label order, the node created by merge `s` is n + s.
struct Merge {
    std::size_t left;
    std::size_t right;
    double height;
    std::size_t size;

    bool operator==(const Merge&) const = default;
};

struct Dendrogram {
    std::size_t leaves = 0;
    std::vector<Merge> merges;

    /// Flat labels for the partition obtained by undoing the last k-1 merges.
    /// Cluster ids are numbered by first appearance in leaf order.
    std::vector<int> cut(std::size_t k) const;

    std::vector<double> heights() const;
};

struct WardResult {
    ClusterSplit split;
    Dendrogram dendrogram;
};

/// Builds the full Ward dendrogram over the rows of `simmat` (each class is
/// the point given by its matrix row, Euclidean metric).
///
/// Squared distances are updated with the Lance-Williams recurrence
///
///     d²(A∪B, C) = ((|A|+|C|) d²(A,C) + (|B|+|C|) d²(B,C) - |C| d²(A,B)) / (|A|+|B|+|C|)
///
/// and the reported merge height is sqrt(d²). When several pairs share the
/// minimal cost, the pair with the lexicographically smallest
/// (min leaf index, max leaf index) wins, where a cluster is identified by
/// its smallest leaf.
Dendrogram ward_dendrogram(const SimilarityMatrix& simmat);

/// Ward clustering cut at `k` clusters. Throws ValidationError for k outside
/// [1, n] or an asymmetric matrix.
WardResult ward_cluster(const SimilarityMatrix& simmat, int k);

/// Splits `centroids` by cluster. Every class of the split must have a
/// centroid and vice versa.
std::vector<CentroidSet> cluster_centroid_sets(const ClusterSplit& split, const CentroidSet& centroids);

/// Cluster whose member centroids have the smallest mean cosine distance to
/// `new_centroid`; ties go to the lowest cluster id.
int assign_new_class(std::span<const double> new_centroid, const ClusterSplit& split, const CentroidSet& centroids);

int assign_new_class(const ClassEmbeddings& new_class, const ClusterSplit& split, const CentroidSet& centroids);

}  // namespace simclust
