#include "simclust/clustering.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "simclust/error.hpp"

namespace simclust {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[std::max(a, b)] = std::min(a, b);
        }
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<int> Dendrogram::cut(std::size_t k) const {
    if (k < 1 || k > leaves) {
        throw ValidationError("cannot cut a dendrogram of " + std::to_string(leaves) + " leaves into "
                              + std::to_string(k) + " clusters");
    }
    DisjointSets sets(leaves);
    std::vector<std::size_t> representative(leaves + merges.size());
    std::iota(representative.begin(), representative.begin() + leaves, 0);
    for (std::size_t s = 0; s < merges.size(); ++s) {
        representative[leaves + s] = representative[merges[s].left];
    }
    for (std::size_t s = 0; s < leaves - k; ++s) {
        sets.unite(representative[merges[s].left], representative[merges[s].right]);
    }

    std::vector<int> labels(leaves, -1);
    std::vector<int> id_of_root(leaves, -1);
    int next = 0;
    for (std::size_t i = 0; i < leaves; ++i) {
        const auto root = sets.find(i);
        if (id_of_root[root] < 0) {
            id_of_root[root] = next++;
        }
        labels[i] = id_of_root[root];
    }
    return labels;
}

std::vector<double> Dendrogram::heights() const {
    std::vector<double> out;
    out.reserve(merges.size());
    for (const auto& m : merges) {
        out.push_back(m.height);
    }
    return out;
}

Dendrogram ward_dendrogram(const SimilarityMatrix& simmat) {
    const std::size_t n = simmat.size();
    if (n == 0) {
        throw ValidationError("cannot cluster an empty similarity matrix");
    }

    // Squared Euclidean distances between matrix rows.
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto a = simmat.row(i);
            const auto b = simmat.row(j);
            double acc = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                const double delta = a[m] - b[m];
                acc += delta * delta;
            }
            dist[i * n + j] = acc;
            dist[j * n + i] = acc;
        }
    }

    // Slot i holds the cluster whose smallest leaf is i; scanning slots in
    // index order with a strict comparison therefore realizes the
    // (min leaf, max leaf) tie-break.
    std::vector<bool> active(n, true);
    std::vector<std::size_t> node(n);
    std::iota(node.begin(), node.end(), 0);
    std::vector<double> size(n, 1.0);

    Dendrogram out;
    out.leaves = n;
    out.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t a = n;
        std::size_t b = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) {
                continue;
            }
            for (std::size_t j = i + 1; j < n; ++j) {
                if (active[j] && dist[i * n + j] < best) {
                    best = dist[i * n + j];
                    a = i;
                    b = j;
                }
            }
        }

        const double sa = size[a];
        const double sb = size[b];
        for (std::size_t c = 0; c < n; ++c) {
            if (!active[c] || c == a || c == b) {
                continue;
            }
            const double sc = size[c];
            const double updated =
                ((sa + sc) * dist[a * n + c] + (sb + sc) * dist[b * n + c] - sc * best) / (sa + sb + sc);
            dist[a * n + c] = updated;
            dist[c * n + a] = updated;
        }

        out.merges.push_back(Merge{std::min(node[a], node[b]), std::max(node[a], node[b]),
                                   std::sqrt(std::max(best, 0.0)), static_cast<std::size_t>(sa + sb)});
        active[b] = false;
        size[a] = sa + sb;
        node[a] = n + step;
    }
    return out;
}

WardResult ward_cluster(const SimilarityMatrix& simmat, int k) {
    const std::size_t n = simmat.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw ValidationError("number of clusters must lie in [1, " + std::to_string(n) + "], got "
                              + std::to_string(k));
    }
    check_similarity_matrix(simmat);

    WardResult out;
    out.dendrogram = ward_dendrogram(simmat);
    out.split.k = k;
    out.split.classes = simmat.labels();
    out.split.assignments = out.dendrogram.cut(static_cast<std::size_t>(k));
    out.split.linkage = "ward";
    out.split.merge_heights = out.dendrogram.heights();
    return out;
}

std::vector<CentroidSet> cluster_centroid_sets(const ClusterSplit& split, const CentroidSet& centroids) {
    validate_split(split, centroids.names());
    std::vector<CentroidSet> out;
    out.reserve(split.k);
    for (int c = 0; c < split.k; ++c) {
        out.push_back(centroids.subset(split.members(c)));
    }
    return out;
}

int assign_new_class(std::span<const double> new_centroid, const ClusterSplit& split, const CentroidSet& centroids) {
    if (new_centroid.size() != centroids.dim()) {
        throw ValidationError("new class has dim " + std::to_string(new_centroid.size()) + ", existing classes have dim "
                              + std::to_string(centroids.dim()));
    }
    if (!(squared_norm(new_centroid) > 0.0)) {
        throw DomainError("new class centroid has zero norm");
    }
    const auto sets = cluster_centroid_sets(split, centroids);

    int best_cluster = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < split.k; ++c) {
        const auto& set = sets[c];
        double total = 0.0;
        for (std::size_t i = 0; i < set.size(); ++i) {
            total += cosine_distance(new_centroid, set.centroid(i));
        }
        const double mean = total / static_cast<double>(set.size());
        if (mean < best) {
            best = mean;
            best_cluster = c;
        }
    }
    return best_cluster;
}

int assign_new_class(const ClassEmbeddings& new_class, const ClusterSplit& split, const CentroidSet& centroids) {
    return assign_new_class(compute_centroid(new_class), split, centroids);
}

}  // namespace simclust
