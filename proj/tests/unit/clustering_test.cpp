#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "simclust/clustering.hpp"
#include "simclust/error.hpp"

namespace {

using namespace simclust;
namespace t = simclust::testing;

t::Matrix rows_of(const SimilarityMatrix& m) {
    t::Matrix out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto r = m.row(i);
        out.emplace_back(r.begin(), r.end());
    }
    return out;
}

SimilarityMatrix matrix_from(const std::vector<std::vector<double>>& values) {
    std::vector<std::string> labels;
    std::vector<double> flat;
    for (std::size_t i = 0; i < values.size(); ++i) {
        labels.push_back("c" + std::to_string(i));
        flat.insert(flat.end(), values[i].begin(), values[i].end());
    }
    return SimilarityMatrix(labels, flat);
}

SimilarityMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
    const auto store = t::random_store(rng, n, 6, 3);
    return build_similarity_matrix(store).matrix;
}

TEST(Ward, TwoTightPairs) {
    // rows {0,1} and {2,3}: pair distance 0.01, cross distance 1.0
    const auto m = matrix_from({{0, 0.01, 1, 1}, {0.01, 0, 1, 1}, {1, 1, 0, 0.01}, {1, 1, 0.01, 0}});
    const auto result = ward_cluster(m, 2);
    EXPECT_EQ(result.split.assignments, (std::vector<int>{0, 0, 1, 1}));
    EXPECT_EQ(t::canonical_partition(result.split.assignments),
              t::canonical_partition(t::naive_ward(rows_of(m), 2).clusters));
}

TEST(Ward, DegenerateCuts) {
    std::mt19937_64 rng(1);
    const auto m = random_matrix(rng, 7);
    EXPECT_EQ(ward_cluster(m, 1).split.assignments, std::vector<int>(7, 0));
    std::vector<int> singletons(7);
    std::iota(singletons.begin(), singletons.end(), 0);
    EXPECT_EQ(ward_cluster(m, 7).split.assignments, singletons);
}

TEST(Ward, SingleClass) {
    const auto m = matrix_from({{0}});
    const auto result = ward_cluster(m, 1);
    EXPECT_EQ(result.split.assignments, std::vector<int>{0});
    EXPECT_TRUE(result.dendrogram.merges.empty());
}

TEST(Ward, RejectsBadArguments) {
    std::mt19937_64 rng(2);
    const auto m = random_matrix(rng, 4);
    EXPECT_THROW(ward_cluster(m, 0), ValidationError);
    EXPECT_THROW(ward_cluster(m, 5), ValidationError);
    const auto asym = matrix_from({{0, 0.5}, {0.4, 0}});
    EXPECT_THROW(ward_cluster(asym, 1), ValidationError);
}

TEST(Ward, SplitMetadata) {
    std::mt19937_64 rng(3);
    const auto m = random_matrix(rng, 6);
    const auto result = ward_cluster(m, 3);
    EXPECT_EQ(result.split.linkage, "ward");
    EXPECT_EQ(result.split.classes, m.labels());
    ASSERT_TRUE(result.split.merge_heights);
    EXPECT_EQ(result.split.merge_heights->size(), 5u);
    EXPECT_NO_THROW(validate_split(result.split, m.labels()));
    // Ids follow first appearance in label order.
    EXPECT_EQ(result.split.assignments.front(), 0);
    int seen = 0;
    for (int a : result.split.assignments) {
        EXPECT_LE(a, seen);
        seen = std::max(seen, a + 1);
    }
}

TEST(Ward, DendrogramStructure) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 9;
        const auto d = ward_dendrogram(random_matrix(rng, n));
        ASSERT_EQ(d.merges.size(), n - 1);
        std::vector<std::size_t> used;
        for (std::size_t s = 0; s < d.merges.size(); ++s) {
            const auto& m = d.merges[s];
            EXPECT_LT(m.left, n + s);
            EXPECT_LT(m.right, n + s);
            used.push_back(m.left);
            used.push_back(m.right);
            if (s > 0) {
                EXPECT_GE(m.height, d.merges[s - 1].height);
            }
        }
        EXPECT_EQ(used.size(), std::set<std::size_t>(used.begin(), used.end()).size());
        EXPECT_EQ(d.merges.back().size, n);
    }
}

TEST(Ward, HeightsMatchOracleDeltaEss) {
    // Lance-Williams d² equals 2 * ΔESS for Ward.
    std::mt19937_64 rng(5);
    const auto m = random_matrix(rng, 8);
    const auto d = ward_dendrogram(m);
    const auto oracle = t::naive_ward(rows_of(m), 1);
    ASSERT_EQ(oracle.merges.size(), d.merges.size());
    for (std::size_t s = 0; s < d.merges.size(); ++s) {
        EXPECT_NEAR(d.merges[s].height, std::sqrt(2.0 * oracle.merges[s].delta_ess), 1e-9);
    }
}

TEST(Ward, MatchesNaiveOracleForEveryK) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + trial % 10;
        const auto m = random_matrix(rng, n);
        const auto points = rows_of(m);
        for (std::size_t k = 1; k <= n; ++k) {
            const auto result = ward_cluster(m, static_cast<int>(k));
            EXPECT_EQ(t::canonical_partition(result.split.assignments),
                      t::canonical_partition(t::naive_ward(points, k).clusters))
                << "n=" << n << " k=" << k;
        }
    }
}

TEST(Ward, CutsAreNested) {
    std::mt19937_64 rng(7);
    const auto m = random_matrix(rng, 10);
    const auto d = ward_dendrogram(m);
    for (std::size_t k = 2; k <= 10; ++k) {
        const auto fine = d.cut(k);
        const auto coarse = d.cut(k - 1);
        for (std::size_t i = 0; i < 10; ++i) {
            for (std::size_t j = 0; j < 10; ++j) {
                if (fine[i] == fine[j]) {
                    EXPECT_EQ(coarse[i], coarse[j]);
                }
            }
        }
    }
}

TEST(Ward, TiesUseLowestLeafPair) {
    // Four mutually equidistant points: the first merge must be (0, 1).
    const auto m = matrix_from({{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}});
    const auto d = ward_dendrogram(m);
    EXPECT_EQ(d.merges[0].left, 0u);
    EXPECT_EQ(d.merges[0].right, 1u);
    EXPECT_EQ(ward_cluster(m, 3).split.assignments, (std::vector<int>{0, 0, 1, 2}));
}

TEST(Ward, PermutationInvariantUpToRelabeling) {
    std::mt19937_64 rng(8);
    const auto store = t::random_store(rng, 9, 5, 4);
    std::vector<std::size_t> perm(9);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<ClassEmbeddings> permuted;
    for (auto p : perm) permuted.push_back(store[p]);

    const auto base = ward_cluster(build_similarity_matrix(store).matrix, 3).split;
    const auto moved = ward_cluster(build_similarity_matrix(DatasetStore(5, permuted)).matrix, 3).split;

    for (std::size_t i = 0; i < 9; ++i) {
        for (std::size_t j = 0; j < 9; ++j) {
            const bool together_base = *base.cluster_of(store[i].name()) == *base.cluster_of(store[j].name());
            const bool together_moved = *moved.cluster_of(store[i].name()) == *moved.cluster_of(store[j].name());
            EXPECT_EQ(together_base, together_moved);
        }
    }
}

TEST(ClusterCentroids, PartitionBookkeeping) {
    CentroidSet centroids(2, {"a", "b", "c", "d"}, {{1, 0}, {0, 1}, {1, 1}, {2, 1}});
    const auto one = cluster_centroid_sets(ClusterSplit{1, {"a", "b", "c", "d"}, {0, 0, 0, 0}}, centroids);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0], centroids);

    const auto two = cluster_centroid_sets(ClusterSplit{2, {"a", "b", "c", "d"}, {0, 1, 1, 0}}, centroids);
    EXPECT_EQ(two[0].names(), (std::vector<std::string>{"a", "d"}));
    EXPECT_EQ(two[1].names(), (std::vector<std::string>{"b", "c"}));

    EXPECT_THROW(cluster_centroid_sets(ClusterSplit{1, {"a", "b", "c", "x"}, {0, 0, 0, 0}}, centroids), ValidationError);
    EXPECT_THROW(cluster_centroid_sets(ClusterSplit{1, {"a", "b", "c"}, {0, 0, 0}}, centroids), ValidationError);
}

TEST(ClusterCentroids, OxfordFixtureSizes) {
    const auto split = load_split(std::filesystem::path(SIMCLUST_FIXTURE_DIR) / "oxford_flowers_two_split.json");
    CentroidSet centroids;
    for (std::size_t i = 0; i < split.classes.size(); ++i) {
        centroids.push_back(split.classes[i], FeatureVector{1.0, static_cast<double>(i)});
    }
    const auto sets = cluster_centroid_sets(split, centroids);
    std::multiset<std::size_t> sizes{sets[0].size(), sets[1].size()};
    EXPECT_EQ(sizes, (std::multiset<std::size_t>{86, 16}));
}

TEST(AssignNewClass, ExactMatchWins) {
    CentroidSet centroids(2, {"a", "b", "c", "d"}, {{1, 0}, {0.9, 0.1}, {0, 1}, {0.1, 0.9}});
    const ClusterSplit split{2, {"a", "b", "c", "d"}, {0, 0, 1, 1}};
    EXPECT_EQ(assign_new_class(FeatureVector{0, 1}, split, centroids), 1);
    EXPECT_EQ(assign_new_class(FeatureVector{1, 0}, split, centroids), 0);
    EXPECT_EQ(assign_new_class(ClassEmbeddings("new", 2, {0.f, 2.f, 0.f, 4.f}), split, centroids), 1);
}

TEST(AssignNewClass, TieGoesToLowestCluster) {
    CentroidSet centroids(2, {"a", "b"}, {{1, 0}, {0, 1}});
    const ClusterSplit split{2, {"a", "b"}, {0, 1}};
    EXPECT_EQ(assign_new_class(FeatureVector{1, 1}, split, centroids), 0);
    const ClusterSplit swapped{2, {"a", "b"}, {1, 0}};
    EXPECT_EQ(assign_new_class(FeatureVector{1, 1}, swapped, centroids), 0);
}

TEST(AssignNewClass, Errors) {
    CentroidSet centroids(2, {"a", "b"}, {{1, 0}, {0, 1}});
    const ClusterSplit split{2, {"a", "b"}, {0, 1}};
    EXPECT_THROW(assign_new_class(FeatureVector{0, 0}, split, centroids), DomainError);
    EXPECT_THROW(assign_new_class(FeatureVector{1, 0, 0}, split, centroids), ValidationError);
}

TEST(AssignNewClass, MatchesExhaustiveMeanDistance) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 30; ++trial) {
        const auto store = t::random_store(rng, 8, 4, 3);
        const auto sim = build_similarity_matrix(store);
        const auto split = ward_cluster(sim.matrix, 3).split;
        FeatureVector query(4);
        for (auto& q : query) q = std::abs(normal(rng)) + 0.01;

        std::vector<double> total(3, 0.0);
        std::vector<int> count(3, 0);
        for (std::size_t i = 0; i < store.size(); ++i) {
            const int c = split.assignments[i];
            total[c] += t::reference_cosine_distance(query, FeatureVector(sim.centroids.centroid(i).begin(), sim.centroids.centroid(i).end()));
            ++count[c];
        }
        int expected = 0;
        for (int c = 1; c < 3; ++c) {
            if (total[c] / count[c] < total[expected] / count[expected]) expected = c;
        }
        EXPECT_EQ(assign_new_class(query, split, sim.centroids), expected);
    }
}

}  // namespace
