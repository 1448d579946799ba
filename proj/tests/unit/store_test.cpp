#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "oracles.hpp"
#include "simclust/error.hpp"
#include "simclust/store.hpp"

namespace {

using namespace simclust;
using simclust::testing::TempDir;

std::vector<std::byte> header(std::uint32_t dim, std::uint32_t count) {
    std::vector<std::byte> out;
    for (char c : std::string("FVEC1")) out.push_back(static_cast<std::byte>(c));
    for (auto v : {dim, count}) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
    }
    return out;
}

void append_float(std::vector<std::byte>& out, float f) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xff));
}

TEST(Fvec, ReadsHandWrittenFile) {
    auto bytes = header(3, 2);
    for (float f : {1.f, 2.f, 3.f, 4.f, 5.f, 6.f}) append_float(bytes, f);

    const auto data = parse_fvec(bytes);
    EXPECT_EQ(data.dim, 3u);
    EXPECT_EQ(data.count, 2u);
    EXPECT_EQ(data.values, (std::vector<float>{1, 2, 3, 4, 5, 6}));
    EXPECT_EQ(data.row(1)[0], 4.f);
}

TEST(Fvec, SingleZeroVectorIs21Bytes) {
    const auto bytes = encode_fvec(2, std::vector<float>{0.f, 0.f});
    EXPECT_EQ(bytes.size(), 21u);
    EXPECT_EQ(bytes[0], std::byte{0x46});
    EXPECT_EQ(bytes[4], std::byte{0x31});
    EXPECT_EQ(bytes[5], std::byte{2});
    EXPECT_EQ(bytes[9], std::byte{1});
}

TEST(Fvec, EncodingIsDeterministic) {
    std::vector<float> values{1.5f, -2.25f, 3e-7f, 1e30f};
    EXPECT_EQ(encode_fvec(2, values), encode_fvec(2, values));
}

TEST(Fvec, RejectsEmptyAndRaggedInput) {
    TempDir dir;
    EXPECT_THROW(save_fvec(dir / "a.fvec", std::vector<std::vector<float>>{}), ValidationError);
    EXPECT_THROW(save_fvec(dir / "b.fvec", std::vector<std::vector<float>>{{1.f, 2.f}, {3.f}}), ValidationError);
    EXPECT_THROW(encode_fvec(2, std::vector<float>{1.f, 2.f, 3.f}), ValidationError);
}

TEST(Fvec, ParseErrorsNameTheOffset) {
    auto good = header(2, 1);
    append_float(good, 1.f);
    append_float(good, 2.f);

    auto bad_magic = good;
    bad_magic[0] = std::byte{'X'};
    try {
        parse_fvec(bad_magic);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 0u);
        EXPECT_NE(std::string(e.what()).find("magic"), std::string::npos);
    }

    try {
        parse_fvec(header(0, 1));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 5u);
    }

    try {
        parse_fvec(header(2, 0));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 9u);
    }

    auto truncated = good;
    truncated.pop_back();
    try {
        parse_fvec(truncated);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), truncated.size());
        EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
    }

    auto nonfinite = header(2, 1);
    append_float(nonfinite, 1.f);
    append_float(nonfinite, std::numeric_limits<float>::quiet_NaN());
    try {
        parse_fvec(nonfinite);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 17u);
    }

    auto trailing = good;
    trailing.push_back(std::byte{0});
    EXPECT_THROW(parse_fvec(trailing), ParseError);

    EXPECT_THROW(parse_fvec(std::vector<std::byte>(7, std::byte{'F'})), ParseError);
}

TEST(Fvec, RandomRoundTripIsByteExact) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> dims(1, 40);
    std::uniform_int_distribution<std::uint32_t> bits;
    TempDir dir;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t dim = dims(rng);
        const std::size_t count = dims(rng);
        std::vector<float> values(dim * count);
        for (auto& v : values) {
            do {
                v = std::bit_cast<float>(bits(rng));
            } while (!std::isfinite(v));
        }
        const auto path = dir / ("r" + std::to_string(trial) + ".fvec");
        save_fvec(path, dim, values);
        const auto bytes = read_binary_file(path);
        const auto loaded = load_fvec(path);
        EXPECT_EQ(loaded.dim, dim);
        ASSERT_EQ(loaded.values.size(), values.size());
        EXPECT_TRUE(std::equal(values.begin(), values.end(), loaded.values.begin(),
                               [](float a, float b) { return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b); }));
        EXPECT_EQ(encode_fvec(loaded.dim, loaded.values), bytes);
    }
}

TEST(Store, InvariantsAreChecked) {
    EXPECT_THROW(ClassEmbeddings("", 2, {1.f, 2.f}), ValidationError);
    EXPECT_THROW(ClassEmbeddings("a", 2, {}), ValidationError);
    EXPECT_THROW(ClassEmbeddings("a", 2, {1.f, 2.f, 3.f}), ValidationError);
    EXPECT_THROW(ClassEmbeddings("a", 1, {std::numeric_limits<float>::infinity()}), ValidationError);

    ClassEmbeddings a("a", 2, {1.f, 2.f});
    ClassEmbeddings a3("a", 3, {1.f, 2.f, 3.f});
    EXPECT_THROW(DatasetStore(2, {}), ValidationError);
    EXPECT_THROW(DatasetStore(2, {a, a}), ValidationError);
    EXPECT_THROW(DatasetStore(2, {a3}), ValidationError);
}

TEST(Store, MinimalStoreRoundTrips) {
    TempDir dir;
    DatasetStore store(1, {ClassEmbeddings("only", 1, {0.5f})}, "tiny");
    save_store(store, dir / "manifest.json");
    const auto loaded = load_store(dir / "manifest.json");
    EXPECT_EQ(loaded, store);
    EXPECT_EQ(loaded.size(), 1u);
}

TEST(Store, SaveLoadPreservesOrderAndValues) {
    std::mt19937_64 rng(3);
    TempDir dir;
    for (int trial = 0; trial < 5; ++trial) {
        const auto store = simclust::testing::random_store(rng, 2 + trial, 3 + trial, 4);
        const auto path = dir / ("m" + std::to_string(trial)) / "manifest.json";
        save_store(store, path);
        EXPECT_EQ(load_store(path), store);
    }
}

TEST(Store, CountMismatchNamesTheClass) {
    TempDir dir;
    std::vector<float> nine(9 * 2, 1.f);
    save_fvec(dir / "a.fvec", 2, nine);
    Json manifest{{"dim", 2},
                  {"classes", Json::array({Json{{"name", "A"}, {"file", "a.fvec"}, {"count", 10}}})},
                  {"source_tag", "t"}};
    write_text_file(dir / "manifest.json", manifest.dump());
    try {
        load_store(dir / "manifest.json");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("'A'"), std::string::npos);
    }
}

TEST(Store, DimMismatchAndDuplicatesAreRejected) {
    TempDir dir;
    save_fvec(dir / "a.fvec", 2, std::vector<float>{1.f, 2.f});
    save_fvec(dir / "b.fvec", 3, std::vector<float>{1.f, 2.f, 3.f});
    Json dim_mismatch{{"dim", 2},
                      {"classes", Json::array({Json{{"name", "A"}, {"file", "a.fvec"}, {"count", 1}},
                                               Json{{"name", "B"}, {"file", "b.fvec"}, {"count", 1}}})}};
    write_text_file(dir / "m1.json", dim_mismatch.dump());
    try {
        load_store(dir / "m1.json");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("'B'"), std::string::npos);
    }

    Json duplicate{{"dim", 2},
                   {"classes", Json::array({Json{{"name", "A"}, {"file", "a.fvec"}, {"count", 1}},
                                            Json{{"name", "A"}, {"file", "a.fvec"}, {"count", 1}}})}};
    write_text_file(dir / "m2.json", duplicate.dump());
    EXPECT_THROW(load_store(dir / "m2.json"), ValidationError);

    EXPECT_THROW(load_store(dir / "missing.json"), IoError);
}

TEST(Store, OneHundredTwoClassManifest) {
    TempDir dir;
    std::vector<ClassEmbeddings> classes;
    for (int i = 0; i < 102; ++i) {
        classes.emplace_back("flower_" + std::to_string(i), 4, std::vector<float>{1.f, 2.f, 3.f, float(i)});
    }
    save_store(DatasetStore(4, std::move(classes)), dir / "manifest.json");
    EXPECT_EQ(load_store(dir / "manifest.json").size(), 102u);
}

TEST(Split, JsonRoundTripKeepsOrder) {
    ClusterSplit split{2, {"z", "a", "m"}, {1, 0, 1}, "ward", std::vector<double>{0.5, 1.25}};
    TempDir dir;
    save_split(split, dir / "s.json");
    EXPECT_EQ(load_split(dir / "s.json"), split);

    ClusterSplit no_heights{1, {"x"}, {0}, "ward", std::nullopt};
    save_split(no_heights, dir / "t.json");
    EXPECT_EQ(load_split(dir / "t.json"), no_heights);
}

TEST(Split, ValidationErrors) {
    EXPECT_THROW(validate_split(ClusterSplit{2, {"a", "b"}, {0, 2}}), ValidationError);
    EXPECT_THROW(validate_split(ClusterSplit{3, {"a", "b"}, {0, 1}}), ValidationError);
    EXPECT_THROW(validate_split(ClusterSplit{0, {}, {}}), ValidationError);

    const std::vector<std::string> names{"a", "b", "c"};
    EXPECT_THROW(validate_split(ClusterSplit{2, {"a", "b"}, {0, 1}}, names), ValidationError);
    EXPECT_THROW(validate_split(ClusterSplit{2, {"a", "b", "q"}, {0, 1, 1}}, names), ValidationError);
    EXPECT_NO_THROW(validate_split(ClusterSplit{2, {"c", "a", "b"}, {0, 1, 1}}, names));

    Json doc = Json::parse(R"({"k": 2, "linkage": "ward", "assignments": {"a": 0, "b": 2}, "merge_heights": null})");
    EXPECT_THROW(split_from_json(doc), ValidationError);
}

std::multiset<std::size_t> size_multiset(const ClusterSplit& split) {
    const auto sizes = split.cluster_sizes();
    return {sizes.begin(), sizes.end()};
}

TEST(Fixtures, OxfordFlowerSplits) {
    const std::filesystem::path dir(SIMCLUST_FIXTURE_DIR);
    const auto two = load_split(dir / "oxford_flowers_two_split.json");
    EXPECT_EQ(two.k, 2);
    EXPECT_EQ(two.classes.size(), 102u);
    EXPECT_EQ(size_multiset(two), (std::multiset<std::size_t>{86, 16}));

    const auto three = load_split(dir / "oxford_flowers_three_split.json");
    EXPECT_EQ(three.k, 3);
    EXPECT_EQ(three.classes, two.classes);
    EXPECT_EQ(size_multiset(three), (std::multiset<std::size_t>{16, 69, 17}));
}

TEST(Fixtures, StanfordDogsExpectation) {
    const auto doc = read_json_file(std::filesystem::path(SIMCLUST_FIXTURE_DIR) / "stanford_dogs_expectation.json");
    EXPECT_EQ(doc["n_classes"].get<int>(), 120);
    EXPECT_EQ(doc["two_split"]["cluster_sizes"].get<std::vector<int>>(), (std::vector<int>{76, 44}));
    EXPECT_EQ(doc["three_split"]["cluster_ratio"].get<std::vector<int>>(), (std::vector<int>{33, 22, 5}));
}

}  // namespace
