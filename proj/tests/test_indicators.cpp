#include <doctest.h>

#include <algorithm>

#include "adaptrust/indicators.hpp"
#include "adaptrust/rng.hpp"
#include "adaptrust/synth.hpp"

using namespace adaptrust;

namespace {

using Members = std::set<std::string>;

std::vector<Members> members_of(const std::vector<UsageCluster>& clusters) {
    std::vector<Members> out;
    for (const auto& c : clusters) out.push_back(c.members);
    std::sort(out.begin(), out.end());
    return out;
}

IndicatorPartition partition_of(std::vector<Members> blocks) {
    IndicatorPartition p;
    for (auto& b : blocks) p.blocks.push_back({std::move(b), 0.0});
    return p;
}

Dataset uniform_dataset(int rating) {
    Dataset ds;
    ds.schema.attributes = {{"q", AttributeKind::Numeric, {}, 0.0, 1.0}};
    for (int s = 0; s < 4; ++s) ds.services.push_back({"S" + std::to_string(s), "", "", {}, {}, {{"q", 0.5}}});
    for (int u = 0; u < 5; ++u) ds.usages.push_back({"u" + std::to_string(u), {}, 1.0});
    for (const auto& s : ds.services)
        for (const auto& u : ds.usages) ds.ratings.push_back({s.id, u.id, rating});
    return ds;
}

} // namespace

TEST_CASE("cluster_by_rating gap clustering") {
    CHECK(members_of(cluster_by_rating({{"u1", 0.9}, {"u2", 0.9}, {"u3", 0.3}, {"u4", 0.3}}, 0.15)) ==
          std::vector<Members>{{"u1", "u2"}, {"u3", "u4"}});
    CHECK(members_of(cluster_by_rating({{"u1", 0.5}}, 0.15)) == std::vector<Members>{{"u1"}});
    CHECK(members_of(cluster_by_rating({{"u1", 0.2}, {"u2", 0.3}, {"u3", 0.4}}, 0.15)) ==
          std::vector<Members>{{"u1", "u2", "u3"}});
    CHECK_THROWS_AS(cluster_by_rating({}, 0.15), Error);
    CHECK_THROWS_AS(cluster_by_rating({{"u1", 0.5}}, 0.0), Error);

    const auto two = cluster_by_rating({{"u1", 0.9}, {"u2", 0.8}, {"u3", 0.3}}, 0.15);
    REQUIRE(two.size() == 2);
    CHECK(two[0].mean_rating == doctest::Approx(0.3));
    CHECK(two[1].mean_rating == doctest::Approx(0.85));
}

TEST_CASE("cluster_by_rating: a gap of exactly epsilon on the rating grid does not cut") {
    CHECK(cluster_by_rating({{"a", 0.3}, {"b", 0.45}}, 0.15).size() == 1);
    CHECK(cluster_by_rating({{"a", 0.7}, {"b", 0.9}}, 0.2).size() == 1);
    CHECK(cluster_by_rating({{"a", 0.7}, {"b", 0.9}}, 0.15).size() == 2);
}

TEST_CASE("cluster_by_rating property: partition of the input, sorted gaps respected") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<UsageRating> recs;
        const auto n = 1 + rng.index(12);
        for (std::size_t i = 0; i < n; ++i) recs.push_back({"u" + std::to_string(i), rng.integer(1, 10) / 10.0});
        const double eps = 0.05 + rng.uniform() * 0.3;
        const auto clusters = cluster_by_rating(recs, eps);
        std::size_t total = 0;
        for (const auto& c : clusters) {
            CHECK_FALSE(c.members.empty());
            total += c.members.size();
        }
        CHECK(total == n);
        // Any two usages within eps of each other share a cluster.
        for (const auto& a : recs)
            for (const auto& b : recs) {
                if (std::abs(a.second - b.second) > eps) continue;
                const auto in_same = std::any_of(clusters.begin(), clusters.end(), [&](const UsageCluster& c) {
                    return c.members.count(a.first) && c.members.count(b.first);
                });
                CHECK(in_same);
            }
    }
}

TEST_CASE("refine_partition examples") {
    const std::map<std::string, double> ref{{"A", 0.9}, {"B", 0.3}, {"C", 0.8}, {"D", 0.5}};

    SUBCASE("split and identity merge") {
        const auto next = cluster_by_rating({{"A", 0.9}, {"B", 0.3}, {"C", 0.6}, {"D", 0.6}}, 0.15);
        const auto out = refine_partition(partition_of({{"A", "B"}, {"C", "D"}}), next, ref);
        CHECK(members_of(out.blocks) == std::vector<Members>{{"A"}, {"B"}, {"C", "D"}});
    }
    SUBCASE("identical partition is a fixed point") {
        const auto next = cluster_by_rating({{"A", 0.5}, {"B", 0.5}}, 0.15);
        const auto out = refine_partition(partition_of({{"A", "B"}}), next, ref);
        CHECK(members_of(out.blocks) == std::vector<Members>{{"A", "B"}});
    }
    SUBCASE("unseen member joins the nearest intersection") {
        const auto next = cluster_by_rating({{"A", 0.9}, {"B", 0.3}}, 0.15);
        const auto out = refine_partition(partition_of({{"A", "B", "C"}}), next, ref);
        CHECK(members_of(out.blocks) == std::vector<Members>{{"A", "C"}, {"B"}});
    }
    SUBCASE("no overlap keeps the block and newcomers open a new one") {
        const auto next = cluster_by_rating({{"C", 0.8}}, 0.15);
        const auto out = refine_partition(partition_of({{"A", "B"}}), next, ref);
        CHECK(members_of(out.blocks) == std::vector<Members>{{"A", "B"}, {"C"}});
    }
    SUBCASE("merge branch absorbs newcomers only") {
        const auto next = cluster_by_rating({{"A", 0.9}, {"C", 0.9}, {"D", 0.9}}, 0.15);
        const auto out = refine_partition(partition_of({{"A"}, {"D"}}), next, ref);
        // A's block takes the newcomer C; D stays where it was.
        CHECK(members_of(out.blocks) == std::vector<Members>{{"A", "C"}, {"D"}});
    }
}

TEST_CASE("refine_partition property: blocks stay a nonempty partition of everything seen") {
    Rng rng(5);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 2 + rng.index(9);
        std::map<std::string, double> ref;
        for (std::size_t i = 0; i < n; ++i) ref["u" + std::to_string(i)] = rng.integer(1, 10) / 10.0;

        IndicatorPartition p;
        Members seen;
        for (int step = 0; step < 6; ++step) {
            std::vector<UsageRating> recs;
            for (const auto& [id, _] : ref)
                if (rng.uniform() < 0.7) recs.push_back({id, rng.integer(1, 10) / 10.0});
            if (recs.empty()) continue;
            const auto clusters = cluster_by_rating(recs, 0.15);
            if (p.blocks.empty()) p.blocks = clusters;
            else p = refine_partition(p, clusters, ref);
            for (const auto& r : recs) seen.insert(r.first);

            Members uni;
            std::size_t total = 0;
            for (const auto& b : p.blocks) {
                CHECK_FALSE(b.members.empty());
                total += b.members.size();
                uni.insert(b.members.begin(), b.members.end());
            }
            CHECK(uni == seen);
            CHECK(total == seen.size());
        }
    }
}

TEST_CASE("detect_indicator_count") {
    SUBCASE("identical ratings everywhere give one indicator") {
        const auto det = detect_indicator_count(uniform_dataset(7));
        CHECK(det.count == 1);
        CHECK(det.partition.blocks.front().members.size() == 5);
    }
    SUBCASE("empty ratings") {
        auto ds = uniform_dataset(7);
        ds.ratings.clear();
        CHECK_THROWS_AS(detect_indicator_count(ds), Error);
    }
    for (std::size_t k : {2, 3}) {
        CAPTURE(k);
        GeneratorConfig g;
        g.indicator_count = k;
        g.num_usages = 4 * k;
        const auto data = generate_dataset(g);
        const auto det = detect_indicator_count(data.dataset);
        CHECK(det.count == k);
        // Blocks match the generator's ground-truth blocks.
        for (const auto& b : det.partition.blocks) {
            const auto truth = data.truth.usage_block.at(*b.members.begin());
            for (const auto& id : b.members) CHECK(data.truth.usage_block.at(id) == truth);
        }
    }
}

TEST_CASE("detect_indicator_count is deterministic and bounded") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GeneratorConfig g;
        g.num_services = 40;
        g.noise_std = 0.1;
        g.seed = seed;
        const auto data = generate_dataset(g);
        const auto a = detect_indicator_count(data.dataset);
        auto shuffled = data.dataset;
        Rng rng(seed);
        rng.shuffle(shuffled.ratings);
        const auto b = detect_indicator_count(shuffled);
        CHECK(a.count == b.count);
        CHECK(a.partition.blocks == b.partition.blocks);
        CHECK(a.count >= 1);
        CHECK(a.count <= data.dataset.usages.size());
    }
}

TEST_CASE("usages whose ratings differ by more than epsilon everywhere are separated") {
    Dataset ds = uniform_dataset(5);
    for (auto& r : ds.ratings)
        if (r.usage_id == "u0") r.rating = r.service_id == "S0" ? 9 : 8;
    const auto det = detect_indicator_count(ds);
    CHECK(det.partition.block_of("u0") != det.partition.block_of("u1"));
    CHECK(det.count == 2);
}
