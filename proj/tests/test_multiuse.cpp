#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "adaptrust/indicators.hpp"
#include "adaptrust/multiuse.hpp"
#include "adaptrust/rng.hpp"
#include "adaptrust/synth.hpp"

using namespace adaptrust;

namespace {

const std::vector<IndicatorVector> kTable1{IndicatorVector({0.6, 0.1}), IndicatorVector({0.9, 0.2}),
                                           IndicatorVector({0.9, 0.3}), IndicatorVector({0.1, 0.9})};

// Independent spread objective: max weighted distance minus min weighted distance.
double objective(double p, const std::vector<double>& column, const std::vector<double>& weights) {
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < column.size(); ++u) {
        const double d = weights[u] * std::abs(p - column[u]);
        hi = std::max(hi, d);
        lo = std::min(lo, d);
    }
    return hi - lo;
}

double brute_min(const std::vector<double>& column, const std::vector<double>& weights, int steps) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) best = std::min(best, objective(static_cast<double>(i) / steps, column, weights));
    return best;
}

std::vector<double> column_of(const std::vector<IndicatorVector>& v, std::size_t k) {
    std::vector<double> out;
    for (const auto& e : v) out.push_back(e[k]);
    return out;
}

std::vector<IndicatorVector> random_expectations(Rng& rng, std::size_t n, std::size_t k, bool on_grid) {
    std::vector<IndicatorVector> out(n);
    for (auto& e : out)
        for (std::size_t i = 0; i < k; ++i) e.values.push_back(on_grid ? rng.integer(0, 100) / 100.0 : rng.uniform());
    return out;
}

} // namespace

TEST_CASE("grid spec") {
    const GridSpec g;
    CHECK(g.points() == 101);
    CHECK(g.at(0) == 0.0);
    CHECK(g.at(35) == 0.35);
    CHECK(g.at(100) == 1.0);
    CHECK_THROWS_AS((GridSpec{0.0, 1.0, 0.0}.points()), Error);
}

TEST_CASE("fairness") {
    CHECK(fairness(IndicatorVector({0.625, 0.375}), kTable1) == doctest::Approx(0.372).epsilon(0.005 / 0.372));
    CHECK(std::abs(fairness(IndicatorVector({0.354, 0.5}), kTable1) - 0.754) <= 0.01);
    const std::vector<IndicatorVector> one{IndicatorVector({0.3, 0.4})};
    CHECK(fairness(IndicatorVector({0.9, 0.9}), one) == 1.0);
    CHECK(fairness(IndicatorVector({0.3, 0.4}), one) == 1.0);
    CHECK_THROWS_AS(fairness(IndicatorVector({0.3}), kTable1), Error);
    CHECK_THROWS_AS(fairness(IndicatorVector({0.3}), std::vector<IndicatorVector>{}), Error);
}

TEST_CASE("fairness range, permutation invariance, equidistance") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.index(6);
        const std::size_t k = 1 + rng.index(4);
        auto exps = random_expectations(rng, n, k, false);
        IndicatorVector agg;
        for (std::size_t i = 0; i < k; ++i) agg.values.push_back(rng.uniform());
        const double f = fairness(agg, exps);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        rng.shuffle(exps);
        CHECK(fairness(agg, exps) == doctest::Approx(f).epsilon(1e-12));
    }
    // Points on a circle around the aggregate are equidistant.
    const std::vector<IndicatorVector> ring{IndicatorVector({0.8, 0.5}), IndicatorVector({0.5, 0.8}),
                                            IndicatorVector({0.2, 0.5})};
    CHECK(fairness(IndicatorVector({0.5, 0.5}), ring) == doctest::Approx(1.0));
    CHECK(fairness(IndicatorVector({0.6, 0.5}), ring) < 1.0);
}

TEST_CASE("average aggregation") {
    const auto r = aggregate_average(kTable1);
    CHECK(r.vector[0] == 0.625);
    CHECK(r.vector[1] == 0.375);
    CHECK(r.optimal_range[0].first == r.vector[0]);
    CHECK(r.optimal_range[0].second == r.vector[0]);
    CHECK(aggregate_average(std::vector<IndicatorVector>(3, IndicatorVector({0.4, 0.7}))).vector ==
          IndicatorVector({0.4, 0.7}));
    CHECK(aggregate_average(std::vector<IndicatorVector>{IndicatorVector({0.2}), IndicatorVector({0.8})}).vector[0] ==
          doctest::Approx(0.5));
    CHECK_THROWS_AS(aggregate_average(std::vector<IndicatorVector>{}), Error);

    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        auto exps = random_expectations(rng, 1 + rng.index(6), 3, true);
        const auto a = aggregate_average(exps).vector;
        rng.shuffle(exps);
        const auto b = aggregate_average(exps).vector;
        for (std::size_t i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}

TEST_CASE("closeness aggregation on Table 1") {
    const auto r = aggregate_closeness(kTable1);
    CHECK(r.optimal_range[0].first == doctest::Approx(0.35));
    CHECK(r.optimal_range[0].second == doctest::Approx(0.50));
    CHECK(r.optimal_range[1].first == doctest::Approx(0.50));
    CHECK(r.optimal_range[1].second == doctest::Approx(0.60));
    CHECK(r.optimal_range[0].first <= 0.354);
    CHECK(0.354 <= r.optimal_range[0].second);
    CHECK(r.optimal_range[1].first <= 0.5);
    CHECK(0.5 <= r.optimal_range[1].second);
    // returned component: minimizer nearest the range midpoint, half up
    CHECK(r.vector[0] == doctest::Approx(0.43));
    CHECK(r.vector[1] == doctest::Approx(0.55));

    const std::vector<double> ones(4, 1.0);
    CHECK(objective(r.vector[0], column_of(kTable1, 0), ones) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(objective(r.vector[1], column_of(kTable1, 1), ones) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(brute_min(column_of(kTable1, 0), ones, 1000) == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(brute_min(column_of(kTable1, 1), ones, 1000) == doctest::Approx(0.2).epsilon(1e-9));

    CHECK(r.fairness > aggregate_average(kTable1).fairness);
}

TEST_CASE("closeness aggregation small cases") {
    const std::vector<IndicatorVector> two{IndicatorVector({0.2}), IndicatorVector({0.8})};
    const auto r = aggregate_closeness(two);
    CHECK(r.vector[0] == doctest::Approx(0.5));
    CHECK(r.optimal_range[0].first == doctest::Approx(0.5));
    CHECK(r.optimal_range[0].second == doctest::Approx(0.5));

    const std::vector<double> sig{0.75, 0.25};
    const auto w = aggregate_closeness_weighted(two, sig);
    CHECK(w.vector[0] == doctest::Approx(0.35));
    CHECK(w.optimal_range[0].first == doctest::Approx(0.35));
    CHECK(w.optimal_range[0].second == doctest::Approx(0.35));

    const std::vector<IndicatorVector> single{IndicatorVector({0.37, 0.81})};
    const std::vector<double> full{1.0};
    CHECK(aggregate_closeness_weighted(single, full).vector == single.front());
    CHECK(aggregate_closeness(single).vector == single.front());

    CHECK_THROWS_AS(aggregate_closeness(std::vector<IndicatorVector>{}), Error);
    CHECK_THROWS_AS(aggregate_closeness_weighted(two, full), Error);
    const std::vector<double> bad_sum{0.5, 0.6};
    CHECK_THROWS_AS(aggregate_closeness_weighted(two, bad_sum), Error);
}

TEST_CASE("closeness grid optimality against a 10x finer brute force") {
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.index(5);
        const bool weighted = trial % 2 == 1;
        const auto exps = random_expectations(rng, n, 2, trial % 3 != 0);
        std::vector<double> weights(n, 1.0);
        if (weighted) {
            std::vector<double> durations;
            for (std::size_t u = 0; u < n; ++u) durations.push_back(static_cast<double>(rng.integer(1, 120)));
            weights = usage_significance(durations);
        }
        const auto r = weighted ? aggregate_closeness_weighted(exps, weights) : aggregate_closeness(exps);
        const double max_w = *std::max_element(weights.begin(), weights.end());
        for (std::size_t k = 0; k < 2; ++k) {
            const auto col = column_of(exps, k);
            const double chosen = objective(r.vector[k], col, weights);
            // no coarse grid point is better
            CHECK(chosen <= brute_min(col, weights, 100) + 1e-9);
            // the finer grid improves by at most one step's Lipschitz bound
            CHECK(chosen <= brute_min(col, weights, 1000) + 2.0 * max_w * 0.01 + 1e-12);
            // the chosen point lies inside the reported range
            CHECK(r.optimal_range[k].first <= r.vector[k] + 1e-12);
            CHECK(r.vector[k] <= r.optimal_range[k].second + 1e-12);
        }
    }
}

TEST_CASE("uniform significances leave the argmin set unchanged") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.index(6);
        const auto exps = random_expectations(rng, n, 3, trial % 2 == 0);
        const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
        double total = 0.0;
        for (double s : uniform) total += s;
        if (std::abs(total - 1.0) > 1e-9) continue;
        const auto a = aggregate_closeness(exps);
        const auto b = aggregate_closeness_weighted(exps, uniform);
        CHECK(a.optimal_range == b.optimal_range);
        CHECK(a.vector == b.vector);
    }
}

TEST_CASE("usage significance") {
    const std::vector<double> four(4, 12.0);
    CHECK(usage_significance(four) == std::vector<double>(4, 0.25));
    const std::vector<double> two{30.0, 10.0};
    CHECK(usage_significance(two) == std::vector<double>{0.75, 0.25});
    const std::vector<double> zeros(3, 0.0);
    try {
        usage_significance(zeros);
        FAIL("expected ZeroTotalDuration");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroTotalDuration);
    }
    const std::vector<double> negative{-1.0, 2.0};
    CHECK_THROWS_AS(usage_significance(negative), Error);
}

TEST_CASE("aggregation method names") {
    CHECK(aggregation_from_name("avg") == AggregationMethod::Average);
    CHECK(aggregation_from_name("closeness") == AggregationMethod::Closeness);
    CHECK(aggregation_from_name("weighted") == AggregationMethod::Weighted);
    try {
        aggregation_from_name("median");
        FAIL("expected UnknownMethod");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownMethod);
    }
    for (auto m : {AggregationMethod::Average, AggregationMethod::Closeness, AggregationMethod::Weighted})
        CHECK(aggregation_from_name(aggregation_name(m)) == m);
}

TEST_CASE("usage pattern prediction") {
    SUBCASE("single usage history") {
        const std::vector<UsageEvent> h{{0, "maps"}, {3600, "maps"}, {7200, "maps"}};
        CHECK(predict_usage_pattern(h, {0, "maps"}, 3).usages == std::vector<std::string>{"maps"});
    }
    SUBCASE("follower of the last usage ranks first") {
        std::vector<UsageEvent> h;
        std::int64_t t = 0;
        for (int i = 0; i < 5; ++i) {
            h.push_back({t += 600, "B"});
            h.push_back({t += 600, "A"});
            h.push_back({t += 600, "C"});
            h.push_back({t += 600, "C"});
        }
        CHECK(predict_usage_pattern(h, {0, "B"}, 1).usages == std::vector<std::string>{"A"});
        // without a matching last usage, raw frequency decides
        CHECK(predict_usage_pattern(h, {0, "Z"}, 1).usages == std::vector<std::string>{"C"});
    }
    SUBCASE("hour buckets") {
        CHECK(hour_bucket(0) == 0);
        CHECK(hour_bucket(6 * 3600) == 1);
        CHECK(hour_bucket(23 * 3600 + 59) == 3);
        CHECK(hour_bucket(24 * 3600) == 0);
    }
    SUBCASE("errors") {
        try {
            predict_usage_pattern(std::vector<UsageEvent>{}, {0, ""}, 2);
            FAIL("expected EmptyHistory");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::EmptyHistory);
        }
    }
}

TEST_CASE("usage pattern prediction recovers a Markov chain's argmax") {
    const std::vector<std::string> apps{"a", "b", "c", "d", "e"};
    // Row = current app, column = next; the dominant entry differs per row
    // and per quarter of the day.
    auto next_probs = [&](std::size_t row, int bucket) {
        std::vector<double> p(apps.size(), 0.1);
        p[(row + 1 + static_cast<std::size_t>(bucket)) % apps.size()] = 0.6;
        return p;
    };
    Rng rng(31);
    std::vector<UsageEvent> history;
    std::size_t current = 0;
    std::int64_t t = 0;
    for (int i = 0; i < 20000; ++i) {
        t += 900;
        const auto p = next_probs(current, hour_bucket(t));
        double u = rng.uniform();
        std::size_t next = 0;
        while (next + 1 < p.size() && u >= p[next]) u -= p[next++];
        history.push_back({t, apps[next]});
        current = next;
    }
    int hits = 0;
    int contexts = 0;
    for (std::size_t last = 0; last < apps.size(); ++last)
        for (int bucket = 0; bucket < 4; ++bucket) {
            const auto p = next_probs(last, bucket);
            const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
            const auto pattern = predict_usage_pattern(history, {bucket, apps[last]}, 1);
            hits += pattern.usages.front() == apps[best];
            ++contexts;
        }
    CHECK(static_cast<double>(hits) >= 0.9 * contexts);
}

TEST_CASE("multi-use trust from injected expectations") {
    const IndicatorVector full({1.0, 1.0});
    const std::vector<double> uniform(4, 0.25);
    for (auto m : {AggregationMethod::Average, AggregationMethod::Closeness, AggregationMethod::Weighted})
        CHECK(multi_use_trust(full, kTable1, m, uniform).value == 1.0);

    const IndicatorVector service({0.9, 0.2});
    const auto agg = aggregate_closeness(kTable1).vector; // (0.43, 0.55)
    const double by_hand = (std::min(0.9, 0.43) + std::min(0.2, 0.55)) / (0.43 + 0.55);
    const auto score = multi_use_trust(service, kTable1, AggregationMethod::Closeness);
    CHECK(agg == IndicatorVector({0.43, 0.55}));
    CHECK(score.value == doctest::Approx(by_hand).epsilon(1e-12));
    CHECK(score.level == trust_level(by_hand));
}

TEST_CASE("multi-use trust through trained models") {
    GeneratorConfig g;
    g.num_services = 30;
    g.num_usages = 6;
    const auto data = generate_dataset(g);
    const auto det = detect_indicator_count(data.dataset);
    ModelConfig m;
    m.service_train.epochs = 30;
    m.usage_train.epochs = 30;
    const auto pair = train_model_pair(data.dataset, det.partition, m);
    const auto& service = data.dataset.services[3];
    for (const auto& u : data.dataset.usages) {
        const auto single = assess(pair, service, u);
        const UsagePattern plain{{u.id}, std::nullopt};
        const UsagePattern weighted{{u.id}, std::vector<double>{1.0}};
        CHECK(multi_use_trust(pair, service, data.dataset.usages, plain, AggregationMethod::Average) == single);
        CHECK(multi_use_trust(pair, service, data.dataset.usages, plain, AggregationMethod::Closeness) == single);
        CHECK(multi_use_trust(pair, service, data.dataset.usages, weighted, AggregationMethod::Weighted) == single);
    }
    const UsagePattern no_sig{{"u1", "u2"}, std::nullopt};
    CHECK_THROWS_AS(multi_use_trust(pair, service, data.dataset.usages, no_sig, AggregationMethod::Weighted), Error);
    const UsagePattern dangling{{"u1", "nope"}, std::nullopt};
    CHECK_THROWS_AS(multi_use_trust(pair, service, data.dataset.usages, dangling, AggregationMethod::Average), Error);
}
