#include "adaptrust/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adaptrust {

namespace {

// Ratings are averages of multiples of 0.1, so gap comparisons need slack.
constexpr double kGapSlack = 1e-9;

using Block = std::set<std::string>;

double reference_mean(const Block& members, const std::map<std::string, double>& reference) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& m : members) {
        auto it = reference.find(m);
        if (it == reference.end()) continue;
        sum += it->second;
        ++n;
    }
    return n ? sum / n : 0.0;
}

bool intersects(const Block& a, const Block& b) {
    const Block& small = a.size() < b.size() ? a : b;
    const Block& large = a.size() < b.size() ? b : a;
    for (const auto& x : small)
        if (large.count(x)) return true;
    return false;
}

std::size_t nearest(const std::vector<double>& means, double value) {
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < means.size(); ++i) {
        const double d = std::abs(means[i] - value);
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

double lookup(const std::map<std::string, double>& reference, const std::string& id) {
    auto it = reference.find(id);
    return it == reference.end() ? 0.0 : it->second;
}

IndicatorPartition assemble(std::vector<Block> blocks, double epsilon,
                            const std::map<std::string, double>& reference) {
    std::erase_if(blocks, [](const Block& b) { return b.empty(); });
    std::sort(blocks.begin(), blocks.end());
    blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
    IndicatorPartition out;
    out.epsilon = epsilon;
    for (auto& b : blocks) {
        const double mean = reference_mean(b, reference);
        out.blocks.push_back({std::move(b), mean});
    }
    return out;
}

} // namespace

int IndicatorPartition::block_of(const std::string& usage_id) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].members.count(usage_id)) return static_cast<int>(i);
    return -1;
}

std::vector<UsageCluster> cluster_by_rating(std::vector<UsageRating> records, double epsilon) {
    if (records.empty()) throw Error(ErrorKind::EmptyInput, "no ratings to cluster");
    if (!(epsilon > 0.0)) throw Error(ErrorKind::OutOfRange, "epsilon must be positive");
    std::sort(records.begin(), records.end(),
              [](const UsageRating& a, const UsageRating& b) {
                  return a.second != b.second ? a.second < b.second : a.first < b.first;
              });

    std::vector<UsageCluster> clusters;
    double sum = 0.0;
    auto close = [&] {
        clusters.back().mean_rating = sum / clusters.back().members.size();
        sum = 0.0;
    };
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i == 0 || records[i].second - records[i - 1].second > epsilon + kGapSlack) {
            if (i != 0) close();
            clusters.emplace_back();
        }
        clusters.back().members.insert(records[i].first);
        sum += records[i].second;
    }
    close();
    return clusters;
}

IndicatorPartition refine_partition(const IndicatorPartition& current,
                                    const std::vector<UsageCluster>& next_clusters,
                                    const std::map<std::string, double>& reference) {
    Block seen;
    for (const auto& c : current.blocks) seen.insert(c.members.begin(), c.members.end());

    std::vector<Block> blocks;
    for (const auto& c : current.blocks) {
        std::vector<const UsageCluster*> similar;
        for (const auto& s : next_clusters)
            if (intersects(c.members, s.members)) similar.push_back(&s);

        if (similar.size() <= 1) {
            // No overlap keeps the block; a single overlapping cluster is a
            // merge whose only new members are newcomers, handled below.
            blocks.push_back(c.members);
            continue;
        }

        std::vector<Block> parts;
        Block covered;
        for (const auto* s : similar) {
            Block part;
            for (const auto& m : c.members)
                if (s->members.count(m)) part.insert(m);
            covered.insert(part.begin(), part.end());
            parts.push_back(std::move(part));
        }
        std::vector<double> means;
        for (const auto& p : parts) means.push_back(reference_mean(p, reference));
        for (const auto& m : c.members) {
            if (covered.count(m)) continue;
            parts[nearest(means, lookup(reference, m))].insert(m);
        }
        for (auto& p : parts) blocks.push_back(std::move(p));
    }

    // Usages appearing for the first time join the block they co-cluster with,
    // or open a new block when their cluster holds no known usage.
    for (const auto& s : next_clusters) {
        Block newcomers;
        for (const auto& m : s.members)
            if (!seen.count(m)) newcomers.insert(m);
        if (newcomers.empty()) continue;

        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < blocks.size(); ++i)
            if (intersects(blocks[i], s.members)) candidates.push_back(i);
        if (candidates.empty()) {
            blocks.push_back(std::move(newcomers));
            continue;
        }
        std::vector<double> means;
        for (auto i : candidates) means.push_back(reference_mean(blocks[i], reference));
        for (const auto& m : newcomers) blocks[candidates[nearest(means, lookup(reference, m))]].insert(m);
    }

    return assemble(std::move(blocks), current.epsilon, reference);
}

IndicatorDetection detect_indicator_count(const Dataset& dataset, double epsilon) {
    if (dataset.ratings.empty()) throw Error(ErrorKind::EmptyInput, "dataset has no rating records");
    if (!(epsilon > 0.0)) throw Error(ErrorKind::OutOfRange, "epsilon must be positive");

    // service -> usage -> (sum, count); std::map gives the lexicographic service order.
    std::map<std::string, std::map<std::string, std::pair<double, int>>> grouped;
    for (const auto& r : dataset.ratings) {
        auto& acc = grouped[r.service_id][r.usage_id];
        acc.first += normalize_rating(r.rating);
        acc.second += 1;
    }

    std::map<std::string, std::vector<UsageRating>> per_service;
    std::map<std::string, std::pair<double, int>> global;
    for (const auto& [service, usages] : grouped) {
        auto& rows = per_service[service];
        for (const auto& [usage, acc] : usages) {
            const double mean = acc.first / acc.second;
            rows.emplace_back(usage, mean);
            global[usage].first += mean;
            global[usage].second += 1;
        }
    }
    std::map<std::string, double> reference;
    for (const auto& [usage, acc] : global) reference[usage] = acc.first / acc.second;

    auto it = per_service.begin();
    std::vector<Block> seed;
    for (auto& c : cluster_by_rating(it->second, epsilon)) seed.push_back(std::move(c.members));
    IndicatorPartition partition = assemble(std::move(seed), epsilon, reference);

    for (++it; it != per_service.end(); ++it)
        partition = refine_partition(partition, cluster_by_rating(it->second, epsilon), reference);

    return {partition.count(), std::move(partition)};
}

} // namespace adaptrust
