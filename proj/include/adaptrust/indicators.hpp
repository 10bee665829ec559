// Trust-indicator count detection from rating anomalies and cross-service
// rating correlation.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "adaptrust/core.hpp"

namespace adaptrust {

constexpr double kDefaultEpsilon = 0.15;

struct UsageCluster {
    std::set<std::string> members;
    double mean_rating = 0.0;

    bool operator==(const UsageCluster&) const = default;
};

struct IndicatorPartition {
    std::vector<UsageCluster> blocks;
    double epsilon = kDefaultEpsilon;

    std::size_t count() const { return blocks.size(); }
    // Index of the block holding usage_id, or -1.
    int block_of(const std::string& usage_id) const;
};

using UsageRating = std::pair<std::string, double>;

// 1-D gap clustering: sort by rating, cut wherever consecutive ratings differ
// by more than epsilon.
std::vector<UsageCluster> cluster_by_rating(std::vector<UsageRating> records, double epsilon);

// One refinement step against the clusters of the next service.
// `reference` maps usage id -> global mean normalized rating; it decides where
// members unrated on the next service are attached when a block splits, and
// sets block mean_rating.
IndicatorPartition refine_partition(const IndicatorPartition& current,
                                    const std::vector<UsageCluster>& next_clusters,
                                    const std::map<std::string, double>& reference);

struct IndicatorDetection {
    std::size_t count = 0;
    IndicatorPartition partition;
};

IndicatorDetection detect_indicator_count(const Dataset& dataset, double epsilon = kDefaultEpsilon);

} // namespace adaptrust
