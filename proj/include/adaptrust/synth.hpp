// Synthetic marketplace generator with ground truth, plus dataset and model
// file formats.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "adaptrust/core.hpp"
#include "adaptrust/models.hpp"

namespace adaptrust {

struct GeneratorConfig {
    std::size_t indicator_count = 2;
    std::size_t num_services = 200;
    std::size_t num_usages = 8;
    double noise_std = 0.0;          // on the unit trust scale
    std::size_t num_multiuse = 0;    // multi-use evaluation items
    std::size_t pattern_size = 3;
    bool distractor_attributes = true; // categorical attributes unrelated to trust
    double own_block_min = 0.70;       // expectation on a usage's own indicator: [own_block_min, 1]
    double off_block_max = 0.30;       // expectation elsewhere: [0, off_block_max]
    std::uint64_t seed = 42;

    void validate() const;
};

struct GroundTruth {
    std::map<std::string, IndicatorVector> service_vectors;
    std::map<std::string, IndicatorVector> usage_expectations;
    std::map<std::string, std::size_t> usage_block;
    std::map<std::string, double> usage_duration;

    bool operator==(const GroundTruth&) const = default;
};

// Overall rating of a service under a usage pattern.
struct MultiUseRecord {
    std::string service_id;
    std::vector<std::string> usages;
    int rating = 0;

    bool operator==(const MultiUseRecord&) const = default;
};

struct GeneratedData {
    Dataset dataset;
    GroundTruth truth;
    std::vector<MultiUseRecord> multiuse;
};

// Every usage rates every service once:
//   rating = clamp(round(10 * (adaptive_trust(F_S, F_u) + N(0, noise))), 1, 10).
// Usages of one block share an expectation vector (>= 0.7 on the block's own
// indicator, <= 0.3 elsewhere). Multi-use ratings use the duration-weighted
// closeness aggregate of the pattern's true expectations.
GeneratedData generate_dataset(const GeneratorConfig& config);

int rating_from_trust(double trust);

// ---- files ----

struct DatasetPaths {
    std::filesystem::path ratings;  // ratings.csv
    std::filesystem::path services; // services.json
    std::filesystem::path usages;   // usages.json

    static DatasetPaths in_directory(const std::filesystem::path& dir);
};

// Parses and validates; ParseError carries file and line/field, IoError for
// unreadable files, validation findings surface as their error kind.
Dataset load_dataset(const DatasetPaths& paths);
void save_dataset(const Dataset& dataset, const DatasetPaths& paths);

// Services and usages only; the result has no ratings.
Dataset load_profiles(const std::filesystem::path& services, const std::filesystem::path& usages);
void save_profiles(const Dataset& dataset, const std::filesystem::path& services,
                   const std::filesystem::path& usages);

std::vector<RatingRecord> parse_ratings_csv(const std::string& text, const std::string& origin = "ratings.csv");
std::string format_ratings_csv(const std::vector<RatingRecord>& ratings);

// multiuse.csv: service_id,pattern,rating with pattern usages joined by '|'.
std::vector<MultiUseRecord> load_multiuse(const std::filesystem::path& path);
void save_multiuse(const std::vector<MultiUseRecord>& records, const std::filesystem::path& path);

void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& path);
GroundTruth load_ground_truth(const std::filesystem::path& path);

constexpr int kModelFormatVersion = 1;

// meta.json, service_model.json, usage_model.json
void save_model_pair(const TrainedModelPair& pair, const std::filesystem::path& dir);
TrainedModelPair load_model_pair(const std::filesystem::path& dir);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace adaptrust
