// Train/test evaluation over ten trust levels with per-level and macro
// precision, recall, F1 and accuracy.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adaptrust/core.hpp"
#include "adaptrust/indicators.hpp"
#include "adaptrust/models.hpp"
#include "adaptrust/multiuse.hpp"
#include "adaptrust/synth.hpp"

namespace adaptrust {

constexpr std::size_t kLevels = 10;
constexpr int kReportFormatVersion = 1;

struct EvaluationReport {
    std::array<double, kLevels> precision{};
    std::array<double, kLevels> recall{};
    std::array<double, kLevels> f1{};
    std::array<double, kLevels> accuracy{};
    std::array<std::array<long, kLevels>, kLevels> confusion{}; // [true - 1][predicted - 1]
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double macro_accuracy = 0.0;
    double exact_match = 0.0; // fraction with predicted == true
    std::size_t samples = 0;

    bool operator==(const EvaluationReport&) const = default;
};

// Levels with no true samples are left out of the macro averages; empty
// detected/actual sets give 0 for the affected ratio.
EvaluationReport metrics(std::span<const int> predicted, std::span<const int> truth);

struct DatasetSplit {
    Dataset train;
    Dataset test;
};

// Seeded shuffle of the rating records; profiles are shared by both parts.
DatasetSplit split_dataset(const Dataset& dataset, double ratio, std::uint64_t seed);

struct PipelineConfig {
    double split_ratio = 0.8;
    double epsilon = kDefaultEpsilon;
    std::uint64_t seed = 42; // split and both models
    ModelConfig model;
};

struct TrainedPipeline {
    DatasetSplit split;
    IndicatorDetection detection;
    TrainedModelPair models;
};

TrainedPipeline train_pipeline(const Dataset& dataset, const PipelineConfig& config);

// Scores the held-out single-usage records.
EvaluationReport score_pipeline(const TrainedPipeline& pipeline);

EvaluationReport evaluate_pipeline(const Dataset& dataset, const PipelineConfig& config);

// Scores multi-use items with a trained pipeline; significances come from the
// usages' average durations.
EvaluationReport score_multiuse(const TrainedPipeline& pipeline, std::span<const MultiUseRecord> items,
                                AggregationMethod method);

EvaluationReport evaluate_multiuse(const Dataset& dataset, std::span<const MultiUseRecord> items,
                                   AggregationMethod method, const PipelineConfig& config);

std::string report_to_json(const EvaluationReport& report);
std::string report_table(const EvaluationReport& report);

} // namespace adaptrust
