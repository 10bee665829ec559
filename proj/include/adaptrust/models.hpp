// Service-to-indicator and usage-to-indicator models, their input encodings,
// and the derivation of per-indicator training labels from scalar ratings.
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "adaptrust/core.hpp"
#include "adaptrust/indicators.hpp"
#include "adaptrust/nnet.hpp"

namespace adaptrust {

struct MetadataVocabulary {
    std::vector<std::string> words; // sorted, distinct

    std::size_t size() const { return words.size(); }
    bool operator==(const MetadataVocabulary&) const = default;
};

struct DescriptorVector {
    std::vector<unsigned char> bits;

    std::vector<double> as_input() const { return {bits.begin(), bits.end()}; }
    bool operator==(const DescriptorVector&) const = default;
};

MetadataVocabulary build_metadata_vocabulary(std::span<const UsageProfile> usages);

DescriptorVector encode_descriptor(const UsageProfile& usage, const MetadataVocabulary& vocabulary);

// One-hot categoricals in declared order, min-max scaled numerics, concatenated
// in schema order.
std::vector<double> encode_service_attributes(const ServiceProfile& service, const AttributeSchema& schema);

struct ServiceLabels {
    IndicatorVector values;
    std::vector<unsigned char> mask; // 0 where no usage of that block rated the service
};

using ServiceLabelMap = std::map<std::string, ServiceLabels>;
using UsageLabelMap = std::map<std::string, IndicatorVector>;

// Label k of a service is the mean normalized rating it received from usages
// in partition block k.
ServiceLabelMap derive_service_indicator_labels(const Dataset& dataset, const IndicatorPartition& partition);

struct ExpectationFit {
    IndicatorVector expectation;
    std::vector<double> objective_history; // objective before the first sweep, then after each sweep
};

// Coordinate descent on the 0.01 grid for the expectation vector that best
// explains the observed (service vector, normalized rating) pairs through
// adaptive_trust. Ties go to the smallest grid value.
ExpectationFit fit_usage_expectation(const std::vector<std::pair<IndicatorVector, double>>& observations,
                                     std::size_t indicator_count, std::size_t max_sweeps = 50);

// Fits an expectation for every usage in the dataset; masked service label
// components are filled with that indicator's mean label first.
// Throws UnratedUsage for a usage with no rating on a labeled service.
UsageLabelMap derive_usage_expectation_labels(const Dataset& dataset, const ServiceLabelMap& service_labels);

struct ModelConfig {
    std::size_t hidden = 32;
    TrainConfig service_train{1.0, 3000, 16, 42};
    TrainConfig usage_train{0.5, 3000, 16, 42};

    // Sets one seed for both models.
    void set_seed(std::uint64_t seed) {
        service_train.seed = seed;
        usage_train.seed = seed;
    }
};

struct TrainedModelPair {
    Network service_model;
    Network usage_model;
    AttributeSchema schema;
    MetadataVocabulary vocabulary;
    std::size_t indicator_count = 0;
    std::uint64_t seed = 0;
};

Network train_service_model(const Dataset& dataset, const ServiceLabelMap& labels, const AttributeSchema& schema,
                            const ModelConfig& config);

Network train_service_model(const Dataset& dataset, const IndicatorPartition& partition,
                            const AttributeSchema& schema, const ModelConfig& config);

Network train_usage_model(const Dataset& dataset, const UsageLabelMap& usage_labels,
                          const MetadataVocabulary& vocabulary, const ModelConfig& config);

// Full offline stage: labels from the partition, both networks trained.
// The vocabulary is built from every usage profile in the dataset.
TrainedModelPair train_model_pair(const Dataset& dataset, const IndicatorPartition& partition,
                                  const ModelConfig& config);

IndicatorVector predict_service_indicators(const TrainedModelPair& pair, const ServiceProfile& service);
IndicatorVector predict_usage_expectations(const TrainedModelPair& pair, const UsageProfile& usage);

} // namespace adaptrust
