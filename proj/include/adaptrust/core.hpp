// Domain types shared by every stage of the trust pipeline.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "adaptrust/error.hpp"

namespace adaptrust {

enum class AttributeKind { Categorical, Numeric };

// One declared attribute of the services file header.
struct AttributeDecl {
    std::string name;
    AttributeKind kind = AttributeKind::Numeric;
    std::vector<std::string> categories; // categorical only, encoding order
    double min = 0.0;                    // numeric only
    double max = 1.0;

    std::size_t encoded_width() const { return kind == AttributeKind::Categorical ? categories.size() : 1; }
    bool operator==(const AttributeDecl&) const = default;
};

struct AttributeSchema {
    std::vector<AttributeDecl> attributes;

    std::size_t width() const;
    const AttributeDecl* find(const std::string& name) const;
    bool operator==(const AttributeSchema&) const = default;
};

using AttributeValue = std::variant<std::string, double>;

struct ServiceProfile {
    std::string id;
    std::string owner;
    std::string device;
    std::vector<std::string> functions;
    std::map<std::string, double> qos;
    std::map<std::string, AttributeValue> attributes;

    bool operator==(const ServiceProfile&) const = default;
};

struct UsageProfile {
    std::string id;
    std::set<std::string> metadata;
    double avg_duration_minutes = 0.0;

    bool operator==(const UsageProfile&) const = default;
};

struct RatingRecord {
    std::string service_id;
    std::string usage_id;
    int rating = 0;

    bool operator==(const RatingRecord&) const = default;
};

// Per-indicator trust values, each in [0,1].
struct IndicatorVector {
    std::vector<double> values;

    IndicatorVector() = default;
    explicit IndicatorVector(std::vector<double> v) : values(std::move(v)) {}

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    bool operator==(const IndicatorVector&) const = default;
};

struct UsagePattern {
    std::vector<std::string> usages;
    std::optional<std::vector<double>> significances;

    // Throws EmptyInput / LengthMismatch / OutOfRange.
    void validate() const;
};

struct Dataset {
    AttributeSchema schema;
    std::vector<ServiceProfile> services;
    std::vector<UsageProfile> usages;
    std::vector<RatingRecord> ratings;

    const ServiceProfile* find_service(const std::string& id) const;
    const UsageProfile* find_usage(const std::string& id) const;
    bool operator==(const Dataset&) const = default;
};

enum class FindingKind { OutOfRange, DanglingReference, DuplicateId, SchemaViolation, EmptySchema };

struct Finding {
    FindingKind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool ok() const { return findings.empty(); }
    std::size_t count(FindingKind kind) const;
    std::string summary() const;
};

constexpr int kMinRating = 1;
constexpr int kMaxRating = 10;

double normalize_rating(int rating);

ValidationReport validate_dataset(const Dataset& dataset);

// Throws SchemaViolation (or DanglingReference) carrying the first finding.
void require_valid(const Dataset& dataset);

} // namespace adaptrust
