#include "adaptrust/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace adaptrust {

std::string_view error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::BadArchitecture: return "BadArchitecture";
    case ErrorKind::NoSamples: return "NoSamples";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::UnknownMetadataWord: return "UnknownMetadataWord";
    case ErrorKind::UnratedUsage: return "UnratedUsage";
    case ErrorKind::ZeroExpectation: return "ZeroExpectation";
    case ErrorKind::ZeroTotalDuration: return "ZeroTotalDuration";
    case ErrorKind::EmptyHistory: return "EmptyHistory";
    case ErrorKind::TooFewRecords: return "TooFewRecords";
    case ErrorKind::UnknownMethod: return "UnknownMethod";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

std::size_t AttributeSchema::width() const {
    std::size_t w = 0;
    for (const auto& a : attributes) w += a.encoded_width();
    return w;
}

const AttributeDecl* AttributeSchema::find(const std::string& name) const {
    for (const auto& a : attributes)
        if (a.name == name) return &a;
    return nullptr;
}

void UsagePattern::validate() const {
    if (usages.empty()) throw Error(ErrorKind::EmptyInput, "usage pattern has no usages");
    if (!significances) return;
    if (significances->size() != usages.size())
        throw Error(ErrorKind::LengthMismatch, "significances and usages differ in length");
    double total = 0.0;
    for (double s : *significances) {
        if (!(s >= 0.0)) throw Error(ErrorKind::OutOfRange, "negative significance");
        total += s;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::OutOfRange, "significances do not sum to 1");
}

const ServiceProfile* Dataset::find_service(const std::string& id) const {
    for (const auto& s : services)
        if (s.id == id) return &s;
    return nullptr;
}

const UsageProfile* Dataset::find_usage(const std::string& id) const {
    for (const auto& u : usages)
        if (u.id == id) return &u;
    return nullptr;
}

std::size_t ValidationReport::count(FindingKind kind) const {
    std::size_t n = 0;
    for (const auto& f : findings) n += f.kind == kind;
    return n;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& f : findings) os << f.message << '\n';
    return os.str();
}

double normalize_rating(int rating) {
    if (rating < kMinRating || rating > kMaxRating)
        throw Error(ErrorKind::OutOfRange, "rating " + std::to_string(rating) + " outside 1..10");
    return rating / 10.0;
}

namespace {

void check_attributes(const ServiceProfile& s, const AttributeSchema& schema, ValidationReport& report) {
    auto add = [&](std::string msg) {
        report.findings.push_back({FindingKind::SchemaViolation, "service " + s.id + ": " + std::move(msg)});
    };
    if (s.attributes.empty()) add("empty attribute map");
    for (const auto& [name, value] : s.attributes) {
        const AttributeDecl* decl = schema.find(name);
        if (!decl) {
            add("undeclared attribute '" + name + "'");
            continue;
        }
        if (decl->kind == AttributeKind::Categorical) {
            const auto* v = std::get_if<std::string>(&value);
            if (!v) {
                add("attribute '" + name + "' must be categorical");
            } else if (std::find(decl->categories.begin(), decl->categories.end(), *v) == decl->categories.end()) {
                add("attribute '" + name + "' has undeclared category '" + *v + "'");
            }
        } else {
            const auto* v = std::get_if<double>(&value);
            if (!v) {
                add("attribute '" + name + "' must be numeric");
            } else if (!(*v >= decl->min && *v <= decl->max)) {
                add("attribute '" + name + "' value outside declared bounds");
            }
        }
    }
    for (const auto& decl : schema.attributes)
        if (!s.attributes.count(decl.name)) add("missing attribute '" + decl.name + "'");
}

} // namespace

ValidationReport validate_dataset(const Dataset& dataset) {
    ValidationReport report;
    auto add = [&](FindingKind k, std::string msg) { report.findings.push_back({k, std::move(msg)}); };

    if (dataset.schema.attributes.empty()) add(FindingKind::EmptySchema, "attribute schema is empty");
    for (const auto& decl : dataset.schema.attributes) {
        if (decl.kind == AttributeKind::Categorical && decl.categories.empty())
            add(FindingKind::SchemaViolation, "categorical attribute '" + decl.name + "' declares no categories");
        if (decl.kind == AttributeKind::Numeric && !(decl.min < decl.max))
            add(FindingKind::SchemaViolation, "numeric attribute '" + decl.name + "' has empty bounds");
    }

    std::unordered_set<std::string> service_ids;
    for (const auto& s : dataset.services) {
        if (s.id.empty()) add(FindingKind::SchemaViolation, "service with empty id");
        if (!service_ids.insert(s.id).second) add(FindingKind::DuplicateId, "duplicate service id '" + s.id + "'");
        check_attributes(s, dataset.schema, report);
    }

    std::unordered_set<std::string> usage_ids;
    for (const auto& u : dataset.usages) {
        if (u.id.empty()) add(FindingKind::SchemaViolation, "usage with empty id");
        if (!usage_ids.insert(u.id).second) add(FindingKind::DuplicateId, "duplicate usage id '" + u.id + "'");
        if (!(u.avg_duration_minutes >= 0.0))
            add(FindingKind::OutOfRange, "usage " + u.id + ": negative average duration");
    }

    for (std::size_t i = 0; i < dataset.ratings.size(); ++i) {
        const auto& r = dataset.ratings[i];
        const std::string where = "rating record " + std::to_string(i + 1);
        if (r.rating < kMinRating || r.rating > kMaxRating)
            add(FindingKind::OutOfRange, where + ": rating " + std::to_string(r.rating) + " outside 1..10");
        if (!service_ids.count(r.service_id))
            add(FindingKind::DanglingReference, where + ": unknown service id '" + r.service_id + "'");
        if (!usage_ids.count(r.usage_id))
            add(FindingKind::DanglingReference, where + ": unknown usage id '" + r.usage_id + "'");
    }
    return report;
}

void require_valid(const Dataset& dataset) {
    const auto report = validate_dataset(dataset);
    if (report.ok()) return;
    const auto& first = report.findings.front();
    const ErrorKind kind = first.kind == FindingKind::DanglingReference ? ErrorKind::DanglingReference
                           : first.kind == FindingKind::OutOfRange      ? ErrorKind::OutOfRange
                                                                        : ErrorKind::SchemaViolation;
    throw Error(kind, first.message + (report.findings.size() > 1
                                           ? " (+" + std::to_string(report.findings.size() - 1) + " more)"
                                           : std::string()));
}

} // namespace adaptrust
