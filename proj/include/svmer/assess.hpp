#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "svmer/er.hpp"

namespace svmer {

enum class MappingMode { logistic, margin_binned };

/**
 * @brief Turns a classifier decision value into complete belief degrees over the grades.
 *
 * Grades are ordered low risk first. With the default orientation a positive decision value
 * (class +1) supports the later, higher-risk grades; @c invert flips that.
 */
struct BeliefMapping {
    MappingMode mode = MappingMode::logistic;
    double steepness = 1.0;
    std::vector<double> bin_edges;
    std::size_t grade_count = 2;
    bool invert = false;

    void validate() const;
};

[[nodiscard]] BeliefMapping belief_mapping_from_json(const nlohmann::json &j, std::size_t grade_count);
[[nodiscard]] nlohmann::json belief_mapping_to_json(const BeliefMapping &bm);

/// Logistic: (1 - s, s) with s = 1 / (1 + exp(-steepness f)). Binned: all belief on the bin
/// holding f (a value equal to an edge falls in the upper bin).
[[nodiscard]] std::vector<double> map_decision_to_beliefs(double decision_value, const BeliefMapping &bm);

/// Evidence for one index: a raw decision value or belief degrees given directly.
struct IndexInput {
    std::string id;
    double weight = 1.0;
    std::variant<double, std::vector<double>> evidence;
    /// Beliefs on adjacent-grade intersections; only meaningful with a fuzzy grade set.
    std::vector<double> intersection_beliefs;
};

struct Provenance {
    std::vector<std::string> model_ids;
    std::string config_hash;
};

struct RiskAssessment {
    std::vector<er::AssessmentIndex> indexes;
    er::MassDistribution combined;
    std::vector<double> final_beliefs;
    std::vector<double> final_intersection_beliefs;
    std::size_t grade_index = 0;
    std::string grade;
    er::RiskScore score;
    Provenance provenance;
};

/// Maps, assigns, fuses and grades. Ties in the final beliefs resolve to the later grade.
[[nodiscard]] RiskAssessment assess(std::span<const IndexInput> indexes, const BeliefMapping &bm, const er::GradeSet &grades, Provenance provenance = {});

inline constexpr int assessment_format_version = 1;

[[nodiscard]] nlohmann::json assessment_to_json(const RiskAssessment &a);

}  // namespace svmer
