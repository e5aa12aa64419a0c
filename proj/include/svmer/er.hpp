#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

/// Evidential-reasoning fusion of weighted, possibly incomplete belief assessments.
namespace svmer::er {

struct Grade {
    std::string name;
    double utility = 0.0;
};

/**
 * @brief Ordered evaluation grades P_1 .. P_M (worst-to-best is up to the caller; the risk
 * pipeline orders them low risk first).
 *
 * In fuzzy mode each adjacent pair (P_m, P_m+1) gets an extra intersection slot that can
 * carry its own mass.
 */
class GradeSet {
  public:
    GradeSet() = default;
    GradeSet(std::vector<Grade> grades, bool fuzzy = false, bool has_utilities = true);

    [[nodiscard]] std::size_t size() const noexcept { return grades_.size(); }
    [[nodiscard]] const std::vector<Grade> &grades() const noexcept { return grades_; }
    [[nodiscard]] const Grade &operator[](std::size_t m) const { return grades_.at(m); }
    [[nodiscard]] bool fuzzy() const noexcept { return fuzzy_; }
    [[nodiscard]] bool has_utilities() const noexcept { return has_utilities_; }
    [[nodiscard]] std::size_t index_of(const std::string &name) const;

  private:
    std::vector<Grade> grades_;
    bool fuzzy_ = false;
    bool has_utilities_ = true;
};

/// One piece of evidence: weight alpha in [0, 1] and belief degrees beta over the grades.
struct AssessmentIndex {
    std::string id;
    double weight = 1.0;
    std::vector<double> beliefs;
    /// Beliefs on adjacent-grade intersections (M-1 entries) or empty when crisp.
    std::vector<double> intersection_beliefs;

    void validate() const;
};

/**
 * @brief Basic probability masses of one index, or of a fused set of indexes.
 *
 * sum(assigned) + sum(intersections) + unassigned == 1, and
 * unassigned == weight_residual + incompleteness.
 */
struct MassDistribution {
    std::vector<double> assigned;
    double unassigned = 1.0;
    double weight_residual = 1.0;
    double incompleteness = 0.0;
    std::vector<double> intersections;
    /// Normalisation factor of the last combination (1 for a single source).
    double normalization = 1.0;
    /// Index ids that contributed, in input order.
    std::vector<std::string> sources;

    [[nodiscard]] std::size_t grade_count() const noexcept { return assigned.size(); }
    [[nodiscard]] double total() const noexcept;
};

/// n{P_m} = alpha beta_m, n{H} = 1 - sum n{P_m}, weight residual 1 - alpha, incompleteness alpha (1 - sum beta).
[[nodiscard]] MassDistribution assign_masses(const AssessmentIndex &idx);

/**
 * Analytical combination of N sources:
 *
 *   n{s}  = j [ prod_i (n_i{s} + n_i{H}) - prod_i n_i{H} ]     for every grade / intersection slot s
 *   n_bar = j prod_i n_bar_i
 *   n_til = j [ prod_i n_i{H} - prod_i n_bar_i ]
 *   1/j   = sum_s prod_i (n_i{s} + n_i{H}) - (S - 1) prod_i n_i{H}
 *
 * Throws conflict_error when 1/j <= 0.
 */
[[nodiscard]] MassDistribution combine(std::span<const MassDistribution> masses);

/**
 * Sequential two-at-a-time Dempster combination that enumerates every pair of focal elements.
 * Same result as combine() but O(N S^2); kept as the non-analytical comparison routine.
 */
[[nodiscard]] MassDistribution combine_pairwise(std::span<const MassDistribution> masses);

/// beta_m = n{P_m} / (1 - n_bar). The remainder is residual ignorance.
[[nodiscard]] std::vector<double> final_beliefs(const MassDistribution &combined);
[[nodiscard]] std::vector<double> final_intersection_beliefs(const MassDistribution &combined);

struct RiskScore {
    double lower = 0.0;
    double upper = 0.0;
    double midpoint = 0.0;
};

/// Expected utility with the residual ignorance assigned to the worst (lower) or best (upper)
/// grade. Intersection beliefs count at the lower grade for the lower bound and at the upper
/// grade for the upper bound.
[[nodiscard]] RiskScore risk_score(std::span<const double> beliefs, const GradeSet &grades, std::span<const double> intersection_beliefs = {});

/// Assessment-spec file contents: grades plus the indexes to fuse.
struct AssessmentSpec {
    GradeSet grades;
    std::vector<nlohmann::json> indexes;  ///< raw index entries; resolved by the assess pipeline
    nlohmann::json belief_mapping;        ///< optional mapping block, null when absent
};

[[nodiscard]] GradeSet grades_from_json(const nlohmann::json &grades, bool fuzzy);
[[nodiscard]] nlohmann::json grades_to_json(const GradeSet &g);
[[nodiscard]] AssessmentIndex index_from_json(const nlohmann::json &j);
[[nodiscard]] nlohmann::json index_to_json(const AssessmentIndex &idx);
[[nodiscard]] nlohmann::json masses_to_json(const MassDistribution &m);
[[nodiscard]] AssessmentSpec assessment_spec_from_json(const nlohmann::json &j);

}  // namespace svmer::er
