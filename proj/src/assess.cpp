#include "svmer/assess.hpp"

#include <algorithm>
#include <cmath>

#include "svmer/error.hpp"

namespace svmer {

void BeliefMapping::validate() const {
    if (grade_count < 2) {
        throw config_error("belief mapping needs at least two grades");
    }
    if (mode == MappingMode::logistic) {
        if (grade_count != 2) {
            throw config_error("logistic belief mapping requires exactly two grades");
        }
        if (!(steepness > 0.0 && std::isfinite(steepness))) {
            throw config_error("logistic steepness must be > 0");
        }
        return;
    }
    if (bin_edges.size() + 1 != grade_count) {
        throw config_error("margin-binned mapping needs " + std::to_string(grade_count - 1) + " bin edges");
    }
    for (std::size_t i = 1; i < bin_edges.size(); ++i) {
        if (!(bin_edges[i] > bin_edges[i - 1])) {
            throw config_error("bin edges must be strictly increasing");
        }
    }
}

BeliefMapping belief_mapping_from_json(const nlohmann::json &j, std::size_t grade_count) {
    BeliefMapping bm;
    bm.grade_count = grade_count;
    if (j.is_null()) {
        bm.validate();
        return bm;
    }
    try {
        const auto mode = j.value("mode", std::string("logistic"));
        if (mode == "logistic") {
            bm.mode = MappingMode::logistic;
        } else if (mode == "margin-binned") {
            bm.mode = MappingMode::margin_binned;
        } else {
            throw config_error("unknown belief mapping mode '" + mode + "' (valid: logistic, margin-binned)");
        }
        bm.steepness = j.value("steepness", bm.steepness);
        bm.bin_edges = j.value("bin_edges", std::vector<double>{});
        bm.invert = j.value("invert", false);
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid belief mapping: ") + e.what());
    }
    bm.validate();
    return bm;
}

nlohmann::json belief_mapping_to_json(const BeliefMapping &bm) {
    nlohmann::json j{ { "mode", bm.mode == MappingMode::logistic ? "logistic" : "margin-binned" }, { "invert", bm.invert } };
    if (bm.mode == MappingMode::logistic) {
        j["steepness"] = bm.steepness;
    } else {
        j["bin_edges"] = bm.bin_edges;
    }
    return j;
}

std::vector<double> map_decision_to_beliefs(double f, const BeliefMapping &bm) {
    bm.validate();
    if (!std::isfinite(f)) {
        throw data_error("decision value is not finite");
    }
    std::vector<double> beliefs(bm.grade_count, 0.0);
    if (bm.mode == MappingMode::logistic) {
        const double z = bm.steepness * f;
        // both branches avoid exp overflow
        const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
        beliefs[0] = 1.0 - s;
        beliefs[1] = s;
    } else {
        const auto bin = static_cast<std::size_t>(std::upper_bound(bm.bin_edges.begin(), bm.bin_edges.end(), f) - bm.bin_edges.begin());
        beliefs[bin] = 1.0;
    }
    if (bm.invert) {
        std::reverse(beliefs.begin(), beliefs.end());
    }
    return beliefs;
}

RiskAssessment assess(std::span<const IndexInput> indexes, const BeliefMapping &bm, const er::GradeSet &grades, Provenance provenance) {
    if (indexes.empty()) {
        throw config_error("assessment needs at least one index");
    }
    if (bm.grade_count != grades.size()) {
        throw config_error("belief mapping covers " + std::to_string(bm.grade_count) + " grades, grade set has " + std::to_string(grades.size()));
    }

    RiskAssessment out;
    std::vector<er::MassDistribution> masses;
    for (const auto &in : indexes) {
        er::AssessmentIndex idx{ in.id, in.weight, {}, in.intersection_beliefs };
        if (const auto *f = std::get_if<double>(&in.evidence)) {
            idx.beliefs = map_decision_to_beliefs(*f, bm);
        } else {
            idx.beliefs = std::get<std::vector<double>>(in.evidence);
        }
        if (idx.beliefs.size() != grades.size()) {
            throw config_error("index '" + in.id + "' gives " + std::to_string(idx.beliefs.size()) + " beliefs for " + std::to_string(grades.size()) + " grades");
        }
        masses.push_back(er::assign_masses(idx));
        out.indexes.push_back(std::move(idx));
    }

    out.combined = er::combine(masses);
    out.final_beliefs = er::final_beliefs(out.combined);
    out.final_intersection_beliefs = er::final_intersection_beliefs(out.combined);

    std::size_t best = 0;
    for (std::size_t m = 1; m < out.final_beliefs.size(); ++m) {
        if (out.final_beliefs[m] >= out.final_beliefs[best]) {
            best = m;
        }
    }
    out.grade_index = best;
    out.grade = grades[best].name;
    if (grades.has_utilities()) {
        out.score = er::risk_score(out.final_beliefs, grades, grades.fuzzy() ? std::span<const double>(out.final_intersection_beliefs) : std::span<const double>{});
    }
    out.provenance = std::move(provenance);
    return out;
}

nlohmann::json assessment_to_json(const RiskAssessment &a) {
    nlohmann::json indexes = nlohmann::json::array();
    for (const auto &idx : a.indexes) {
        indexes.push_back(er::index_to_json(idx));
    }
    nlohmann::json j{
        { "version", assessment_format_version },
        { "indexes", indexes },
        { "combined", er::masses_to_json(a.combined) },
        { "final_beliefs", a.final_beliefs },
        { "risk_grade", a.grade },
        { "risk_grade_index", a.grade_index },
        { "risk_score", { { "lower", a.score.lower }, { "upper", a.score.upper }, { "midpoint", a.score.midpoint } } },
        { "provenance", { { "model_ids", a.provenance.model_ids }, { "config_hash", a.provenance.config_hash } } },
    };
    if (!a.final_intersection_beliefs.empty() && std::any_of(a.final_intersection_beliefs.begin(), a.final_intersection_beliefs.end(), [](double v) { return v != 0.0; })) {
        j["final_intersection_beliefs"] = a.final_intersection_beliefs;
    }
    return j;
}

}  // namespace svmer
