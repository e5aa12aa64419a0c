#include "svmer/er.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "svmer/error.hpp"

namespace svmer::er {

namespace {

constexpr double sum_tolerance = 1e-12;

double sum(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

std::string join_ids(const std::vector<std::string> &ids) {
    std::string out;
    for (const auto &id : ids) {
        out += (out.empty() ? "" : ", ") + id;
    }
    return out;
}

void check_compatible(std::span<const MassDistribution> masses) {
    if (masses.empty()) {
        throw config_error("combine needs at least one mass distribution");
    }
    const auto m = masses.front().grade_count();
    const auto s = masses.front().intersections.size();
    for (const auto &d : masses) {
        if (d.grade_count() != m || d.intersections.size() != s) {
            throw config_error("cannot combine mass distributions over different grade sets (" + join_ids(d.sources) + ")");
        }
    }
}

}  // namespace

GradeSet::GradeSet(std::vector<Grade> grades, bool fuzzy, bool has_utilities) :
    grades_(std::move(grades)),
    fuzzy_(fuzzy),
    has_utilities_(has_utilities) {
    if (grades_.size() < 2) {
        throw config_error("a grade set needs at least two grades");
    }
    std::set<std::string> names;
    for (std::size_t m = 0; m < grades_.size(); ++m) {
        if (!names.insert(grades_[m].name).second) {
            throw config_error("duplicate grade name '" + grades_[m].name + "'");
        }
        if (!has_utilities_) {
            continue;
        }
        const double u = grades_[m].utility;
        if (!(u >= 0.0 && u <= 1.0)) {
            throw config_error("grade '" + grades_[m].name + "' utility must lie in [0, 1]");
        }
        if (m > 0 && !(u > grades_[m - 1].utility)) {
            throw config_error("grade utilities must be strictly increasing");
        }
    }
}

std::size_t GradeSet::index_of(const std::string &name) const {
    for (std::size_t m = 0; m < grades_.size(); ++m) {
        if (grades_[m].name == name) {
            return m;
        }
    }
    throw config_error("unknown grade '" + name + "'");
}

void AssessmentIndex::validate() const {
    if (!(weight >= 0.0 && weight <= 1.0)) {
        throw config_error("index '" + id + "': weight must lie in [0, 1]");
    }
    if (beliefs.size() < 2) {
        throw config_error("index '" + id + "': needs a belief degree for each of at least two grades");
    }
    if (!intersection_beliefs.empty() && intersection_beliefs.size() + 1 != beliefs.size()) {
        throw config_error("index '" + id + "': expected " + std::to_string(beliefs.size() - 1) + " intersection beliefs");
    }
    const auto non_negative = [](double b) { return b >= 0.0 && std::isfinite(b); };
    if (!std::all_of(beliefs.begin(), beliefs.end(), non_negative) || !std::all_of(intersection_beliefs.begin(), intersection_beliefs.end(), non_negative)) {
        throw config_error("index '" + id + "': belief degrees must be non-negative");
    }
    if (sum(beliefs) + sum(intersection_beliefs) > 1.0 + sum_tolerance) {
        throw config_error("index '" + id + "': belief degrees sum above 1");
    }
}

double MassDistribution::total() const noexcept {
    return sum(assigned) + sum(intersections) + unassigned;
}

MassDistribution assign_masses(const AssessmentIndex &idx) {
    idx.validate();
    const std::size_t m_count = idx.beliefs.size();
    MassDistribution d;
    d.assigned.resize(m_count);
    d.intersections.assign(m_count - 1, 0.0);
    for (std::size_t m = 0; m < m_count; ++m) {
        d.assigned[m] = idx.weight * idx.beliefs[m];
    }
    for (std::size_t m = 0; m < idx.intersection_beliefs.size(); ++m) {
        d.intersections[m] = idx.weight * idx.intersection_beliefs[m];
    }
    d.unassigned = 1.0 - sum(d.assigned) - sum(d.intersections);
    d.weight_residual = 1.0 - idx.weight;
    d.incompleteness = idx.weight * (1.0 - sum(idx.beliefs) - sum(idx.intersection_beliefs));
    d.normalization = 1.0;
    d.sources = { idx.id };
    return d;
}

MassDistribution combine(std::span<const MassDistribution> masses) {
    check_compatible(masses);
    if (masses.size() == 1) {
        return masses.front();
    }
    const std::size_t m_count = masses.front().grade_count();
    const std::size_t x_count = masses.front().intersections.size();

    double prod_h = 1.0;
    double prod_bar = 1.0;
    for (const auto &d : masses) {
        prod_h *= d.unassigned;
        prod_bar *= d.weight_residual;
    }
    auto slot_product = [&masses](auto member, std::size_t s) {
        double p = 1.0;
        for (const auto &d : masses) {
            p *= (d.*member)[s] + d.unassigned;
        }
        return p;
    };

    std::vector<double> grade_prod(m_count);
    std::vector<double> inter_prod(x_count);
    double denominator = 0.0;
    for (std::size_t s = 0; s < m_count; ++s) {
        grade_prod[s] = slot_product(&MassDistribution::assigned, s);
        denominator += grade_prod[s];
    }
    for (std::size_t s = 0; s < x_count; ++s) {
        inter_prod[s] = slot_product(&MassDistribution::intersections, s);
        denominator += inter_prod[s];
    }
    denominator -= static_cast<double>(m_count + x_count - 1) * prod_h;
    if (!(denominator > 0.0)) {
        std::vector<std::string> ids;
        for (const auto &d : masses) {
            ids.insert(ids.end(), d.sources.begin(), d.sources.end());
        }
        throw conflict_error("total conflict between indexes " + join_ids(ids) + ": normalisation denominator " + std::to_string(denominator));
    }
    const double j = 1.0 / denominator;

    MassDistribution out;
    out.assigned.resize(m_count);
    out.intersections.resize(x_count);
    for (std::size_t s = 0; s < m_count; ++s) {
        out.assigned[s] = j * (grade_prod[s] - prod_h);
    }
    for (std::size_t s = 0; s < x_count; ++s) {
        out.intersections[s] = j * (inter_prod[s] - prod_h);
    }
    out.unassigned = j * prod_h;
    out.weight_residual = j * prod_bar;
    out.incompleteness = j * (prod_h - prod_bar);
    out.normalization = j;
    for (const auto &d : masses) {
        out.sources.insert(out.sources.end(), d.sources.begin(), d.sources.end());
    }
    return out;
}

MassDistribution combine_pairwise(std::span<const MassDistribution> masses) {
    check_compatible(masses);
    const std::size_t m_count = masses.front().grade_count();
    const std::size_t x_count = masses.front().intersections.size();
    const std::size_t slots = m_count + x_count;
    // focal elements: [0, slots) exclusive slots, then the weight residual, then incompleteness
    const std::size_t weight_slot = slots;
    const std::size_t incomplete_slot = slots + 1;

    auto flatten = [&](const MassDistribution &d) {
        std::vector<double> v(slots + 2);
        std::copy(d.assigned.begin(), d.assigned.end(), v.begin());
        std::copy(d.intersections.begin(), d.intersections.end(), v.begin() + static_cast<std::ptrdiff_t>(m_count));
        v[weight_slot] = d.weight_residual;
        v[incomplete_slot] = d.incompleteness;
        return v;
    };
    // intersection of two focal elements; returns slots + 2 for the empty set
    auto meet = [&](std::size_t a, std::size_t b) -> std::size_t {
        if (a < slots && b < slots) {
            return a == b ? a : slots + 2;
        }
        if (a < slots) {
            return a;
        }
        if (b < slots) {
            return b;
        }
        return (a == incomplete_slot || b == incomplete_slot) ? incomplete_slot : weight_slot;
    };

    std::vector<double> acc = flatten(masses.front());
    double normalization = 1.0;
    std::vector<std::string> sources = masses.front().sources;
    for (std::size_t n = 1; n < masses.size(); ++n) {
        const auto next = flatten(masses[n]);
        std::vector<double> joined(slots + 2, 0.0);
        double conflict = 0.0;
        for (std::size_t a = 0; a < slots + 2; ++a) {
            for (std::size_t b = 0; b < slots + 2; ++b) {
                const double p = acc[a] * next[b];
                const auto c = meet(a, b);
                if (c == slots + 2) {
                    conflict += p;
                } else {
                    joined[c] += p;
                }
            }
        }
        sources.insert(sources.end(), masses[n].sources.begin(), masses[n].sources.end());
        const double keep = 1.0 - conflict;
        if (!(keep > 0.0)) {
            throw conflict_error("total conflict between indexes " + join_ids(sources));
        }
        for (auto &v : joined) {
            v /= keep;
        }
        normalization /= keep;
        acc = std::move(joined);
    }

    MassDistribution out;
    out.assigned.assign(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(m_count));
    out.intersections.assign(acc.begin() + static_cast<std::ptrdiff_t>(m_count), acc.begin() + static_cast<std::ptrdiff_t>(slots));
    out.weight_residual = acc[weight_slot];
    out.incompleteness = acc[incomplete_slot];
    out.unassigned = out.weight_residual + out.incompleteness;
    out.normalization = normalization;
    out.sources = std::move(sources);
    return out;
}

std::vector<double> final_beliefs(const MassDistribution &combined) {
    const double keep = 1.0 - combined.weight_residual;
    if (!(keep > 0.0)) {
        throw conflict_error("final beliefs undefined: every index weight is zero");
    }
    std::vector<double> beta(combined.assigned.size());
    std::transform(combined.assigned.begin(), combined.assigned.end(), beta.begin(), [keep](double n) { return n / keep; });
    return beta;
}

std::vector<double> final_intersection_beliefs(const MassDistribution &combined) {
    const double keep = 1.0 - combined.weight_residual;
    if (!(keep > 0.0)) {
        throw conflict_error("final beliefs undefined: every index weight is zero");
    }
    std::vector<double> beta(combined.intersections.size());
    std::transform(combined.intersections.begin(), combined.intersections.end(), beta.begin(), [keep](double n) { return n / keep; });
    return beta;
}

RiskScore risk_score(std::span<const double> beliefs, const GradeSet &grades, std::span<const double> intersection_beliefs) {
    if (!grades.has_utilities()) {
        throw config_error("risk score needs grade utilities");
    }
    if (beliefs.size() != grades.size()) {
        throw config_error("risk score: " + std::to_string(beliefs.size()) + " beliefs for " + std::to_string(grades.size()) + " grades");
    }
    if (!intersection_beliefs.empty() && intersection_beliefs.size() + 1 != grades.size()) {
        throw config_error("risk score: intersection beliefs do not match the grade set");
    }
    double base_lo = 0.0;
    double base_hi = 0.0;
    double committed = 0.0;
    for (std::size_t m = 0; m < beliefs.size(); ++m) {
        if (!(beliefs[m] >= -sum_tolerance)) {
            throw config_error("risk score: negative belief degree");
        }
        base_lo += beliefs[m] * grades[m].utility;
        base_hi += beliefs[m] * grades[m].utility;
        committed += beliefs[m];
    }
    for (std::size_t m = 0; m < intersection_beliefs.size(); ++m) {
        base_lo += intersection_beliefs[m] * grades[m].utility;
        base_hi += intersection_beliefs[m] * grades[m + 1].utility;
        committed += intersection_beliefs[m];
    }
    if (committed > 1.0 + 1e-9) {
        throw config_error("risk score: belief degrees sum above 1");
    }
    const double ignorance = std::max(0.0, 1.0 - committed);
    RiskScore r;
    r.lower = base_lo + ignorance * grades.grades().front().utility;
    r.upper = base_hi + ignorance * grades.grades().back().utility;
    r.midpoint = 0.5 * (r.lower + r.upper);
    return r;
}

// ---------------------------------------------------------------------------------------------
// JSON

GradeSet grades_from_json(const nlohmann::json &grades, bool fuzzy) {
    std::vector<Grade> out;
    bool has_utilities = true;
    try {
        for (const auto &g : grades) {
            Grade grade{ g.at("name").get<std::string>(), 0.0 };
            if (g.contains("utility")) {
                grade.utility = g.at("utility").get<double>();
            } else {
                has_utilities = false;
            }
            out.push_back(std::move(grade));
        }
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid grade list: ") + e.what());
    }
    return GradeSet(std::move(out), fuzzy, has_utilities);
}

nlohmann::json grades_to_json(const GradeSet &g) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto &grade : g.grades()) {
        out.push_back({ { "name", grade.name }, { "utility", grade.utility } });
    }
    return out;
}

AssessmentIndex index_from_json(const nlohmann::json &j) {
    AssessmentIndex idx;
    try {
        idx.id = j.at("id").get<std::string>();
        idx.weight = j.at("weight").get<double>();
        idx.beliefs = j.at("beliefs").get<std::vector<double>>();
        idx.intersection_beliefs = j.value("intersection_beliefs", std::vector<double>{});
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid assessment index: ") + e.what());
    }
    idx.validate();
    return idx;
}

nlohmann::json index_to_json(const AssessmentIndex &idx) {
    nlohmann::json j{ { "id", idx.id }, { "weight", idx.weight }, { "beliefs", idx.beliefs } };
    if (!idx.intersection_beliefs.empty()) {
        j["intersection_beliefs"] = idx.intersection_beliefs;
    }
    return j;
}

nlohmann::json masses_to_json(const MassDistribution &m) {
    return {
        { "assigned", m.assigned },
        { "unassigned", m.unassigned },
        { "weight_residual", m.weight_residual },
        { "incompleteness", m.incompleteness },
        { "intersections", m.intersections },
        { "normalization", m.normalization },
        { "sources", m.sources },
    };
}

AssessmentSpec assessment_spec_from_json(const nlohmann::json &j) {
    AssessmentSpec spec;
    try {
        spec.grades = grades_from_json(j.at("grades"), j.value("fuzzy", false));
        for (const auto &idx : j.at("indexes")) {
            spec.indexes.push_back(idx);
        }
        spec.belief_mapping = j.value("belief_mapping", nlohmann::json(nullptr));
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid assessment spec: ") + e.what());
    }
    if (spec.indexes.empty()) {
        throw config_error("assessment spec lists no indexes");
    }
    return spec;
}

}  // namespace svmer::er
