#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles/dempster.hpp"
#include "oracles/trials.hpp"
#include "svmer/er.hpp"
#include "svmer/error.hpp"

using namespace svmer;
using namespace svmer::er;

namespace {

MassDistribution masses_of(double weight, std::vector<double> beliefs, std::string id = "x") {
    return assign_masses({ std::move(id), weight, std::move(beliefs), {} });
}

GradeSet three_grades() {
    return GradeSet({ { "low", 0.0 }, { "mid", 0.5 }, { "high", 1.0 } });
}

}  // namespace

TEST_CASE("basic masses of a single index") {
    const auto d = masses_of(0.8, { 0.5, 0.25 });
    CHECK(d.assigned[0] == doctest::Approx(0.4));
    CHECK(d.assigned[1] == doctest::Approx(0.2));
    CHECK(d.weight_residual == doctest::Approx(0.2));
    CHECK(d.incompleteness == doctest::Approx(0.2));
    CHECK(d.unassigned == doctest::Approx(0.4));
    CHECK(d.total() == doctest::Approx(1.0));
    REQUIRE(d.intersections.size() == 1);
    CHECK(d.intersections[0] == 0.0);
}

TEST_CASE("two opposed half-weight indexes split evenly") {
    const std::vector<MassDistribution> in{ masses_of(0.5, { 1.0, 0.0 }, "a"), masses_of(0.5, { 0.0, 1.0 }, "b") };
    const auto c = combine(in);
    CHECK(c.normalization == doctest::Approx(4.0 / 3.0));
    CHECK(c.assigned[0] == doctest::Approx(1.0 / 3.0));
    CHECK(c.assigned[1] == doctest::Approx(1.0 / 3.0));
    CHECK(c.weight_residual == doctest::Approx(1.0 / 3.0));
    CHECK(c.incompleteness == doctest::Approx(0.0));
    const auto beta = final_beliefs(c);
    CHECK(beta[0] == doctest::Approx(0.5));
    CHECK(beta[1] == doctest::Approx(0.5));
    CHECK(c.sources == std::vector<std::string>{ "a", "b" });
}

TEST_CASE("three concordant half-weight indexes give full belief") {
    const std::vector<MassDistribution> in(3, masses_of(0.5, { 0.0, 1.0 }));
    const auto c = combine(in);
    CHECK(c.assigned[1] == doctest::Approx(0.875));
    CHECK(c.weight_residual == doctest::Approx(0.125));
    CHECK(final_beliefs(c)[1] == doctest::Approx(1.0));
    CHECK(final_beliefs(c)[0] == doctest::Approx(0.0));
}

TEST_CASE("incomplete evidence keeps its ignorance after fusion") {
    const std::vector<MassDistribution> in{ masses_of(1.0, { 0.6, 0.0 }), masses_of(1.0, { 0.6, 0.0 }) };
    const auto c = combine(in);
    // 1/j = (1)(1) + 0.4*0.4 - 0.16 = 1, so masses are products directly
    CHECK(c.assigned[0] == doctest::Approx(0.84));
    CHECK(c.incompleteness == doctest::Approx(0.16));
    CHECK(c.weight_residual == doctest::Approx(0.0));
    CHECK(final_beliefs(c)[0] == doctest::Approx(0.84));
}

TEST_CASE("a single source passes through unchanged") {
    const auto d = masses_of(0.7, { 0.1, 0.3, 0.4 });
    const auto c = combine(std::vector<MassDistribution>{ d });
    for (std::size_t m = 0; m < 3; ++m) {
        CHECK(c.assigned[m] == doctest::Approx(d.assigned[m]));
    }
    CHECK(c.weight_residual == doctest::Approx(d.weight_residual));
    CHECK(c.incompleteness == doctest::Approx(d.incompleteness));
}

TEST_CASE("total conflict is reported, not normalised away") {
    const std::vector<MassDistribution> in{ masses_of(1.0, { 1.0, 0.0 }, "sure-low"), masses_of(1.0, { 0.0, 1.0 }, "sure-high") };
    try {
        static_cast<void>(combine(in));
        FAIL("expected a conflict_error");
    } catch (const conflict_error &e) {
        CHECK(std::string(e.what()).find("sure-low") != std::string::npos);
    }
    CHECK_THROWS_AS(static_cast<void>(combine_pairwise(in)), conflict_error);
    CHECK_THROWS_AS(static_cast<void>(combine(std::vector<MassDistribution>{})), config_error);
    const std::vector<MassDistribution> mixed{ masses_of(1.0, { 1.0, 0.0 }), masses_of(1.0, { 0.2, 0.3, 0.5 }) };
    CHECK_THROWS_AS(static_cast<void>(combine(mixed)), config_error);
}

TEST_CASE("final beliefs need some weighted evidence") {
    const std::vector<MassDistribution> in(2, masses_of(0.0, { 0.5, 0.5 }));
    const auto c = combine(in);
    CHECK(c.weight_residual == doctest::Approx(1.0));
    CHECK_THROWS_AS(static_cast<void>(final_beliefs(c)), conflict_error);
}

TEST_CASE("fuzzy intersections carry their own mass") {
    AssessmentIndex a{ "a", 1.0, { 0.2, 0.3, 0.0 }, { 0.5, 0.0 } };
    AssessmentIndex b{ "b", 0.5, { 0.0, 0.4, 0.2 }, { 0.2, 0.2 } };
    const std::vector<MassDistribution> in{ assign_masses(a), assign_masses(b) };
    CHECK(in[0].intersections[0] == doctest::Approx(0.5));
    const auto c = combine(in);
    CHECK(c.total() == doctest::Approx(1.0));
    const auto inter = final_intersection_beliefs(c);
    REQUIRE(inter.size() == 2);
    CHECK(inter[0] > 0.0);
    const auto p = combine_pairwise(in);
    CHECK(p.intersections[0] == doctest::Approx(c.intersections[0]).epsilon(1e-12));
}

TEST_CASE("index validation") {
    CHECK_THROWS_AS((AssessmentIndex{ "w", 1.5, { 0.5, 0.5 }, {} }.validate()), config_error);
    CHECK_THROWS_AS((AssessmentIndex{ "w", -0.1, { 0.5, 0.5 }, {} }.validate()), config_error);
    CHECK_THROWS_AS((AssessmentIndex{ "n", 1.0, { -0.1, 0.5 }, {} }.validate()), config_error);
    CHECK_THROWS_AS((AssessmentIndex{ "s", 1.0, { 0.7, 0.5 }, {} }.validate()), config_error);
    CHECK_THROWS_AS((AssessmentIndex{ "one", 1.0, { 1.0 }, {} }.validate()), config_error);
    CHECK_THROWS_AS((AssessmentIndex{ "i", 1.0, { 0.2, 0.2, 0.2 }, { 0.1 } }.validate()), config_error);
    CHECK_NOTHROW((AssessmentIndex{ "ok", 0.0, { 0.0, 0.0 }, {} }.validate()));
}

TEST_CASE("grade set validation") {
    CHECK_THROWS_AS(GradeSet({ { "only", 0.0 } }), config_error);
    CHECK_THROWS_AS(GradeSet({ { "a", 0.0 }, { "a", 1.0 } }), config_error);
    CHECK_THROWS_AS(GradeSet({ { "a", 0.5 }, { "b", 0.2 } }), config_error);
    CHECK_THROWS_AS(GradeSet({ { "a", 0.0 }, { "b", 1.5 } }), config_error);
    const auto g = three_grades();
    CHECK(g.index_of("mid") == 1);
    CHECK_THROWS_AS(static_cast<void>(g.index_of("none")), config_error);
}

TEST_CASE("risk score bounds place ignorance at the extreme grades") {
    const auto g = three_grades();
    const std::vector<double> beta{ 0.2, 0.3, 0.1 };
    const auto r = risk_score(beta, g);
    CHECK(r.lower == doctest::Approx(0.25));
    CHECK(r.upper == doctest::Approx(0.65));
    CHECK(r.midpoint == doctest::Approx(0.45));

    const GradeSet two({ { "secure", 0.0 }, { "at-risk", 1.0 } }, true);
    const auto f = risk_score(std::vector<double>{ 0.2, 0.3 }, two, std::vector<double>{ 0.4 });
    CHECK(f.lower == doctest::Approx(0.3));
    CHECK(f.upper == doctest::Approx(0.8));

    CHECK_THROWS_AS(static_cast<void>(risk_score(std::vector<double>{ 0.5, 0.5 }, g)), config_error);
    CHECK_THROWS_AS(static_cast<void>(risk_score(std::vector<double>{ 0.6, 0.3, 0.3 }, g)), config_error);
    const GradeSet no_utility({ { "a", 0.0 }, { "b", 0.0 } }, false, false);
    CHECK_THROWS_AS(static_cast<void>(risk_score(std::vector<double>{ 0.5, 0.5 }, no_utility)), config_error);
}

TEST_CASE("property: risk score bounds are ordered and inside the utility range") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto g = three_grades();
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> beta{ u(rng), u(rng), u(rng) };
        const double scale = u(rng) / (beta[0] + beta[1] + beta[2]);
        for (auto &b : beta) {
            b *= scale;
        }
        const auto r = risk_score(beta, g);
        CHECK(r.lower <= r.upper + 1e-15);
        CHECK(r.lower >= -1e-15);
        CHECK(r.upper <= 1.0 + 1e-15);
    }
}

TEST_CASE("oracle: analytic combination equals exhaustive Dempster combination") {
    std::mt19937_64 rng(2024);
    int compared = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto set = oracle::random_index_set(rng);
        const auto c = oracle::check_index_set(set, rng);
        CHECK_FALSE(c.conflict_mismatch);
        CHECK(c.oracle_diff <= 1e-9);
        CHECK(c.order_diff <= 1e-9);
        CHECK(c.vacuous_diff <= 1e-9);
        CHECK(c.mass_error <= 1e-9);
        compared += c.conflict ? 0 : 1;
    }
    CHECK(compared > 350);
}

TEST_CASE("oracle: dempster oracle on a hand example") {
    // one source on slot 0 with residual, one on slot 1 with residual
    const auto r = oracle::dempster({ { { 0.5, 0.0 }, 0.5, 0.0 }, { { 0.0, 0.5 }, 0.5, 0.0 } });
    CHECK(r.conflict == doctest::Approx(0.25));
    CHECK(r.slots[0] == doctest::Approx(1.0 / 3.0));
    CHECK(r.weight_residual == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("property: pairwise combination equals the analytic combination") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const auto set = oracle::random_index_set(rng);
        std::vector<MassDistribution> in;
        for (const auto &idx : set) {
            in.push_back(assign_masses(idx));
        }
        MassDistribution a;
        MassDistribution b;
        try {
            a = combine(in);
        } catch (const conflict_error &) {
            CHECK_THROWS_AS(static_cast<void>(combine_pairwise(in)), conflict_error);
            continue;
        }
        b = combine_pairwise(in);
        for (std::size_t m = 0; m < a.assigned.size(); ++m) {
            CHECK(std::abs(a.assigned[m] - b.assigned[m]) <= 1e-12);
        }
        for (std::size_t m = 0; m < a.intersections.size(); ++m) {
            CHECK(std::abs(a.intersections[m] - b.intersections[m]) <= 1e-12);
        }
        CHECK(std::abs(a.weight_residual - b.weight_residual) <= 1e-12);
        CHECK(std::abs(a.incompleteness - b.incompleteness) <= 1e-12);
    }
}

TEST_CASE("spec and index json") {
    const AssessmentIndex idx{ "k", 0.4, { 0.1, 0.2, 0.3 }, { 0.1, 0.0 } };
    const auto back = index_from_json(index_to_json(idx));
    CHECK(back.id == "k");
    CHECK(back.beliefs == idx.beliefs);
    CHECK(back.intersection_beliefs == idx.intersection_beliefs);
    CHECK_THROWS_AS(static_cast<void>(index_from_json({ { "id", "k" }, { "weight", 2.0 }, { "beliefs", { 0.5, 0.5 } } })), config_error);
    CHECK_THROWS_AS(static_cast<void>(index_from_json({ { "id", "k" } })), config_error);

    const nlohmann::json spec{ { "grades", grades_to_json(three_grades()) }, { "indexes", { index_to_json(idx) } } };
    const auto s = assessment_spec_from_json(spec);
    CHECK(s.grades.size() == 3);
    CHECK(s.grades[2].utility == 1.0);
    CHECK(s.indexes.size() == 1);
    CHECK(s.belief_mapping.is_null());
    CHECK_THROWS_AS(static_cast<void>(assessment_spec_from_json({ { "grades", grades_to_json(three_grades()) }, { "indexes", nlohmann::json::array() } })), config_error);
    const auto mj = masses_to_json(assign_masses(idx));
    CHECK(mj.at("assigned").size() == 3);
    CHECK(mj.at("intersections").size() == 2);
}
