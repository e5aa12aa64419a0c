#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "svmer/error.hpp"
#include "svmer/run_config.hpp"

using namespace svmer;

TEST_CASE("config hash ignores formatting and key order") {
    CHECK(config_hash(nlohmann::json("")) != config_hash(nlohmann::json::object()));
    CHECK(config_hash(nlohmann::json::parse(R"({"b":1,"a":2})")) == config_hash(nlohmann::json::parse(R"({ "a" : 2, "b" : 1 })")));
    CHECK(config_hash(nlohmann::json{ { "a", 1 } }) != config_hash(nlohmann::json{ { "a", 2 } }));
    const auto h = config_hash(default_experiment_json());
    CHECK(h.size() == 16);
    CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(h == config_hash(default_experiment_json()));
}

TEST_CASE("config hash matches independent FNV-1a test vectors") {
    // a number dumps without quotes; FNV-1a 64 of "0" is 0xaf63ad4c86019caf
    CHECK(config_hash(nlohmann::json(0)) == "af63ad4c86019caf");
}

TEST_CASE("default experiment resolves into typed configs") {
    const auto cfg = experiment_from_json(default_experiment_json("/d"));
    REQUIRE(cfg.datasets.size() == 3);
    CHECK(cfg.datasets[0].id == "hdds");
    CHECK(cfg.datasets[1].id == "bcds");
    CHECK(cfg.datasets[2].id == "ids");
    CHECK(cfg.datasets[1].train_count == 455);
    CHECK(cfg.datasets[1].test_count == 114);
    CHECK(cfg.datasets[0].path == std::filesystem::path("/d/hdds.csv"));
    CHECK(cfg.datasets[2].kernel.kind == KernelKind::rbf);
    CHECK(cfg.seed == 42);
    CHECK(cfg.indexes.size() == 1);
    CHECK(cfg.indexes[0].source == "svm");
    const auto o = overhead_from_json(default_experiment_json("/d"));
    CHECK(o.dataset.id == "hdds");
    CHECK(o.iterations == 100);
    CHECK(o.naive == NaiveMode::gaussian_nb);
}

TEST_CASE("config errors are reported as config_error") {
    auto j = default_experiment_json();
    j["datasets"]["bcds"]["train"] = 0;
    CHECK_THROWS_AS(static_cast<void>(experiment_from_json(j)), config_error);

    j = default_experiment_json();
    j["datasets"]["ids"]["kernel"] = { { "kind", "laplace" } };
    CHECK_THROWS_AS(static_cast<void>(experiment_from_json(j)), config_error);

    j = default_experiment_json();
    j["indexes"] = { { { "source", "forest" }, { "weight", 1.0 } } };
    CHECK_THROWS_AS(static_cast<void>(experiment_from_json(j)), config_error);

    j = default_experiment_json();
    j["indexes"] = { { { "source", "svm" }, { "weight", 1.5 } } };
    CHECK_THROWS_AS(static_cast<void>(experiment_from_json(j)), config_error);

    j = default_experiment_json();
    j["datasets"] = nlohmann::json::object();
    CHECK_THROWS_AS(static_cast<void>(experiment_from_json(j)), config_error);

    j = default_experiment_json();
    j.erase("seed");
    CHECK_THROWS_AS(static_cast<void>(experiment_from_json(j)), config_error);

    j = default_experiment_json();
    j["overhead"]["dataset"] = "nope";
    CHECK_THROWS_AS(static_cast<void>(overhead_from_json(j)), config_error);
    CHECK_THROWS_AS(static_cast<void>(naive_mode_from_string("fast")), config_error);
    CHECK(to_string(naive_mode_from_string("pairwise-er")) == "pairwise-er");
}

TEST_CASE("a null dataset entry disables it") {
    auto j = default_experiment_json();
    j.merge_patch({ { "datasets", { { "hdds", nullptr } } } });
    const auto cfg = experiment_from_json(j);
    REQUIRE(cfg.datasets.size() == 2);
    CHECK(cfg.datasets[0].id == "bcds");
}

TEST_CASE("kernel settings keep only the parameters of the kind") {
    const auto k = kernel_from_settings({ { "kind", "polynomial" }, { "pi", 2.0 }, { "gamma", 9.0 } });
    CHECK(k.kind == KernelKind::polynomial);
    CHECK(k.scale == 2.0);
    CHECK(k.offset == 0.0);
    CHECK(k.degree == 3);
    CHECK_FALSE(k.gamma.has_value());
    CHECK(kernel_from_settings({ { "kind", "rbf" } }).gamma == 1.0);
    CHECK_THROWS_AS(static_cast<void>(kernel_from_settings({ { "kind", "rbf" }, { "gamma", -1.0 } })), config_error);
}

TEST_CASE("json files: io_error when missing, config_error when malformed") {
    const auto dir = std::filesystem::temp_directory_path() / "svmer_run_config_test";
    std::filesystem::create_directories(dir);
    CHECK_THROWS_AS(static_cast<void>(load_json_file(dir / "missing.json")), io_error);
    write_text_file(dir / "bad.json", "{ not json");
    CHECK_THROWS_AS(static_cast<void>(load_json_file(dir / "bad.json")), config_error);
    write_text_file(dir / "good.json", R"({"seed": 7})");
    CHECK(load_json_file(dir / "good.json").at("seed") == 7);
    CHECK_THROWS_AS(write_text_file(dir / "no" / "such" / "dir.json", "x"), io_error);
    std::filesystem::remove_all(dir);
}
