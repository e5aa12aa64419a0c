#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace svmer::cli {

inline constexpr const char *version_string = "1.0.0";

// Exit-code contract shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_not_converged = 3;
inline constexpr int exit_io = 4;

/// Flags common to every configurable subcommand.
struct CommonOptions {
    std::optional<std::string> config;
    bool print_config = false;
};

struct TrainOptions {
    CommonOptions common;
    std::optional<std::string> dataset;
    std::optional<std::string> schema;
    std::optional<std::string> model_kind;
    std::optional<std::string> kernel;
    std::optional<double> gamma;
    std::optional<double> pi;
    std::optional<double> r;
    std::optional<int> degree;
    std::optional<double> penalty;
    std::optional<double> eta;
    std::optional<double> epsilon;
    std::optional<int> max_epochs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scaling;
    bool fit_bias = false;
    std::optional<double> variance_floor;
    std::optional<std::string> out;
    std::optional<std::string> trace;
};

struct PredictOptions {
    CommonOptions common;
    std::optional<std::string> model;
    std::optional<std::string> input;
    bool header = false;
    std::optional<std::string> out;
};

struct AssessOptions {
    CommonOptions common;
    std::optional<std::string> spec;
    std::optional<std::string> model;
    std::optional<std::string> input;
    std::optional<std::string> row;
    bool header = false;
    std::optional<std::string> out;
};

struct Table1Options {
    CommonOptions common;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> data_dir;
    std::optional<std::string> out;
    std::optional<std::string> table;
};

struct OverheadOptions {
    CommonOptions common;
    std::optional<std::string> dataset;
    std::optional<int> iterations;
    std::optional<std::string> naive;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> data_dir;
    std::optional<std::string> out;
};

/// Resolved configuration documents (defaults <- config file <- flags).
[[nodiscard]] nlohmann::json resolve_train(const TrainOptions &o);
[[nodiscard]] nlohmann::json resolve_predict(const PredictOptions &o);
[[nodiscard]] nlohmann::json resolve_assess(const AssessOptions &o);
[[nodiscard]] nlohmann::json resolve_table1(const Table1Options &o);
[[nodiscard]] nlohmann::json resolve_overhead(const OverheadOptions &o);

int cmd_train(const TrainOptions &o);
int cmd_predict(const PredictOptions &o);
int cmd_assess(const AssessOptions &o);
int cmd_table1(const Table1Options &o);
int cmd_overhead(const OverheadOptions &o);
int cmd_version();

}  // namespace svmer::cli
