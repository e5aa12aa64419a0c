#include "svmer/run_config.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "svmer/error.hpp"

namespace svmer {

std::string config_hash(const nlohmann::json &resolved) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : resolved.dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
    return buf.data();
}

nlohmann::json load_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw config_error(path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw io_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw io_error("failed writing " + path.string());
    }
}

nlohmann::json default_experiment_json(const std::string &data_dir) {
    auto dataset = [](const char *id, int train, int test, double gamma, double penalty) {
        return nlohmann::json{
            { "file", std::string(id) + ".csv" },
            { "schema", std::string("schemas/") + id + ".schema.json" },
            { "train", train },
            { "test", test },
            { "stratified", true },
            { "scaling", "min-max" },
            { "kernel", { { "kind", "rbf" }, { "gamma", gamma } } },
            { "train_config", { { "penalty", penalty }, { "learning_rate", 1.0 }, { "tolerance", 1e-6 }, { "max_epochs", 1000 }, { "fit_bias", false } } },
            { "variance_floor", 1e-9 },
        };
    };
    return {
        { "seed", 42 },
        { "data_dir", data_dir },
        { "belief_mapping", { { "mode", "logistic" }, { "steepness", 1.0 }, { "invert", false } } },
        { "indexes", nlohmann::json::array({ { { "source", "svm" }, { "weight", 1.0 } } }) },
        { "datasets",
          {
              // (gamma, D) chosen by 5-fold cross-validation on the training split (svmer_tune)
              { "hdds", dataset("hdds", 230, 62, 0.1, 1.0) },
              { "bcds", dataset("bcds", 455, 114, 0.3, 3.0) },
              { "ids", dataset("ids", 263, 80, 1.0, 3.0) },
          } },
        { "overhead", { { "dataset", "hdds" }, { "iterations", 100 }, { "naive", "gaussian-nb" } } },
    };
}

KernelSpec kernel_from_settings(const nlohmann::json &s) {
    try {
        const auto kind = kernel_kind_from_string(s.value("kind", std::string("rbf")));
        switch (kind) {
            case KernelKind::linear:
                return KernelSpec::linear();
            case KernelKind::polynomial:
                return KernelSpec::polynomial(s.value("pi", 1.0), s.value("r", 0.0), s.value("d", 3));
            case KernelKind::rbf:
                return KernelSpec::rbf(s.value("gamma", 1.0));
            case KernelKind::sigmoid:
                return KernelSpec::sigmoid(s.value("pi", 1.0), s.value("r", 0.0));
        }
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("invalid kernel settings: ") + e.what());
    }
    return KernelSpec::linear();
}

DatasetConfig dataset_config_from_json(const std::string &id, const nlohmann::json &j, const std::string &data_dir) {
    DatasetConfig d;
    d.id = id;
    const auto resolve = [&data_dir](const std::string &p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : std::filesystem::path(data_dir) / path;
    };
    try {
        d.path = resolve(j.at("file").get<std::string>());
        d.schema = resolve(j.at("schema").get<std::string>());
        d.train_count = j.at("train").get<std::size_t>();
        d.test_count = j.at("test").get<std::size_t>();
        d.stratified = j.value("stratified", true);
        d.scaling = scaling_mode_from_string(j.value("scaling", std::string("min-max")));
        d.kernel = kernel_from_json(j.at("kernel"));
        d.train = train_config_from_json(j.value("train_config", nlohmann::json::object()));
        d.variance_floor = j.value("variance_floor", 1e-9);
    } catch (const nlohmann::json::exception &e) {
        throw config_error("dataset '" + id + "' config: " + e.what());
    }
    if (d.train_count == 0) {
        throw config_error("dataset '" + id + "': train count must be positive");
    }
    if (!(d.variance_floor > 0.0)) {
        throw config_error("dataset '" + id + "': variance_floor must be > 0");
    }
    return d;
}

namespace {

std::vector<IndexSourceConfig> indexes_from_json(const nlohmann::json &j) {
    std::vector<IndexSourceConfig> out;
    for (const auto &e : j) {
        IndexSourceConfig c{ e.at("source").get<std::string>(), e.value("weight", 1.0) };
        if (c.source != "svm" && c.source != "nb") {
            throw config_error("unknown index source '" + c.source + "' (valid: svm, nb)");
        }
        if (!(c.weight >= 0.0 && c.weight <= 1.0)) {
            throw config_error("index '" + c.source + "': weight must lie in [0, 1]");
        }
        out.push_back(c);
    }
    if (out.empty()) {
        throw config_error("at least one assessment index is required");
    }
    return out;
}

}  // namespace

ExperimentConfig experiment_from_json(const nlohmann::json &r) {
    ExperimentConfig cfg;
    try {
        cfg.seed = r.at("seed").get<std::uint64_t>();
        const auto data_dir = r.at("data_dir").get<std::string>();
        const auto &ds = r.at("datasets");
        // canonical ids first in a fixed order, then any extra ids alphabetically
        for (const char *id : { "hdds", "bcds", "ids" }) {
            if (ds.contains(id) && !ds.at(id).is_null()) {
                cfg.datasets.push_back(dataset_config_from_json(id, ds.at(id), data_dir));
            }
        }
        for (const auto &[id, value] : ds.items()) {
            if (id != "hdds" && id != "bcds" && id != "ids" && !value.is_null()) {
                cfg.datasets.push_back(dataset_config_from_json(id, value, data_dir));
            }
        }
        cfg.mapping = belief_mapping_from_json(r.value("belief_mapping", nlohmann::json(nullptr)), 2);
        cfg.indexes = indexes_from_json(r.at("indexes"));
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("experiment config: ") + e.what());
    }
    if (cfg.datasets.empty()) {
        throw config_error("experiment config lists no datasets");
    }
    return cfg;
}

NaiveMode naive_mode_from_string(const std::string &text) {
    if (text == "gaussian-nb") {
        return NaiveMode::gaussian_nb;
    }
    if (text == "pairwise-er") {
        return NaiveMode::pairwise_er;
    }
    throw config_error("unknown naive mode '" + text + "' (valid: gaussian-nb, pairwise-er)");
}

std::string to_string(NaiveMode mode) {
    return mode == NaiveMode::gaussian_nb ? "gaussian-nb" : "pairwise-er";
}

OverheadConfig overhead_from_json(const nlohmann::json &r) {
    OverheadConfig cfg;
    try {
        cfg.seed = r.at("seed").get<std::uint64_t>();
        const auto &o = r.at("overhead");
        const auto id = o.at("dataset").get<std::string>();
        const auto &ds = r.at("datasets");
        if (!ds.contains(id)) {
            throw config_error("overhead dataset '" + id + "' is not configured");
        }
        cfg.dataset = dataset_config_from_json(id, ds.at(id), r.at("data_dir").get<std::string>());
        cfg.iterations = o.at("iterations").get<int>();
        cfg.naive = naive_mode_from_string(o.value("naive", std::string("gaussian-nb")));
        cfg.mapping = belief_mapping_from_json(r.value("belief_mapping", nlohmann::json(nullptr)), 2);
        cfg.indexes = indexes_from_json(r.at("indexes"));
    } catch (const nlohmann::json::exception &e) {
        throw config_error(std::string("overhead config: ") + e.what());
    }
    if (cfg.iterations < 1) {
        throw config_error("overhead iterations must be >= 1");
    }
    return cfg;
}

}  // namespace svmer
