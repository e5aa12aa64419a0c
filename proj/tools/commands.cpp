#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "svmer/assess.hpp"
#include "svmer/data.hpp"
#include "svmer/error.hpp"
#include "svmer/eval.hpp"
#include "svmer/naive_bayes.hpp"
#include "svmer/run_config.hpp"
#include "svmer/svm.hpp"

namespace svmer::cli {

namespace {

using nlohmann::json;

json with_config_file(json defaults, const CommonOptions &c) {
    if (c.config) {
        const auto file = load_json_file(*c.config);
        if (!file.is_object()) {
            throw config_error(*c.config + ": config file must hold a JSON object");
        }
        defaults.merge_patch(file);
    }
    return defaults;
}

std::string required_string(const json &r, const char *key, const char *flag) {
    if (!r.contains(key) || r.at(key).is_null()) {
        throw config_error(std::string("missing required setting '") + key + "' (flag " + flag + ")");
    }
    if (!r.at(key).is_string()) {
        throw config_error(std::string("setting '") + key + "' must be a string");
    }
    return r.at(key).get<std::string>();
}

std::optional<std::string> optional_string(const json &r, const char *key) {
    if (!r.contains(key) || r.at(key).is_null()) {
        return std::nullopt;
    }
    return r.at(key).get<std::string>();
}

/// Writes to the named file, or to stdout when no path is set.
void emit(const std::optional<std::string> &path, const std::string &text) {
    if (path) {
        write_text_file(*path, text);
    } else {
        std::cout << text;
    }
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// A model file of either supported kind.
struct LoadedModel {
    std::string path;
    std::optional<SvmModel> svm;
    std::optional<GaussianNbModel> nb;

    [[nodiscard]] std::string kind() const { return svm ? "svm" : "gaussian_nb"; }

    [[nodiscard]] std::vector<double> prepare(std::span<const double> row) const {
        const auto &scaling = svm ? svm->scaling() : nb->scaling();
        if (scaling) {
            return apply_scaling(row, *scaling);
        }
        return { row.begin(), row.end() };
    }
};

LoadedModel load_model(const std::string &path) {
    const auto doc = load_json_file(path);
    const auto kind = doc.value("kind", std::string());
    LoadedModel m;
    m.path = path;
    if (kind == "svm") {
        m.svm = model_from_json(doc);
    } else if (kind == "gaussian_nb") {
        m.nb = nb_model_from_json(doc);
    } else {
        throw config_error(path + ": unknown model kind '" + kind + "' (valid: svm, gaussian_nb)");
    }
    return m;
}

json provenance(const json &resolved) {
    return { { "config_hash", config_hash(resolved) }, { "config", resolved } };
}

void print_config(const json &resolved) {
    std::cout << resolved.dump(2) << '\n';
}

json experiment_defaults(const CommonOptions &c, const std::optional<std::uint64_t> &seed, const std::optional<std::string> &data_dir) {
    auto r = with_config_file(default_experiment_json("data"), c);
    if (seed) {
        r["seed"] = *seed;
    }
    if (data_dir) {
        r["data_dir"] = *data_dir;
    }
    return r;
}

}  // namespace

json resolve_train(const TrainOptions &o) {
    json r{
        { "command", "train" },
        { "dataset", nullptr },
        { "schema", nullptr },
        { "model_kind", "svm" },
        { "scaling", "min-max" },
        { "kernel", { { "kind", "rbf" }, { "gamma", 1.0 } } },
        { "train_config", train_config_to_json(TrainConfig{}) },
        { "variance_floor", 1e-9 },
        { "out", "model.json" },
        { "trace", nullptr },
    };
    r = with_config_file(std::move(r), o.common);

    if (o.dataset) {
        r["dataset"] = *o.dataset;
    }
    if (o.schema) {
        r["schema"] = *o.schema;
    }
    if (o.model_kind) {
        r["model_kind"] = *o.model_kind;
    }
    if (o.scaling) {
        r["scaling"] = *o.scaling;
    }
    if (o.variance_floor) {
        r["variance_floor"] = *o.variance_floor;
    }
    if (o.out) {
        r["out"] = *o.out;
    }
    if (o.trace) {
        r["trace"] = *o.trace;
    }

    const auto model_kind = r.at("model_kind").get<std::string>();
    if (model_kind != "svm" && model_kind != "gaussian_nb") {
        throw config_error("unknown model kind '" + model_kind + "' (valid: svm, gaussian_nb)");
    }
    r["scaling"] = to_string(scaling_mode_from_string(r.at("scaling").get<std::string>()));

    json k = r.at("kernel");
    if (o.kernel && k.value("kind", std::string()) != *o.kernel) {
        k = json{ { "kind", *o.kernel } };
    }
    const auto kind = kernel_kind_from_string(k.value("kind", std::string("rbf")));
    const auto set_param = [&](const char *key, const auto &flag, const char *name, bool used) {
        if (!flag) {
            return;
        }
        if (!used) {
            throw config_error(std::string("--") + name + " is not a parameter of the " + to_string(kind) + " kernel");
        }
        k[key] = *flag;
    };
    set_param("gamma", o.gamma, "gamma", kind == KernelKind::rbf);
    set_param("pi", o.pi, "pi", kind == KernelKind::polynomial || kind == KernelKind::sigmoid);
    set_param("r", o.r, "r", kind == KernelKind::polynomial || kind == KernelKind::sigmoid);
    set_param("d", o.degree, "degree", kind == KernelKind::polynomial);
    const auto spec = kernel_from_settings(k);
    spec.validate();
    r["kernel"] = kernel_to_json(spec);

    auto tc = train_config_from_json(r.at("train_config"));
    if (o.penalty) {
        tc.penalty = *o.penalty;
    }
    if (o.eta) {
        tc.learning_rate = *o.eta;
    }
    if (o.epsilon) {
        tc.tolerance = *o.epsilon;
    }
    if (o.max_epochs) {
        tc.max_epochs = *o.max_epochs;
    }
    if (o.seed) {
        tc.seed = *o.seed;
    }
    if (o.fit_bias) {
        tc.fit_bias = true;
    }
    tc.validate();
    r["train_config"] = train_config_to_json(tc);

    if (model_kind == "svm" && r.at("trace").is_null()) {
        r["trace"] = std::filesystem::path(r.at("out").get<std::string>()).replace_extension(".trace.csv").string();
    }
    return r;
}

int cmd_train(const TrainOptions &o) {
    const auto r = resolve_train(o);
    if (o.common.print_config) {
        print_config(r);
        return exit_ok;
    }
    auto schema = load_schema(required_string(r, "schema", "--schema"));
    const auto ds = load_csv(required_string(r, "dataset", "--dataset"), schema);
    const auto scaling = fit_scaling(ds, scaling_mode_from_string(r.at("scaling").get<std::string>()));
    const auto scaled = apply_scaling(ds, scaling);
    const auto out = required_string(r, "out", "--out");

    if (r.at("model_kind") == "gaussian_nb") {
        auto model = nb_fit(scaled, r.at("variance_floor").get<double>());
        model.set_scaling(scaling);
        auto doc = nb_model_to_json(model);
        doc["provenance"] = provenance(r);
        write_text_file(out, doc.dump(2) + "\n");
        std::cerr << "trained gaussian_nb on " << ds.size() << " rows -> " << out << '\n';
        return exit_ok;
    }

    auto result = train(scaled, kernel_from_json(r.at("kernel")), train_config_from_json(r.at("train_config")));
    result.model.set_scaling(scaling);
    auto doc = model_to_json(result.model);
    doc["training"] = {
        { "converged", result.trace.converged },
        { "epochs", result.trace.epochs.size() },
        { "support_vectors", result.model.support_vector_count() },
        { "kernel_evaluations", result.trace.kernel_evaluations },
    };
    doc["provenance"] = provenance(r);
    write_text_file(out, doc.dump(2) + "\n");

    std::ostringstream trace;
    trace << "# config_hash=" << config_hash(r) << '\n';
    trace << "epoch,max_update,clipped,elapsed_ns,min_weight,max_weight\n";
    for (const auto &e : result.trace.epochs) {
        trace << e.epoch << ',' << format_real(e.max_update) << ',' << e.clipped << ',' << e.elapsed.count() << ',' << format_real(e.min_weight) << ',' << format_real(e.max_weight) << '\n';
    }
    write_text_file(r.at("trace").get<std::string>(), trace.str());

    std::cerr << "trained svm on " << ds.size() << " rows in " << result.trace.epochs.size() << " epochs, " << result.model.support_vector_count() << " support vectors -> " << out << '\n';
    if (!result.trace.converged) {
        std::cerr << "warning: not converged after " << result.trace.epochs.size() << " epochs; model written and flagged\n";
        return exit_not_converged;
    }
    return exit_ok;
}

json resolve_predict(const PredictOptions &o) {
    json r{ { "command", "predict" }, { "model", nullptr }, { "input", nullptr }, { "header", false }, { "out", nullptr } };
    r = with_config_file(std::move(r), o.common);
    if (o.model) {
        r["model"] = *o.model;
    }
    if (o.input) {
        r["input"] = *o.input;
    }
    if (o.header) {
        r["header"] = true;
    }
    if (o.out) {
        r["out"] = *o.out;
    }
    return r;
}

int cmd_predict(const PredictOptions &o) {
    const auto r = resolve_predict(o);
    if (o.common.print_config) {
        print_config(r);
        return exit_ok;
    }
    const auto model = load_model(required_string(r, "model", "--model"));
    const auto rows = load_feature_rows(required_string(r, "input", "--input"), r.at("header").get<bool>());
    json predictions = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto x = model.prepare(rows[i]);
        json p{ { "row", i } };
        if (model.svm) {
            p["decision_value"] = model.svm->decision_value(x);
            p["label"] = to_int(model.svm->predict(x));
        } else {
            p["positive_posterior"] = model.nb->positive_posterior(x);
            p["label"] = to_int(model.nb->predict(x));
        }
        predictions.push_back(std::move(p));
    }
    const json doc{ { "version", 1 }, { "kind", "predictions" }, { "model_kind", model.kind() }, { "predictions", predictions }, { "provenance", provenance(r) } };
    emit(optional_string(r, "out"), doc.dump(2) + "\n");
    return exit_ok;
}

json resolve_assess(const AssessOptions &o) {
    json r{ { "command", "assess" }, { "spec", nullptr }, { "model", nullptr }, { "input", nullptr }, { "row", nullptr }, { "header", false }, { "out", nullptr } };
    r = with_config_file(std::move(r), o.common);
    if (o.spec) {
        r["spec"] = *o.spec;
    }
    if (o.model) {
        r["model"] = *o.model;
    }
    if (o.input) {
        r["input"] = *o.input;
    }
    if (o.row) {
        r["row"] = *o.row;
    }
    if (o.header) {
        r["header"] = true;
    }
    if (o.out) {
        r["out"] = *o.out;
    }
    return r;
}

namespace {

/// One index of an assessment spec; beliefs absent means "take them from the model".
struct IndexTemplate {
    std::string id;
    double weight = 1.0;
    std::optional<std::vector<double>> beliefs;
    std::vector<double> intersection_beliefs;
};

IndexTemplate index_template(const json &j) {
    IndexTemplate t;
    try {
        t.id = j.at("id").get<std::string>();
        t.weight = j.at("weight").get<double>();
        if (j.contains("beliefs") && !j.at("beliefs").is_null()) {
            t.beliefs = j.at("beliefs").get<std::vector<double>>();
        }
        t.intersection_beliefs = j.value("intersection_beliefs", std::vector<double>{});
    } catch (const json::exception &e) {
        throw config_error(std::string("invalid index entry ") + j.dump() + ": " + e.what());
    }
    if (!(t.weight >= 0.0 && t.weight <= 1.0)) {
        throw config_error("index '" + t.id + "': weight " + format_real(t.weight) + " outside [0, 1]");
    }
    return t;
}

}  // namespace

int cmd_assess(const AssessOptions &o) {
    const auto r = resolve_assess(o);
    if (o.common.print_config) {
        print_config(r);
        return exit_ok;
    }
    const auto spec = er::assessment_spec_from_json(load_json_file(required_string(r, "spec", "--spec")));
    const auto mapping = belief_mapping_from_json(spec.belief_mapping, spec.grades.size());
    std::vector<IndexTemplate> templates;
    bool needs_model = false;
    for (const auto &j : spec.indexes) {
        templates.push_back(index_template(j));
        needs_model = needs_model || !templates.back().beliefs;
    }

    std::optional<LoadedModel> model;
    if (const auto path = optional_string(r, "model")) {
        model = load_model(*path);
    } else if (needs_model) {
        throw config_error("an index without beliefs needs --model");
    }

    std::vector<std::vector<double>> rows;
    if (const auto input = optional_string(r, "input")) {
        rows = load_feature_rows(*input, r.at("header").get<bool>());
    }
    if (const auto row = optional_string(r, "row")) {
        std::istringstream in(*row);
        for (auto &parsed : parse_feature_rows(in, false)) {
            rows.push_back(std::move(parsed));
        }
    }
    if (rows.empty()) {
        if (needs_model) {
            throw config_error("an index without beliefs needs input rows (--input or --row)");
        }
        rows.emplace_back();
    }

    const auto hash = config_hash(r);
    Provenance prov{ {}, hash };
    if (model) {
        prov.model_ids.push_back(model->path);
    }
    json assessments = json::array();
    for (const auto &row : rows) {
        std::vector<IndexInput> inputs;
        for (const auto &t : templates) {
            IndexInput in{ t.id, t.weight, 0.0, t.intersection_beliefs };
            if (t.beliefs) {
                in.evidence = *t.beliefs;
            } else {
                const auto x = model->prepare(row);
                if (model->svm) {
                    in.evidence = model->svm->decision_value(x);
                } else {
                    if (spec.grades.size() != 2) {
                        throw config_error("a gaussian_nb model can only feed a two-grade assessment");
                    }
                    const double p = model->nb->positive_posterior(x);
                    in.evidence = mapping.invert ? std::vector<double>{ p, 1.0 - p } : std::vector<double>{ 1.0 - p, p };
                }
            }
            inputs.push_back(std::move(in));
        }
        assessments.push_back(assessment_to_json(assess(inputs, mapping, spec.grades, prov)));
    }
    const json doc{ { "version", assessment_format_version }, { "kind", "risk_assessments" }, { "config_hash", hash }, { "config", r }, { "grades", er::grades_to_json(spec.grades) }, { "assessments", assessments } };
    emit(optional_string(r, "out"), doc.dump(2) + "\n");
    return exit_ok;
}

json resolve_table1(const Table1Options &o) {
    auto r = experiment_defaults(o.common, o.seed, o.data_dir);
    r["command"] = "table1";
    if (!r.contains("outputs") || !r.at("outputs").is_object()) {
        r["outputs"] = { { "report", "table1_report.json" }, { "table", nullptr } };
    }
    if (o.out) {
        r["outputs"]["report"] = *o.out;
    }
    if (o.table) {
        r["outputs"]["table"] = *o.table;
    }
    static_cast<void>(experiment_from_json(r));
    return r;
}

int cmd_table1(const Table1Options &o) {
    const auto r = resolve_table1(o);
    if (o.common.print_config) {
        print_config(r);
        return exit_ok;
    }
    const auto report = run_table1(experiment_from_json(r), r);
    const auto doc = table1_to_json(report);
    const auto report_path = optional_string(r.at("outputs"), "report");
    if (report_path) {
        write_text_file(*report_path, doc.dump(2) + "\n");
    }
    const auto table = format_table1(report) + "config_hash " + config_hash(r) + "\n";
    if (const auto table_path = optional_string(r.at("outputs"), "table")) {
        write_text_file(*table_path, table);
    }
    std::cout << table;
    for (const auto &run : report.runs) {
        for (const auto *m : { &run.svm_er.metrics, &run.naive.metrics }) {
            for (const auto &w : m->warnings) {
                std::cerr << "warning: " << run.config.id << ": " << w << '\n';
            }
        }
    }
    return exit_ok;
}

json resolve_overhead(const OverheadOptions &o) {
    auto r = experiment_defaults(o.common, o.seed, o.data_dir);
    r["command"] = "overhead";
    if (o.dataset) {
        r["overhead"]["dataset"] = *o.dataset;
    }
    if (o.iterations) {
        r["overhead"]["iterations"] = *o.iterations;
    }
    if (o.naive) {
        r["overhead"]["naive"] = *o.naive;
    }
    if (o.out) {
        r["overhead"]["out"] = *o.out;
    }
    static_cast<void>(overhead_from_json(r));
    return r;
}

int cmd_overhead(const OverheadOptions &o) {
    const auto r = resolve_overhead(o);
    if (o.common.print_config) {
        print_config(r);
        return exit_ok;
    }
    const auto records = run_overhead(overhead_from_json(r));
    emit(optional_string(r.at("overhead"), "out"), "# config_hash=" + config_hash(r) + "\n" + overhead_csv(records));
    return exit_ok;
}

int cmd_version() {
    std::cout << "svmer " << version_string << "\nmodel format " << model_format_version << "\nassessment format " << assessment_format_version << '\n';
    return exit_ok;
}

}  // namespace svmer::cli
