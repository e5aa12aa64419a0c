#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "svmer/eval.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = SVMER_CLI_PATH;
const std::string data_dir = SVMER_DEFAULT_DATA_DIR;

struct Run {
    int status = -1;
    std::string out;
};

/// Runs the CLI with stderr folded into the captured output.
Run run(const std::string &args) {
    Run r;
    FILE *pipe = popen((cli + " " + args + " 2>&1").c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path work_dir() {
    const auto dir = fs::temp_directory_path() / "svmer_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string ids_train_args() {
    return "--dataset " + data_dir + "/ids.csv --schema " + data_dir + "/schemas/ids.schema.json";
}

/// First n ids rows with the trailing label removed.
std::vector<std::string> ids_feature_rows(std::size_t n) {
    std::ifstream in(data_dir + "/ids.csv");
    std::vector<std::string> rows;
    std::string line;
    while (rows.size() < n && std::getline(in, line)) {
        rows.push_back(line.substr(0, line.rfind(',')));
    }
    return rows;
}

void write(const fs::path &p, const std::string &text) {
    std::ofstream(p, std::ios::binary) << text;
}

const json risk_spec_grades = json::array({ { { "name", "secure" }, { "utility", 0.0 } }, { { "name", "at-risk" }, { "utility", 1.0 } } });

}  // namespace

TEST_CASE("version prints the version string") {
    const auto r = run("version");
    CHECK(r.status == 0);
    CHECK(r.out.find("svmer 1.0.0") != std::string::npos);
}

TEST_CASE("no subcommand or an unknown flag is a usage error") {
    CHECK(run("").status == 2);
    CHECK(run("train --no-such-flag").status == 2);
    CHECK(run("--help").status == 0);
}

TEST_CASE("train writes a model, trace and provenance") {
    const auto dir = work_dir();
    const auto model = dir / "ids_model.json";
    const auto r = run("train " + ids_train_args() + " --gamma 1 --penalty 3 --out " + model.string());
    REQUIRE(r.status == 0);
    const auto j = json::parse(slurp(model));
    CHECK(j.at("kind") == "svm");
    CHECK(j.at("training").at("converged") == true);
    CHECK(j.at("provenance").at("config_hash").get<std::string>().size() == 16);
    CHECK(j.at("provenance").at("config").at("kernel").at("gamma") == 1.0);
    const auto trace = slurp(fs::path(model).replace_extension(".trace.csv"));
    CHECK(trace.rfind("# config_hash=" + j.at("provenance").at("config_hash").get<std::string>(), 0) == 0);
    CHECK(trace.find("epoch,max_update,clipped,elapsed_ns,min_weight,max_weight") != std::string::npos);
}

TEST_CASE("train rejects unknown kernels and lists the valid ones") {
    const auto r = run("train " + ids_train_args() + " --kernel laplace --out " + (work_dir() / "x.json").string());
    CHECK(r.status == 2);
    for (const char *kind : { "linear", "polynomial", "rbf", "sigmoid" }) {
        CHECK(r.out.find(kind) != std::string::npos);
    }
    const auto stray = run("train " + ids_train_args() + " --kernel linear --gamma 2 --out " + (work_dir() / "x.json").string());
    CHECK(stray.status == 2);
}

TEST_CASE("train with an absurd learning rate does not report success") {
    const auto r = run("train " + ids_train_args() + " --eta 1e6 --max-epochs 20 --out " + (work_dir() / "eta.json").string());
    CHECK(r.status != 0);
}

TEST_CASE("train on a missing dataset is an io error") {
    const auto r = run("train --dataset /nonexistent/x.csv --schema " + data_dir + "/schemas/ids.schema.json --out " + (work_dir() / "m.json").string());
    CHECK(r.status == 4);
}

TEST_CASE("print-config shows flag overrides without running") {
    const auto out = work_dir() / "never.json";
    fs::remove(out);
    const auto r = run("train " + ids_train_args() + " --penalty 7 --print-config --out " + out.string());
    REQUIRE(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("train_config").at("penalty") == 7.0);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("config file values sit between defaults and flags") {
    const auto dir = work_dir();
    write(dir / "train.json", R"({"train_config": {"penalty": 4, "max_epochs": 50}})");
    const auto r = run("train " + ids_train_args() + " --config " + (dir / "train.json").string() + " --max-epochs 60 --print-config");
    REQUIRE(r.status == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("train_config").at("penalty") == 4.0);
    CHECK(j.at("train_config").at("max_epochs") == 60);
}

TEST_CASE("predict and assess on a trained model") {
    const auto dir = work_dir();
    const auto model = dir / "assess_model.json";
    REQUIRE(run("train " + ids_train_args() + " --out " + model.string()).status == 0);

    const auto rows = ids_feature_rows(100);
    std::string csv;
    for (const auto &row : rows) {
        csv += row + "\n";
    }
    write(dir / "rows.csv", csv);

    const auto p = run("predict --model " + model.string() + " --input " + (dir / "rows.csv").string() + " --out " + (dir / "pred.json").string());
    REQUIRE(p.status == 0);
    const auto pred = json::parse(slurp(dir / "pred.json"));
    CHECK(pred.at("predictions").size() == 100);

    const json spec{ { "grades", risk_spec_grades }, { "indexes", { { { "id", "svm" }, { "weight", 1.0 } } } } };
    write(dir / "spec.json", spec.dump());

    const auto single = run("assess --spec " + (dir / "spec.json").string() + " --model " + model.string() + " --row " + rows[0]);
    REQUIRE(single.status == 0);
    const auto one = json::parse(single.out);
    REQUIRE(one.at("assessments").size() == 1);
    const auto &a = one.at("assessments")[0];
    const double beliefs_sum = a.at("final_beliefs")[0].get<double>() + a.at("final_beliefs")[1].get<double>();
    CHECK(beliefs_sum == doctest::Approx(1.0));
    // the risk grade follows the predicted class with the default orientation
    const bool positive = pred.at("predictions")[0].at("label") == 1;
    CHECK(a.at("risk_grade") == (positive ? "at-risk" : "secure"));

    const auto batch = run("assess --spec " + (dir / "spec.json").string() + " --model " + model.string() + " --input " + (dir / "rows.csv").string() + " --out " + (dir / "batch.json").string());
    REQUIRE(batch.status == 0);
    const auto all = json::parse(slurp(dir / "batch.json"));
    REQUIRE(all.at("assessments").size() == 100);
    for (std::size_t i = 0; i < 100; ++i) {
        const bool pos = pred.at("predictions")[i].at("label") == 1;
        CHECK(all.at("assessments")[i].at("risk_grade") == (pos ? "at-risk" : "secure"));
    }
}

TEST_CASE("assess rejects weights outside [0, 1]") {
    const auto dir = work_dir();
    const json spec{ { "grades", risk_spec_grades }, { "indexes", { { { "id", "expert" }, { "weight", 1.5 }, { "beliefs", { 0.2, 0.8 } } } } } };
    write(dir / "bad_spec.json", spec.dump());
    const auto r = run("assess --spec " + (dir / "bad_spec.json").string());
    CHECK(r.status == 2);
    CHECK(r.out.find("weight") != std::string::npos);
}

TEST_CASE("assess with direct beliefs needs no model") {
    const auto dir = work_dir();
    const json spec{ { "grades", risk_spec_grades },
                     { "indexes", { { { "id", "a" }, { "weight", 0.5 }, { "beliefs", { 1.0, 0.0 } } }, { { "id", "b" }, { "weight", 0.5 }, { "beliefs", { 0.0, 1.0 } } } } } };
    write(dir / "direct.json", spec.dump());
    const auto r = run("assess --spec " + (dir / "direct.json").string());
    REQUIRE(r.status == 0);
    const auto a = json::parse(r.out).at("assessments")[0];
    CHECK(a.at("final_beliefs")[0].get<double>() == doctest::Approx(0.5));
    CHECK(a.at("risk_grade") == "at-risk");
}

TEST_CASE("overhead writes one record per method and iteration") {
    const auto out = work_dir() / "overhead.csv";
    const auto r = run("overhead --data-dir " + data_dir + " --iters 100 --out " + out.string());
    REQUIRE(r.status == 0);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# config_hash=", 0) == 0);
    std::getline(in, line);
    CHECK(line == "method,iteration,cum_time_ns,cum_kernel_evals");
    int records = 0;
    while (std::getline(in, line)) {
        ++records;
    }
    CHECK(records == 200);
}

TEST_CASE("table1 is reproducible apart from timing") {
    const auto dir = work_dir();
    const auto a = run("table1 --data-dir " + data_dir + " --out " + (dir / "t1.json").string());
    REQUIRE(a.status == 0);
    CHECK(a.out.find("Proposed (SVM-ER)") != std::string::npos);
    fs::copy_file(dir / "t1.json", dir / "t1_first.json", fs::copy_options::overwrite_existing);
    REQUIRE(run("table1 --data-dir " + data_dir + " --out " + (dir / "t1.json").string()).status == 0);
    const auto first = svmer::strip_timing(json::parse(slurp(dir / "t1_first.json")));
    const auto second = svmer::strip_timing(json::parse(slurp(dir / "t1.json")));
    CHECK(first.dump() == second.dump());
    CHECK(first.at("datasets").size() == 3);
}

TEST_CASE("table1 with a missing data directory is an io error") {
    CHECK(run("table1 --data-dir /nonexistent --out " + (work_dir() / "t.json").string()).status == 4);
}
