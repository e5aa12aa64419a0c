#include <exception>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "svmer/error.hpp"

namespace {

using namespace svmer::cli;

void add_common(CLI::App &cmd, CommonOptions &c) {
    cmd.add_option("--config", c.config, "JSON config file; flags override its values");
    cmd.add_flag("--print-config", c.print_config, "Print the resolved configuration as JSON and exit");
}

int run(int argc, char **argv) {
    CLI::App app{ "Kernel SVM classification with evidential-reasoning risk assessment" };
    app.require_subcommand(1);
    std::function<int()> action;

    TrainOptions train;
    auto *t = app.add_subcommand("train", "Train an SVM or Gaussian naive Bayes model on a labelled CSV");
    add_common(*t, train.common);
    t->add_option("--dataset", train.dataset, "Labelled CSV file");
    t->add_option("--schema", train.schema, "Schema JSON describing the CSV columns and labels");
    t->add_option("--model-kind", train.model_kind, "svm or gaussian_nb (default svm)");
    t->add_option("--kernel", train.kernel, "linear, polynomial, rbf or sigmoid (default rbf)");
    t->add_option("--gamma", train.gamma, "RBF width gamma");
    t->add_option("--pi", train.pi, "Polynomial / sigmoid scale pi");
    t->add_option("--r", train.r, "Polynomial / sigmoid offset r");
    t->add_option("--degree", train.degree, "Polynomial degree d");
    t->add_option("--penalty", train.penalty, "Box bound D on the dual weights (default 1)");
    t->add_option("--eta", train.eta, "Learning rate (default 1)");
    t->add_option("--epsilon", train.epsilon, "Convergence tolerance on the largest weight change (default 1e-6)");
    t->add_option("--max-epochs", train.max_epochs, "Epoch limit (default 1000)");
    t->add_option("--seed", train.seed, "Seed recorded in the model provenance");
    t->add_option("--scaling", train.scaling, "none, min-max or z-score (default min-max)");
    t->add_flag("--fit-bias", train.fit_bias, "Fit a post-hoc bias maximising training accuracy");
    t->add_option("--variance-floor", train.variance_floor, "Naive Bayes variance floor (default 1e-9)");
    t->add_option("--out", train.out, "Model JSON output path (default model.json)");
    t->add_option("--trace", train.trace, "Training trace CSV path (default <out>.trace.csv)");
    t->callback([&] { action = [&] { return cmd_train(train); }; });

    PredictOptions predict;
    auto *p = app.add_subcommand("predict", "Score feature rows with a trained model");
    add_common(*p, predict.common);
    p->add_option("--model", predict.model, "Model JSON written by train");
    p->add_option("--input", predict.input, "CSV of raw feature rows (no label column)");
    p->add_flag("--header", predict.header, "Input CSV has a header line");
    p->add_option("--out", predict.out, "Output JSON path (default stdout)");
    p->callback([&] { action = [&] { return cmd_predict(predict); }; });

    AssessOptions assess;
    auto *a = app.add_subcommand("assess", "Fuse assessment indexes into a risk grade per input row");
    add_common(*a, assess.common);
    a->add_option("--spec", assess.spec, "Assessment spec JSON (grades, indexes, fuzzy, belief_mapping)");
    a->add_option("--model", assess.model, "Model JSON feeding indexes that give no beliefs");
    a->add_option("--input", assess.input, "CSV of raw feature rows, one assessment per row");
    a->add_option("--row", assess.row, "A single comma-separated feature row");
    a->add_flag("--header", assess.header, "Input CSV has a header line");
    a->add_option("--out", assess.out, "Output JSON path (default stdout)");
    a->callback([&] { action = [&] { return cmd_assess(assess); }; });

    Table1Options table1;
    auto *b = app.add_subcommand("table1", "Run the SVM-ER versus naive Bayes benchmark on the three datasets");
    add_common(*b, table1.common);
    b->add_option("--seed", table1.seed, "Split seed (default 42)");
    b->add_option("--data-dir", table1.data_dir, "Directory holding the dataset CSVs and schemas/ (default data)");
    b->add_option("--out", table1.out, "Report JSON path (default table1_report.json)");
    b->add_option("--table", table1.table, "Also write the formatted table to this path");
    b->callback([&] { action = [&] { return cmd_table1(table1); }; });

    OverheadOptions overhead;
    auto *h = app.add_subcommand("overhead", "Cumulative time and kernel-evaluation curves for ER and the naive method");
    add_common(*h, overhead.common);
    h->add_option("--dataset", overhead.dataset, "Configured dataset id (default hdds)");
    h->add_option("--iters", overhead.iterations, "Number of iterations (default 100)");
    h->add_option("--naive", overhead.naive, "gaussian-nb or pairwise-er (default gaussian-nb)");
    h->add_option("--seed", overhead.seed, "Split seed (default 42)");
    h->add_option("--data-dir", overhead.data_dir, "Directory holding the dataset CSVs and schemas/ (default data)");
    h->add_option("--out", overhead.out, "CSV output path (default stdout)");
    h->callback([&] { action = [&] { return cmd_overhead(overhead); }; });

    auto *v = app.add_subcommand("version", "Print version information");
    v->callback([&] { action = [] { return cmd_version(); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_usage;
    }
    return action();
}

}  // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const svmer::io_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const svmer::numeric_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_not_converged;
    } catch (const svmer::error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "error: invalid configuration: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
