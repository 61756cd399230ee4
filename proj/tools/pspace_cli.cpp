// pspace command-line front end. Talks to the library exclusively
// through the public C API so it doubles as an integration test of the
// shared-library surface.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pspace.h"

namespace {

[[noreturn]] void fail(const std::string& what, const std::vector<std::string>& partial_outputs) {
    for (const auto& path : partial_outputs) {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
    std::fprintf(stderr, "error: %s\n", what.c_str());
    std::exit(1);
}

void check(pspace_status status, const std::vector<std::string>& partial_outputs = {}) {
    if (status != PSPACE_OK) fail(pspace_last_error(), partial_outputs);
}

// RAII wrappers over the opaque handles.
template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    ~Handle() { Free(ptr); }
    T** out() { return &ptr; }
    operator T*() const { return ptr; }
};
using Dataset = Handle<pspace_dataset, pspace_dataset_free>;
using Space = Handle<pspace_space, pspace_space_free>;
using Labels = Handle<pspace_labels, pspace_labels_free>;
using Gold = Handle<pspace_gold, pspace_gold_free>;
using Result = Handle<pspace_result, pspace_result_free>;
using Stream = Handle<pspace_stream, pspace_stream_free>;

int read_thread_cap() {
    const char* env = std::getenv("PSPACE_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) fail("PSPACE_THREADS must be a positive integer", {});
    return static_cast<int>(v);
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(std::stoi(part));
    if (out.empty()) fail("empty list: " + csv, {});
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) fail("cannot write " + path, {path});
}

struct SeedStats {
    double mean = 0.0;
    double stddev = 0.0;
};

SeedStats stats(const std::vector<double>& values) {
    SeedStats s;
    for (double v : values) s.mean += v;
    s.mean /= values.size();
    for (double v : values) s.stddev += (v - s.mean) * (v - s.mean);
    s.stddev = values.size() > 1 ? std::sqrt(s.stddev / (values.size() - 1)) : 0.0;
    return s;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    read_thread_cap(); // the pipeline is sequential; the cap is validated, trivially honored

    CLI::App app{"perceptual-space toolkit"};
    app.require_subcommand(1);

    std::string ratings_path, truth_path, gold_path, labels_path, metadata_path;
    std::string space_path, out_path, pred_path, stream_path, item_id, preset, metric = "gmean";
    std::string n_list = "20", x_list = "20";
    int dim = 100, epochs = 30, k = 5, n = 20, folds = 5;
    double lambda = 0.02, lr = 0.005, interval = 5.0;
    uint64_t seed = 1;
    bool regression = false, verbose = false;

    app.add_option("--seed", seed, "master random seed");
    app.add_flag("--verbose", verbose, "per-repetition detail");

    auto* build = app.add_subcommand("build-space", "train a factor model and save the space");
    build->add_option("--ratings", ratings_path)->required();
    build->add_option("--out", out_path)->required();
    build->add_option("--dim", dim);
    build->add_option("--lambda", lambda);
    build->add_option("--epochs", epochs);
    build->add_option("--lr", lr);

    auto* neigh = app.add_subcommand("neighbors", "k nearest items by Euclidean distance");
    neigh->add_option("--space", space_path)->required();
    neigh->add_option("--item", item_id)->required();
    neigh->add_option("--k", k);

    auto* expand = app.add_subcommand("expand", "predict an attribute for every item");
    expand->add_option("--space", space_path)->required();
    expand->add_option("--out", out_path)->required();
    expand->add_option("--gold", gold_path);
    expand->add_option("--truth", truth_path);
    expand->add_option("--labels", labels_path);
    expand->add_option("--n", n);
    expand->add_option("--folds", folds);
    expand->add_flag("--regression", regression);

    auto* noise = app.add_subcommand("detect-noise", "flag labels the model disagrees with");
    noise->add_option("--space", space_path)->required();
    noise->add_option("--labels", labels_path)->required();
    noise->add_option("--out", out_path)->required();
    noise->add_option("--folds", folds);

    auto* crowd = app.add_subcommand("simulate-crowd", "run a worker-population preset");
    crowd->add_option("--truth", truth_path)->required();
    crowd->add_option("--preset", preset)->required();
    crowd->add_option("--out", out_path)->required();

    auto* boost = app.add_subcommand("boost", "incremental retrain timeline over a stream");
    boost->add_option("--space", space_path)->required();
    boost->add_option("--stream", stream_path)->required();
    boost->add_option("--out", out_path)->required();
    boost->add_option("--truth", truth_path);
    boost->add_option("--interval", interval);

    auto* eval = app.add_subcommand("eval", "score predictions against truth");
    eval->add_option("--pred", pred_path)->required();
    eval->add_option("--truth", truth_path)->required();
    eval->add_option("--metric", metric)->check(CLI::IsMember({"gmean", "accuracy", "pr"}));

    auto* lsi = app.add_subcommand("lsi", "build a metadata space from item text");
    lsi->add_option("--metadata", metadata_path)->required();
    lsi->add_option("--out", out_path)->required();
    lsi->add_option("--dim", dim);

    auto* grad = app.add_subcommand("gradcheck", "analytic vs numeric gradients");
    grad->add_option("--dim", dim);

    auto* experiment = app.add_subcommand("experiment", "reproduce a report grid");
    std::string which;
    experiment->add_option("name", which, "table3|table4|figures34")->required();
    experiment->add_option("--space", space_path);
    experiment->add_option("--truth", truth_path);
    experiment->add_option("--labels", labels_path);
    experiment->add_option("--metadata", metadata_path);
    experiment->add_option("--out", out_path)->required();
    experiment->add_option("--n", n_list);
    experiment->add_option("--x", x_list);
    experiment->add_option("--preset", preset);
    experiment->add_option("--dim", dim);
    experiment->add_option("--interval", interval);
    experiment->add_option("--folds", folds);

    CLI11_PARSE(app, argc, argv);

    if (build->parsed()) {
        Dataset ds;
        check(pspace_dataset_load(ratings_path.c_str(), 1.0, 5.0, ds.out()));
        pspace_train_config cfg;
        pspace_train_config_default(&cfg);
        cfg.d = dim;
        cfg.lambda = lambda;
        cfg.epochs = epochs;
        cfg.learning_rate = lr;
        cfg.seed = seed;
        Space space;
        pspace_train_report report{};
        check(pspace_train(ds, &cfg, nullptr, space.out(), &report));
        check(pspace_space_save(space, out_path.c_str()), {out_path});
        std::printf("cost\t%s -> %s\n", fmt(report.initial_cost).c_str(),
                    fmt(report.final_cost).c_str());
        std::printf("space\t%s\n", out_path.c_str());
        return 0;
    }

    if (neigh->parsed()) {
        Space space;
        check(pspace_space_load(space_path.c_str(), space.out()));
        auto print = [](const char* id, double dist, void*) {
            std::printf("%s\t%.6f\n", id, dist);
        };
        check(pspace_space_neighbors(space, item_id.c_str(), k, print, nullptr));
        return 0;
    }

    if (expand->parsed()) {
        Space space;
        check(pspace_space_load(space_path.c_str(), space.out()));
        Result result;
        if (regression) {
            if (labels_path.empty()) fail("--regression needs --labels with numeric targets", {});
            Labels targets;
            check(pspace_labels_load(labels_path.c_str(), "target", 1, targets.out()));
            check(pspace_expand_regression(space, targets, nullptr, folds, seed, result.out()));
        } else {
            Gold gold;
            if (!gold_path.empty()) {
                check(pspace_gold_load(gold_path.c_str(), gold.out()));
            } else if (!truth_path.empty()) {
                Labels truth;
                check(pspace_labels_load(truth_path.c_str(), "truth", 0, truth.out()));
                check(pspace_gold_sample(truth, n, seed, gold.out()));
            } else {
                fail("expand needs --gold, or --truth with --n to sample one", {});
            }
            check(pspace_expand(space, gold, nullptr, folds, seed, result.out()));
        }
        check(pspace_result_save(result, out_path.c_str()), {out_path});
        if (!truth_path.empty() && !regression) {
            Labels truth;
            check(pspace_labels_load(truth_path.c_str(), "truth", 0, truth.out()), {out_path});
            double g = 0.0;
            check(pspace_result_gmean(result, truth, &g), {out_path});
            std::printf("gmean\t%s\n", fmt(g).c_str());
        }
        std::printf("result\t%s\n", out_path.c_str());
        return 0;
    }

    if (noise->parsed()) {
        Space space;
        check(pspace_space_load(space_path.c_str(), space.out()));
        Labels labels;
        check(pspace_labels_load(labels_path.c_str(), "labels", 0, labels.out()));
        int64_t flagged = 0;
        check(pspace_detect_noise(space, labels, nullptr, folds, seed, out_path.c_str(),
                                  &flagged),
              {out_path});
        std::printf("flagged\t%lld\n", static_cast<long long>(flagged));
        return 0;
    }

    if (crowd->parsed()) {
        Labels truth;
        check(pspace_labels_load(truth_path.c_str(), "truth", 0, truth.out()));
        Stream stream;
        check(pspace_simulate_preset(truth, preset.c_str(), seed, stream.out()));
        check(pspace_stream_save(stream, out_path.c_str()), {out_path});
        pspace_ledger ledger{};
        check(pspace_stream_ledger(stream, &ledger), {out_path});
        int64_t classified = 0, correct = 0;
        double percent = 0.0;
        check(pspace_stream_majority_eval(stream, truth, &classified, &correct, &percent),
              {out_path});
        std::printf("classified\t%lld\n", static_cast<long long>(classified));
        std::printf("correct\t%lld\n", static_cast<long long>(correct));
        std::printf("percent_correct\t%s\n", fmt(percent).c_str());
        std::printf("dollars\t%s\n", fmt(ledger.dollars).c_str());
        std::printf("minutes\t%s\n", fmt(ledger.total_minutes).c_str());
        std::printf("workers_excluded\t%d\n", ledger.workers_excluded);
        return 0;
    }

    if (boost->parsed()) {
        Space space;
        check(pspace_space_load(space_path.c_str(), space.out()));
        Stream stream;
        check(pspace_stream_load(stream_path.c_str(), stream.out()));
        Labels truth;
        if (!truth_path.empty())
            check(pspace_labels_load(truth_path.c_str(), "truth", 0, truth.out()));
        check(pspace_boost(space, stream, interval, 2, 10, truth.ptr, out_path.c_str()),
              {out_path});
        std::printf("timeline\t%s\n", out_path.c_str());
        return 0;
    }

    if (eval->parsed()) {
        double v1 = 0.0, v2 = 0.0;
        check(pspace_eval_files(pred_path.c_str(), truth_path.c_str(), metric.c_str(), &v1, &v2));
        if (metric == "pr") {
            std::printf("precision\t%s\n", fmt(v1).c_str());
            std::printf("recall\t%s\n", fmt(v2).c_str());
        } else {
            std::printf("%s\t%s\n", metric.c_str(), fmt(v1).c_str());
        }
        return 0;
    }

    if (lsi->parsed()) {
        Space space;
        check(pspace_lsi_build(metadata_path.c_str(), dim, space.out()));
        check(pspace_space_save(space, out_path.c_str()), {out_path});
        std::printf("space\t%s\n", out_path.c_str());
        return 0;
    }

    if (grad->parsed()) {
        for (int kind = 0; kind <= 1; ++kind) {
            double err = 0.0;
            check(pspace_gradient_check(kind, dim > 50 ? 5 : dim, 0.02, seed, 50, &err));
            std::printf("%s\t%.3e\n", kind ? "svd" : "euclidean", err);
        }
        return 0;
    }

    // experiment grids: mean +- stddev over 20 seeded repetitions
    const int reps = 20;
    if (which == "table3") {
        if (space_path.empty() || truth_path.empty())
            fail("experiment table3 needs --space and --truth (and --metadata for the baseline)",
                 {});
        Space perceptual;
        check(pspace_space_load(space_path.c_str(), perceptual.out()));
        Space metadata;
        if (!metadata_path.empty())
            check(pspace_lsi_build(metadata_path.c_str(), dim > 50 ? 10 : dim, metadata.out()));
        Labels truth;
        check(pspace_labels_load(truth_path.c_str(), "truth", 0, truth.out()));

        std::string report = "space\tn\tgmean_mean\tgmean_stddev\n";
        for (int n_gold : parse_int_list(n_list)) {
            for (int which_space = 0; which_space < (metadata.ptr ? 2 : 1); ++which_space) {
                pspace_space* sp = which_space ? metadata.ptr : perceptual.ptr;
                std::vector<double> gmeans;
                for (uint64_t rep = 1; rep <= reps; ++rep) {
                    Gold gold;
                    check(pspace_gold_sample(truth, n_gold, seed + rep, gold.out()));
                    Result result;
                    check(pspace_expand(sp, gold, nullptr, folds, seed + rep, result.out()));
                    double g = 0.0;
                    check(pspace_result_gmean(result, truth, &g));
                    gmeans.push_back(g);
                    if (verbose)
                        std::printf("rep\t%llu\t%s\n", static_cast<unsigned long long>(rep),
                                    fmt(g).c_str());
                }
                auto s = stats(gmeans);
                report += std::string(which_space ? "metadata" : "perceptual") + "\t" +
                          std::to_string(n_gold) + "\t" + fmt(s.mean) + "\t" + fmt(s.stddev) +
                          "\n";
            }
        }
        write_text(out_path, report);
        std::fputs(report.c_str(), stdout);
        return 0;
    }

    if (which == "table4") {
        if (space_path.empty() || labels_path.empty())
            fail("experiment table4 needs --space and --labels", {});
        Space space;
        check(pspace_space_load(space_path.c_str(), space.out()));
        Labels labels;
        check(pspace_labels_load(labels_path.c_str(), "labels", 0, labels.out()));
        std::string report = "x_percent\tprecision_mean\tprecision_stddev\trecall_mean\trecall_stddev\n";
        for (int x : parse_int_list(x_list)) {
            std::vector<double> precisions, recalls;
            for (uint64_t rep = 1; rep <= reps; ++rep) {
                double precision = 0.0, recall = 0.0;
                check(pspace_detect_noise_eval(space, labels, x / 100.0, nullptr, folds,
                                               seed + rep, &precision, &recall));
                precisions.push_back(precision);
                recalls.push_back(recall);
                if (verbose)
                    std::printf("rep\t%llu\t%s\t%s\n", static_cast<unsigned long long>(rep),
                                fmt(precision).c_str(), fmt(recall).c_str());
            }
            auto ps = stats(precisions);
            auto rs = stats(recalls);
            report += std::to_string(x) + "\t" + fmt(ps.mean) + "\t" + fmt(ps.stddev) + "\t" +
                      fmt(rs.mean) + "\t" + fmt(rs.stddev) + "\n";
        }
        write_text(out_path, report);
        std::fputs(report.c_str(), stdout);
        return 0;
    }

    if (which == "figures34") {
        if (space_path.empty() || truth_path.empty() || preset.empty())
            fail("experiment figures34 needs --space, --truth, and --preset", {});
        Space space;
        check(pspace_space_load(space_path.c_str(), space.out()));
        Labels truth;
        check(pspace_labels_load(truth_path.c_str(), "truth", 0, truth.out()));
        Stream stream;
        check(pspace_simulate_preset(truth, preset.c_str(), seed, stream.out()));
        check(pspace_boost(space, stream, interval, 2, 10, truth, out_path.c_str()), {out_path});
        std::printf("timeline\t%s\n", out_path.c_str());
        return 0;
    }

    fail("unknown experiment '" + which + "' (table3|table4|figures34)", {});
}
