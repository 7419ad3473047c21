// Command-line front end for the coded-channel equalization lab.
//
//   eqlab generate  --config cfg.txt                 write datasets for the grid
//   eqlab train     --variant rnn --snr 8 ...        train one equalizer at one SNR
//   eqlab evaluate  --variant lms --snr 6 ...        evaluate one (variant, SNR) cell
//   eqlab sweep     --config cfg.txt --jobs 2        run the full grid -> report.csv
//   eqlab report    --config cfg.txt                 re-merge finished cells
//
// Flags common to all subcommands: --config, --seed, --desk-scale, --out.
// Results are fully reproducible for a fixed config and seed; finished cells
// under <out>/cells are skipped on re-run.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eqlab/harness/experiment.hpp"
#include "eqlab/wire.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool desk_scale = false;
    std::size_t jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "config file (flat key=value)");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config out_dir)");
    cmd->add_option("--seed", opts.seed, "base seed (overrides config)")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_flag("--desk-scale", opts.desk_scale,
                  "use the reduced desk-scale dataset sizes");
    cmd->add_option("--jobs", opts.jobs, "parallel cell jobs (sweep only)");
}

eqlab::harness::ExperimentConfig load_config(const CommonOpts& opts) {
    eqlab::harness::ExperimentConfig cfg;
    if (!opts.config_path.empty())
        cfg = eqlab::harness::parse_config(eqlab::wire::read_file(opts.config_path));
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.desk_scale) cfg.desk_scale = true;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.jobs > 0) cfg.jobs = opts.jobs;
    cfg.validate();
    return cfg;
}

void print_row(const eqlab::harness::CellResult& row) {
    std::printf("%s\n", row.to_csv_row().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    using namespace eqlab::harness;

    CLI::App app{"coded-channel equalization lab"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string variant_name;
    double snr_db = 0.0;
    bool snr_set = false;

    auto* gen = app.add_subcommand("generate", "generate and persist the datasets for the grid");
    add_common(gen, opts);

    auto* train = app.add_subcommand("train", "train one equalizer at one SNR point");
    add_common(train, opts);
    train->add_option("--variant", variant_name, "cnn or rnn")->required();
    train->add_option("--snr", snr_db, "SNR point in dB")->required();

    auto* eval = app.add_subcommand("evaluate", "evaluate one (variant, SNR) cell");
    add_common(eval, opts);
    eval->add_option("--variant", variant_name, "none|no_isi_reference|lms|cnn|rnn")->required();
    eval->add_option("--snr", snr_db, "SNR point in dB")->each([&](const std::string&) {
        snr_set = true;
    });

    auto* sweep = app.add_subcommand("sweep", "run every (variant, SNR) cell and write report.csv");
    add_common(sweep, opts);

    auto* report = app.add_subcommand("report", "merge finished cell rows into report.csv");
    add_common(report, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = load_config(opts);

        if (gen->parsed()) {
            Experiment exp(cfg);
            const bool wants_no_isi =
                std::find(cfg.variants.begin(), cfg.variants.end(), Variant::no_isi_reference) !=
                cfg.variants.end();
            for (double snr : cfg.snr_db_list) {
                exp.dataset(Role::train, snr, false);
                exp.dataset(Role::test, snr, false);
                if (wants_no_isi) exp.dataset(Role::test, snr, true);
                std::printf("datasets ready at snr %s dB\n", format_double(snr).c_str());
            }
        } else if (train->parsed()) {
            const Variant v = parse_variant(variant_name);
            if (v != Variant::cnn && v != Variant::rnn)
                throw std::invalid_argument("train: only cnn and rnn have trainable models");
            Experiment exp(cfg);
            eqlab::TrainLog log;
            if (v == Variant::cnn)
                exp.train_model<eqlab::CnnEqualizer>(v, snr_db, 0, &log);
            else
                exp.train_model<eqlab::RnnEqualizer>(v, snr_db, 0, &log);
            std::printf("trained %s at %s dB: %zu epochs, best epoch %zu, val loss %s\n",
                        variant_name.c_str(), format_double(snr_db).c_str(), log.epochs.size(),
                        log.best_epoch, format_double(log.best_val_loss).c_str());
            std::printf("weights: %s\n", exp.model_path_rel(v, snr_db, 0).c_str());
        } else if (eval->parsed()) {
            if (!snr_set)
                throw std::invalid_argument("evaluate: --snr is required");
            const Variant v = parse_variant(variant_name);
            Experiment exp(cfg);
            std::printf("%s\n", kCsvHeader);
            print_row(exp.evaluate_cell_resumable(v, snr_db));
        } else if (sweep->parsed()) {
            Experiment exp(cfg);
            const BerReport rep = exp.sweep();
            std::printf("%s", rep.to_csv().c_str());
            std::printf("note: equalizers are trained on the training dataset and evaluated on "
                        "the disjoint test dataset\n");
            std::printf("report written to %s/report.csv\n", cfg.out_dir.c_str());
        } else if (report->parsed()) {
            Experiment exp(cfg);
            const BerReport rep = exp.merge_report();
            std::printf("%s", rep.to_csv().c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
