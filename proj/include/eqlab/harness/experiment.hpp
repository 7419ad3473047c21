// End-to-end experiment orchestration: dataset management, per-cell
// training and evaluation, the CSV report, and the SNR sweep.
//
// A cell is one (variant, SNR) pair. Cells are independent jobs with
// disjoint derived RNG streams and output files, so they can run in
// parallel; the report merge is single-threaded and canonically ordered, so
// a sweep's CSV is byte-identical for identical config regardless of
// scheduling. Everything lands under cfg.out_dir:
//   datasets/  binary stream containers (+ .meta sidecars)
//   models/    trained equalizer weights
//   cells/     one CSV row per finished cell (this is what makes a sweep
//              resumable: finished cells are skipped on re-run)
//   report.csv merged result table
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "eqlab/equalizers/cnn.hpp"
#include "eqlab/equalizers/rnn.hpp"
#include "eqlab/equalizers/training.hpp"
#include "eqlab/harness/ber.hpp"
#include "eqlab/harness/config.hpp"
#include "eqlab/harness/dataset.hpp"
#include "eqlab/lms.hpp"
#include "eqlab/nn/model_io.hpp"

namespace eqlab::harness {

inline constexpr const char* kCsvHeader =
    "variant,snr_db,pre_ber,post_ber,coded_bits,info_bits,seed,model_file,status";

struct CellResult {
    Variant variant = Variant::none;
    double snr_db = 0.0;
    double pre_ber = 0.0;
    double post_ber = 0.0;
    std::uint64_t coded_bits = 0;
    std::uint64_t info_bits = 0;
    std::uint64_t seed = 0;
    std::string model_file = "-";
    std::string status = "ok";

    std::string to_csv_row() const {
        const auto num = [](double d) {
            return std::isnan(d) ? std::string("nan") : format_double(d);
        };
        return to_string(variant) + "," + format_double(snr_db) + "," + num(pre_ber) + "," +
               num(post_ber) + "," + std::to_string(coded_bits) + "," + std::to_string(info_bits) +
               "," + std::to_string(seed) + "," + model_file + "," + status;
    }
};

struct BerReport {
    std::vector<CellResult> rows;

    std::string to_csv() const {
        std::string out = std::string(kCsvHeader) + "\n";
        for (const auto& r : rows) out += r.to_csv_row() + "\n";
        return out;
    }
};

inline CellResult parse_cell_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else
            cur.push_back(ch);
    }
    fields.push_back(cur);
    if (fields.size() != 9)
        throw std::runtime_error("malformed cell row: '" + line + "'");
    CellResult r;
    r.variant = parse_variant(fields[0]);
    r.snr_db = std::stod(fields[1]);
    r.pre_ber = fields[2] == "nan" ? std::nan("") : std::stod(fields[2]);
    r.post_ber = fields[3] == "nan" ? std::nan("") : std::stod(fields[3]);
    r.coded_bits = std::stoull(fields[4]);
    r.info_bits = std::stoull(fields[5]);
    r.seed = std::stoull(fields[6]);
    r.model_file = fields[7];
    r.status = fields[8];
    return r;
}

class Experiment {
  public:
    explicit Experiment(ExperimentConfig cfg)
        : cfg_(std::move(cfg)), map_(ConstellationMap::qpsk_gray()), trellis_(build_trellis(cfg_.code)) {
        cfg_.validate();
        namespace fs = std::filesystem;
        fs::create_directories(fs::path(cfg_.out_dir) / "datasets");
        fs::create_directories(fs::path(cfg_.out_dir) / "models");
        fs::create_directories(fs::path(cfg_.out_dir) / "cells");
    }

    const ExperimentConfig& config() const { return cfg_; }
    const Trellis& trellis() const { return trellis_; }
    const ConstellationMap& map() const { return map_; }

    std::string dataset_path(Role role, double snr_db, bool no_isi) const {
        return (std::filesystem::path(cfg_.out_dir) / "datasets" /
                (to_string(role) + "_snr" + format_double(snr_db) +
                 (no_isi ? "_awgn" : "_isi") + ".eqds"))
            .string();
    }

    std::string model_path_rel(Variant v, double snr_db, unsigned attempt) const {
        std::string name = to_string(v);
        name += cfg_.mixed_snr_training ? "_mixed" : "_snr" + format_double(snr_db);
        if (attempt > 0) name += "_a" + std::to_string(attempt);
        return "models/" + name + ".eqw";
    }

    std::string cell_path(Variant v, double snr_db) const {
        return (std::filesystem::path(cfg_.out_dir) / "cells" /
                (to_string(v) + "_snr" + format_double(snr_db) + ".csv"))
            .string();
    }

    // Loads the dataset if a valid file exists, generates + persists it
    // otherwise. Memoized; safe to call from parallel cell jobs.
    const Dataset& dataset(Role role, double snr_db, bool no_isi) {
        const std::string key =
            to_string(role) + "/" + format_double(snr_db) + "/" + (no_isi ? "awgn" : "isi");
        std::lock_guard<std::mutex> lock(data_mutex_);
        auto it = datasets_.find(key);
        if (it != datasets_.end()) return it->second;

        const std::string path = dataset_path(role, snr_db, no_isi);
        const std::uint64_t hash = dataset_hash(cfg_, role, snr_db, no_isi);
        Dataset ds;
        if (std::filesystem::exists(path)) {
            ds = load_dataset(path, hash);
        } else {
            ds = generate_dataset(cfg_, role, snr_db, no_isi);
            save_dataset(path, ds, hash, dataset_signature(cfg_, role, snr_db, no_isi));
        }
        return datasets_.emplace(key, std::move(ds)).first->second;
    }

    // Trains (or reloads) one neural model. attempt > 0 re-trains from a
    // different derived seed; used when a trend check wants extra draws.
    template <typename Model>
    Model train_model(Variant v, double snr_db, unsigned attempt, TrainLog* log_out = nullptr) {
        typename Model::Arch arch;
        if constexpr (std::is_same_v<Model, CnnEqualizer>)
            arch = cfg_.cnn;
        else
            arch = cfg_.rnn;
        arch.frame = cfg_.frame;
        Model model(arch);

        const std::string rel = model_path_rel(v, snr_db, attempt);
        const std::string path = (std::filesystem::path(cfg_.out_dir) / rel).string();
        auto refs = model.params();
        if (std::filesystem::exists(path)) {
            nn::load_model(path, model.descriptor(), refs);
            return model;
        }

        std::vector<TrainingPair> pairs;
        if (cfg_.mixed_snr_training) {
            for (double s : cfg_.snr_db_list) {
                const Dataset& tr = dataset(Role::train, s, false);
                auto part = make_training_pairs(tr.rx, tr.tx, cfg_.frame);
                pairs.insert(pairs.end(), part.begin(), part.end());
            }
        } else {
            const Dataset& tr = dataset(Role::train, snr_db, false);
            pairs = make_training_pairs(tr.rx, tr.tx, cfg_.frame);
        }

        TrainConfig tc = cfg_.train;
        const std::string seed_label = "model/" + to_string(v) +
                                       (cfg_.mixed_snr_training ? "/mixed" : "/snr" + format_double(snr_db)) +
                                       "/attempt" + std::to_string(attempt);
        tc.seed = SeededRng(cfg_.seed).derive(seed_label).seed();
        TrainLog log = train_equalizer(model, pairs, tc);
        if (log_out) *log_out = log;
        nn::save_model(path, model.descriptor(), model.params());
        return model;
    }

    // Evaluates one (variant, SNR) cell. Exceptions inside the cell are
    // captured into the status column so a sweep keeps going.
    CellResult evaluate_cell(Variant v, double snr_db, unsigned attempt = 0) {
        CellResult res;
        res.variant = v;
        res.snr_db = snr_db;
        res.seed = cfg_.seed;
        try {
            const Dataset& test = dataset(Role::test, snr_db, v == Variant::no_isi_reference);
            SoftSymbolSeq soft;
            switch (v) {
                case Variant::none:
                case Variant::no_isi_reference:
                    // Raw receive, aligned to tap 0 (no delay compensation).
                    soft = test.rx;
                    break;
                case Variant::lms: {
                    const Dataset& train = dataset(Role::train, snr_db, false);
                    if (train.tx.size() < cfg_.lms.training_len + cfg_.lms.num_taps)
                        throw std::invalid_argument("lms: training dataset shorter than pilot block");
                    const IqSeq pilots(train.tx.begin(),
                                       train.tx.begin() +
                                           static_cast<std::ptrdiff_t>(cfg_.lms.training_len));
                    const auto trained = lms_train(train.rx, pilots, cfg_.lms);
                    soft = lms_apply(trained.filter, test.rx);
                    break;
                }
                case Variant::cnn: {
                    const CnnEqualizer model = train_model<CnnEqualizer>(v, snr_db, attempt);
                    soft = equalize_sequence(model, test.rx, cfg_.frame);
                    res.model_file = model_path_rel(v, snr_db, attempt);
                    break;
                }
                case Variant::rnn: {
                    const RnnEqualizer model = train_model<RnnEqualizer>(v, snr_db, attempt);
                    soft = equalize_sequence(model, test.rx, cfg_.frame);
                    res.model_file = model_path_rel(v, snr_db, attempt);
                    break;
                }
            }
            const BerCount pre = pre_decoder_errors(soft, test.coded, map_);
            const BerCount post = post_decoder_errors(soft, test.info, trellis_, map_);
            res.pre_ber = pre.rate();
            res.post_ber = post.rate();
            res.coded_bits = pre.total;
            res.info_bits = post.total;
            // Standard Monte-Carlo floor: a cell with fewer than 20 observed
            // errors on either measure is statistically unreliable.
            res.status = (pre.errors < 20 || post.errors < 20) ? "unreliable" : "ok";
        } catch (const std::exception& e) {
            std::string msg = e.what();
            for (char& c : msg)
                if (c == ',' || c == '\n') c = ';';
            res.pre_ber = std::nan("");
            res.post_ber = std::nan("");
            res.status = "error:" + msg;
        }
        return res;
    }

    // Cell with resume-from-disk semantics: a finished cell row is reused.
    CellResult evaluate_cell_resumable(Variant v, double snr_db) {
        const std::string path = cell_path(v, snr_db);
        if (std::filesystem::exists(path)) {
            const std::string body = wire::read_file(path);
            const auto nl = body.find('\n');
            return parse_cell_row(nl == std::string::npos ? body : body.substr(0, nl));
        }
        CellResult res = evaluate_cell(v, snr_db);
        wire::write_file(path, res.to_csv_row() + "\n");
        return res;
    }

    // Full grid. Cells run on cfg.jobs worker threads; rows come back in
    // canonical order (variant enum order, then SNR ascending), so the CSV is
    // reproducible byte-for-byte.
    BerReport sweep() {
        struct Job {
            Variant v;
            double snr;
        };
        std::vector<Job> jobs;
        for (Variant v : all_variants())
            if (std::find(cfg_.variants.begin(), cfg_.variants.end(), v) != cfg_.variants.end()) {
                std::vector<double> snrs = cfg_.snr_db_list;
                std::sort(snrs.begin(), snrs.end());
                for (double s : snrs) jobs.push_back({v, s});
            }

        std::vector<CellResult> rows(jobs.size());
        std::size_t next = 0;
        std::mutex next_mutex;
        const auto worker = [&]() {
            for (;;) {
                std::size_t idx;
                {
                    std::lock_guard<std::mutex> lock(next_mutex);
                    if (next >= jobs.size()) return;
                    idx = next++;
                }
                rows[idx] = evaluate_cell_resumable(jobs[idx].v, jobs[idx].snr);
            }
        };
        const std::size_t nthreads = std::min<std::size_t>(cfg_.jobs, jobs.size());
        if (nthreads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        BerReport report;
        report.rows = std::move(rows);
        wire::write_file((std::filesystem::path(cfg_.out_dir) / "report.csv").string(),
                         report.to_csv());
        return report;
    }

    // Re-merge whatever cell rows exist on disk into report.csv.
    BerReport merge_report() {
        BerReport report;
        for (Variant v : all_variants()) {
            std::vector<double> snrs = cfg_.snr_db_list;
            std::sort(snrs.begin(), snrs.end());
            for (double s : snrs) {
                const std::string path = cell_path(v, s);
                if (!std::filesystem::exists(path)) continue;
                const std::string body = wire::read_file(path);
                const auto nl = body.find('\n');
                report.rows.push_back(
                    parse_cell_row(nl == std::string::npos ? body : body.substr(0, nl)));
            }
        }
        wire::write_file((std::filesystem::path(cfg_.out_dir) / "report.csv").string(),
                         report.to_csv());
        return report;
    }

  private:
    ExperimentConfig cfg_;
    ConstellationMap map_;
    Trellis trellis_;
    std::mutex data_mutex_;
    std::map<std::string, Dataset> datasets_;
};

}  // namespace eqlab::harness
