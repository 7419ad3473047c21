// Dataset generation and the binary container that persists it.
//
// A dataset is one terminated block per role: random info bits ->
// convolutional encoder -> QPSK -> channel. All four streams are stored so
// any stage can be replayed or checked offline.
//
// Container layout (integers little-endian):
//   magic "EQDS" | u32 version | u64 spec_hash | u64 base_seed | f64 snr_db |
//   u8 role | u8 no_isi | u64 info_len | u64 coded_len | u64 sym_len |
//   info bits (1 byte each) | coded bits | tx re/im f64 pairs | rx re/im pairs
// plus a human-readable sidecar at <path>.meta. spec_hash covers everything
// that determines the content, so a stale file cannot be mistaken for the
// requested dataset.
#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>

#include "eqlab/channel.hpp"
#include "eqlab/coding.hpp"
#include "eqlab/harness/config.hpp"
#include "eqlab/modem.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/types.hpp"
#include "eqlab/wire.hpp"

namespace eqlab::harness {

enum class Role { train, test };

inline std::string to_string(Role r) { return r == Role::train ? "train" : "test"; }

struct Dataset {
    BitSeq info;
    BitSeq coded;
    IqSeq tx;
    IqSeq rx;
    Role role = Role::train;
    bool no_isi = false;
    double snr_db = 0.0;
    std::uint64_t base_seed = 0;
};

inline constexpr char kDatasetMagic[4] = {'E', 'Q', 'D', 'S'};
inline constexpr std::uint32_t kDatasetVersion = 1;

// Canonical description of everything that determines a dataset's bytes;
// hashed into the container header.
inline std::string dataset_signature(const ExperimentConfig& cfg, Role role, double snr_db,
                                     bool no_isi) {
    std::string s = "role=" + to_string(role) + ";snr=" + format_double(snr_db) +
                    ";chan=" + (no_isi ? "awgn" : "isi") + ";seed=" + std::to_string(cfg.seed) +
                    ";bits=" +
                    std::to_string(role == Role::train ? cfg.effective_training_bits()
                                                       : cfg.effective_testing_bits()) +
                    ";code=" + std::to_string(cfg.code.n_outputs) + "/" +
                    std::to_string(cfg.code.m_memory) + "/";
    for (unsigned g : cfg.code.generators) s += ConvCodeSpec::to_octal(g) + ".";
    s += ";taps=";
    if (!no_isi)
        for (double t : cfg.channel_taps) s += format_double(t) + ".";
    else
        s += "1.";
    return s;
}

inline std::uint64_t dataset_hash(const ExperimentConfig& cfg, Role role, double snr_db,
                                  bool no_isi) {
    return eqlab::detail::fnv1a64(dataset_signature(cfg, role, snr_db, no_isi));
}

// Info bits come from the "bits" stream, which does not depend on the
// channel, so the ISI and AWGN-only datasets of a role/SNR cell carry the
// same payload and their BER curves are directly comparable. Noise comes
// from a channel-specific stream.
inline Dataset generate_dataset(const ExperimentConfig& cfg, Role role, double snr_db,
                                bool no_isi) {
    Dataset ds;
    ds.role = role;
    ds.no_isi = no_isi;
    ds.snr_db = snr_db;
    ds.base_seed = cfg.seed;

    const std::size_t n_info =
        role == Role::train ? cfg.effective_training_bits() : cfg.effective_testing_bits();
    const std::string label =
        "dataset/" + to_string(role) + "/snr" + format_double(snr_db);
    SeededRng base(cfg.seed);
    SeededRng bits_rng = base.derive(label + "/bits");
    ds.info.resize(n_info);
    for (auto& b : ds.info) b = bits_rng.next_bit();

    ds.coded = conv_encode(ds.info, cfg.code);
    const auto map = ConstellationMap::qpsk_gray();
    ds.tx = qpsk_modulate(ds.coded, map);

    ChannelSpec chan;
    chan.taps = no_isi ? std::vector<double>{1.0} : cfg.channel_taps;
    chan.snr_db = snr_db;
    SeededRng noise_rng = base.derive(label + (no_isi ? "/awgn" : "/isi") + "/noise");
    ds.rx = transmit(ds.tx, chan, noise_rng);
    return ds;
}

inline std::string serialize_dataset(const Dataset& ds, std::uint64_t spec_hash) {
    std::string out;
    out.append(kDatasetMagic, 4);
    wire::put_u32(out, kDatasetVersion);
    wire::put_u64(out, spec_hash);
    wire::put_u64(out, ds.base_seed);
    wire::put_f64(out, ds.snr_db);
    out.push_back(ds.role == Role::train ? '\0' : '\1');
    out.push_back(ds.no_isi ? '\1' : '\0');
    wire::put_u64(out, ds.info.size());
    wire::put_u64(out, ds.coded.size());
    wire::put_u64(out, ds.tx.size());
    for (Bit b : ds.info) out.push_back(static_cast<char>(b));
    for (Bit b : ds.coded) out.push_back(static_cast<char>(b));
    for (const Complex& c : ds.tx) {
        wire::put_f64(out, c.real());
        wire::put_f64(out, c.imag());
    }
    for (const Complex& c : ds.rx) {
        wire::put_f64(out, c.real());
        wire::put_f64(out, c.imag());
    }
    return out;
}

inline void save_dataset(const std::string& path, const Dataset& ds, std::uint64_t spec_hash,
                         const std::string& signature) {
    wire::write_file(path, serialize_dataset(ds, spec_hash));
    std::string meta;
    meta += "role = " + to_string(ds.role) + "\n";
    meta += "channel = " + std::string(ds.no_isi ? "awgn-only" : "isi") + "\n";
    meta += "snr_db = " + format_double(ds.snr_db) + "\n";
    meta += "base_seed = " + std::to_string(ds.base_seed) + "\n";
    meta += "info_bits = " + std::to_string(ds.info.size()) + "\n";
    meta += "coded_bits = " + std::to_string(ds.coded.size()) + "\n";
    meta += "symbols = " + std::to_string(ds.tx.size()) + "\n";
    meta += "spec_hash = " + std::to_string(spec_hash) + "\n";
    meta += "signature = " + signature + "\n";
    wire::write_file(path + ".meta", meta);
}

// expected_hash guards against loading a dataset generated under a different
// configuration; pass 0 to skip the check (inspection tools).
inline Dataset load_dataset(const std::string& path, std::uint64_t expected_hash) {
    const std::string buf = wire::read_file(path);
    wire::Reader r(buf, "load_dataset(" + path + ")");
    if (buf.size() < 4 || std::memcmp(buf.data(), kDatasetMagic, 4) != 0)
        r.fail("bad magic, not a dataset file");
    r.bytes(4);
    const std::uint32_t version = r.u32();
    if (version != kDatasetVersion) r.fail("unsupported version " + std::to_string(version));
    const std::uint64_t hash = r.u64();
    if (expected_hash != 0 && hash != expected_hash)
        r.fail("spec hash mismatch: file was generated under a different configuration");
    Dataset ds;
    ds.base_seed = r.u64();
    ds.snr_db = r.f64();
    ds.role = r.u8() == 0 ? Role::train : Role::test;
    ds.no_isi = r.u8() != 0;
    const std::uint64_t info_len = r.u64();
    const std::uint64_t coded_len = r.u64();
    const std::uint64_t sym_len = r.u64();
    ds.info.resize(info_len);
    for (auto& b : ds.info) b = static_cast<Bit>(r.u8());
    ds.coded.resize(coded_len);
    for (auto& b : ds.coded) b = static_cast<Bit>(r.u8());
    ds.tx.resize(sym_len);
    for (auto& c : ds.tx) {
        const double re = r.f64();
        const double im = r.f64();
        c = Complex(re, im);
    }
    ds.rx.resize(sym_len);
    for (auto& c : ds.rx) {
        const double re = r.f64();
        const double im = r.f64();
        c = Complex(re, im);
    }
    if (!r.at_end()) r.fail("trailing bytes after payload");
    return ds;
}

}  // namespace eqlab::harness
