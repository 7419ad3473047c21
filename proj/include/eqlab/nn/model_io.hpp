// Versioned binary weight files.
//
// Layout (all integers little-endian):
//   magic "EQLW" | u32 version | u32 arch_len | arch descriptor bytes |
//   u32 tensor_count | per tensor: u32 name_len, name, u32 rank, u64 dims[] |
//   all tensor payloads as IEEE-754 binary64 little-endian, in declared order.
//
// The arch descriptor is a short text string produced by the model builder;
// loaders compare it against the expected architecture before accepting the
// payload. Round trips are byte-exact.
#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqlab/nn/params.hpp"
#include "eqlab/tensor.hpp"
#include "eqlab/wire.hpp"

namespace eqlab::nn {

inline constexpr char kWeightMagic[4] = {'E', 'Q', 'L', 'W'};
inline constexpr std::uint32_t kWeightVersion = 1;

inline std::string serialize_model(const std::string& arch_descriptor, const ParamRefs& params) {
    std::string out;
    out.append(kWeightMagic, 4);
    wire::put_u32(out, kWeightVersion);
    wire::put_u32(out, static_cast<std::uint32_t>(arch_descriptor.size()));
    out += arch_descriptor;
    wire::put_u32(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        wire::put_u32(out, static_cast<std::uint32_t>(p.name.size()));
        out += p.name;
        wire::put_u32(out, static_cast<std::uint32_t>(p.tensor->rank()));
        for (std::size_t d : p.tensor->shape()) wire::put_u64(out, d);
    }
    for (const auto& p : params)
        for (std::size_t i = 0; i < p.tensor->size(); ++i) wire::put_f64(out, (*p.tensor)[i]);
    return out;
}

inline void save_model(const std::string& path, const std::string& arch_descriptor,
                       const ParamRefs& params) {
    wire::write_file(path, serialize_model(arch_descriptor, params));
}

// Loads into an already-constructed model: names, order and shapes must all
// match, and the stored arch descriptor must equal expected_arch.
inline void load_model(const std::string& path, const std::string& expected_arch,
                       const ParamRefs& params) {
    const std::string buf = wire::read_file(path);
    wire::Reader r(buf, "load_model(" + path + ")");
    if (buf.size() < 4 || std::memcmp(buf.data(), kWeightMagic, 4) != 0)
        r.fail("bad magic, not a weight file");
    r.bytes(4);
    const std::uint32_t version = r.u32();
    if (version != kWeightVersion) r.fail("unsupported version " + std::to_string(version));
    const std::string arch = r.bytes(r.u32());
    if (arch != expected_arch)
        r.fail("architecture mismatch: file has '" + arch + "', expected '" + expected_arch +
               "'");
    const std::uint32_t count = r.u32();
    if (count != params.size())
        r.fail("tensor count mismatch: file has " + std::to_string(count) + ", model has " +
               std::to_string(params.size()));
    for (const auto& p : params) {
        const std::string name = r.bytes(r.u32());
        if (name != p.name)
            r.fail("tensor name mismatch: file has '" + name + "', model expects '" + p.name +
                   "'");
        const std::uint32_t rank = r.u32();
        std::vector<std::size_t> dims(rank);
        for (auto& d : dims) d = static_cast<std::size_t>(r.u64());
        if (dims != p.tensor->shape()) r.fail("tensor shape mismatch for '" + name + "'");
    }
    for (const auto& p : params)
        for (std::size_t i = 0; i < p.tensor->size(); ++i) (*p.tensor)[i] = r.f64();
    if (!r.at_end()) r.fail("trailing bytes after parameter data");
}

}  // namespace eqlab::nn
