// Bit-error-rate measurement before and after the decoder.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "eqlab/coding.hpp"
#include "eqlab/modem.hpp"
#include "eqlab/types.hpp"

namespace eqlab::harness {

struct BerCount {
    std::uint64_t errors = 0;
    std::uint64_t total = 0;

    double rate() const { return total ? static_cast<double>(errors) / static_cast<double>(total) : 0.0; }
};

inline BerCount count_bit_errors(const BitSeq& a, const BitSeq& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("count_bit_errors: length mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                    ")");
    BerCount c;
    c.total = a.size();
    for (std::size_t i = 0; i < a.size(); ++i) c.errors += (a[i] ^ b[i]) & 1u;
    return c;
}

// Coded-bit BER: hard-slice the equalized symbols and compare against the
// transmitted coded stream (tail steps included, they are part of it).
inline BerCount pre_decoder_errors(const SoftSymbolSeq& equalized, const BitSeq& coded,
                                   const ConstellationMap& map) {
    if (equalized.size() * ConstellationMap::bits_per_symbol() != coded.size())
        throw std::invalid_argument("pre_decoder_errors: symbol/bit length mismatch");
    return count_bit_errors(qpsk_hard_demodulate(equalized, map), coded);
}

// Information-bit BER: soft Viterbi over the equalized coordinates, tail
// bits stripped by the decoder.
inline BerCount post_decoder_errors(const SoftSymbolSeq& equalized, const BitSeq& info,
                                    const Trellis& trellis, const ConstellationMap& map) {
    const BitSeq decoded = viterbi_decode_soft(equalized, trellis, map);
    return count_bit_errors(decoded, info);
}

inline double measure_pre_decoder_ber(const SoftSymbolSeq& equalized, const BitSeq& coded,
                                      const ConstellationMap& map) {
    return pre_decoder_errors(equalized, coded, map).rate();
}

inline double measure_post_decoder_ber(const SoftSymbolSeq& equalized, const BitSeq& info,
                                       const Trellis& trellis, const ConstellationMap& map) {
    return post_decoder_errors(equalized, info, trellis, map).rate();
}

}  // namespace eqlab::harness
