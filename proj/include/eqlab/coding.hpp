// Rate-1/n binary convolutional coding: parametric encoder, trellis
// expansion, and Viterbi decoding with Hamming (hard) or squared-Euclidean
// (soft) branch metrics.
//
// Conventions, fixed once and used by every golden vector in the tests:
//  * Generator masks are octal; the most significant of the m+1 mask bits
//    multiplies the current input u[n], the LSB multiplies u[n-m]. For the
//    default (2,1,2) code with generators [3,7]: 7 -> u[n]^u[n-1]^u[n-2],
//    3 -> u[n-1]^u[n-2].
//  * Encoding is terminated: m zero tail bits are appended to the info
//    sequence, so the path starts and ends in state 0 and the decoder is
//    exactly maximum-likelihood over the block. Tail bits are stripped from
//    decoder output and excluded from information-BER accounting.
//  * Trellis state packs (u[n-1], ..., u[n-m]) with u[n-1] as MSB.
//  * Viterbi ties break toward the lowest-numbered predecessor state, making
//    decoding deterministic.
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqlab/modem.hpp"
#include "eqlab/types.hpp"

namespace eqlab {

struct ConvCodeSpec {
    std::size_t n_outputs = 2;
    std::size_t k_inputs = 1;
    std::size_t m_memory = 2;
    std::vector<unsigned> generators{03, 07};  // octal tap masks, one per output

    void validate() const {
        if (k_inputs != 1)
            throw std::invalid_argument("ConvCodeSpec: only k_inputs = 1 is supported");
        if (n_outputs < 1 || generators.size() != n_outputs)
            throw std::invalid_argument("ConvCodeSpec: need one generator per output");
        if (m_memory == 0 || m_memory > 20)
            throw std::invalid_argument("ConvCodeSpec: m_memory out of range");
        const unsigned limit = 1u << (m_memory + 1);
        bool current_tap = false;
        bool any_nonzero = false;
        for (unsigned g : generators) {
            if (g >= limit)
                throw std::invalid_argument(
                    "ConvCodeSpec: generator mask 0" + to_octal(g) + " does not fit in " +
                    std::to_string(m_memory + 1) + " bits");
            if (g >> m_memory & 1u) current_tap = true;
            if (g != 0) any_nonzero = true;
        }
        if (!any_nonzero || !current_tap)
            throw std::invalid_argument(
                "ConvCodeSpec: degenerate code, no generator taps the current input");
    }

    static std::string to_octal(unsigned g) {
        std::string s;
        do {
            s.insert(s.begin(), static_cast<char>('0' + (g & 7u)));
            g >>= 3;
        } while (g != 0);
        return s;
    }
};

struct Trellis {
    struct Branch {
        std::uint32_t next_state = 0;
        std::uint32_t out_bits = 0;  // bit j = output of generators[j]
    };

    std::size_t num_states = 0;
    std::size_t n_outputs = 0;
    std::size_t m_memory = 0;
    std::vector<std::array<Branch, 2>> branches;  // indexed [state][input]
};

// Pure function of the spec: two builds from the same spec are identical.
inline Trellis build_trellis(const ConvCodeSpec& spec) {
    spec.validate();
    Trellis tr;
    tr.num_states = std::size_t{1} << spec.m_memory;
    tr.n_outputs = spec.n_outputs;
    tr.m_memory = spec.m_memory;
    tr.branches.resize(tr.num_states);
    const unsigned m = static_cast<unsigned>(spec.m_memory);
    for (std::uint32_t state = 0; state < tr.num_states; ++state) {
        for (std::uint32_t input = 0; input < 2; ++input) {
            // Register layout: current input at bit m, then u[n-1]..u[n-m].
            const std::uint32_t reg = (input << m) | state;
            Trellis::Branch br;
            br.next_state = (state >> 1) | (input << (m - 1));
            for (std::size_t j = 0; j < spec.n_outputs; ++j) {
                const unsigned bit = std::popcount(reg & spec.generators[j]) & 1u;
                br.out_bits |= bit << j;
            }
            tr.branches[state][input] = br;
        }
    }
    return tr;
}

// Terminated encoding: m zero tail bits are appended, so the output has
// n_outputs * (info.size() + m_memory) bits, emitted in generator-list order
// within each step.
inline BitSeq conv_encode(const BitSeq& info, const ConvCodeSpec& spec) {
    spec.validate();
    if (info.empty())
        throw std::invalid_argument("conv_encode: info sequence must not be empty");
    const unsigned m = static_cast<unsigned>(spec.m_memory);
    BitSeq out;
    out.reserve(spec.n_outputs * (info.size() + spec.m_memory));
    std::uint32_t state = 0;
    const std::size_t steps = info.size() + spec.m_memory;
    for (std::size_t i = 0; i < steps; ++i) {
        const std::uint32_t input = i < info.size() ? (info[i] & 1u) : 0u;
        const std::uint32_t reg = (input << m) | state;
        for (std::size_t j = 0; j < spec.n_outputs; ++j)
            out.push_back(static_cast<Bit>(std::popcount(reg & spec.generators[j]) & 1u));
        state = (state >> 1) | (input << (m - 1));
    }
    return out;
}

namespace detail {

// Shared Viterbi trellis search. branch_metric(step, out_bits) returns the
// metric contribution of one branch at one step. Returns the input sequence
// of the minimum-metric path that starts and ends in state 0, which is the
// info sequence with the m tail bits stripped.
template <typename Metric, typename BranchMetric>
BitSeq viterbi_search(const Trellis& tr, std::size_t steps, BranchMetric&& branch_metric) {
    if (steps <= tr.m_memory)
        throw std::invalid_argument("viterbi: sequence too short for a terminated block");
    constexpr Metric kInf = std::numeric_limits<Metric>::max() / 4;
    const std::size_t S = tr.num_states;
    std::vector<Metric> metric(S, kInf), next_metric(S, kInf);
    metric[0] = Metric{};
    // survivor[t * S + s] = (prev_state << 1) | input for the best path into s.
    std::vector<std::uint32_t> survivor(steps * S);

    for (std::size_t t = 0; t < steps; ++t) {
        std::fill(next_metric.begin(), next_metric.end(), kInf);
        for (std::uint32_t s = 0; s < S; ++s) {
            if (metric[s] >= kInf) continue;
            for (std::uint32_t input = 0; input < 2; ++input) {
                const auto& br = tr.branches[s][input];
                const Metric cand = metric[s] + branch_metric(t, br.out_bits);
                // Strict < keeps the lowest-numbered predecessor on ties
                // (states are scanned in increasing order).
                if (cand < next_metric[br.next_state]) {
                    next_metric[br.next_state] = cand;
                    survivor[t * S + br.next_state] = (s << 1) | input;
                }
            }
        }
        metric.swap(next_metric);
    }
    if (metric[0] >= kInf)
        throw std::invalid_argument("viterbi: no terminated path found");

    BitSeq inputs(steps);
    std::uint32_t state = 0;
    for (std::size_t t = steps; t-- > 0;) {
        const std::uint32_t sv = survivor[t * S + state];
        inputs[t] = static_cast<Bit>(sv & 1u);
        state = sv >> 1;
    }
    inputs.resize(steps - tr.m_memory);  // strip tail
    return inputs;
}

}  // namespace detail

// Hard-decision decoding with Hamming branch metrics.
inline BitSeq viterbi_decode_hard(const BitSeq& bits, const Trellis& tr) {
    if (tr.n_outputs == 0 || bits.size() % tr.n_outputs != 0)
        throw std::invalid_argument("viterbi_decode_hard: bit count " + std::to_string(bits.size()) +
                                    " is not a multiple of n_outputs");
    const std::size_t steps = bits.size() / tr.n_outputs;
    return detail::viterbi_search<std::uint64_t>(
        tr, steps, [&](std::size_t t, std::uint32_t out_bits) -> std::uint64_t {
            std::uint64_t d = 0;
            for (std::size_t j = 0; j < tr.n_outputs; ++j)
                d += (bits[t * tr.n_outputs + j] ^ (out_bits >> j)) & 1u;
            return d;
        });
}

// Soft-decision decoding straight from equalized constellation coordinates.
// Branch metric: sum of squared Euclidean distances between the received
// coordinates and the branch's hypothesized modulated code bits. Requires
// the modulation to pack a whole number of symbols per trellis step
// (n_outputs divisible by bits_per_symbol), which holds for the rate-1/2
// code on QPSK where each step is exactly one symbol.
inline BitSeq viterbi_decode_soft(const SoftSymbolSeq& soft, const Trellis& tr,
                                  const ConstellationMap& map) {
    const std::size_t bps = ConstellationMap::bits_per_symbol();
    if (tr.n_outputs % bps != 0)
        throw std::invalid_argument(
            "viterbi_decode_soft: n_outputs must be a multiple of bits per symbol");
    const std::size_t symbols_per_step = tr.n_outputs / bps;
    if (symbols_per_step == 0 || soft.size() % symbols_per_step != 0)
        throw std::invalid_argument("viterbi_decode_soft: symbol count " +
                                    std::to_string(soft.size()) +
                                    " does not cover a whole number of trellis steps");
    const std::size_t steps = soft.size() / symbols_per_step;

    // Hypothesized constellation point for every (branch output, position).
    const std::size_t npatterns = std::size_t{1} << tr.n_outputs;
    std::vector<Complex> branch_points(npatterns * symbols_per_step);
    for (std::size_t p = 0; p < npatterns; ++p)
        for (std::size_t k = 0; k < symbols_per_step; ++k) {
            const Bit b0 = static_cast<Bit>(p >> (bps * k) & 1u);
            const Bit b1 = static_cast<Bit>(p >> (bps * k + 1) & 1u);
            branch_points[p * symbols_per_step + k] = map.point(b0, b1);
        }

    return detail::viterbi_search<double>(
        tr, steps, [&](std::size_t t, std::uint32_t out_bits) -> double {
            double d = 0.0;
            const Complex* pts = &branch_points[out_bits * symbols_per_step];
            for (std::size_t k = 0; k < symbols_per_step; ++k)
                d += std::norm(soft[t * symbols_per_step + k] - pts[k]);
            return d;
        });
}

}  // namespace eqlab
