// QPSK mapping between bit pairs and unit-energy constellation points.
//
// Bit-to-quadrant convention (fixed here, since any matched pair of mapper
// and demapper gives the same BER): the first bit of a pair selects the
// in-phase sign, the second the quadrature sign, 0 -> positive. All four
// points are (+-1 +- j)/sqrt(2), so symbol energy is exactly 1 and the map
// is Gray: constellation neighbours differ in one bit.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "eqlab/types.hpp"

namespace eqlab {

class ConstellationMap {
  public:
    static ConstellationMap qpsk_gray() { return ConstellationMap(); }

    static constexpr std::size_t bits_per_symbol() { return 2; }

    // Point for the pair (b0, b1); bits outside {0,1} are taken mod 2.
    Complex point(Bit b0, Bit b1) const { return points_[index(b0, b1)]; }

    const std::array<Complex, 4>& points() const { return points_; }

    // Nearest-point hard decision. Candidates are scanned in pair order
    // (0,0),(0,1),(1,0),(1,1) with strict-less comparison, which resolves
    // distance ties (a zero coordinate) toward bit 0, i.e. the positive
    // half-plane.
    std::array<Bit, 2> nearest_bits(Complex r) const {
        std::size_t best = 0;
        double best_d2 = std::norm(r - points_[0]);
        for (std::size_t i = 1; i < 4; ++i) {
            const double d2 = std::norm(r - points_[i]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = i;
            }
        }
        return {static_cast<Bit>(best >> 1), static_cast<Bit>(best & 1)};
    }

  private:
    ConstellationMap() {
        const double a = 1.0 / std::sqrt(2.0);
        for (Bit b0 = 0; b0 < 2; ++b0)
            for (Bit b1 = 0; b1 < 2; ++b1)
                points_[index(b0, b1)] = Complex(b0 ? -a : a, b1 ? -a : a);
    }

    static std::size_t index(Bit b0, Bit b1) {
        return static_cast<std::size_t>((b0 & 1) << 1 | (b1 & 1));
    }

    std::array<Complex, 4> points_{};
};

inline IqSeq qpsk_modulate(const BitSeq& bits, const ConstellationMap& map) {
    if (bits.size() % 2 != 0)
        throw std::invalid_argument("qpsk_modulate: bit count must be even, got " +
                                    std::to_string(bits.size()));
    IqSeq out(bits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = map.point(bits[2 * i], bits[2 * i + 1]);
    return out;
}

inline BitSeq qpsk_hard_demodulate(const IqSeq& symbols, const ConstellationMap& map) {
    BitSeq out;
    out.reserve(symbols.size() * 2);
    for (const Complex& s : symbols) {
        const auto b = map.nearest_bits(s);
        out.push_back(b[0]);
        out.push_back(b[1]);
    }
    return out;
}

}  // namespace eqlab
