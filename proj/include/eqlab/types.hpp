// Basic sequence types shared by every stage of the pipeline.
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace eqlab {

using Bit = std::uint8_t;                   // each element is 0 or 1
using BitSeq = std::vector<Bit>;            // info bits, coded bits, decoded bits
using Complex = std::complex<double>;
using IqSeq = std::vector<Complex>;         // baseband symbols, unit-energy convention

// Equalizer output: one complex coordinate per channel symbol, still "soft"
// (not yet sliced to the constellation).
using SoftSymbolSeq = IqSeq;

}  // namespace eqlab
