#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "uep/bitvec.hpp"
#include "uep/llr.hpp"
#include "uep/rng.hpp"

namespace uep {

// Unit average symbol energy throughout; noise variance per real dimension:
//   sigma2 = 1 / (2 * code_rate * bits_per_symbol * 10^(ebn0_db/10)).
struct ChannelParams {
    double ebn0_db = 0.0;
    double code_rate = 0.5;
    int bits_per_symbol = 1;
    double sigma2 = 1.0;
    std::uint64_t seed = 0;

    static ChannelParams make(double ebn0_db, double code_rate, int bits_per_symbol,
                              std::uint64_t seed);
};

struct ChannelOutput {
    std::vector<std::complex<double>> y; // received samples (imag 0 for BPSK)
    std::vector<double> h;               // fading amplitude per sample (1 for AWGN)
    LlrVector llr;                       // per transmitted bit, frame order
};

// BPSK x = 1-2c, y = x + noise, llr = 2y/sigma2.
ChannelOutput bpsk_awgn(const BitVector& c, const ChannelParams& p, Rng& rng);

// Same with a caller-provided per-bit amplitude (h = 1 reproduces AWGN).
ChannelOutput bpsk_fading(const BitVector& c, const ChannelParams& p,
                          const std::vector<double>& h, Rng& rng);

// Per-bit Rayleigh amplitude with E[h^2] = 1, known at the receiver:
// llr = 2*h*y/sigma2.
ChannelOutput bpsk_rayleigh_csi(const BitVector& c, const ChannelParams& p, Rng& rng);

// 16-QAM with Gray labeling (b0,b1,b2,b3): b0/b1 pick the I/Q sign, b2/b3 the
// I/Q amplitude (0 -> 3, 1 -> 1, scaled by 1/sqrt(10)). Bit positions 0 and 1
// average 0.5 nearest neighbors, positions 2 and 3 average 1.0, so the first
// two positions are better protected.
struct QamMapping {
    std::array<std::complex<double>, 16> table; // 4-bit label -> point
    std::array<double, 4> nn_profile;           // avg nearest neighbors per bit
};

QamMapping dvb_gray_16qam();

enum class Qam16Mode {
    Sequential, // symbol i carries bits 4i..4i+3 of the frame
    UepMapping  // L=3: symbol i carries bit i of block 0 in position 0 and
                // bits 3i..3i+2 of the concatenated layer blocks in 1..3
};

std::vector<std::complex<double>> qam16_modulate(const BitVector& bits,
                                                 const QamMapping& map, Qam16Mode mode);

// Exact log-sum-exp bit LLRs for one received sample with amplitude h.
std::array<double, 4> qam16_bit_llr(std::complex<double> y, double h, double sigma2,
                                    const QamMapping& map);

// Modulate, pass through complex AWGN (optionally per-symbol Rayleigh with
// receiver CSI), demap, and scatter the bit LLRs back into frame order.
ChannelOutput qam16_transmit(const BitVector& bits, const QamMapping& map, Qam16Mode mode,
                             const ChannelParams& p, bool rayleigh, Rng& rng);

// (label, I, Q) table export for interoperability checks.
std::string qam16_mapping_csv(const QamMapping& map);

} // namespace uep
