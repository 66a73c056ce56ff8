#include "uep/channels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace uep {

ChannelParams ChannelParams::make(double ebn0_db, double code_rate, int bits_per_symbol,
                                  std::uint64_t seed) {
    if (code_rate <= 0.0 || code_rate > 1.0)
        throw std::invalid_argument("ChannelParams: code_rate must be in (0,1]");
    if (bits_per_symbol < 1) throw std::invalid_argument("ChannelParams: bits_per_symbol >= 1");
    ChannelParams p;
    p.ebn0_db = ebn0_db;
    p.code_rate = code_rate;
    p.bits_per_symbol = bits_per_symbol;
    p.sigma2 = 1.0 / (2.0 * code_rate * bits_per_symbol * std::pow(10.0, ebn0_db / 10.0));
    p.seed = seed;
    return p;
}

ChannelOutput bpsk_fading(const BitVector& c, const ChannelParams& p,
                          const std::vector<double>& h, Rng& rng) {
    if (h.size() != c.size()) throw std::invalid_argument("bpsk_fading: h length mismatch");
    const double sigma = std::sqrt(p.sigma2);
    ChannelOutput out;
    out.y.resize(c.size());
    out.h = h;
    out.llr.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double x = c.get(i) ? -1.0 : 1.0;
        const double y = h[i] * x + sigma * rng.normal();
        out.y[i] = {y, 0.0};
        out.llr[i] = 2.0 * h[i] * y / p.sigma2;
    }
    return out;
}

ChannelOutput bpsk_awgn(const BitVector& c, const ChannelParams& p, Rng& rng) {
    return bpsk_fading(c, p, std::vector<double>(c.size(), 1.0), rng);
}

ChannelOutput bpsk_rayleigh_csi(const BitVector& c, const ChannelParams& p, Rng& rng) {
    std::vector<double> h(c.size());
    for (auto& v : h) v = rng.rayleigh();
    return bpsk_fading(c, p, h, rng);
}

QamMapping dvb_gray_16qam() {
    QamMapping m;
    const double s = 1.0 / std::sqrt(10.0);
    for (int label = 0; label < 16; ++label) {
        const int b0 = (label >> 3) & 1; // I sign
        const int b1 = (label >> 2) & 1; // Q sign
        const int b2 = (label >> 1) & 1; // I amplitude
        const int b3 = label & 1;        // Q amplitude
        const double i = (b0 ? -1.0 : 1.0) * (b2 ? 1.0 : 3.0) * s;
        const double q = (b1 ? -1.0 : 1.0) * (b3 ? 1.0 : 3.0) * s;
        m.table[std::size_t(label)] = {i, q};
    }
    // Nearest-neighbor profile by brute force over the constellation.
    double dmin = 1e300;
    for (int a = 0; a < 16; ++a)
        for (int b = a + 1; b < 16; ++b)
            dmin = std::min(dmin, std::abs(m.table[a] - m.table[b]));
    for (int bit = 0; bit < 4; ++bit) {
        int count = 0;
        for (int a = 0; a < 16; ++a)
            for (int b = 0; b < 16; ++b) {
                if (a == b) continue;
                if (std::abs(m.table[a] - m.table[b]) > dmin * 1.000001) continue;
                if (((a ^ b) >> (3 - bit)) & 1) ++count;
            }
        m.nn_profile[std::size_t(bit)] = double(count) / 16.0;
    }
    return m;
}

namespace {

int frame_bit_index(Qam16Mode mode, std::size_t n_bits, std::size_t sym, int pos) {
    if (mode == Qam16Mode::Sequential) return int(4 * sym) + pos;
    // UepMapping: frame = [c0 | c1 c2 c3], each of length n = n_bits/4.
    const std::size_t n = n_bits / 4;
    if (pos == 0) return int(sym);
    return int(n + 3 * sym + std::size_t(pos - 1));
}

} // namespace

std::vector<std::complex<double>> qam16_modulate(const BitVector& bits,
                                                 const QamMapping& map, Qam16Mode mode) {
    if (bits.size() == 0 || bits.size() % 4 != 0)
        throw std::invalid_argument("qam16_modulate: bit count must be a positive multiple of 4");
    const std::size_t n_sym = bits.size() / 4;
    std::vector<std::complex<double>> sym(n_sym);
    for (std::size_t s = 0; s < n_sym; ++s) {
        int label = 0;
        for (int pos = 0; pos < 4; ++pos) {
            const int b = bits.get(std::size_t(frame_bit_index(mode, bits.size(), s, pos)));
            label = (label << 1) | b;
        }
        sym[s] = map.table[std::size_t(label)];
    }
    return sym;
}

std::array<double, 4> qam16_bit_llr(std::complex<double> y, double h, double sigma2,
                                    const QamMapping& map) {
    // log p(y|s) up to a constant: -|y - h*s|^2 / (2*sigma2).
    std::array<double, 16> metric;
    for (int label = 0; label < 16; ++label) {
        const std::complex<double> d = y - h * map.table[std::size_t(label)];
        metric[std::size_t(label)] = -std::norm(d) / (2.0 * sigma2);
    }
    std::array<double, 4> llr;
    for (int bit = 0; bit < 4; ++bit) {
        double max0 = -1e300, max1 = -1e300;
        for (int label = 0; label < 16; ++label) {
            if (((label >> (3 - bit)) & 1) == 0)
                max0 = std::max(max0, metric[std::size_t(label)]);
            else
                max1 = std::max(max1, metric[std::size_t(label)]);
        }
        double s0 = 0.0, s1 = 0.0;
        for (int label = 0; label < 16; ++label) {
            if (((label >> (3 - bit)) & 1) == 0)
                s0 += std::exp(metric[std::size_t(label)] - max0);
            else
                s1 += std::exp(metric[std::size_t(label)] - max1);
        }
        llr[std::size_t(bit)] = (max0 + std::log(s0)) - (max1 + std::log(s1));
    }
    return llr;
}

ChannelOutput qam16_transmit(const BitVector& bits, const QamMapping& map, Qam16Mode mode,
                             const ChannelParams& p, bool rayleigh, Rng& rng) {
    const auto sym = qam16_modulate(bits, map, mode);
    const double sigma = std::sqrt(p.sigma2);
    ChannelOutput out;
    out.y.resize(sym.size());
    out.h.resize(sym.size());
    out.llr.resize(bits.size());
    for (std::size_t s = 0; s < sym.size(); ++s) {
        const double h = rayleigh ? rng.rayleigh() : 1.0;
        const std::complex<double> noise{sigma * rng.normal(), sigma * rng.normal()};
        const std::complex<double> y = h * sym[s] + noise;
        out.y[s] = y;
        out.h[s] = h;
        const auto l4 = qam16_bit_llr(y, h, p.sigma2, map);
        for (int pos = 0; pos < 4; ++pos)
            out.llr[std::size_t(frame_bit_index(mode, bits.size(), s, pos))] =
                l4[std::size_t(pos)];
    }
    return out;
}

std::string qam16_mapping_csv(const QamMapping& map) {
    std::string out = "label,b0,b1,b2,b3,i,q\n";
    char line[128];
    for (int label = 0; label < 16; ++label) {
        const auto pt = map.table[std::size_t(label)];
        std::snprintf(line, sizeof line, "%d,%d,%d,%d,%d,%.17g,%.17g\n", label,
                      (label >> 3) & 1, (label >> 2) & 1, (label >> 1) & 1, label & 1,
                      pt.real(), pt.imag());
        out += line;
    }
    return out;
}

} // namespace uep
