// Acceptance runner: each criterion prints exactly one PASS/FAIL line on
// stdout with its measured numbers and pinned tolerances; progress chatter
// goes to stderr. Exit code is nonzero if any requested criterion fails.
//
// Tiers: 1, 2, 3, 4ci, 7 are the gating set (default). 4full, 5 and 6 are the
// long Monte-Carlo tiers meant for the nightly schedule.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uep/channels.hpp"
#include "uep/density_evolution.hpp"
#include "uep/graph_decoder.hpp"
#include "uep/ldpc.hpp"
#include "uep/pst.hpp"
#include "uep/rng.hpp"
#include "uep/sim.hpp"

using namespace uep;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool verdict(bool ok, const char* crit, const std::string& detail) {
    std::printf("%s criterion %s: %s\n", ok ? "PASS" : "FAIL", crit, detail.c_str());
    std::fflush(stdout);
    return ok;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void progress(const std::string& line) {
    std::fprintf(stderr, "  %s\n", line.c_str());
    std::fflush(stderr);
}

std::vector<BerRecord> pick_stream(const std::vector<BerRecord>& rs, const char* stream) {
    std::vector<BerRecord> out;
    for (const auto& r : rs)
        if (r.stream == stream) out.push_back(r);
    return out;
}

// ---------------------------------------------------------------------------
// criterion 1: algebraic consistency of the composite code

bool criterion_algebra() {
    const auto t0 = Clock::now();
    Rng rng(0xACCE5501ull);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 * (6 + rng.next_below(59)); // even, 12..128
        const int L = 1 + int(rng.next_below(3));
        ParityCheckMatrix H = construct_gallager_regular(n, 3, 6, rng.next_u64());
        std::vector<std::uint64_t> seeds(static_cast<std::size_t>(L));
        for (auto& s : seeds) s = rng.next_u64();
        UepPstConfig cfg = make_uep_config(std::move(H), L, seeds);

        DenseF2Matrix G = build_generator_uep(cfg);
        ParityCheckMatrix Hu = build_parity_check_uep(cfg);
        DenseF2Matrix Hd(Hu.m(), Hu.n());
        for (std::size_t r = 0; r < Hu.m(); ++r)
            for (int c : Hu.row(r)) Hd.set(r, std::size_t(c), 1);
        if (!G.product_with_transpose_is_zero(Hd))
            return verdict(false, "1",
                           fmt("generator annihilation failed at config %d (n=%zu L=%d)", t,
                               cfg.n(), L));

        const std::size_t k = cfg.k();
        for (int q = 0; q < 100; ++q) {
            std::vector<BitVector> u(std::size_t(L) + 1, BitVector(k));
            BitVector ucat(k * std::size_t(L + 1));
            for (std::size_t b = 0; b <= std::size_t(L); ++b)
                for (std::size_t i = 0; i < k; ++i) {
                    const int bit = rng.next_bit();
                    u[b].set(i, bit);
                    ucat.set(b * k + i, bit);
                }
            if (encode_uep_pst(cfg, u).concatenated() != G.left_multiply(ucat))
                return verdict(false, "1",
                               fmt("encoder disagrees with u*G at config %d draw %d", t, q));
        }
    }
    const double dt = seconds_since(t0);
    return verdict(dt < 60.0, "1",
                   fmt("100 random composite codes: G*H^T = 0 and 10000 encoder/matrix "
                       "cross-checks agree (%.1f s, budget 60 s)",
                       dt));
}

// ---------------------------------------------------------------------------
// criterion 2: density-evolution thresholds

bool criterion_thresholds() {
    DeOptions opts; // 10-bit grid, step 25/512, i_max 50
    const double tol_db = 0.01;
    const double slack = 0.05;
    const double mid_target[3] = {0.80, 0.61, 0.47};
    double mid[3] = {}, lid[3] = {};

    for (int L = 1; L <= 3; ++L) {
        mid[L - 1] = threshold_search(DeStream::Mid, L, opts, tol_db);
        progress(fmt("[criterion 2] mid L=%d threshold %.6f dB (target %.2f)", L, mid[L - 1],
                     mid_target[L - 1]));
        lid[L - 1] = threshold_search(DeStream::Lid, L, opts, tol_db);
        progress(fmt("[criterion 2] lid L=%d threshold %.6f dB (target 1.17)", L, lid[L - 1]));
    }
    const double eep = ldpc_threshold(opts, tol_db);
    progress(fmt("[criterion 2] eep threshold %.6f dB (target 1.11)", eep));

    bool ok = std::fabs(eep - 1.11) <= slack;
    for (int i = 0; i < 3; ++i)
        ok = ok && std::fabs(mid[i] - mid_target[i]) <= slack &&
             std::fabs(lid[i] - 1.17) <= slack;
    return verdict(ok, "2",
                   fmt("thresholds mid {%.3f, %.3f, %.3f} lid {%.3f, %.3f, %.3f} eep %.3f dB "
                       "vs {0.80, 0.61, 0.47} / 1.17 / 1.11 within 0.05",
                       mid[0], mid[1], mid[2], lid[0], lid[1], lid[2], eep));
}

// ---------------------------------------------------------------------------
// criterion 3: exhaustive MAP equivalence on a cycle-free composite graph

bool criterion_map_oracle() {
    // Single-check basic code: bit 2 is unchecked, so the composite graph of
    // (H, L=1) with the swap interleaver below is a tree.
    ParityCheckMatrix H(3, {{0, 1}});
    UepPstConfig cfg = make_uep_config(H, {Permutation({0, 2, 1})});
    DecoderConfig dec;
    dec.i_max = 10;
    dec.j_max = 30;
    dec.early_exit = false; // run to the fixed point

    Rng rng(271828);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        LlrVector llr(6);
        for (auto& v : llr) v = 3.0 * rng.normal();
        DecodeOutcome out = decode_uep_pst(cfg, dec, llr);

        auto post = oracle::map_posteriors(4, 6, [&](std::uint32_t msk) {
            BitVector u0(2), u1(2);
            u0.set(0, int(msk & 1));
            u0.set(1, int((msk >> 1) & 1));
            u1.set(0, int((msk >> 2) & 1));
            u1.set(1, int((msk >> 3) & 1));
            BitVector v0 = cfg.G.encode(u0);
            BitVector v1 = cfg.G.encode(u1);
            BitVector c1 = cfg.perms[0].apply(v0);
            c1 ^= v1;
            BitVector frame(6), labels(6);
            for (std::size_t i = 0; i < 3; ++i) {
                frame.set(i, v0.get(i));
                frame.set(3 + i, c1.get(i));
                labels.set(i, v0.get(i));
                labels.set(3 + i, v1.get(i));
            }
            return std::make_pair(oracle::frame_log_weight(frame, llr), labels);
        });

        for (std::size_t i = 0; i < 3; ++i) {
            worst = std::max(worst, std::fabs(out.llr_full[0][i] - post[i]));
            worst = std::max(worst, std::fabs(out.llr_full[1][i] - post[3 + i]));
        }
    }
    return verdict(worst <= 1e-6, "3",
                   fmt("layered posteriors vs exhaustive MAP on the tree toy: max |gap| "
                       "%.3g (allowed 1e-6) over 200 noisy frames",
                       worst));
}

// ---------------------------------------------------------------------------
// BER sweep plumbing shared by criteria 4, 5 and 6

std::vector<BerRecord> sweep(Scheme scheme, int L, ChannelKind ch, Modulation mod,
                             const std::vector<double>& grid, std::uint64_t min_events,
                             std::uint64_t max_frames, std::uint64_t seed) {
    SimConfig cfg;
    cfg.scheme = scheme;
    cfg.code.n = 1024;
    cfg.code.seed = 1;
    cfg.L = L;
    cfg.channel = ch;
    cfg.modulation = mod;
    cfg.ebn0_db = grid;
    cfg.stop.min_error_events = min_events;
    cfg.stop.max_frames = max_frames;
    cfg.seed = seed;
    cfg.verbose = true; // per-point progress on stderr
    return run_ber_sweep(cfg);
}

struct CrossingSet {
    double eep = 0.0;
    double mid[3] = {};
    double lid[3] = {};
};

// Crossing SNRs of the equal-protection reference and the three superposition
// depths at the given BER, all on the same basic code.
CrossingSet measure_crossings(ChannelKind ch, double eps,
                              const std::vector<double>& eep_grid,
                              const std::vector<double> (&pst_grid)[3],
                              std::uint64_t min_events, std::uint64_t max_frames,
                              bool need_lid = true) {
    CrossingSet out;
    progress(fmt("[ber] eep sweep, %zu points", eep_grid.size()));
    auto eep_rs = sweep(Scheme::Eep, 1, ch, Modulation::Bpsk, eep_grid, min_events,
                        max_frames, 101);
    // Both blocks of the equal-protection frame have identical statistics;
    // the ALL stream simply doubles the sample count.
    out.eep = snr_at_ber(pick_stream(eep_rs, "ALL"), eps);
    for (int L = 1; L <= 3; ++L) {
        progress(fmt("[ber] pst L=%d sweep, %zu points", L, pst_grid[L - 1].size()));
        auto rs = sweep(Scheme::Pst, L, ch, Modulation::Bpsk, pst_grid[L - 1], min_events,
                        max_frames, 100 + std::uint64_t(L) * 7);
        out.mid[L - 1] = snr_at_ber(pick_stream(rs, "MID"), eps);
        // The interpolation throws if a stream's curve never reaches eps
        // inside the grid, so only resolve the crossings the caller asserts.
        if (need_lid) out.lid[L - 1] = snr_at_ber(pick_stream(rs, "LID"), eps);
    }
    return out;
}

// ---------------------------------------------------------------------------
// criterion 4, fast variant: ordering of the 1e-3 crossings

bool criterion_ber_ci() {
    const auto t0 = Clock::now();
    try {
        const double eps = 1e-3;
        const std::vector<double> eep_grid = {1.8, 2.0, 2.2, 2.4, 2.6};
        const std::vector<double> pst_grid[3] = {
            {1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8},
            {1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8},
            {1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8},
        };
        CrossingSet cs =
            measure_crossings(ChannelKind::Awgn, eps, eep_grid, pst_grid, 120, 2500);

        bool ok = cs.mid[2] < cs.mid[1] && cs.mid[1] < cs.mid[0] && cs.mid[0] < cs.eep;
        double lid_gap = 0.0;
        for (double l : cs.lid) lid_gap = std::max(lid_gap, std::fabs(l - cs.eep));
        ok = ok && lid_gap <= 0.3;
        return verdict(
            ok, "4 (ci)",
            fmt("1e-3 crossings: mid {%.2f, %.2f, %.2f} < eep %.2f dB in depth order, "
                "max |lid - eep| %.2f dB (allowed 0.30) (%.0f s)",
                cs.mid[0], cs.mid[1], cs.mid[2], cs.eep, lid_gap, seconds_since(t0)));
    } catch (const std::exception& e) {
        return verdict(false, "4 (ci)", fmt("sweep failed: %s", e.what()));
    }
}

// ---------------------------------------------------------------------------
// criterion 4, full variant: coding gains at 1e-5 on BPSK-AWGN

bool criterion_ber_full() {
    const auto t0 = Clock::now();
    try {
        const double eps = 1e-5;
        const std::vector<double> eep_grid = {2.2, 2.5, 2.8, 3.1, 3.4};
        const std::vector<double> pst_grid[3] = {
            {1.5, 1.8, 2.1, 2.4, 2.7, 3.0, 3.3},
            {1.2, 1.5, 1.8, 2.1, 2.4, 2.7, 3.0, 3.3},
            {1.1, 1.4, 1.7, 2.0, 2.3, 2.6, 2.9, 3.2},
        };
        CrossingSet cs =
            measure_crossings(ChannelKind::Awgn, eps, eep_grid, pst_grid, 100, 25000);

        const double target[3] = {0.7, 1.0, 1.1};
        bool ok = true;
        double gain[3], lid_gap = 0.0;
        for (int i = 0; i < 3; ++i) {
            gain[i] = cs.eep - cs.mid[i];
            ok = ok && std::fabs(gain[i] - target[i]) <= 0.3;
            lid_gap = std::max(lid_gap, std::fabs(cs.lid[i] - cs.eep));
        }
        ok = ok && lid_gap <= 0.15;
        return verdict(ok, "4 (full)",
                       fmt("1e-5 mid gains over eep {%.2f, %.2f, %.2f} dB vs {0.7, 1.0, 1.1} "
                           "within 0.3; max |lid - eep| %.2f dB (allowed 0.15) (%.0f s)",
                           gain[0], gain[1], gain[2], lid_gap, seconds_since(t0)));
    } catch (const std::exception& e) {
        return verdict(false, "4 (full)", fmt("sweep failed: %s", e.what()));
    }
}

// ---------------------------------------------------------------------------
// criterion 5: coding gains at 1e-5 on Rayleigh with receiver CSI

bool criterion_rayleigh() {
    const auto t0 = Clock::now();
    try {
        const double eps = 1e-5;
        // The reference curve crosses 1e-5 near 5.0 dB, so the grid runs to
        // 5.4 to keep the right bracket inside it. Only MID gains are
        // asserted here, hence need_lid = false.
        const std::vector<double> eep_grid = {3.4, 3.8, 4.2, 4.6, 5.0, 5.4};
        const std::vector<double> pst_grid[3] = {
            {2.2, 2.6, 3.0, 3.4, 3.8, 4.2, 4.6, 5.0},
            {1.9, 2.3, 2.7, 3.1, 3.5, 3.9, 4.3, 4.7},
            {1.8, 2.2, 2.6, 3.0, 3.4, 3.8, 4.2, 4.6},
        };
        CrossingSet cs = measure_crossings(ChannelKind::Rayleigh, eps, eep_grid,
                                           pst_grid, 100, 25000, false);

        const double target[3] = {1.0, 1.3, 1.4};
        bool ok = true;
        double gain[3];
        for (int i = 0; i < 3; ++i) {
            gain[i] = cs.eep - cs.mid[i];
            ok = ok && std::fabs(gain[i] - target[i]) <= 0.3;
        }
        return verdict(ok, "5",
                       fmt("rayleigh 1e-5 mid gains over eep {%.2f, %.2f, %.2f} dB vs "
                           "{1.0, 1.3, 1.4} within 0.3 (%.0f s)",
                           gain[0], gain[1], gain[2], seconds_since(t0)));
    } catch (const std::exception& e) {
        return verdict(false, "5", fmt("sweep failed: %s", e.what()));
    }
}

// ---------------------------------------------------------------------------
// criterion 6: minimum operating SNR with 16-QAM, three schemes, two channels

bool criterion_min_snr() {
    const auto t0 = Clock::now();
    try {
        UepRequirement req; // 1e-5 on MID, 5e-2 on the rest
        struct Case {
            Scheme scheme;
            std::vector<double> grid;
        };
        struct Side {
            ChannelKind ch;
            const char* name;
            Case cases[3]; // eep, mapping, pst
            double target[3];
        };
        Side sides[2] = {
            // Grids straddle both the published operating points and the
            // points this implementation measures (calibration sweeps put
            // the AWGN curves roughly half a dB left of the published
            // column), so a shifted result is still resolved inside the
            // grid and reported against the target instead of throwing.
            {ChannelKind::Awgn,
             "awgn",
             {{Scheme::Eep, {4.2, 4.6, 5.0, 5.4, 5.8}},
              {Scheme::Mapping, {3.9, 4.3, 4.7, 5.1, 5.5}},
              {Scheme::Pst, {3.0, 3.4, 3.8, 4.2, 4.6}}},
             {5.4, 4.9, 3.9}},
            {ChannelKind::Rayleigh,
             "rayleigh",
             {{Scheme::Eep, {7.1, 7.5, 7.9, 8.3, 8.7}},
              {Scheme::Mapping, {6.2, 6.6, 7.0, 7.4, 7.8}},
              {Scheme::Pst, {5.6, 6.0, 6.4, 6.8, 7.2}}},
             {7.9, 7.0, 6.4}},
        };

        bool ok = true;
        std::string detail;
        for (const auto& side : sides) {
            double snr[3];
            for (int s = 0; s < 3; ++s) {
                progress(fmt("[criterion 6] %s scheme %d sweep", side.name, s));
                auto rs = sweep(side.cases[s].scheme, 3, side.ch, Modulation::Qam16,
                                side.cases[s].grid, 100, 25000, 601 + std::uint64_t(s));
                MinSnrResult m =
                    min_snr_uep(pick_stream(rs, "MID"), pick_stream(rs, "LID"), req);
                snr[s] = m.snr_uep_db;
                ok = ok && std::fabs(snr[s] - side.target[s]) <= 0.3;
            }
            ok = ok && snr[2] < snr[1] && snr[1] < snr[0]; // pst < mapping < eep
            detail += fmt("%s {eep %.2f, mapping %.2f, pst %.2f} vs {%.1f, %.1f, %.1f}; ",
                          side.name, snr[0], snr[1], snr[2], side.target[0], side.target[1],
                          side.target[2]);
        }
        return verdict(ok, "6",
                       detail + fmt("all within 0.3 dB and pst < mapping < eep (%.0f s)",
                                    seconds_since(t0)));
    } catch (const std::exception& e) {
        return verdict(false, "6", fmt("sweep failed: %s", e.what()));
    }
}

// ---------------------------------------------------------------------------
// criterion 7: standalone property suite

bool criterion_properties() {
    std::vector<std::string> fails;

    { // pmf mass conservation through both transforms
        QuantizerSpec spec;
        Rng rng(55);
        QuantizedPmf a(spec), b(spec);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.uniform01();
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = rng.uniform01();
        a.normalize();
        b.normalize();
        if (std::fabs(transform_S(a, b).total() - 1.0) > 1e-12 ||
            std::fabs(transform_T(a, b).total() - 1.0) > 1e-12)
            fails.push_back("mass conservation");
    }
    { // S identity and T annihilator at the zero point mass
        QuantizerSpec spec;
        Rng rng(56);
        QuantizedPmf p(spec);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = rng.uniform01();
        p.normalize();
        QuantizedPmf zero = point_mass(spec, 0.0);
        QuantizedPmf s = transform_S(p, zero);
        bool ok = true;
        for (std::size_t i = 0; i < p.size(); ++i) ok = ok && std::fabs(s[i] - p[i]) <= 1e-15;
        QuantizedPmf t = transform_T(p, zero);
        ok = ok && std::fabs(t[std::size_t(spec.half_levels())] - 1.0) <= 1e-12;
        if (!ok) fails.push_back("transform identities");
    }
    { // extrinsic contract: a node's output toward an edge ignores that edge
        Rng rng(57);
        LlrVector llr(18);
        for (auto& v : llr) v = rng.normal();
        EdgeMessages a = init_messages(llr, 6, 2);
        EdgeMessages b = a;
        for (auto& v : b.pi_to_eq[0]) v += 0.25; // perturb only layer 1 feedback
        update_equality_node(a);
        update_equality_node(b);
        bool same_excl = a.eq_to_pi[0] == b.eq_to_pi[0];
        bool others_move = a.eq_to_c != b.eq_to_c && a.eq_to_pi[1] != b.eq_to_pi[1];

        EdgeMessages c = a;
        for (auto& v : c.pi_to_plus[0]) v += 0.25;
        update_superposition_node(1, a);
        update_superposition_node(1, c);
        bool plus_excl = a.plus_to_pi[0] == c.plus_to_pi[0] && a.plus_to_c[0] != c.plus_to_c[0];
        if (!(same_excl && others_move && plus_excl)) fails.push_back("extrinsic contract");
    }
    { // channel LLRs satisfy the tanh moment identity
        ChannelParams p = ChannelParams::make(1.0, 0.5, 1, 0);
        Rng rng(58);
        BitVector zeros(50000);
        ChannelOutput out = bpsk_awgn(zeros, p, rng);
        double m1 = 0.0, m2 = 0.0;
        for (double l : out.llr) {
            const double t = std::tanh(l / 2.0);
            m1 += t;
            m2 += t * t;
        }
        m1 /= double(out.llr.size());
        m2 /= double(out.llr.size());
        if (std::fabs(m1 - m2) > 0.01) fails.push_back("llr consistency");
    }
    { // nearest-neighbor protection profile of the QAM table
        QamMapping map = dvb_gray_16qam();
        if (!(map.nn_profile[0] == 0.5 && map.nn_profile[1] == 0.5 &&
              map.nn_profile[2] == 1.0 && map.nn_profile[3] == 1.0))
            fails.push_back("nn profile");
    }
    { // bit-identical reproducibility of a small sweep
        SimConfig cfg;
        cfg.code.n = 128;
        cfg.code.seed = 5;
        cfg.ebn0_db = {2.0};
        cfg.stop.min_error_events = 1000000;
        cfg.stop.max_frames = 32;
        cfg.batch_frames = 16;
        cfg.seed = 9;
        if (emit_csv(run_ber_sweep(cfg)) != emit_csv(run_ber_sweep(cfg)))
            fails.push_back("seed reproducibility");
    }

    if (fails.empty())
        return verdict(true, "7",
                       "property groups all hold: mass conservation, transform identities, "
                       "extrinsic contract, llr consistency, nn profile, seed reproducibility");
    std::string detail = "failing groups:";
    for (const auto& f : fails) detail += " " + f;
    return verdict(false, "7", detail);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<std::string> tiers;
    app.add_option("--tier", tiers,
                   "criteria to run: 1 2 3 4ci 7 (gating, default) and 4full 5 6 (nightly); "
                   "also the shorthands gating, nightly, all");
    CLI11_PARSE(app, argc, argv);

    if (tiers.empty()) tiers = {"gating"};
    std::set<std::string> want;
    for (const auto& t : tiers) {
        if (t == "gating") {
            want.insert({"1", "2", "3", "4ci", "7"});
        } else if (t == "nightly") {
            want.insert({"4full", "5", "6"});
        } else if (t == "all") {
            want.insert({"1", "2", "3", "4ci", "7", "4full", "5", "6"});
        } else if (t == "1" || t == "2" || t == "3" || t == "4ci" || t == "4full" ||
                   t == "5" || t == "6" || t == "7") {
            want.insert(t);
        } else {
            std::fprintf(stderr, "unknown tier: %s\n", t.c_str());
            return 2;
        }
    }

    int failures = 0;
    if (want.count("1") && !criterion_algebra()) ++failures;
    if (want.count("2") && !criterion_thresholds()) ++failures;
    if (want.count("3") && !criterion_map_oracle()) ++failures;
    if (want.count("4ci") && !criterion_ber_ci()) ++failures;
    if (want.count("4full") && !criterion_ber_full()) ++failures;
    if (want.count("5") && !criterion_rayleigh()) ++failures;
    if (want.count("6") && !criterion_min_snr()) ++failures;
    if (want.count("7") && !criterion_properties()) ++failures;
    return failures == 0 ? 0 : 1;
}
