#include "uep/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace uep {

namespace {

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Pst: return "pst";
        case Scheme::Eep: return "eep";
        case Scheme::Mapping: return "mapping";
    }
    return "?";
}

std::string channel_name(ChannelKind c) {
    return c == ChannelKind::Awgn ? "awgn" : "rayleigh";
}

std::string modulation_name(Modulation m) {
    return m == Modulation::Bpsk ? "bpsk" : "qam16";
}

struct Tally {
    std::uint64_t frames = 0;
    std::uint64_t mid_errs = 0, mid_fe = 0;
    std::uint64_t lid_errs = 0, lid_fe = 0;
    std::uint64_t all_fe = 0;

    void merge(const Tally& o) {
        frames += o.frames;
        mid_errs += o.mid_errs;
        mid_fe += o.mid_fe;
        lid_errs += o.lid_errs;
        lid_fe += o.lid_fe;
        all_fe += o.all_fe;
    }
};

std::uint64_t diff_bits(const BitVector& a, const BitVector& b) {
    std::uint64_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.get(i) != b.get(i)) ++d;
    return d;
}

BitVector extract_info(const GeneratorMatrix& G, const BitVector& v) {
    BitVector u(G.k());
    const auto& cols = G.systematic_cols();
    for (std::size_t t = 0; t < cols.size(); ++t)
        if (v.get(std::size_t(cols[t]))) u.set(t, true);
    return u;
}

// Everything one worker needs; rebuilt per thread, reused across frames.
struct Worker {
    const SimConfig* sim = nullptr;
    const UepPstConfig* code = nullptr;
    const QamMapping* qmap = nullptr;
    ChannelParams params;
    SpaWorkspace spa;
    SpaResult spa_out;

    Tally run_frame(std::uint64_t frame_seed);
};

ChannelOutput transmit(const Worker& w, const BitVector& frame, Rng& rng) {
    const SimConfig& sim = *w.sim;
    if (sim.modulation == Modulation::Bpsk) {
        if (sim.channel == ChannelKind::Awgn) return bpsk_awgn(frame, w.params, rng);
        return bpsk_rayleigh_csi(frame, w.params, rng);
    }
    Qam16Mode mode = sim.scheme == Scheme::Mapping ? Qam16Mode::UepMapping
                                                   : Qam16Mode::Sequential;
    return qam16_transmit(frame, *w.qmap, mode, w.params,
                          sim.channel == ChannelKind::Rayleigh, rng);
}

Tally Worker::run_frame(std::uint64_t frame_seed) {
    const UepPstConfig& cfg = *code;
    const int L = cfg.layers();
    const std::size_t k = cfg.k(), n = cfg.n();
    Rng rng(frame_seed);

    std::vector<BitVector> u(std::size_t(L) + 1);
    for (auto& blk : u) {
        blk = BitVector(k);
        for (std::size_t t = 0; t < k; ++t) blk.set(t, rng.next_bit());
    }

    BitVector frame;
    std::vector<BitVector> v; // per-block codewords (reference schemes)
    if (sim->scheme == Scheme::Pst) {
        frame = encode_uep_pst(cfg, u).concatenated();
    } else {
        frame = BitVector(n * std::size_t(L + 1));
        v.resize(std::size_t(L) + 1);
        for (int l = 0; l <= L; ++l) {
            v[std::size_t(l)] = cfg.G.encode(u[std::size_t(l)]);
            for (std::size_t i = 0; i < n; ++i)
                if (v[std::size_t(l)].get(i)) frame.set(std::size_t(l) * n + i, true);
        }
    }

    ChannelOutput ch = transmit(*this, frame, rng);

    std::vector<BitVector> u_hat(std::size_t(L) + 1);
    if (sim->scheme == Scheme::Pst) {
        DecoderConfig dec;
        dec.i_max = sim->i_max;
        dec.j_max = sim->j_max;
        DecodeOutcome out = decode_uep_pst(cfg, dec, ch.llr);
        u_hat = std::move(out.u_hat);
    } else {
        LlrVector block(n);
        for (int l = 0; l <= L; ++l) {
            std::copy(ch.llr.begin() + long(std::size_t(l) * n),
                      ch.llr.begin() + long(std::size_t(l + 1) * n), block.begin());
            spa.decode(cfg.H, block, sim->eep_iterations, spa_out);
            u_hat[std::size_t(l)] = extract_info(cfg.G, spa_out.hard_decision);
        }
    }

    Tally t;
    t.frames = 1;
    t.mid_errs = diff_bits(u[0], u_hat[0]);
    if (t.mid_errs) t.mid_fe = 1;
    for (int l = 1; l <= L; ++l)
        t.lid_errs += diff_bits(u[std::size_t(l)], u_hat[std::size_t(l)]);
    if (t.lid_errs) t.lid_fe = 1;
    if (t.mid_errs || t.lid_errs) t.all_fe = 1;
    return t;
}

UepPstConfig build_code(const SimConfig& sim) {
    ParityCheckMatrix H;
    if (!sim.code.alist_path.empty()) {
        H = load_alist(sim.code.alist_path);
    } else {
        H = construct_gallager_regular(sim.code.n, sim.code.dv, sim.code.dc,
                                       sim.code.seed);
    }
    if (!sim.interleaver_seeds.empty())
        return make_uep_config(std::move(H), sim.L, sim.interleaver_seeds);
    std::vector<std::uint64_t> seeds(std::size_t(sim.L));
    for (int l = 0; l < sim.L; ++l)
        seeds[std::size_t(l)] = derive_seed(sim.code.seed, 0x17EA5EEDull + std::uint64_t(l + 1));
    return make_uep_config(std::move(H), sim.L, seeds);
}

void validate(const SimConfig& sim, const UepPstConfig& code) {
    if (sim.L < 1) throw std::invalid_argument("sim: L must be at least 1");
    if (sim.ebn0_db.empty()) throw std::invalid_argument("sim: empty Eb/N0 grid");
    if (sim.batch_frames < 1) throw std::invalid_argument("sim: batch_frames must be positive");
    if (sim.scheme == Scheme::Mapping) {
        if (sim.modulation != Modulation::Qam16 || sim.L != 3)
            throw std::invalid_argument(
                "sim: the mapping scheme requires qam16 modulation and L = 3");
    }
    if (sim.modulation == Modulation::Qam16 && code.n() % 4 != 0)
        throw std::invalid_argument("sim: qam16 requires n divisible by 4");
}

} // namespace

std::vector<BerRecord> run_ber_sweep(const SimConfig& sim) {
    UepPstConfig code = build_code(sim);
    validate(sim, code);
    QamMapping qmap = dvb_gray_16qam();

    const double rate = double(code.k()) / double(code.n());
    const int bps = sim.modulation == Modulation::Qam16 ? 4 : 1;
    const std::uint64_t mid_bits_per_frame = code.k();
    const std::uint64_t lid_bits_per_frame = code.k() * std::uint64_t(sim.L);

    std::vector<BerRecord> records;
    for (std::size_t pt = 0; pt < sim.ebn0_db.size(); ++pt) {
        const double ebn0 = sim.ebn0_db[pt];
        const std::uint64_t point_seed = derive_seed(sim.seed, pt);

        Tally total;
        int threads = std::max(1, sim.threads);
        std::uint64_t next_frame = 0;
        while (total.frames < sim.stop.max_frames &&
               total.mid_errs < sim.stop.min_error_events) {
            std::uint64_t batch =
                std::min<std::uint64_t>(std::uint64_t(sim.batch_frames),
                                        sim.stop.max_frames - total.frames);
            std::vector<Tally> part(static_cast<std::size_t>(threads));
            std::atomic<std::uint64_t> cursor{next_frame};
            const std::uint64_t end = next_frame + batch;
            auto work = [&](int tid) {
                Worker w;
                w.sim = &sim;
                w.code = &code;
                w.qmap = &qmap;
                w.params = ChannelParams::make(ebn0, rate, bps, point_seed);
                for (;;) {
                    std::uint64_t f = cursor.fetch_add(1);
                    if (f >= end) break;
                    part[std::size_t(tid)].merge(w.run_frame(derive_seed(point_seed, f)));
                }
            };
            if (threads == 1) {
                work(0);
            } else {
                std::vector<std::thread> pool;
                for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
                for (auto& th : pool) th.join();
            }
            for (const auto& p : part) total.merge(p);
            next_frame = end;
        }

        BerRecord base;
        base.scheme = scheme_name(sim.scheme);
        base.channel = channel_name(sim.channel);
        base.modulation = modulation_name(sim.modulation);
        base.L = sim.L;
        base.ebn0_db = ebn0;
        base.frames = total.frames;

        BerRecord mid = base;
        mid.stream = "MID";
        mid.bits = mid_bits_per_frame * total.frames;
        mid.bit_errors = total.mid_errs;
        mid.frame_errors = total.mid_fe;

        BerRecord lid = base;
        lid.stream = "LID";
        lid.bits = lid_bits_per_frame * total.frames;
        lid.bit_errors = total.lid_errs;
        lid.frame_errors = total.lid_fe;

        BerRecord all = base;
        all.stream = "ALL";
        all.bits = (mid_bits_per_frame + lid_bits_per_frame) * total.frames;
        all.bit_errors = total.mid_errs + total.lid_errs;
        all.frame_errors = total.all_fe;

        if (sim.verbose) {
            std::fprintf(stderr,
                         "%s %.3f dB: %llu frames, MID ber %.3g, LID ber %.3g\n",
                         base.scheme.c_str(), ebn0,
                         (unsigned long long)total.frames, mid.ber(), lid.ber());
        }

        records.push_back(std::move(mid));
        records.push_back(std::move(lid));
        records.push_back(std::move(all));
    }
    return records;
}

static const char* kCsvHeader =
    "scheme,channel,modulation,L,ebn0_db,stream,bits,bit_errors,frames,frame_errors,ber,fer";

std::string emit_csv(const std::vector<BerRecord>& records) {
    std::string out = kCsvHeader;
    out += '\n';
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%d,%.17g,%s,%llu,%llu,%llu,%llu,%.17g,%.17g\n",
                      r.scheme.c_str(), r.channel.c_str(), r.modulation.c_str(), r.L,
                      r.ebn0_db, r.stream.c_str(), (unsigned long long)r.bits,
                      (unsigned long long)r.bit_errors, (unsigned long long)r.frames,
                      (unsigned long long)r.frame_errors, r.ber(), r.fer());
        out += buf;
    }
    return out;
}

std::vector<BerRecord> parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("ber csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw std::runtime_error("ber csv: unexpected header: " + line);

    std::vector<BerRecord> out;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 12)
            throw std::runtime_error("ber csv: bad field count in line: " + line);
        BerRecord r;
        r.scheme = f[0];
        r.channel = f[1];
        r.modulation = f[2];
        r.L = std::stoi(f[3]);
        r.ebn0_db = std::stod(f[4]);
        r.stream = f[5];
        r.bits = std::stoull(f[6]);
        r.bit_errors = std::stoull(f[7]);
        r.frames = std::stoull(f[8]);
        r.frame_errors = std::stoull(f[9]);
        // ber/fer columns are derived; recomputed from the integer fields.
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

struct CurvePoint {
    double snr = 0.0;
    double errs = 0.0;
    double bits = 0.0;

    double ber() const { return bits > 0 ? errs / bits : 0.0; }
};

// Pool adjacent violators: enforce BER non-increasing in SNR by merging
// neighbouring points (summing error and bit counts, which is the weighted
// mean of the rates).
std::vector<CurvePoint> isotonic_curve(const std::vector<BerRecord>& records) {
    std::vector<CurvePoint> pts;
    for (const auto& r : records) {
        if (r.bits == 0) continue;
        pts.push_back({r.ebn0_db, double(r.bit_errors), double(r.bits)});
    }
    std::sort(pts.begin(), pts.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.snr < b.snr; });

    std::vector<CurvePoint> stack;
    std::vector<std::pair<double, double>> span; // snr range of each pooled block
    for (const auto& p : pts) {
        stack.push_back(p);
        span.push_back({p.snr, p.snr});
        while (stack.size() > 1 &&
               stack[stack.size() - 2].ber() < stack.back().ber()) {
            CurvePoint merged = stack[stack.size() - 2];
            merged.errs += stack.back().errs;
            merged.bits += stack.back().bits;
            span[span.size() - 2].second = span.back().second;
            stack.pop_back();
            span.pop_back();
            stack.back() = merged;
        }
    }
    // Each pooled block is represented at its right edge (the level holds up
    // to there), except a block is also anchored at its left edge so the
    // interpolation domain starts at the first measured SNR.
    std::vector<CurvePoint> out;
    for (std::size_t i = 0; i < stack.size(); ++i) {
        CurvePoint left = stack[i], right = stack[i];
        left.snr = span[i].first;
        right.snr = span[i].second;
        out.push_back(left);
        if (span[i].second > span[i].first) out.push_back(right);
    }
    return out;
}

} // namespace

double snr_at_ber(const std::vector<BerRecord>& records, double eps) {
    if (!(eps > 0.0) || eps >= 1.0)
        throw std::invalid_argument("snr_at_ber: target must lie in (0,1)");
    std::vector<CurvePoint> curve = isotonic_curve(records);
    if (curve.empty()) throw std::runtime_error("snr_at_ber: no usable records");

    if (curve.front().ber() <= eps) return curve.front().snr;

    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        double b0 = curve[i].ber(), b1 = curve[i + 1].ber();
        if (b0 <= eps || b1 > eps) continue;
        // crossing in (snr_i, snr_{i+1}]
        if (b1 == 0.0) return curve[i + 1].snr; // no log anchor; right edge
        double l0 = std::log10(b0), l1 = std::log10(b1), le = std::log10(eps);
        if (l0 == l1) return curve[i + 1].snr;
        double t = (l0 - le) / (l0 - l1);
        return curve[i].snr + t * (curve[i + 1].snr - curve[i].snr);
    }
    std::ostringstream msg;
    msg << "snr_at_ber: target " << eps
        << " is below the simulated range (lowest measured BER "
        << curve.back().ber() << " at " << curve.back().snr << " dB)";
    throw std::runtime_error(msg.str());
}

MinSnrResult min_snr_uep(const std::vector<BerRecord>& mid_records,
                         const std::vector<BerRecord>& lid_records,
                         const UepRequirement& req) {
    MinSnrResult r;
    r.snr_mid_db = snr_at_ber(mid_records, req.eps_mid);
    r.snr_lid_db = snr_at_ber(lid_records, req.eps_lid);
    r.snr_uep_db = std::max(r.snr_mid_db, r.snr_lid_db);
    return r;
}

SimConfig load_sim_config(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("cannot open sim config: " + json_path);
    nlohmann::json j;
    in >> j;

    SimConfig sim;
    std::string scheme = j.at("scheme").get<std::string>();
    if (scheme == "pst") sim.scheme = Scheme::Pst;
    else if (scheme == "eep") sim.scheme = Scheme::Eep;
    else if (scheme == "mapping") sim.scheme = Scheme::Mapping;
    else throw std::runtime_error("sim config: unknown scheme: " + scheme);

    const auto& code = j.at("code");
    std::string type = code.at("type").get<std::string>();
    if (type == "gallager") {
        sim.code.n = code.at("n").get<std::size_t>();
        sim.code.dv = code.at("dv").get<int>();
        sim.code.dc = code.at("dc").get<int>();
        sim.code.seed = code.at("seed").get<std::uint64_t>();
    } else if (type == "alist") {
        sim.code.alist_path = code.at("path").get<std::string>();
    } else {
        throw std::runtime_error("sim config: unknown code type: " + type);
    }

    sim.L = j.at("L").get<int>();
    if (j.contains("decoder")) {
        const auto& d = j.at("decoder");
        if (d.contains("i_max")) sim.i_max = d.at("i_max").get<int>();
        if (d.contains("j_max")) sim.j_max = d.at("j_max").get<int>();
        if (d.contains("eep_iterations"))
            sim.eep_iterations = d.at("eep_iterations").get<int>();
    }

    std::string ch = j.at("channel").get<std::string>();
    if (ch == "awgn") sim.channel = ChannelKind::Awgn;
    else if (ch == "rayleigh") sim.channel = ChannelKind::Rayleigh;
    else throw std::runtime_error("sim config: unknown channel: " + ch);

    std::string mod = j.at("modulation").get<std::string>();
    if (mod == "bpsk") sim.modulation = Modulation::Bpsk;
    else if (mod == "qam16") sim.modulation = Modulation::Qam16;
    else throw std::runtime_error("sim config: unknown modulation: " + mod);

    sim.ebn0_db = j.at("ebn0_db").get<std::vector<double>>();
    if (j.contains("stop")) {
        const auto& s = j.at("stop");
        if (s.contains("min_error_events"))
            sim.stop.min_error_events = s.at("min_error_events").get<std::uint64_t>();
        if (s.contains("max_frames"))
            sim.stop.max_frames = s.at("max_frames").get<std::uint64_t>();
    }
    sim.seed = j.value("seed", std::uint64_t(1));
    if (j.contains("interleaver_seeds"))
        sim.interleaver_seeds = j.at("interleaver_seeds").get<std::vector<std::uint64_t>>();
    sim.threads = j.value("threads", 1);
    if (j.contains("batch_frames")) sim.batch_frames = j.at("batch_frames").get<int>();
    return sim;
}

} // namespace uep
