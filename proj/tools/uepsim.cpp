// Command line front end: encode/decode single frames, run BER sweeps,
// evaluate density-evolution thresholds, and post-process sweep CSVs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uep/density_evolution.hpp"
#include "uep/graph_decoder.hpp"
#include "uep/pst.hpp"
#include "uep/sim.hpp"

namespace {

uep::BitVector read_bits(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open bit file: " + path);
    std::vector<bool> bits;
    char ch;
    while (in.get(ch)) {
        if (ch == '0') bits.push_back(false);
        else if (ch == '1') bits.push_back(true);
        else if (!std::isspace(static_cast<unsigned char>(ch)))
            throw std::runtime_error(std::string("bit file: unexpected character '") + ch + "'");
    }
    uep::BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i]);
    return v;
}

void write_bits(const std::string& path, const uep::BitVector& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    for (std::size_t i = 0; i < v.size(); ++i) out << (v.get(i) ? '1' : '0');
    out << '\n';
}

uep::LlrVector read_llrs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open LLR file: " + path);
    uep::LlrVector llr;
    double x;
    while (in >> x) llr.push_back(x);
    if (!in.eof()) throw std::runtime_error("LLR file: non-numeric token in " + path);
    return llr;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

// Accepts "25/512" or a plain decimal.
double parse_fraction(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return std::stod(s);
    double num = std::stod(s.substr(0, slash));
    double den = std::stod(s.substr(slash + 1));
    if (den == 0.0) throw std::runtime_error("fraction with zero denominator: " + s);
    return num / den;
}

std::vector<uep::BitVector> split_blocks(const uep::BitVector& flat, std::size_t blocks,
                                         std::size_t block_len) {
    if (flat.size() != blocks * block_len)
        throw std::runtime_error("bit string has wrong length");
    std::vector<uep::BitVector> out(blocks, uep::BitVector(block_len));
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t i = 0; i < block_len; ++i)
            out[b].set(i, flat.get(b * block_len + i));
    return out;
}

std::string trajectory_csv(const uep::DeTrajectory& tr) {
    std::ostringstream os;
    os << "iteration,mid_ber,lid_ber\n";
    char buf[96];
    for (std::size_t i = 0; i < tr.mid_ber.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, tr.mid_ber[i],
                      i < tr.lid_ber.size() ? tr.lid_ber[i] : 0.0);
        os << buf;
    }
    return os.str();
}

std::vector<uep::BerRecord> load_stream_records(const std::string& path,
                                                const std::string& stream) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto all = uep::parse_csv(ss.str());
    std::vector<uep::BerRecord> out;
    for (auto& r : all)
        if (r.stream == stream) out.push_back(std::move(r));
    if (out.empty())
        throw std::runtime_error("no " + stream + " records in " + path);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unequal error protection by partial superposition transmission"};
    app.require_subcommand(1);

    // encode
    auto* enc = app.add_subcommand("encode", "Encode info bits into a transmit frame");
    std::string enc_cfg, enc_in, enc_out = "-";
    enc->add_option("--config", enc_cfg, "code config JSON")->required();
    enc->add_option("--in", enc_in, "info bits, k(L+1) characters of 0/1")->required();
    enc->add_option("--out", enc_out, "output frame bits (default stdout)");

    // decode
    auto* dec = app.add_subcommand("decode", "Decode channel LLRs back to info bits");
    std::string dec_cfg, dec_in, dec_out = "-";
    int dec_imax = 50, dec_jmax = 20;
    bool dec_single = false;
    dec->add_option("--config", dec_cfg, "code config JSON")->required();
    dec->add_option("--in", dec_in, "whitespace separated LLRs, n(L+1) values")->required();
    dec->add_option("--out", dec_out, "decoded info bits (default stdout)");
    dec->add_option("--imax", dec_imax, "SPA iterations per code activation");
    dec->add_option("--jmax", dec_jmax, "global iterations");
    dec->add_flag("--single-code", dec_single,
                  "decode over the composite parity-check matrix instead");

    // ber
    auto* ber = app.add_subcommand("ber", "Monte-Carlo BER sweep from a JSON config");
    std::string ber_cfg, ber_out = "-";
    bool ber_verbose = false;
    ber->add_option("--config", ber_cfg, "sim config JSON")->required();
    ber->add_option("--out", ber_out, "output CSV (default stdout)");
    ber->add_flag("--verbose", ber_verbose, "progress to stderr");

    // de-threshold
    auto* de = app.add_subcommand("de-threshold",
                                  "Density-evolution decoding threshold (BPSK-AWGN)");
    int de_L = 1, de_b = 10, de_imax = 50, de_max_global = 2000;
    std::string de_stream = "mid", de_delta = "25/512", de_traj;
    double de_tol = 0.01, de_lo = 0.0, de_hi = 2.0;
    double de_evolve_at = std::numeric_limits<double>::quiet_NaN();
    de->add_option("--L", de_L, "number of superimposed layers");
    de->add_option("--stream", de_stream, "mid | lid | eep (eep = plain LDPC)")
        ->check(CLI::IsMember({"mid", "lid", "eep"}));
    de->add_option("--b", de_b, "quantizer bits");
    de->add_option("--delta", de_delta, "quantizer step, fraction or decimal");
    de->add_option("--imax", de_imax, "internal LDPC DE iterations per activation");
    de->add_option("--max-global", de_max_global, "global DE iteration cap");
    de->add_option("--tol", de_tol, "bisection tolerance in dB");
    de->add_option("--lo", de_lo, "bracket low edge, dB");
    de->add_option("--hi", de_hi, "bracket high edge, dB");
    de->add_option("--trajectory", de_traj, "write per-iteration BER CSV here");
    de->add_option("--evolve-at", de_evolve_at,
                   "skip the search; run one evolution at this Eb/N0 (dB)");

    // min-snr
    auto* ms = app.add_subcommand("min-snr",
                                  "Minimum SNR meeting (eps0 on MID, eps1 on LID)");
    std::string ms_mid, ms_lid;
    double ms_eps0 = 1e-5, ms_eps1 = 5e-2;
    ms->add_option("--mid", ms_mid, "sweep CSV providing the MID curve")->required();
    ms->add_option("--lid", ms_lid, "sweep CSV providing the LID curve")->required();
    ms->add_option("--eps0", ms_eps0, "required MID BER");
    ms->add_option("--eps1", ms_eps1, "required LID BER");

    // export-mapping
    auto* em = app.add_subcommand("export-mapping", "16-QAM constellation table CSV");
    std::string em_out = "-";
    em->add_option("--out", em_out, "output CSV (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*enc) {
            uep::UepPstConfig cfg = uep::load_uep_config(enc_cfg);
            auto u = split_blocks(read_bits(enc_in), cfg.perms.size() + 1, cfg.k());
            uep::UepFrame frame = uep::encode_uep_pst(cfg, u);
            write_bits(enc_out == "-" ? "/dev/stdout" : enc_out, frame.concatenated());
        } else if (*dec) {
            uep::UepPstConfig cfg = uep::load_uep_config(dec_cfg);
            uep::LlrVector llr = read_llrs(dec_in);
            uep::DecodeOutcome out;
            if (dec_single) {
                out = uep::decode_as_single_code(cfg, llr, dec_imax);
            } else {
                uep::DecoderConfig d;
                d.i_max = dec_imax;
                d.j_max = dec_jmax;
                out = uep::decode_uep_pst(cfg, d, llr);
            }
            uep::BitVector flat(cfg.info_bits());
            for (std::size_t b = 0; b < out.u_hat.size(); ++b)
                for (std::size_t i = 0; i < cfg.k(); ++i)
                    flat.set(b * cfg.k() + i, out.u_hat[b].get(i));
            write_bits(dec_out == "-" ? "/dev/stdout" : dec_out, flat);
            std::fprintf(stderr, "decode: %s after %d global iterations\n",
                         out.success ? "converged" : "not converged",
                         out.global_iterations);
        } else if (*ber) {
            uep::SimConfig cfg = uep::load_sim_config(ber_cfg);
            cfg.verbose = ber_verbose;
            write_text(ber_out, uep::emit_csv(uep::run_ber_sweep(cfg)));
        } else if (*de) {
            uep::DeOptions opts;
            opts.spec.bits = de_b;
            opts.spec.delta = parse_fraction(de_delta);
            opts.i_max = de_imax;
            opts.max_global = de_max_global;
            auto evolve = [&](double db) {
                return de_stream == "eep" ? uep::evolve_ldpc(db, opts)
                                          : uep::evolve_uep(de_L, db, opts);
            };
            if (!std::isnan(de_evolve_at)) {
                uep::DeTrajectory tr = evolve(de_evolve_at);
                bool conv = de_stream == "lid" ? tr.lid_converged : tr.mid_converged;
                std::printf("ebn0_db %.6f: %s after %d iterations\n", de_evolve_at,
                            conv ? "converged" : "not converged", tr.iterations);
                if (!de_traj.empty()) write_text(de_traj, trajectory_csv(tr));
            } else {
                double th;
                if (de_stream == "eep")
                    th = uep::ldpc_threshold(opts, de_tol, de_lo, de_hi);
                else
                    th = uep::threshold_search(de_stream == "mid" ? uep::DeStream::Mid
                                                                  : uep::DeStream::Lid,
                                               de_L, opts, de_tol, de_lo, de_hi);
                std::printf("threshold_db %.6f\n", th);
                if (!de_traj.empty()) write_text(de_traj, trajectory_csv(evolve(th)));
            }
        } else if (*ms) {
            auto mid = load_stream_records(ms_mid, "MID");
            auto lid = load_stream_records(ms_lid, "LID");
            uep::UepRequirement req{ms_eps0, ms_eps1};
            uep::MinSnrResult r = uep::min_snr_uep(mid, lid, req);
            std::printf("snr_mid_db,snr_lid_db,snr_uep_db\n%.6f,%.6f,%.6f\n",
                        r.snr_mid_db, r.snr_lid_db, r.snr_uep_db);
        } else if (*em) {
            write_text(em_out, uep::qam16_mapping_csv(uep::dvb_gray_16qam()));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
