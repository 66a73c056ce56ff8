#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uep/channels.hpp"
#include "uep/graph_decoder.hpp"
#include "uep/pst.hpp"

namespace uep {

enum class Scheme { Pst, Eep, Mapping };
enum class ChannelKind { Awgn, Rayleigh };
enum class Modulation { Bpsk, Qam16 };

struct StopRule {
    std::uint64_t min_error_events = 100; // bit-error events on the MID stream
    std::uint64_t max_frames = 10000000;
};

struct CodeSpec {
    // Either Gallager construction parameters or an alist path.
    std::size_t n = 1024;
    int dv = 3;
    int dc = 6;
    std::uint64_t seed = 1;
    std::string alist_path; // non-empty selects alist
};

struct SimConfig {
    Scheme scheme = Scheme::Pst;
    CodeSpec code;
    int L = 1;
    int i_max = 50; // per code-node activation (layered decoder)
    int j_max = 20; // global iterations (layered decoder)
    int eep_iterations = 100; // single-code SPA for the reference schemes
    ChannelKind channel = ChannelKind::Awgn;
    Modulation modulation = Modulation::Bpsk;
    std::vector<double> ebn0_db;
    StopRule stop;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> interleaver_seeds; // optional; derived if empty
    int threads = 1;
    // Stopping is evaluated at fixed-size batch boundaries so the processed
    // frame set (hence the CSV) is identical for any thread count.
    int batch_frames = 256;
    bool verbose = false;
};

SimConfig load_sim_config(const std::string& json_path);

struct BerRecord {
    std::string scheme, channel, modulation;
    int L = 0;
    double ebn0_db = 0.0;
    std::string stream; // MID, LID or ALL
    std::uint64_t bits = 0, bit_errors = 0, frames = 0, frame_errors = 0;

    double ber() const { return bits ? double(bit_errors) / double(bits) : 0.0; }
    double fer() const { return frames ? double(frame_errors) / double(frames) : 0.0; }
};

// One record per (Eb/N0, stream). Deterministic for a given config: info bits
// and noise derive from seed -> per-point -> per-frame streams, and integer
// tallies merge commutatively across worker threads.
std::vector<BerRecord> run_ber_sweep(const SimConfig& cfg);

std::string emit_csv(const std::vector<BerRecord>& records);
std::vector<BerRecord> parse_csv(const std::string& text);

struct UepRequirement {
    double eps_mid = 1e-5; // target BER for the important stream
    double eps_lid = 5e-2; // target BER for the remaining streams
};

struct MinSnrResult {
    double snr_mid_db = 0.0;
    double snr_lid_db = 0.0;
    double snr_uep_db = 0.0; // max of the two
};

// Smallest Eb/N0 meeting both stream requirements: per stream, isotonic
// cleanup (pooled adjacent violators, weighted by bits) then interpolation
// linear in dB against log10(BER). A requirement below the simulated range is
// an error, never an extrapolation; a zero-error point can only serve as the
// right edge of a crossing and contributes its own SNR.
MinSnrResult min_snr_uep(const std::vector<BerRecord>& mid_records,
                         const std::vector<BerRecord>& lid_records,
                         const UepRequirement& req);

// Interpolated SNR at which an isotonic-cleaned curve crosses eps.
double snr_at_ber(const std::vector<BerRecord>& records, double eps);

} // namespace uep
