#pragma once

#include <cstdint>
#include <vector>

#include "uep/llr.hpp"

namespace uep {

// Uniform LLR grid with 2^bits - 1 points i*delta, |i| <= 2^(bits-1)-1.
// quantize() rounds to the nearest grid point (ties away from zero) and
// saturates at the ends.
struct QuantizerSpec {
    int bits = 10;
    double delta = 25.0 / 512.0;

    int half_levels() const { return (1 << (bits - 1)) - 1; }
    int grid_size() const { return (1 << bits) - 1; }
    double max_value() const { return half_levels() * delta; }

    bool operator==(const QuantizerSpec& o) const {
        return bits == o.bits && delta == o.delta;
    }
};

int quantize_level(double x, const QuantizerSpec& spec);    // in [-half, +half]
double quantize(double x, const QuantizerSpec& spec);       // grid value

// Probability masses on the grid; index i stores level i - half_levels().
class QuantizedPmf {
  public:
    QuantizedPmf() = default;
    explicit QuantizedPmf(const QuantizerSpec& spec)
        : spec_(spec), mass_(std::size_t(spec.grid_size()), 0.0) {}

    const QuantizerSpec& spec() const { return spec_; }
    std::size_t size() const { return mass_.size(); }
    double& operator[](std::size_t i) { return mass_[i]; }
    double operator[](std::size_t i) const { return mass_[i]; }
    double value_at(std::size_t i) const {
        return (int(i) - spec_.half_levels()) * spec_.delta;
    }

    double total() const;
    void normalize(); // clamp tiny negatives to zero, rescale to total 1

    const std::vector<double>& masses() const { return mass_; }

  private:
    QuantizerSpec spec_;
    std::vector<double> mass_;
};

QuantizedPmf point_mass(const QuantizerSpec& spec, double value);

// Binned pmf of the channel LLR of an all-zero BPSK bit: N(2/sigma2, 4/sigma2)
// integrated per bin, with tails folded into the saturation bins.
QuantizedPmf channel_pmf_awgn(double sigma2, const QuantizerSpec& spec);

// Variable-style combination: density of Q(x + x').
QuantizedPmf transform_S(const QuantizedPmf& P, const QuantizedPmf& Pp);
// Check-style combination: density of Q(2 atanh(tanh(x/2) tanh(x'/2))).
QuantizedPmf transform_T(const QuantizedPmf& P, const QuantizedPmf& Pp);

// n-fold S-convolution power: 0 -> point mass at 0, 1 -> P, else left fold.
QuantizedPmf fold_S_pow(const QuantizedPmf& P, int n);
// Left fold of n copies under T (n >= 1).
QuantizedPmf fold_T_pow(const QuantizedPmf& P, int n);

// Mass below zero plus half the mass at zero.
double error_probability(const QuantizedPmf& P);

// Density evolution of one code-node activation: i_max rounds of standard
// (dv,dc) evolution driven by the attachment-edge input, returning the pmf of
// the extrinsic output (dv-fold S of the check-to-variable density, without
// the input). Restarts from scratch, mirroring the decoder's code node.
QuantizedPmf de_ldpc_internal(const QuantizedPmf& input, int dv, int dc, int i_max);

// Directed-message densities on the composite graph.
struct DeState {
    int L = 1;
    QuantizedPmf ch_mid, ch_lid;
    QuantizedPmf x_plus_to_eq, x_eq_to_plus;
    QuantizedPmf v_plus_to_c, v_c_to_plus;
    QuantizedPmf v0_eq_to_c, v0_c_to_eq;
};

DeState make_de_state(int L, double sigma2, const QuantizerSpec& spec);

// Equality node toward the code node: S(ch, S^L of layer feedback).
void de_equality_to_code(DeState& st);
// Equality node toward a layer: S(S(ch, code feedback), S^(L-1) of the others).
void de_equality_to_layer(DeState& st);
// Superposition node: both outputs from the current inputs.
void de_superposition(DeState& st);

struct DeOptions {
    QuantizerSpec spec;
    int dv = 3;
    int dc = 6;
    int i_max = 50;      // code-node internal rounds per activation
    int max_global = 2000;
    double floor = 1e-9; // convergence floor on predicted BER
    double stagnation_rel = 1e-6;
    int stagnation_window = 10;
};

struct DeTrajectory {
    std::vector<double> mid_ber, lid_ber; // entry 0 is the initialization state
    bool mid_converged = false;
    bool lid_converged = false;
    int iterations = 0;
};

// Full schedule = -> C -> = -> + -> C -> + -> = per global iteration, with the
// interleaver transparent under the i.i.d. assumption. Rate 1 - dv/dc maps
// Eb/N0 to sigma2. Exits when each stream is below the floor or stagnant.
DeTrajectory evolve_uep(int L, double ebn0_db, const DeOptions& opts);

// Plain (dv,dc) evolution of the basic code on the channel, for the equal
// protection reference.
DeTrajectory evolve_ldpc(double ebn0_db, const DeOptions& opts);

enum class DeStream { Mid, Lid };

// Bisection for the smallest Eb/N0 whose evolution drives the stream's BER
// under the floor. Throws if both bracket endpoints converge or both fail.
double threshold_search(DeStream stream, int L, const DeOptions& opts, double tol_db,
                        double lo_db = 0.0, double hi_db = 2.0);
double ldpc_threshold(const DeOptions& opts, double tol_db, double lo_db = 0.0,
                      double hi_db = 2.0);

} // namespace uep
