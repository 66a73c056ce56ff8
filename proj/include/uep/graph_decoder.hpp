#pragma once

#include <vector>

#include "uep/ldpc.hpp"
#include "uep/pst.hpp"

namespace uep {

struct DecoderConfig {
    int i_max = 50;         // SPA iterations per code-node activation
    int j_max = 20;         // global iterations over the composite graph
    bool early_exit = true; // stop once every layer's hard decision is a codeword
};

// Directed messages on the composite graph, all length-n LLR vectors.
// Layer index l runs 1..L; storage index l-1.
struct EdgeMessages {
    std::size_t n = 0;
    int L = 0;
    LlrVector ch_mid;                    // channel -> equality node
    std::vector<LlrVector> ch_lid;       // channel -> superposition node, per layer
    LlrVector eq_to_c, c_to_eq;          // equality <-> code node (MID)
    std::vector<LlrVector> eq_to_pi, pi_to_eq;    // equality <-> interleaver
    std::vector<LlrVector> pi_to_plus, plus_to_pi; // interleaver <-> superposition
    std::vector<LlrVector> plus_to_c, c_to_plus;   // superposition <-> code node
};

// Split the channel LLRs (block 0 first, then layers 1..L) onto the half-edges
// and zero every internal edge.
EdgeMessages init_messages(const LlrVector& llr_channel, std::size_t n, int L);

// Equality node: replicates v(0). Message to the code node is channel plus all
// interleaver-side inputs; message toward layer l excludes only that layer.
void update_equality_node(EdgeMessages& st);

// Degree-3 XOR node of layer l: output on each edge is the boxplus of the
// other two inputs (channel with W-edge toward the code node, channel with
// code feedback toward the interleaver).
void update_superposition_node(int layer, EdgeMessages& st);

struct DecodeOutcome {
    std::vector<BitVector> u_hat;       // L+1 info blocks
    std::vector<BitVector> v_hat;       // L+1 basic-code codeword estimates
    std::vector<LlrVector> llr_full;    // full (posterior) LLRs per layer's v
    bool success = false;
    int global_iterations = 0;
    std::vector<char> layer_converged;  // per-layer codeword check at exit
};

// Layered decoding: per global iteration, the MID pass (= -> C -> =) then each
// superimposed layer (Pi -> + -> C -> + -> Pi), then hard decisions from the
// summed directed messages on every V edge.
DecodeOutcome decode_uep_pst(const UepPstConfig& cfg, const DecoderConfig& dec,
                             const LlrVector& llr_channel);

// Reference path: flooding SPA over the composite parity-check matrix built by
// build_parity_check_uep, mapped back to per-layer codewords. Here llr_full
// holds posteriors of the transmitted blocks c(l) (identical to v(0) for
// block 0), since that is what the composite code's variables are.
DecodeOutcome decode_as_single_code(const UepPstConfig& cfg, const LlrVector& llr_channel,
                                    int iterations);

} // namespace uep
