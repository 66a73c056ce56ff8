#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uep/bitvec.hpp"
#include "uep/llr.hpp"
#include "uep/rng.hpp"

namespace uep {

// Sparse binary parity-check matrix in adjacency form. Row and column
// adjacency are kept consistent by construction; entries are sorted and
// duplicate-free (a duplicate entry would be a 2-cycle in the Tanner graph).
class ParityCheckMatrix {
  public:
    ParityCheckMatrix() = default;
    // rows[i] lists the variable indices checked by row i.
    ParityCheckMatrix(std::size_t n, std::vector<std::vector<int>> rows);

    std::size_t n() const { return n_; }
    std::size_t m() const { return row_adj_.size(); }
    std::size_t edge_count() const { return edges_; }

    const std::vector<int>& row(std::size_t r) const { return row_adj_[r]; }
    const std::vector<int>& col(std::size_t c) const { return col_adj_[c]; }

  private:
    std::size_t n_ = 0;
    std::size_t edges_ = 0;
    std::vector<std::vector<int>> row_adj_;
    std::vector<std::vector<int>> col_adj_;
};

// (dv,dc)-regular Gallager-style construction: the n*dv variable sockets are
// matched to check sockets by a random permutation; colliding sockets (which
// would create parallel edges) are re-drawn. Deterministic for a given seed.
ParityCheckMatrix construct_gallager_regular(std::size_t n, int dv, int dc,
                                             std::uint64_t seed);

// Systematic-form generator derived from H by Gaussian elimination over F2
// with column pivoting. k = n - rank(H). systematic_cols carry the info bits;
// parity_cols are the pivot columns, filled from parity_rows.
class GeneratorMatrix {
  public:
    std::size_t k() const { return systematic_cols_.size(); }
    std::size_t n() const { return n_; }

    const std::vector<int>& systematic_cols() const { return systematic_cols_; }
    const std::vector<int>& parity_cols() const { return parity_cols_; }

    // Full generator row for info bit t (the codeword of the t-th unit vector).
    BitVector row(std::size_t t) const;

    BitVector encode(const BitVector& u) const;

  private:
    friend GeneratorMatrix derive_generator(const ParityCheckMatrix& H);
    std::size_t n_ = 0;
    std::vector<int> systematic_cols_;
    std::vector<int> parity_cols_;
    // parity_rows_[t] holds, for info bit t, the bits placed on parity_cols_.
    std::vector<BitVector> parity_rows_;
};

GeneratorMatrix derive_generator(const ParityCheckMatrix& H);

inline BitVector encode_systematic(const GeneratorMatrix& G, const BitVector& u) {
    return G.encode(u);
}

bool is_codeword(const ParityCheckMatrix& H, const BitVector& v);

struct SpaResult {
    LlrVector llr_extrinsic;   // sum of check-to-variable messages
    LlrVector llr_full;        // llr_extrinsic + (clamped) input
    BitVector hard_decision;
    bool converged = false;
    int iterations_used = 0;
};

// Flooding log-domain sum-product decoding with the tanh rule at checks.
// Messages are clamped to +-kLlrMax; early exit as soon as the hard decision
// satisfies every check. Non-finite inputs are clamped (NaN -> 0).
SpaResult spa_decode(const ParityCheckMatrix& H, const LlrVector& llr_in,
                     int max_iterations);

// Reusable workspace for repeated spa_decode calls on the same H shape.
class SpaWorkspace {
  public:
    void decode(const ParityCheckMatrix& H, const LlrVector& llr_in,
                int max_iterations, SpaResult& out);

  private:
    std::vector<int> edge_var_;     // per edge (check-major): variable index
    std::vector<int> row_ptr_;      // per check: edge range
    std::vector<std::vector<int>> var_edges_;
    std::vector<double> alpha_, beta_, tanh_buf_;
    const ParityCheckMatrix* built_for_ = nullptr;
    void build(const ParityCheckMatrix& H);
};

// alist text format: header "n m", max degrees, per-column and per-row degree
// lists, then 1-based index lists (zero padding tolerated). Malformed input
// raises AlistParseError with a message naming the offending part.
struct AlistParseError : std::runtime_error {
    explicit AlistParseError(const std::string& what) : std::runtime_error(what) {}
};

ParityCheckMatrix load_alist(const std::string& path);
void save_alist(const std::string& path, const ParityCheckMatrix& H);

} // namespace uep
