#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uep/bitvec.hpp"
#include "uep/ldpc.hpp"

namespace uep {

// Bijection on {0..n-1}. Applying it as an interleaver reads w[j] = v[map[j]];
// the matrix convention v*P is fixed to match (P has a 1 at (map[j], j)).
class Permutation {
  public:
    Permutation() = default;
    explicit Permutation(std::vector<int> map, std::uint64_t seed = 0);

    std::size_t size() const { return map_.size(); }
    int map(std::size_t j) const { return map_[j]; }
    std::uint64_t seed() const { return seed_; }

    Permutation inverse() const;

    template <typename T>
    std::vector<T> apply(const std::vector<T>& v) const {
        if (v.size() != map_.size())
            throw std::invalid_argument("Permutation::apply: length mismatch");
        std::vector<T> w(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) w[j] = v[std::size_t(map_[j])];
        return w;
    }

    BitVector apply(const BitVector& v) const;

  private:
    std::vector<int> map_;
    std::uint64_t seed_ = 0;
};

// Uniform random permutation (Fisher-Yates over the fixed generator).
Permutation random_permutation(std::size_t n, std::uint64_t seed);

// One basic code C[n,k] protecting an important block u(0) that is
// superimposed onto L less-important blocks u(1)..u(L):
//   c(0) = v(0),   c(l) = P_l(v(0)) xor v(l),   v(l) = encode(u(l)).
struct UepPstConfig {
    ParityCheckMatrix H;
    GeneratorMatrix G;
    std::vector<Permutation> perms; // one per superimposed layer

    std::size_t n() const { return H.n(); }
    std::size_t k() const { return G.k(); }
    int layers() const { return int(perms.size()); }
    std::size_t frame_bits() const { return n() * (perms.size() + 1); }
    std::size_t info_bits() const { return k() * (perms.size() + 1); }
};

UepPstConfig make_uep_config(ParityCheckMatrix H, int L,
                             const std::vector<std::uint64_t>& interleaver_seeds);
UepPstConfig make_uep_config(ParityCheckMatrix H, std::vector<Permutation> perms);

struct UepFrame {
    std::vector<BitVector> u_blocks; // L+1 blocks of k info bits
    std::vector<BitVector> c_blocks; // L+1 blocks of n transmitted bits

    BitVector concatenated() const;
};

UepFrame encode_uep_pst(const UepPstConfig& cfg, const std::vector<BitVector>& u_blocks);

// Dense k(L+1) x n(L+1) generator: first block row [G, G*P_1, ..., G*P_L],
// then G on the diagonal.
DenseF2Matrix build_generator_uep(const UepPstConfig& cfg);

// Sparse parity check of the composite code, block lower-triangular: block
// (0,0) = H, block (l,l) = H, and block (l,0) couples layer checks to v(0)
// through the forward interleaver images (c(l)[i] = v(0)[map(i)] xor v(l)[i]).
ParityCheckMatrix build_parity_check_uep(const UepPstConfig& cfg);

// JSON round trip for configs: either Gallager parameters or an alist path,
// plus L and the interleaver seeds.
UepPstConfig load_uep_config(const std::string& json_path);
std::string uep_config_to_json(std::size_t n, int dv, int dc, std::uint64_t code_seed,
                               int L, const std::vector<std::uint64_t>& seeds);

} // namespace uep
