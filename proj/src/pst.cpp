#include "uep/pst.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "uep/rng.hpp"
#include <json.hpp>

namespace uep {

Permutation::Permutation(std::vector<int> map, std::uint64_t seed)
    : map_(std::move(map)), seed_(seed) {
    std::vector<char> seen(map_.size(), 0);
    for (int v : map_) {
        if (v < 0 || std::size_t(v) >= map_.size() || seen[std::size_t(v)])
            throw std::invalid_argument("Permutation: map is not a bijection");
        seen[std::size_t(v)] = 1;
    }
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(map_.size());
    for (std::size_t j = 0; j < map_.size(); ++j) inv[std::size_t(map_[j])] = int(j);
    return Permutation(std::move(inv), seed_);
}

BitVector Permutation::apply(const BitVector& v) const {
    if (v.size() != map_.size())
        throw std::invalid_argument("Permutation::apply: length mismatch");
    BitVector w(v.size());
    for (std::size_t j = 0; j < map_.size(); ++j)
        if (v.get(std::size_t(map_[j]))) w.set(j, 1);
    return w;
}

Permutation random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<int> map(n);
    std::iota(map.begin(), map.end(), 0);
    Rng rng(seed);
    rng.shuffle(map);
    return Permutation(std::move(map), seed);
}

UepPstConfig make_uep_config(ParityCheckMatrix H, int L,
                             const std::vector<std::uint64_t>& interleaver_seeds) {
    if (L < 1) throw std::invalid_argument("make_uep_config: need at least one layer");
    if (interleaver_seeds.size() != std::size_t(L))
        throw std::invalid_argument("make_uep_config: one interleaver seed per layer");
    std::vector<Permutation> perms;
    perms.reserve(std::size_t(L));
    for (int l = 0; l < L; ++l)
        perms.push_back(random_permutation(H.n(), interleaver_seeds[std::size_t(l)]));
    return make_uep_config(std::move(H), std::move(perms));
}

UepPstConfig make_uep_config(ParityCheckMatrix H, std::vector<Permutation> perms) {
    if (perms.empty()) throw std::invalid_argument("make_uep_config: need at least one layer");
    for (const auto& p : perms)
        if (p.size() != H.n())
            throw std::invalid_argument("make_uep_config: permutation size must equal n");
    UepPstConfig cfg;
    cfg.G = derive_generator(H);
    cfg.H = std::move(H);
    cfg.perms = std::move(perms);
    return cfg;
}

BitVector UepFrame::concatenated() const {
    std::size_t total = 0;
    for (const auto& c : c_blocks) total += c.size();
    BitVector out(total);
    std::size_t off = 0;
    for (const auto& c : c_blocks) {
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c.get(i)) out.set(off + i, 1);
        off += c.size();
    }
    return out;
}

UepFrame encode_uep_pst(const UepPstConfig& cfg, const std::vector<BitVector>& u_blocks) {
    const std::size_t L = cfg.perms.size();
    if (u_blocks.size() != L + 1)
        throw std::invalid_argument("encode_uep_pst: expected L+1 info blocks");
    for (const auto& u : u_blocks)
        if (u.size() != cfg.k())
            throw std::invalid_argument("encode_uep_pst: info block length mismatch");

    UepFrame f;
    f.u_blocks = u_blocks;
    f.c_blocks.resize(L + 1);
    const BitVector v0 = cfg.G.encode(u_blocks[0]);
    f.c_blocks[0] = v0;
    for (std::size_t l = 1; l <= L; ++l) {
        BitVector c = cfg.perms[l - 1].apply(v0);
        c ^= cfg.G.encode(u_blocks[l]);
        f.c_blocks[l] = std::move(c);
    }
    return f;
}

DenseF2Matrix build_generator_uep(const UepPstConfig& cfg) {
    const std::size_t n = cfg.n(), k = cfg.k(), L = cfg.perms.size();
    DenseF2Matrix M(k * (L + 1), n * (L + 1));
    for (std::size_t t = 0; t < k; ++t) {
        const BitVector g = cfg.G.row(t);
        // Block row 0: [G, G*P_1, ..., G*P_L].
        for (std::size_t j = 0; j < n; ++j)
            if (g.get(j)) M.set(t, j, 1);
        for (std::size_t l = 1; l <= L; ++l) {
            const BitVector gp = cfg.perms[l - 1].apply(g);
            for (std::size_t j = 0; j < n; ++j)
                if (gp.get(j)) M.set(t, l * n + j, 1);
        }
        // Diagonal blocks.
        for (std::size_t l = 1; l <= L; ++l)
            for (std::size_t j = 0; j < n; ++j)
                if (g.get(j)) M.set(l * k + t, l * n + j, 1);
    }
    return M;
}

ParityCheckMatrix build_parity_check_uep(const UepPstConfig& cfg) {
    const std::size_t n = cfg.n(), m = cfg.H.m(), L = cfg.perms.size();
    std::vector<std::vector<int>> rows(m * (L + 1));
    for (std::size_t r = 0; r < m; ++r) rows[r] = cfg.H.row(r);
    for (std::size_t l = 1; l <= L; ++l) {
        // Layer check r: sum of c(l) over row(r) plus sum of v(0) over the
        // forward images map(i), since c(l)[i] = v(0)[map(i)] xor v(l)[i].
        const Permutation& p = cfg.perms[l - 1];
        for (std::size_t r = 0; r < m; ++r) {
            auto& row = rows[l * m + r];
            for (int i : cfg.H.row(r)) row.push_back(p.map(std::size_t(i)));
            for (int i : cfg.H.row(r)) row.push_back(int(l * n) + i);
        }
    }
    return ParityCheckMatrix(n * (L + 1), std::move(rows));
}

UepPstConfig load_uep_config(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("load_uep_config: cannot open " + json_path);
    nlohmann::json j;
    in >> j;

    const auto& code = j.at("code");
    ParityCheckMatrix H;
    std::uint64_t base_seed = 1;
    const std::string type = code.at("type").get<std::string>();
    if (type == "gallager") {
        const std::size_t n = code.at("n").get<std::size_t>();
        const int dv = code.at("dv").get<int>();
        const int dc = code.at("dc").get<int>();
        const std::uint64_t seed = code.at("seed").get<std::uint64_t>();
        H = construct_gallager_regular(n, dv, dc, seed);
        base_seed = seed;
    } else if (type == "alist") {
        H = load_alist(code.at("path").get<std::string>());
    } else {
        throw std::runtime_error("load_uep_config: unknown code type '" + type + "'");
    }

    const int L = j.at("L").get<int>();
    std::vector<std::uint64_t> seeds;
    if (j.contains("interleaver_seeds")) {
        seeds = j.at("interleaver_seeds").get<std::vector<std::uint64_t>>();
        if (seeds.size() != std::size_t(L))
            throw std::runtime_error("load_uep_config: need one interleaver seed per layer");
    } else {
        const std::uint64_t base = j.value("interleaver_seed_base", base_seed);
        for (int l = 0; l < L; ++l) seeds.push_back(derive_seed(base, 0x17EA5EED + l));
    }
    return make_uep_config(std::move(H), L, seeds);
}

std::string uep_config_to_json(std::size_t n, int dv, int dc, std::uint64_t code_seed,
                               int L, const std::vector<std::uint64_t>& seeds) {
    nlohmann::json j;
    j["code"] = {{"type", "gallager"}, {"n", n}, {"dv", dv}, {"dc", dc}, {"seed", code_seed}};
    j["L"] = L;
    if (!seeds.empty()) j["interleaver_seeds"] = seeds;
    return j.dump(2);
}

} // namespace uep
