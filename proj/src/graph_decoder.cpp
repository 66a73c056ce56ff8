#include "uep/graph_decoder.hpp"

namespace uep {

EdgeMessages init_messages(const LlrVector& llr_channel, std::size_t n, int L) {
    if (L < 1) throw std::invalid_argument("init_messages: need at least one layer");
    if (llr_channel.size() != n * std::size_t(L + 1))
        throw std::invalid_argument("init_messages: expected n*(L+1) channel LLRs");
    EdgeMessages st;
    st.n = n;
    st.L = L;
    st.ch_mid.assign(llr_channel.begin(), llr_channel.begin() + long(n));
    for (auto& x : st.ch_mid) x = clamp_llr(x);
    st.ch_lid.resize(std::size_t(L));
    for (int l = 1; l <= L; ++l) {
        auto& v = st.ch_lid[std::size_t(l - 1)];
        v.assign(llr_channel.begin() + long(n) * l, llr_channel.begin() + long(n) * (l + 1));
        for (auto& x : v) x = clamp_llr(x);
    }
    const LlrVector zero(n, 0.0);
    st.eq_to_c = zero;
    st.c_to_eq = zero;
    st.eq_to_pi.assign(std::size_t(L), zero);
    st.pi_to_eq.assign(std::size_t(L), zero);
    st.pi_to_plus.assign(std::size_t(L), zero);
    st.plus_to_pi.assign(std::size_t(L), zero);
    st.plus_to_c.assign(std::size_t(L), zero);
    st.c_to_plus.assign(std::size_t(L), zero);
    return st;
}

void update_equality_node(EdgeMessages& st) {
    const std::size_t n = st.n;
    const int L = st.L;
    for (std::size_t j = 0; j < n; ++j) {
        double sum = st.ch_mid[j];
        for (int l = 0; l < L; ++l) sum += st.pi_to_eq[std::size_t(l)][j];
        st.eq_to_c[j] = clamp_llr(sum);
        for (int l = 0; l < L; ++l)
            st.eq_to_pi[std::size_t(l)][j] =
                clamp_llr(sum - st.pi_to_eq[std::size_t(l)][j] + st.c_to_eq[j]);
    }
}

void update_superposition_node(int layer, EdgeMessages& st) {
    if (layer < 1 || layer > st.L)
        throw std::invalid_argument("update_superposition_node: layer out of range");
    const std::size_t l = std::size_t(layer - 1);
    for (std::size_t j = 0; j < st.n; ++j) {
        const double ch = st.ch_lid[l][j];
        st.plus_to_c[l][j] = clamp_llr(boxplus(ch, st.pi_to_plus[l][j]));
        st.plus_to_pi[l][j] = clamp_llr(boxplus(ch, st.c_to_plus[l][j]));
    }
}

namespace {

BitVector extract_info(const GeneratorMatrix& G, const BitVector& v) {
    BitVector u(G.k());
    for (std::size_t t = 0; t < G.k(); ++t)
        if (v.get(std::size_t(G.systematic_cols()[t]))) u.set(t, 1);
    return u;
}

} // namespace

DecodeOutcome decode_uep_pst(const UepPstConfig& cfg, const DecoderConfig& dec,
                             const LlrVector& llr_channel) {
    const std::size_t n = cfg.n();
    const int L = cfg.layers();
    EdgeMessages st = init_messages(llr_channel, n, L);

    DecodeOutcome out;
    out.v_hat.assign(std::size_t(L + 1), BitVector(n));
    out.llr_full.assign(std::size_t(L + 1), LlrVector(n, 0.0));
    out.layer_converged.assign(std::size_t(L + 1), 0);

    SpaWorkspace ws;
    SpaResult spa;
    std::vector<Permutation> inv;
    inv.reserve(std::size_t(L));
    for (const auto& p : cfg.perms) inv.push_back(p.inverse());

    for (int j = 1; j <= dec.j_max; ++j) {
        out.global_iterations = j;

        // MID pass: = -> C -> =. The code node restarts from scratch each time.
        update_equality_node(st);
        ws.decode(cfg.H, st.eq_to_c, dec.i_max, spa);
        for (std::size_t i = 0; i < n; ++i) {
            st.c_to_eq[i] = clamp_llr(spa.llr_extrinsic[i]);
            out.llr_full[0][i] = st.eq_to_c[i] + st.c_to_eq[i];
        }
        update_equality_node(st);

        // Layer passes: Pi -> + -> C -> + -> Pi, in layer order.
        for (int layer = 1; layer <= L; ++layer) {
            const std::size_t l = std::size_t(layer - 1);
            st.pi_to_plus[l] = cfg.perms[l].apply(st.eq_to_pi[l]);
            update_superposition_node(layer, st);
            ws.decode(cfg.H, st.plus_to_c[l], dec.i_max, spa);
            for (std::size_t i = 0; i < n; ++i) {
                st.c_to_plus[l][i] = clamp_llr(spa.llr_extrinsic[i]);
                out.llr_full[std::size_t(layer)][i] = st.plus_to_c[l][i] + st.c_to_plus[l][i];
            }
            update_superposition_node(layer, st);
            st.pi_to_eq[l] = inv[l].apply(st.plus_to_pi[l]);
        }

        // Hard decisions from the summed directed messages on each V edge.
        bool all_ok = true;
        for (int layer = 0; layer <= L; ++layer) {
            auto& v = out.v_hat[std::size_t(layer)];
            const auto& full = out.llr_full[std::size_t(layer)];
            for (std::size_t i = 0; i < n; ++i) v.set(i, hard_bit(full[i]));
            const bool ok = is_codeword(cfg.H, v);
            out.layer_converged[std::size_t(layer)] = ok ? 1 : 0;
            all_ok = all_ok && ok;
        }
        if (all_ok) {
            out.success = true;
            if (dec.early_exit) break;
        } else {
            out.success = false;
        }
    }

    out.u_hat.resize(std::size_t(L + 1));
    for (int layer = 0; layer <= L; ++layer)
        out.u_hat[std::size_t(layer)] = extract_info(cfg.G, out.v_hat[std::size_t(layer)]);
    return out;
}

DecodeOutcome decode_as_single_code(const UepPstConfig& cfg, const LlrVector& llr_channel,
                                    int iterations) {
    const std::size_t n = cfg.n();
    const int L = cfg.layers();
    if (llr_channel.size() != n * std::size_t(L + 1))
        throw std::invalid_argument("decode_as_single_code: expected n*(L+1) channel LLRs");

    const ParityCheckMatrix Huep = build_parity_check_uep(cfg);
    const SpaResult spa = spa_decode(Huep, llr_channel, iterations);

    DecodeOutcome out;
    out.success = spa.converged;
    out.global_iterations = spa.iterations_used;
    out.v_hat.assign(std::size_t(L + 1), BitVector(n));
    out.llr_full.assign(std::size_t(L + 1), LlrVector(n, 0.0));
    out.layer_converged.assign(std::size_t(L + 1), 0);

    // c(0) = v(0); v(l) = c(l) xor P_l(c(0)).
    BitVector c0(n);
    for (std::size_t i = 0; i < n; ++i) {
        c0.set(i, spa.hard_decision.get(i));
        out.llr_full[0][i] = spa.llr_full[i];
    }
    out.v_hat[0] = c0;
    for (int layer = 1; layer <= L; ++layer) {
        BitVector v = cfg.perms[std::size_t(layer - 1)].apply(c0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pos = std::size_t(layer) * n + i;
            if (spa.hard_decision.get(pos)) v.flip(i);
            out.llr_full[std::size_t(layer)][i] = spa.llr_full[pos];
        }
        out.v_hat[std::size_t(layer)] = std::move(v);
    }
    out.u_hat.resize(std::size_t(L + 1));
    for (int layer = 0; layer <= L; ++layer) {
        out.layer_converged[std::size_t(layer)] =
            is_codeword(cfg.H, out.v_hat[std::size_t(layer)]) ? 1 : 0;
        out.u_hat[std::size_t(layer)] = extract_info(cfg.G, out.v_hat[std::size_t(layer)]);
    }
    return out;
}

} // namespace uep
