#include "uep/density_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace uep {

int quantize_level(double x, const QuantizerSpec& spec) {
    const int half = spec.half_levels();
    if (!(spec.bits >= 2 && spec.bits <= 16) || !(spec.delta > 0.0))
        throw std::invalid_argument("QuantizerSpec: need 0 < delta and 2 <= bits <= 16");
    const long long r = std::llround(x / spec.delta);
    return int(std::clamp<long long>(r, -half, half));
}

double quantize(double x, const QuantizerSpec& spec) {
    return quantize_level(x, spec) * spec.delta;
}

double QuantizedPmf::total() const {
    double s = 0.0;
    for (double v : mass_) s += v;
    return s;
}

void QuantizedPmf::normalize() {
    double s = 0.0;
    for (double& v : mass_) {
        if (v < 0.0) v = 0.0; // floating-point dust from the transforms
        s += v;
    }
    if (s <= 0.0) throw std::runtime_error("QuantizedPmf::normalize: empty pmf");
    const double inv = 1.0 / s;
    for (double& v : mass_) v *= inv;
}

QuantizedPmf point_mass(const QuantizerSpec& spec, double value) {
    QuantizedPmf p(spec);
    p[std::size_t(quantize_level(value, spec) + spec.half_levels())] = 1.0;
    return p;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void check_same_spec(const QuantizedPmf& a, const QuantizedPmf& b, const char* who) {
    if (!(a.spec() == b.spec()))
        throw std::invalid_argument(std::string(who) + ": mismatched quantizer specs");
}

// Precomputed run-length structure of the check-kernel rows. Row i lists, as
// j sweeps the grid, the maximal runs on which Q(boxplus(v_i, v_j)) is
// constant; boxplus is monotone in its second argument so runs are contiguous.
struct CheckKernelTable {
    int grid = 0;
    std::vector<std::uint32_t> row_ptr;  // grid+1 entries into the run arrays
    std::vector<std::uint16_t> run_end;  // exclusive end of each run
    std::vector<std::uint16_t> run_out;  // output level index of each run
};

std::shared_ptr<const CheckKernelTable> check_kernel_for(const QuantizerSpec& spec) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::shared_ptr<const CheckKernelTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_pair(spec.bits, spec.delta);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    auto tbl = std::make_shared<CheckKernelTable>();
    const int M = spec.grid_size();
    const int half = spec.half_levels();
    tbl->grid = M;
    tbl->row_ptr.resize(std::size_t(M) + 1, 0);
    std::vector<double> value(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) value[std::size_t(i)] = (i - half) * spec.delta;
    for (int i = 0; i < M; ++i) {
        tbl->row_ptr[std::size_t(i)] = std::uint32_t(tbl->run_end.size());
        int prev = quantize_level(boxplus(value[std::size_t(i)], value[0]), spec) + half;
        for (int j = 1; j < M; ++j) {
            const int out =
                quantize_level(boxplus(value[std::size_t(i)], value[std::size_t(j)]), spec) + half;
            if (out != prev) {
                tbl->run_end.push_back(std::uint16_t(j));
                tbl->run_out.push_back(std::uint16_t(prev));
                prev = out;
            }
        }
        tbl->run_end.push_back(std::uint16_t(M));
        tbl->run_out.push_back(std::uint16_t(prev));
    }
    tbl->row_ptr[std::size_t(M)] = std::uint32_t(tbl->run_end.size());
    cache.emplace(key, tbl);
    return tbl;
}

} // namespace

QuantizedPmf transform_S(const QuantizedPmf& P, const QuantizedPmf& Pp) {
    check_same_spec(P, Pp, "transform_S");
    const int M = P.spec().grid_size();
    // Full linear convolution over level sums, then tails fold into the
    // saturation bins (index f holds level sum f - (M-1)).
    std::vector<double> full(std::size_t(2 * M - 1), 0.0);
    const double* b = Pp.masses().data();
    for (int i = 0; i < M; ++i) {
        const double pi = P[std::size_t(i)];
        if (pi == 0.0) continue;
        double* out = full.data() + i;
        for (int j = 0; j < M; ++j) out[j] += pi * b[j];
    }
    QuantizedPmf R(P.spec());
    const int half = P.spec().half_levels();
    double lo = 0.0, hi = 0.0;
    for (int f = 0; f <= half; ++f) lo += full[std::size_t(f)];
    for (int f = 3 * half; f <= 4 * half; ++f) hi += full[std::size_t(f)];
    R[0] = lo;
    R[std::size_t(M - 1)] = hi;
    for (int f = half + 1; f < 3 * half; ++f) R[std::size_t(f - half)] = full[std::size_t(f)];
    return R;
}

QuantizedPmf transform_T(const QuantizedPmf& P, const QuantizedPmf& Pp) {
    check_same_spec(P, Pp, "transform_T");
    const auto tbl = check_kernel_for(P.spec());
    const int M = tbl->grid;
    QuantizedPmf R(P.spec());
    const double* b = Pp.masses().data();
    for (int i = 0; i < M; ++i) {
        const double pi = P[std::size_t(i)];
        if (pi == 0.0) continue;
        std::uint32_t r = tbl->row_ptr[std::size_t(i)];
        const std::uint32_t r_end = tbl->row_ptr[std::size_t(i) + 1];
        int j = 0;
        for (; r < r_end; ++r) {
            const int end = tbl->run_end[r];
            double acc = 0.0;
            for (; j < end; ++j) acc += b[j];
            R[tbl->run_out[r]] += pi * acc;
        }
    }
    return R;
}

QuantizedPmf fold_S_pow(const QuantizedPmf& P, int n) {
    if (n < 0) throw std::invalid_argument("fold_S_pow: negative power");
    if (n == 0) return point_mass(P.spec(), 0.0);
    QuantizedPmf r = P;
    for (int i = 1; i < n; ++i) {
        r = transform_S(r, P);
        r.normalize();
    }
    return r;
}

QuantizedPmf fold_T_pow(const QuantizedPmf& P, int n) {
    if (n < 1) throw std::invalid_argument("fold_T_pow: need at least one factor");
    QuantizedPmf r = P;
    for (int i = 1; i < n; ++i) {
        r = transform_T(r, P);
        r.normalize();
    }
    return r;
}

double error_probability(const QuantizedPmf& P) {
    const int half = P.spec().half_levels();
    double e = 0.0;
    for (int i = 0; i < half; ++i) e += P[std::size_t(i)];
    return e + 0.5 * P[std::size_t(half)];
}

QuantizedPmf channel_pmf_awgn(double sigma2, const QuantizerSpec& spec) {
    if (sigma2 <= 0.0) throw std::invalid_argument("channel_pmf_awgn: sigma2 must be positive");
    const double mu = 2.0 / sigma2;
    const double sd = 2.0 / std::sqrt(sigma2);
    const int half = spec.half_levels();
    QuantizedPmf P(spec);
    for (int lvl = -half; lvl <= half; ++lvl) {
        const double lo = lvl == -half ? -1e308 : (lvl - 0.5) * spec.delta;
        const double hi = lvl == half ? 1e308 : (lvl + 0.5) * spec.delta;
        const double m = normal_cdf((hi - mu) / sd) - normal_cdf((lo - mu) / sd);
        P[std::size_t(lvl + half)] = m;
    }
    P.normalize();
    return P;
}

QuantizedPmf de_ldpc_internal(const QuantizedPmf& input, int dv, int dc, int i_max) {
    if (dv < 2 || dc <= dv) throw std::invalid_argument("de_ldpc_internal: bad degrees");
    if (i_max < 0) throw std::invalid_argument("de_ldpc_internal: negative iteration count");
    QuantizedPmf v2c = input;
    QuantizedPmf c2v = point_mass(input.spec(), 0.0);
    for (int it = 1; it <= i_max; ++it) {
        QuantizedPmf next_c2v = fold_T_pow(v2c, dc - 1);
        next_c2v.normalize();
        // Fixed-point early exit; threshold well under any quantity we track.
        double l1 = 0.0;
        for (std::size_t i = 0; i < next_c2v.size(); ++i)
            l1 += std::abs(next_c2v[i] - c2v[i]);
        c2v = std::move(next_c2v);
        if (l1 <= 1e-14 && it > 1) break;
        QuantizedPmf agg = transform_S(input, fold_S_pow(c2v, dv - 1));
        agg.normalize();
        v2c = std::move(agg);
    }
    QuantizedPmf ext = fold_S_pow(c2v, dv);
    ext.normalize();
    return ext;
}

DeState make_de_state(int L, double sigma2, const QuantizerSpec& spec) {
    if (L < 1) throw std::invalid_argument("make_de_state: need at least one layer");
    DeState st;
    st.L = L;
    st.ch_mid = channel_pmf_awgn(sigma2, spec);
    st.ch_lid = st.ch_mid;
    st.x_plus_to_eq = point_mass(spec, 0.0);
    st.x_eq_to_plus = point_mass(spec, 0.0);
    st.v_plus_to_c = point_mass(spec, 0.0);
    st.v_c_to_plus = point_mass(spec, 0.0);
    st.v0_eq_to_c = point_mass(spec, 0.0);
    st.v0_c_to_eq = point_mass(spec, 0.0);
    return st;
}

void de_equality_to_code(DeState& st) {
    QuantizedPmf s = transform_S(st.ch_mid, fold_S_pow(st.x_plus_to_eq, st.L));
    s.normalize();
    st.v0_eq_to_c = std::move(s);
}

void de_equality_to_layer(DeState& st) {
    QuantizedPmf chv = transform_S(st.ch_mid, st.v0_c_to_eq);
    chv.normalize();
    QuantizedPmf s = transform_S(chv, fold_S_pow(st.x_plus_to_eq, st.L - 1));
    s.normalize();
    st.x_eq_to_plus = std::move(s);
}

void de_superposition(DeState& st) {
    QuantizedPmf a = transform_T(st.ch_lid, st.x_eq_to_plus);
    a.normalize();
    QuantizedPmf b = transform_T(st.ch_lid, st.v_c_to_plus);
    b.normalize();
    st.v_plus_to_c = std::move(a);
    st.x_plus_to_eq = std::move(b);
}

namespace {

double ebn0_to_sigma2(double ebn0_db, int dv, int dc) {
    const double rate = 1.0 - double(dv) / double(dc);
    return 1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0));
}

struct StreamTracker {
    double floor, rel;
    int window;
    std::vector<double> hist;

    bool below_floor() const { return !hist.empty() && hist.back() < floor; }
    bool stagnant() const {
        const int n = int(hist.size());
        if (n <= window) return false;
        const double a = hist[std::size_t(n - 1 - window)];
        const double b = hist.back();
        return std::abs(a - b) <= rel * std::max(a, 1e-300);
    }
    bool resolved() const { return below_floor() || stagnant(); }
};

} // namespace

DeTrajectory evolve_uep(int L, double ebn0_db, const DeOptions& opts) {
    const double sigma2 = ebn0_to_sigma2(ebn0_db, opts.dv, opts.dc);
    DeState st = make_de_state(L, sigma2, opts.spec);

    StreamTracker mid{opts.floor, opts.stagnation_rel, opts.stagnation_window, {}};
    StreamTracker lid{opts.floor, opts.stagnation_rel, opts.stagnation_window, {}};
    // Initialization point: the MID sees only the channel, the layers nothing.
    mid.hist.push_back(error_probability(st.ch_mid));
    lid.hist.push_back(0.5);

    DeTrajectory out;
    for (int j = 1; j <= opts.max_global; ++j) {
        out.iterations = j;
        de_equality_to_code(st);
        st.v0_c_to_eq = de_ldpc_internal(st.v0_eq_to_c, opts.dv, opts.dc, opts.i_max);
        QuantizedPmf full_mid = transform_S(st.v0_eq_to_c, st.v0_c_to_eq);
        full_mid.normalize();
        mid.hist.push_back(error_probability(full_mid));

        de_equality_to_layer(st);
        de_superposition(st); // refreshes the message into the layer code node
        st.v_c_to_plus = de_ldpc_internal(st.v_plus_to_c, opts.dv, opts.dc, opts.i_max);
        QuantizedPmf full_lid = transform_S(st.v_plus_to_c, st.v_c_to_plus);
        full_lid.normalize();
        lid.hist.push_back(error_probability(full_lid));
        de_superposition(st); // refreshes the feedback toward the equality node

        if (mid.resolved() && lid.resolved()) break;
    }
    out.mid_converged = mid.below_floor();
    out.lid_converged = lid.below_floor();
    out.mid_ber = std::move(mid.hist);
    out.lid_ber = std::move(lid.hist);
    return out;
}

DeTrajectory evolve_ldpc(double ebn0_db, const DeOptions& opts) {
    const double sigma2 = ebn0_to_sigma2(ebn0_db, opts.dv, opts.dc);
    const QuantizedPmf ch = channel_pmf_awgn(sigma2, opts.spec);

    StreamTracker t{opts.floor, opts.stagnation_rel, opts.stagnation_window, {}};
    t.hist.push_back(error_probability(ch));

    DeTrajectory out;
    QuantizedPmf v2c = ch;
    for (int it = 1; it <= opts.max_global; ++it) {
        out.iterations = it;
        QuantizedPmf c2v = fold_T_pow(v2c, opts.dc - 1);
        c2v.normalize();
        QuantizedPmf s = transform_S(ch, fold_S_pow(c2v, opts.dv - 1));
        s.normalize();
        v2c = std::move(s);
        QuantizedPmf full = transform_S(ch, fold_S_pow(c2v, opts.dv));
        full.normalize();
        t.hist.push_back(error_probability(full));
        if (t.resolved()) break;
    }
    out.mid_converged = t.below_floor();
    out.lid_converged = out.mid_converged;
    out.mid_ber = t.hist;
    out.lid_ber = std::move(t.hist);
    return out;
}

namespace {

double bisect_threshold(const std::function<bool(double)>& converges, double lo, double hi,
                        double tol_db) {
    if (tol_db <= 0.0) throw std::invalid_argument("threshold search: tolerance must be positive");
    if (converges(lo) || !converges(hi))
        throw std::runtime_error("threshold search: bracket does not straddle the threshold");
    while (hi - lo > tol_db) {
        const double mid = 0.5 * (lo + hi);
        if (converges(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double threshold_search(DeStream stream, int L, const DeOptions& opts, double tol_db,
                        double lo_db, double hi_db) {
    auto conv = [&](double x) {
        const DeTrajectory t = evolve_uep(L, x, opts);
        return stream == DeStream::Mid ? t.mid_converged : t.lid_converged;
    };
    return bisect_threshold(conv, lo_db, hi_db, tol_db);
}

double ldpc_threshold(const DeOptions& opts, double tol_db, double lo_db, double hi_db) {
    auto conv = [&](double x) { return evolve_ldpc(x, opts).mid_converged; };
    return bisect_threshold(conv, lo_db, hi_db, tol_db);
}

} // namespace uep
