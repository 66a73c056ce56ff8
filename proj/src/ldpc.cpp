#include "uep/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace uep {

ParityCheckMatrix::ParityCheckMatrix(std::size_t n, std::vector<std::vector<int>> rows)
    : n_(n), row_adj_(std::move(rows)) {
    if (n_ == 0) throw std::invalid_argument("ParityCheckMatrix: n must be positive");
    if (row_adj_.empty() || row_adj_.size() >= n_)
        throw std::invalid_argument("ParityCheckMatrix: need 0 < m < n");
    col_adj_.assign(n_, {});
    for (std::size_t r = 0; r < row_adj_.size(); ++r) {
        auto& row = row_adj_[r];
        std::sort(row.begin(), row.end());
        for (std::size_t i = 0; i < row.size(); ++i) {
            const int c = row[i];
            if (c < 0 || std::size_t(c) >= n_)
                throw std::invalid_argument("ParityCheckMatrix: column index out of range");
            if (i > 0 && row[i - 1] == c)
                throw std::invalid_argument("ParityCheckMatrix: duplicate entry (2-cycle)");
            col_adj_[c].push_back(int(r));
        }
        edges_ += row.size();
    }
}

ParityCheckMatrix construct_gallager_regular(std::size_t n, int dv, int dc,
                                             std::uint64_t seed) {
    if (dv < 2) throw std::invalid_argument("construct_gallager_regular: dv must be >= 2");
    if (dc <= dv) throw std::invalid_argument("construct_gallager_regular: dc must exceed dv");
    if (n * std::size_t(dv) % std::size_t(dc) != 0)
        throw std::invalid_argument("construct_gallager_regular: n*dv must be divisible by dc");
    const std::size_t m = n * std::size_t(dv) / std::size_t(dc);
    if (m == 0 || m >= n)
        throw std::invalid_argument("construct_gallager_regular: need 0 < m < n");

    const std::size_t E = n * std::size_t(dv);
    std::vector<int> socket(E);
    for (std::size_t e = 0; e < E; ++e) socket[e] = int(e / std::size_t(dv));

    Rng rng(seed);
    rng.shuffle(socket);

    // Check j owns sockets [j*dc, (j+1)*dc). Resolve parallel edges by swapping
    // a colliding socket with a uniformly drawn one and rechecking.
    const int budget = 200000;
    int attempts = 0;
    std::vector<char> seen(n, 0);
    bool clean = false;
    while (!clean) {
        clean = true;
        for (std::size_t j = 0; j < m && clean; ++j) {
            const std::size_t base = j * std::size_t(dc);
            for (int t = 0; t < dc; ++t) seen[socket[base + t]] = 0;
            for (int t = 0; t < dc; ++t) {
                const int v = socket[base + t];
                if (seen[v]) {
                    if (++attempts > budget)
                        throw std::runtime_error(
                            "construct_gallager_regular: could not resolve parallel edges");
                    std::swap(socket[base + t], socket[rng.next_below(E)]);
                    clean = false;
                    break;
                }
                seen[v] = 1;
            }
        }
    }

    std::vector<std::vector<int>> rows(m);
    for (std::size_t j = 0; j < m; ++j) {
        rows[j].assign(socket.begin() + j * dc, socket.begin() + (j + 1) * dc);
    }
    return ParityCheckMatrix(n, std::move(rows));
}

namespace {

// Dense packed copy of H with full row reduction; shared by derive_generator.
struct ReducedForm {
    std::vector<BitVector> rows;   // reduced rows, one per pivot
    std::vector<int> pivot_cols;   // pivot column of rows[i]
    std::vector<int> free_cols;
};

ReducedForm reduce(const ParityCheckMatrix& H) {
    const std::size_t m = H.m(), n = H.n();
    std::vector<BitVector> rows(m, BitVector(n));
    for (std::size_t r = 0; r < m; ++r)
        for (int c : H.row(r)) rows[r].set(std::size_t(c), 1);

    ReducedForm rf;
    std::size_t rank = 0;
    std::vector<char> is_pivot(n, 0);
    for (std::size_t c = 0; c < n && rank < m; ++c) {
        std::size_t pr = rank;
        while (pr < m && !rows[pr].get(c)) ++pr;
        if (pr == m) continue;
        std::swap(rows[rank], rows[pr]);
        for (std::size_t r = 0; r < m; ++r)
            if (r != rank && rows[r].get(c)) rows[r] ^= rows[rank];
        rf.pivot_cols.push_back(int(c));
        is_pivot[c] = 1;
        ++rank;
    }
    rows.resize(rank);
    rf.rows = std::move(rows);
    for (std::size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) rf.free_cols.push_back(int(c));
    return rf;
}

} // namespace

GeneratorMatrix derive_generator(const ParityCheckMatrix& H) {
    const ReducedForm rf = reduce(H);
    GeneratorMatrix G;
    G.n_ = H.n();
    G.systematic_cols_ = rf.free_cols;
    G.parity_cols_ = rf.pivot_cols;
    const std::size_t k = rf.free_cols.size();
    const std::size_t r = rf.pivot_cols.size();
    G.parity_rows_.assign(k, BitVector(r));
    // Reduced row i: x[pivot_cols[i]] = sum over free cols f of rows[i][f]*x[f].
    for (std::size_t t = 0; t < k; ++t)
        for (std::size_t i = 0; i < r; ++i)
            if (rf.rows[i].get(std::size_t(rf.free_cols[t])))
                G.parity_rows_[t].set(i, 1);
    return G;
}

BitVector GeneratorMatrix::row(std::size_t t) const {
    BitVector v(n_);
    v.set(std::size_t(systematic_cols_[t]), 1);
    for (std::size_t i = 0; i < parity_cols_.size(); ++i)
        if (parity_rows_[t].get(i)) v.set(std::size_t(parity_cols_[i]), 1);
    return v;
}

BitVector GeneratorMatrix::encode(const BitVector& u) const {
    if (u.size() != k()) throw std::invalid_argument("encode: info length mismatch");
    BitVector parity(parity_cols_.size());
    for (std::size_t t = 0; t < u.size(); ++t)
        if (u.get(t)) parity ^= parity_rows_[t];
    BitVector v(n_);
    for (std::size_t t = 0; t < u.size(); ++t)
        if (u.get(t)) v.set(std::size_t(systematic_cols_[t]), 1);
    for (std::size_t i = 0; i < parity_cols_.size(); ++i)
        if (parity.get(i)) v.set(std::size_t(parity_cols_[i]), 1);
    return v;
}

bool is_codeword(const ParityCheckMatrix& H, const BitVector& v) {
    if (v.size() != H.n()) throw std::invalid_argument("is_codeword: length mismatch");
    for (std::size_t r = 0; r < H.m(); ++r) {
        int parity = 0;
        for (int c : H.row(r)) parity ^= v.get(std::size_t(c));
        if (parity) return false;
    }
    return true;
}

void SpaWorkspace::build(const ParityCheckMatrix& H) {
    const std::size_t m = H.m();
    row_ptr_.assign(m + 1, 0);
    for (std::size_t r = 0; r < m; ++r)
        row_ptr_[r + 1] = row_ptr_[r] + int(H.row(r).size());
    edge_var_.resize(std::size_t(row_ptr_[m]));
    var_edges_.assign(H.n(), {});
    for (std::size_t r = 0; r < m; ++r) {
        int e = row_ptr_[r];
        for (int c : H.row(r)) {
            edge_var_[std::size_t(e)] = c;
            var_edges_[std::size_t(c)].push_back(e);
            ++e;
        }
    }
    alpha_.resize(edge_var_.size());
    beta_.resize(edge_var_.size());
    std::size_t max_deg = 0;
    for (std::size_t r = 0; r < m; ++r) max_deg = std::max(max_deg, H.row(r).size());
    tanh_buf_.resize(2 * max_deg);
    built_for_ = &H;
}

void SpaWorkspace::decode(const ParityCheckMatrix& H, const LlrVector& llr_in,
                          int max_iterations, SpaResult& out) {
    if (llr_in.size() != H.n()) throw std::invalid_argument("spa_decode: LLR length mismatch");
    if (max_iterations < 1) throw std::invalid_argument("spa_decode: need at least one iteration");
    if (built_for_ != &H) build(H);

    const std::size_t n = H.n(), m = H.m();
    out.llr_full.resize(n);
    out.llr_extrinsic.assign(n, 0.0);
    if (out.hard_decision.size() != n) out.hard_decision = BitVector(n);

    // out.llr_full temporarily holds the clamped input.
    for (std::size_t v = 0; v < n; ++v) out.llr_full[v] = clamp_llr(llr_in[v]);
    for (std::size_t e = 0; e < edge_var_.size(); ++e)
        beta_[e] = out.llr_full[std::size_t(edge_var_[e])];

    out.converged = false;
    out.iterations_used = 0;
    const std::size_t half = tanh_buf_.size() / 2;
    double* fb = tanh_buf_.data();
    double* bb = tanh_buf_.data() + half;
    for (int it = 1; it <= max_iterations; ++it) {
        // Check update: leave-one-out tanh products via forward/backward scans.
        for (std::size_t r = 0; r < m; ++r) {
            const int lo = row_ptr_[r], hi = row_ptr_[r + 1];
            double p = 1.0;
            for (int e = lo; e < hi; ++e) {
                fb[e - lo] = p;
                p *= std::tanh(0.5 * beta_[std::size_t(e)]);
            }
            p = 1.0;
            for (int e = hi - 1; e >= lo; --e) {
                bb[e - lo] = p;
                p *= std::tanh(0.5 * beta_[std::size_t(e)]);
            }
            for (int e = lo; e < hi; ++e) {
                const double t = fb[e - lo] * bb[e - lo];
                alpha_[std::size_t(e)] = clamp_llr(2.0 * std::atanh(t));
            }
        }
        // Variable update and decision.
        for (std::size_t v = 0; v < n; ++v) {
            double sum = 0.0;
            for (int e : var_edges_[v]) sum += alpha_[std::size_t(e)];
            out.llr_extrinsic[v] = sum;
            const double in = clamp_llr(llr_in[v]);
            for (int e : var_edges_[v])
                beta_[std::size_t(e)] = clamp_llr(in + sum - alpha_[std::size_t(e)]);
            out.hard_decision.set(v, hard_bit(in + sum));
        }
        out.iterations_used = it;
        // Syndrome check for early exit.
        bool ok = true;
        for (std::size_t r = 0; r < m && ok; ++r) {
            int parity = 0;
            for (int e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e)
                parity ^= out.hard_decision.get(std::size_t(edge_var_[std::size_t(e)]));
            ok = (parity == 0);
        }
        if (ok) {
            out.converged = true;
            break;
        }
    }
    for (std::size_t v = 0; v < n; ++v)
        out.llr_full[v] = out.llr_extrinsic[v] + clamp_llr(llr_in[v]);
}

SpaResult spa_decode(const ParityCheckMatrix& H, const LlrVector& llr_in,
                     int max_iterations) {
    SpaWorkspace ws;
    SpaResult out;
    ws.decode(H, llr_in, max_iterations, out);
    return out;
}

namespace {

std::vector<std::string> read_nonempty_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        // Strip CR and skip blank lines.
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        bool blank = true;
        for (char ch : line)
            if (!isspace(static_cast<unsigned char>(ch))) blank = false;
        if (!blank) lines.push_back(line);
    }
    return lines;
}

std::vector<long> parse_ints(const std::string& line, const char* what) {
    std::istringstream ss(line);
    std::vector<long> out;
    long v;
    while (ss >> v) out.push_back(v);
    if (!ss.eof()) throw AlistParseError(std::string("alist: non-numeric token in ") + what);
    return out;
}

} // namespace

ParityCheckMatrix load_alist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw AlistParseError("alist: cannot open " + path);
    const auto lines = read_nonempty_lines(in);
    if (lines.size() < 4) throw AlistParseError("alist: truncated header");

    const auto hdr = parse_ints(lines[0], "header");
    if (hdr.size() != 2 || hdr[0] <= 0 || hdr[1] <= 0)
        throw AlistParseError("alist: malformed header (expected 'n m')");
    const std::size_t n = std::size_t(hdr[0]), m = std::size_t(hdr[1]);

    const auto maxdeg = parse_ints(lines[1], "max degrees");
    if (maxdeg.size() != 2) throw AlistParseError("alist: malformed max-degree line");

    const auto col_deg = parse_ints(lines[2], "column degrees");
    const auto row_deg = parse_ints(lines[3], "row degrees");
    if (col_deg.size() != n) throw AlistParseError("alist: column degree count mismatch");
    if (row_deg.size() != m) throw AlistParseError("alist: row degree count mismatch");

    if (lines.size() < 4 + n + m) throw AlistParseError("alist: truncated entry lists");

    // Column lists are read for validation; the matrix is built from row lists.
    std::vector<std::vector<int>> col_entries(n);
    for (std::size_t c = 0; c < n; ++c) {
        auto vals = parse_ints(lines[4 + c], "column entries");
        std::vector<int> entries;
        for (long v : vals) {
            if (v == 0) continue; // zero padding
            if (v < 1 || v > long(m))
                throw AlistParseError("alist: column entry out of range");
            entries.push_back(int(v - 1));
        }
        if (entries.size() != std::size_t(col_deg[c]))
            throw AlistParseError("alist: column entries inconsistent with stated degree");
        col_entries[c] = std::move(entries);
    }

    std::vector<std::vector<int>> rows(m);
    for (std::size_t r = 0; r < m; ++r) {
        auto vals = parse_ints(lines[4 + n + r], "row entries");
        for (long v : vals) {
            if (v == 0) continue;
            if (v < 1 || v > long(n))
                throw AlistParseError("alist: row entry out of range");
            rows[r].push_back(int(v - 1));
        }
        if (rows[r].size() != std::size_t(row_deg[r]))
            throw AlistParseError("alist: row entries inconsistent with stated degree");
    }

    ParityCheckMatrix H(n, std::move(rows));
    // Cross-check the two adjacency lists.
    for (std::size_t c = 0; c < n; ++c) {
        auto want = col_entries[c];
        std::sort(want.begin(), want.end());
        if (want != H.col(c))
            throw AlistParseError("alist: row and column lists disagree");
    }
    return H;
}

void save_alist(const std::string& path, const ParityCheckMatrix& H) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_alist: cannot open " + path);
    const std::size_t n = H.n(), m = H.m();
    std::size_t max_col = 0, max_row = 0;
    for (std::size_t c = 0; c < n; ++c) max_col = std::max(max_col, H.col(c).size());
    for (std::size_t r = 0; r < m; ++r) max_row = std::max(max_row, H.row(r).size());
    out << n << " " << m << "\n" << max_col << " " << max_row << "\n";
    for (std::size_t c = 0; c < n; ++c) out << H.col(c).size() << (c + 1 < n ? " " : "\n");
    for (std::size_t r = 0; r < m; ++r) out << H.row(r).size() << (r + 1 < m ? " " : "\n");
    for (std::size_t c = 0; c < n; ++c) {
        const auto& col = H.col(c);
        for (std::size_t i = 0; i < max_col; ++i) {
            const long v = i < col.size() ? long(col[i]) + 1 : 0;
            out << v << (i + 1 < max_col ? " " : "");
        }
        out << "\n";
    }
    for (std::size_t r = 0; r < m; ++r) {
        const auto& row = H.row(r);
        for (std::size_t i = 0; i < max_row; ++i) {
            const long v = i < row.size() ? long(row[i]) + 1 : 0;
            out << v << (i + 1 < max_row ? " " : "");
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("save_alist: write failed for " + path);
}

} // namespace uep
