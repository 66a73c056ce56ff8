#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace uep {

// Packed binary vector over F2.
class BitVector {
  public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }

    int get(std::size_t i) const {
        return int((words_[i >> 6] >> (i & 63)) & 1u);
    }
    void set(std::size_t i, int bit) {
        const std::uint64_t mask = std::uint64_t(1) << (i & 63);
        if (bit)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

    void clear() {
        for (auto& w : words_) w = 0;
    }

    BitVector& operator^=(const BitVector& o) {
        if (o.n_ != n_) throw std::invalid_argument("BitVector xor: size mismatch");
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
        return *this;
    }

    bool operator==(const BitVector& o) const {
        return n_ == o.n_ && words_ == o.words_;
    }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto w : words_) c += std::size_t(__builtin_popcountll(w));
        return c;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

  private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

// Dense binary matrix, one packed row per BitVector. Small utility used for
// generator matrices and algebraic cross-checks; not meant for huge sizes.
class DenseF2Matrix {
  public:
    DenseF2Matrix() = default;
    DenseF2Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows, BitVector(cols)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    BitVector& row(std::size_t r) { return data_[r]; }
    const BitVector& row(std::size_t r) const { return data_[r]; }

    int get(std::size_t r, std::size_t c) const { return data_[r].get(c); }
    void set(std::size_t r, std::size_t c, int b) { data_[r].set(c, b); }

    // v * M for a row vector v of length rows().
    BitVector left_multiply(const BitVector& v) const {
        if (v.size() != rows_) throw std::invalid_argument("left_multiply: size mismatch");
        BitVector out(cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            if (v.get(r)) out ^= data_[r];
        return out;
    }

    // Dot product of packed rows; parity of the AND.
    static int parity_and(const BitVector& a, const BitVector& b) {
        if (a.size() != b.size()) throw std::invalid_argument("parity_and: size mismatch");
        std::uint64_t acc = 0;
        const auto& wa = a.words();
        const auto& wb = b.words();
        for (std::size_t i = 0; i < wa.size(); ++i) acc ^= wa[i] & wb[i];
        return __builtin_parityll(acc);
    }

    // M * other^T == 0 check, used for generator/parity-check consistency.
    bool product_with_transpose_is_zero(const DenseF2Matrix& other) const {
        if (cols_ != other.cols_)
            throw std::invalid_argument("product_with_transpose_is_zero: size mismatch");
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t q = 0; q < other.rows_; ++q)
                if (parity_and(data_[r], other.data_[q])) return false;
        return true;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<BitVector> data_;
};

} // namespace uep
