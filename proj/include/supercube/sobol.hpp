#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "supercube/rng.hpp"

namespace supercube {

/// Sobol low-discrepancy sequence (Joe-Kuo direction numbers, dimensions up to
/// 16), with Matousek linear matrix scrambling plus a digital shift. Each
/// (seed, randomization) pair gives an independent randomization whose sample
/// mean is an unbiased estimator; confidence intervals come from replicates.
class ScrambledSobol {
  public:
    static constexpr int kMaxDim = 16;
    static constexpr int kBits = 32;

    ScrambledSobol(int dim, std::uint64_t seed, std::uint64_t randomization) : dim_(dim) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("ScrambledSobol: dimension must be 1..16");
        std::vector<std::vector<std::uint32_t>> dirs = direction_numbers(dim);
        RngStream scramble(seed, "sobol-scramble", randomization);
        state_.assign(static_cast<size_t>(dim), 0);
        shift_.resize(static_cast<size_t>(dim));
        scrambled_.assign(static_cast<size_t>(dim), std::vector<std::uint32_t>(kBits));
        for (int d = 0; d < dim; ++d) {
            // Random nonsingular lower-triangular bit matrix, unit diagonal.
            std::uint32_t rows[kBits];
            for (int r = 0; r < kBits; ++r) {
                const std::uint32_t below = r == 0 ? 0u : (scramble.next_u32() & ((1u << r) - 1u));
                rows[r] = below | (1u << r);
            }
            for (int k = 0; k < kBits; ++k) {
                const std::uint32_t v = dirs[static_cast<size_t>(d)][static_cast<size_t>(k)];
                std::uint32_t out = 0;
                for (int r = 0; r < kBits; ++r)
                    out |= static_cast<std::uint32_t>(std::popcount(rows[r] & v) & 1) << r;
                scrambled_[static_cast<size_t>(d)][static_cast<size_t>(k)] = out;
            }
            shift_[static_cast<size_t>(d)] = scramble.next_u32();
        }
    }

    int dim() const { return dim_; }

    /// Writes the next point into `u`; components lie strictly inside (0,1).
    void next(std::vector<double>& u) {
        u.resize(static_cast<size_t>(dim_));
        if (index_ > 0) {
            const int c = std::countr_zero(~(index_ - 1));  // Gray-code flip bit
            for (int d = 0; d < dim_; ++d)
                state_[static_cast<size_t>(d)] ^= scrambled_[static_cast<size_t>(d)][static_cast<size_t>(c)];
        }
        for (int d = 0; d < dim_; ++d) {
            const std::uint32_t bits = state_[static_cast<size_t>(d)] ^ shift_[static_cast<size_t>(d)];
            u[static_cast<size_t>(d)] = (static_cast<double>(bits) + 0.5) * 0x1.0p-32;
        }
        ++index_;
    }

    /// Unscrambled direction numbers, bit k holding v_k as a 32-bit fraction.
    static std::vector<std::vector<std::uint32_t>> direction_numbers(int dim) {
        // Primitive polynomial degree s, coefficient bits a, initial m values.
        struct Row {
            int s;
            std::uint32_t a;
            std::uint32_t m[6];
        };
        static constexpr Row kTable[] = {
            {1, 0, {1, 0, 0, 0, 0, 0}},           // dim 2
            {2, 1, {1, 3, 0, 0, 0, 0}},           // dim 3
            {3, 1, {1, 3, 1, 0, 0, 0}},           // dim 4
            {3, 2, {1, 1, 1, 0, 0, 0}},           // dim 5
            {4, 1, {1, 1, 3, 3, 0, 0}},           // dim 6
            {4, 4, {1, 3, 5, 13, 0, 0}},          // dim 7
            {5, 2, {1, 1, 5, 5, 17, 0}},          // dim 8
            {5, 4, {1, 1, 5, 5, 5, 0}},           // dim 9
            {5, 7, {1, 1, 7, 11, 19, 0}},         // dim 10
            {5, 11, {1, 1, 5, 1, 1, 0}},          // dim 11
            {5, 13, {1, 1, 1, 3, 11, 0}},         // dim 12
            {5, 14, {1, 3, 5, 5, 31, 0}},         // dim 13
            {6, 1, {1, 3, 3, 9, 7, 49}},          // dim 14
            {6, 13, {1, 1, 1, 15, 21, 21}},       // dim 15
            {6, 16, {1, 3, 1, 13, 27, 49}},       // dim 16
        };
        std::vector<std::vector<std::uint32_t>> dirs(static_cast<size_t>(dim),
                                                     std::vector<std::uint32_t>(kBits));
        // First dimension: van der Corput in base 2.
        for (int k = 0; k < kBits; ++k) dirs[0][static_cast<size_t>(k)] = 1u << (kBits - 1 - k);
        for (int d = 1; d < dim; ++d) {
            const Row& row = kTable[d - 1];
            std::uint32_t m[kBits];
            for (int k = 0; k < row.s; ++k) m[k] = row.m[k];
            for (int k = row.s; k < kBits; ++k) {
                m[k] = m[k - row.s] ^ (m[k - row.s] << row.s);
                for (int i = 1; i < row.s; ++i)
                    if ((row.a >> (row.s - 1 - i)) & 1u) m[k] ^= m[k - i] << i;
            }
            for (int k = 0; k < kBits; ++k)
                dirs[static_cast<size_t>(d)][static_cast<size_t>(k)] = m[k] << (kBits - 1 - k);
        }
        return dirs;
    }

  private:
    int dim_;
    std::uint64_t index_ = 0;
    std::vector<std::uint32_t> state_;
    std::vector<std::uint32_t> shift_;
    std::vector<std::vector<std::uint32_t>> scrambled_;
};

}  // namespace supercube
