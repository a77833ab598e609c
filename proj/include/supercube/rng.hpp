#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "supercube/matrix.hpp"
#include "supercube/normal.hpp"

namespace supercube {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Deterministic per-task random stream (xoshiro256++), keyed by a root seed
/// plus a task label, so serial and parallel runs draw identical numbers.
class RngStream {
  public:
    RngStream(std::uint64_t root_seed, std::string_view task_key, std::uint64_t task_index = 0) {
        std::uint64_t mix = root_seed ^ (fnv1a64(task_key) + 0x9e3779b97f4a7c15ull * (task_index + 1));
        for (auto& s : state_) s = splitmix64(mix);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in (0,1), 53-bit mantissa, never exactly 0 or 1.
    double next_uniform() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u == 0.0 ? 0x1.0p-54 : u;
    }

    /// Standard normal via the inverse CDF; deterministic, no cached state.
    double next_normal() { return normal_quantile(next_uniform()); }

    std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

/// Draws correlated Gaussian vectors x = L z for a fixed Cholesky factor.
class GaussianSampler {
  public:
    explicit GaussianSampler(Matrix<double> chol_lower) : l_(std::move(chol_lower)) {}

    void draw(RngStream& rng, std::vector<double>& out) const {
        const int n = l_.rows();
        z_.resize(static_cast<size_t>(n));
        out.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) z_[static_cast<size_t>(i)] = rng.next_normal();
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j <= i; ++j) s += l_(i, j) * z_[static_cast<size_t>(j)];
            out[static_cast<size_t>(i)] = s;
        }
    }

  private:
    Matrix<double> l_;
    mutable std::vector<double> z_;
};

}  // namespace supercube
