#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"

namespace cumcop {

/// Sobol sequence in up to 16 dimensions from tabulated primitive-polynomial
/// direction numbers, with optional linear matrix scrambling and a random
/// digital shift.
class Sobol {
public:
    static constexpr std::size_t max_dimension = 16;
    static constexpr int bits = 32;

    explicit Sobol(std::size_t d) : d_(d), shift_(d, 0u) {
        if (d == 0 || d > max_dimension)
            throw domain_error("Sobol dimension must be in [1, 16], got " + std::to_string(d));
        v_.resize(d);
        for (int i = 0; i < bits; ++i) v_[0][i] = 1u << (bits - 1 - i);
        for (std::size_t j = 1; j < d; ++j) init_dimension(j);
    }

    std::size_t dimension() const noexcept { return d_; }

    void set_shift(const std::vector<std::uint32_t>& shift) {
        if (shift.size() != d_) throw dimension_error("Sobol shift has wrong length");
        shift_ = shift;
    }

    /// Integer coordinates of point `index` (gray-code order), shift applied.
    void point_bits(std::uint64_t index, std::uint32_t* out) const noexcept {
        const std::uint64_t g = index ^ (index >> 1);
        for (std::size_t j = 0; j < d_; ++j) {
            std::uint32_t x = 0;
            for (int b = 0; b < bits && (g >> b) != 0; ++b)
                if ((g >> b) & 1u) x ^= v_[j][b];
            out[j] = x ^ shift_[j];
        }
    }

    /// Advances `state` (unshifted integer coordinates of point index-1) to
    /// point `index`; cheaper than point_bits for consecutive runs.
    void advance(std::uint64_t index, std::uint32_t* state) const noexcept {
        int c = 0;
        std::uint64_t i = index - 1;
        while (i & 1u) {
            i >>= 1;
            ++c;
        }
        for (std::size_t j = 0; j < d_; ++j) state[j] ^= v_[j][c];
    }

    std::uint32_t shift(std::size_t j) const noexcept { return shift_[j]; }

    /// Left-multiplies every direction number of coordinate j by a random
    /// lower-triangular binary matrix with unit diagonal (a linear matrix
    /// scramble). `next` must return uniformly random 32-bit words.
    template <class Next>
    void scramble(Next&& next) {
        for (std::size_t j = 0; j < d_; ++j) {
            std::array<std::uint32_t, bits> rows{};
            for (int i = 0; i < bits; ++i) {
                // Row i acts on the leading i+1 binary digits (MSB first).
                const std::uint32_t diag = 1u << (bits - 1 - i);
                const std::uint32_t below = i == 0 ? 0u : ~((diag << 1) - 1u);
                rows[i] = (static_cast<std::uint32_t>(next()) & below) | diag;
            }
            for (auto& v : v_[j]) {
                std::uint32_t out = 0;
                for (int i = 0; i < bits; ++i)
                    if (std::popcount(rows[i] & v) & 1) out |= 1u << (bits - 1 - i);
                v = out;
            }
        }
    }

    /// Maps integer coordinates to the open interval; never 0 or 1.
    static double to_unit(std::uint32_t x) noexcept {
        return (static_cast<double>(x) + 0.5) * 0x1.0p-32;
    }

private:
    struct Poly {
        int s;
        unsigned a;
        std::array<std::uint32_t, 6> m;
    };

    void init_dimension(std::size_t j) {
        static constexpr std::array<Poly, max_dimension - 1> table{{
            {1, 0, {1}},
            {2, 1, {1, 3}},
            {3, 1, {1, 3, 1}},
            {3, 2, {1, 1, 1}},
            {4, 1, {1, 1, 3, 3}},
            {4, 4, {1, 3, 5, 13}},
            {5, 2, {1, 1, 5, 5, 17}},
            {5, 4, {1, 1, 5, 5, 5}},
            {5, 7, {1, 1, 7, 11, 19}},
            {5, 11, {1, 1, 5, 1, 1}},
            {5, 13, {1, 1, 1, 3, 11}},
            {5, 14, {1, 3, 5, 5, 31}},
            {6, 1, {1, 3, 3, 9, 7, 49}},
            {6, 13, {1, 1, 1, 15, 21, 21}},
            {6, 16, {1, 3, 1, 13, 27, 49}},
        }};
        const Poly& p = table[j - 1];
        auto& v = v_[j];
        for (int i = 0; i < p.s && i < bits; ++i) v[i] = p.m[i] << (bits - 1 - i);
        for (int i = p.s; i < bits; ++i) {
            std::uint32_t x = v[i - p.s] ^ (v[i - p.s] >> p.s);
            for (int k = 1; k < p.s; ++k)
                if ((p.a >> (p.s - 1 - k)) & 1u) x ^= v[i - k];
            v[i] = x;
        }
    }

    std::size_t d_;
    std::vector<std::array<std::uint32_t, bits>> v_;
    std::vector<std::uint32_t> shift_;
};

}  // namespace cumcop
