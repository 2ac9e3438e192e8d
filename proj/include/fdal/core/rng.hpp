#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace fdal {

/// Seed of a reproducible random stream.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

namespace detail {

inline constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Counter-based generator: the draws for sample `index` depend only on
/// (seed, stream, index), so samples can be produced in any order.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(RngSeed s, std::uint64_t index)
        : state_(detail::mix64(detail::mix64(s.seed ^ 0x6a09e667f3bcc909ULL) ^
                               detail::mix64(s.stream + 0xbb67ae8584caa73bULL) ^
                               (index * 0x9e3779b97f4a7c15ULL + 0x3c6ef372fe94f82bULL)))
    {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(state_);
    }

    /// Uniform on the open interval (0, 1).
    double uniform()
    {
        for (;;) {
            const double u = static_cast<double>((*this)() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

private:
    std::uint64_t state_;
};

} // namespace fdal
