// Counter-based random number streams.
//
// Philox4x32-10 (Salmon et al., SC 2011) keyed by a 64-bit master seed.
// The variate consumed by path i at step k is a pure function of
// (master, i, k), so parallel generation is reproducible regardless of
// scheduling and worker count. Normals come from the inverse CDF applied
// to a 53-bit uniform, which keeps streams bit-identical across platforms.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace reserveband {

// Identifies one independent stream: (master seed, path index).
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t path_index = 0;
};

namespace philox {

inline constexpr std::uint32_t kM0 = 0xD2511F53u;
inline constexpr std::uint32_t kM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

// One keyed block: 128-bit counter, 64-bit key, 10 rounds.
inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t lo0, hi0, lo1, hi1;
        mul_hi_lo(kM0, ctr[0], lo0, hi0);
        mul_hi_lo(kM1, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

}  // namespace philox

// 64 uniform bits for (seed, step). Counter words: step in [0..1],
// path index in [2..3]; key = master seed.
inline std::uint64_t random_bits(const Seed& seed, std::uint64_t step) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
        static_cast<std::uint32_t>(seed.path_index),
        static_cast<std::uint32_t>(seed.path_index >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed.master),
                                              static_cast<std::uint32_t>(seed.master >> 32)};
    const auto out = philox::block(ctr, key);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

// Maps 64 random bits to the open interval (0,1), centered on the 2^-52
// lattice so the inverse CDF never sees 0 or 1. 52 bits keep the +0.5
// exact in double precision.
inline double to_unit_interval(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Inverse standard normal CDF, Wichura's algorithm AS 241 (PPND16),
// accurate to about 1e-16 relative over (0,1).
inline double inverse_normal_cdf(double p) {
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) *
                        r +
                    4.5921953931549871457e+4) *
                       r +
                   1.3731693765509461125e+4) *
                      r +
                  1.9715909503065514427e+3) *
                     r +
                 1.3314166789178437745e+2) *
                    r +
                3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) *
                        r +
                    2.1213794301586595867e+4) *
                       r +
                   5.3941960214247511077e+3) *
                      r +
                  6.8718700749205790830e+2) *
                     r +
                 4.2313330701600911252e+1) *
                    r +
                1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) *
                     r +
                 1.27045825245236838258e+0) *
                    r +
                3.64784832476320460504e+0) *
                   r +
               5.76949722146069140550e+0) *
                  r +
              4.63033784615654529590e+0) *
                 r +
             1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) *
                     r +
                 1.48103976427480074590e-1) *
                    r +
                6.89767334985100004550e-1) *
                   r +
               1.67638483018380384940e+0) *
                  r +
              2.05319162663775882187e+0) *
                 r +
             1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) *
                     r +
                 2.65321895265761230930e-2) *
                    r +
                2.96560571828504891230e-1) *
                   r +
               1.78482653991729133580e+0) *
                  r +
              5.46378491116411436990e+0) *
                 r +
             6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) *
                     r +
                 7.86869131145613259100e-4) *
                    r +
                1.48753612908506148525e-2) *
                   r +
               1.36929880922735805310e-1) *
                  r +
              5.99832206555887937690e-1) *
                 r +
             1.0);
    }
    return (q < 0.0) ? -x : x;
}

// Standard normal variate for (seed, step).
inline double normal_variate(const Seed& seed, std::uint64_t step) {
    return inverse_normal_cdf(to_unit_interval(random_bits(seed, step)));
}

// Uniform variate in (0,1) for (seed, step); used by test generators.
inline double uniform_variate(const Seed& seed, std::uint64_t step) {
    return to_unit_interval(random_bits(seed, step));
}

}  // namespace reserveband
