// SPDX-License-Identifier: Apache-2.0
//
// hucya: wideband channel-parameter estimation for hybrid cylindrical arrays
// Copyright (C) 2026 The hucya authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HUCYA_COMMON_HPP
#define HUCYA_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hucya
{
    using cplx = std::complex<double>;
    using CVec = Eigen::VectorXcd;
    using CMat = Eigen::MatrixXcd;
    using RVec = Eigen::VectorXd;
    using RMat = Eigen::MatrixXd;

    inline constexpr double kSpeedOfLight = 299792458.0; // m/s
    inline constexpr double kPi = std::numbers::pi;
    inline constexpr cplx kJ{0.0, 1.0};

    // Raised when a scenario is numerically degenerate (rank loss, singular Fisher matrix, ...).
    // Precondition violations use std::invalid_argument; Bessel envelope violations std::domain_error.
    class numerical_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline double deg2rad(double deg) { return deg * kPi / 180.0; }
    inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

    // Wraps an angle into [0, 2*pi)
    inline double wrap_two_pi(double a)
    {
        double w = std::fmod(a, 2.0 * kPi);
        if (w < 0.0)
            w += 2.0 * kPi;
        if (w >= 2.0 * kPi)
            w = 0.0;
        return w;
    }

    // Signed circular difference a - b folded into [-period/2, period/2)
    inline double circular_diff(double a, double b, double period)
    {
        double d = std::fmod(a - b, period);
        if (d < -0.5 * period)
            d += period;
        else if (d >= 0.5 * period)
            d -= period;
        return d;
    }

    // SplitMix64 finalizer, used to derive independent substream seeds from (seed, counter) pairs
    inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter)
    {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
}

#endif
