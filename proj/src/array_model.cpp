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

#include "hucya/array_model.hpp"

#include <algorithm>
#include <string>

namespace hucya
{
    namespace
    {
        constexpr int kMaxOrder = 200;
        constexpr double kMaxArg = 500.0;

        // j^p for integer p, exact
        cplx j_pow(int p)
        {
            switch (((p % 4) + 4) % 4)
            {
            case 0:
                return {1.0, 0.0};
            case 1:
                return {0.0, 1.0};
            case 2:
                return {-1.0, 0.0};
            default:
                return {0.0, -1.0};
            }
        }

        void check_theta(double theta)
        {
            if (!(theta > 0.0 && theta < kPi))
                throw std::invalid_argument("elevation must lie in (0, pi)");
        }

        // Power series, used for small arguments where the recurrence start-up is wasteful
        void bessel_series(int nmax, double ax, std::vector<double> &out)
        {
            const double half = 0.5 * ax, q = -half * half;
            for (int n = 0; n <= nmax; ++n)
            {
                double term = std::exp(n * std::log(half) - std::lgamma(n + 1.0));
                double sum = term;
                for (int k = 1; k < 60 && std::abs(term) > 1e-18 * std::abs(sum); ++k)
                {
                    term *= q / (k * double(n + k));
                    sum += term;
                }
                out[n] = sum;
            }
        }
    }

    ArrayConfig::ArrayConfig(std::size_t n_vertical, std::size_t n_horizontal, double radius, double ring_spacing,
                             double f0, double delta_f, std::size_t n_subcarriers)
        : nv_(n_vertical), nh_(n_horizontal), r_(radius), h_(ring_spacing), f0_(f0), df_(delta_f), m_(n_subcarriers)
    {
        if (nv_ < 1 || nh_ < 1)
            throw std::invalid_argument("ArrayConfig: ring count and elements per ring must be >= 1");
        if (!(r_ > 0.0) || !(h_ > 0.0) || !std::isfinite(r_) || !std::isfinite(h_))
            throw std::invalid_argument("ArrayConfig: radius and ring spacing must be positive");
        if (!(f0_ > 0.0) || !(df_ > 0.0) || !std::isfinite(f0_) || !std::isfinite(df_))
            throw std::invalid_argument("ArrayConfig: carrier and subcarrier spacing must be positive");
        if (m_ < 2)
            throw std::invalid_argument("ArrayConfig: at least two subcarriers are required");
        p_ = hucya::highest_order(f0_, r_);
        if (nh_ < static_cast<std::size_t>(2 * p_))
            throw std::invalid_argument("ArrayConfig: elements per ring (" + std::to_string(nh_) +
                                        ") must be at least twice the highest phase mode (" + std::to_string(p_) + ")");
    }

    double ArrayConfig::frequency(std::size_t m) const
    {
        if (m >= m_)
            throw std::out_of_range("subcarrier index out of range");
        return f0_ + static_cast<double>(m) * df_;
    }

    int highest_order(double f0, double radius)
    {
        if (!(f0 > 0.0) || !(radius >= 0.0))
            throw std::invalid_argument("highest_order: invalid carrier or radius");
        // Guard against 2*pi*f0*r/c landing a few ulps below an integer (e.g. r = 2 lambda0)
        const double v = 2.0 * kPi * f0 * radius / kSpeedOfLight;
        const double rounded = std::round(v);
        if (std::abs(v - rounded) < 1e-9 * std::max(1.0, v))
            return static_cast<int>(rounded);
        return static_cast<int>(std::floor(v));
    }

    std::vector<double> bessel_j_all(int nmax, double x)
    {
        if (nmax < 0)
            throw std::invalid_argument("bessel_j_all: negative maximum order");
        if (nmax > kMaxOrder || !(std::abs(x) <= kMaxArg))
            throw std::domain_error("bessel_j: argument outside |order| <= 200, |x| <= 500");

        std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
        const double ax = std::abs(x);
        if (ax == 0.0)
        {
            out[0] = 1.0;
            return out;
        }

        if (ax < 1.0)
            bessel_series(nmax, ax, out);
        else
        {
            // Miller: downward recurrence from far above max(n, x), normalised with J0 + 2 sum J_2k = 1
            const double top = std::max<double>(nmax, ax);
            int start = static_cast<int>(top + 50.0 + std::sqrt(40.0 * top));
            start += start & 1;

            double jp = 0.0, j = 1e-300, norm = 0.0;
            for (int k = start; k > 0; --k)
            {
                const double jm = (2.0 * k / ax) * j - jp; // J_{k-1}
                jp = j;
                j = jm;
                const int n = k - 1;
                if (n <= nmax)
                    out[n] = j;
                if (n == 0)
                    norm += j;
                else if ((n & 1) == 0)
                    norm += 2.0 * j;
                if (std::abs(j) > 1e250)
                {
                    j *= 1e-250, jp *= 1e-250, norm *= 1e-250;
                    for (int i = n; i <= nmax; ++i)
                        out[i] *= 1e-250;
                }
            }
            for (auto &v : out)
                v /= norm;
        }

        if (x < 0.0)
            for (int n = 1; n <= nmax; n += 2)
                out[n] = -out[n];
        return out;
    }

    double bessel_j(int order, double x)
    {
        if (std::abs(order) > kMaxOrder || !(std::abs(x) <= kMaxArg))
            throw std::domain_error("bessel_j: argument outside |order| <= 200, |x| <= 500");
        const int n = std::abs(order);
        const double v = bessel_j_all(n, x)[n];
        return (order < 0 && (n & 1)) ? -v : v;
    }

    double dirichlet_kernel(std::size_t n, double psi)
    {
        const double s = std::sin(0.5 * psi);
        const double nn = static_cast<double>(n);
        if (std::abs(s) < 1e-12)
        {
            const long long k = std::llround(psi / (2.0 * kPi));
            const bool odd = ((k % 2 != 0) && (n % 2 == 0));
            return odd ? -nn : nn;
        }
        return std::sin(0.5 * nn * psi) / s;
    }

    CVec vertical_response(const ArrayConfig &config, double freq, double theta)
    {
        const std::size_t nv = config.n_vertical();
        const double centre = 0.5 * (static_cast<double>(nv) + 1.0);
        const double k = 2.0 * kPi / kSpeedOfLight * freq * config.ring_spacing() * std::cos(theta);
        const double scale = 1.0 / std::sqrt(static_cast<double>(nv));
        CVec a(nv);
        for (std::size_t n = 0; n < nv; ++n)
            a[n] = std::polar(scale, -k * (static_cast<double>(n + 1) - centre));
        return a;
    }

    CVec horizontal_response(const ArrayConfig &config, double freq, double phi, double theta)
    {
        const std::size_t nh = config.n_horizontal();
        const double kr = 2.0 * kPi / kSpeedOfLight * freq * config.radius() * std::sin(theta);
        const double scale = 1.0 / std::sqrt(static_cast<double>(nh));
        CVec a(nh);
        for (std::size_t n = 0; n < nh; ++n)
        {
            const double varphi = 2.0 * kPi * static_cast<double>(n) / static_cast<double>(nh);
            a[n] = std::polar(scale, kr * std::cos(phi - varphi));
        }
        return a;
    }

    CVec phase_mode_response(const ArrayConfig &config, double freq, double phi, double theta)
    {
        const int p_max = config.highest_order();
        const double kr = 2.0 * kPi / kSpeedOfLight * freq * config.radius() * std::sin(theta);
        const auto jv = bessel_j_all(p_max, kr);
        CVec a(2 * p_max + 1);
        for (int p = -p_max; p <= p_max; ++p)
        {
            const double jp = (p < 0 && (-p & 1)) ? -jv[-p] : jv[std::abs(p)];
            a[p + p_max] = j_pow(p) * jp * std::polar(1.0, -p * phi);
        }
        return a;
    }

    CVec dirichlet_response(const ArrayConfig &config, double freq, double theta, const std::vector<std::size_t> &beam_indices)
    {
        const std::size_t nv = config.n_vertical();
        const double g = 2.0 * kPi * freq * config.ring_spacing() * std::cos(theta) / kSpeedOfLight;
        CVec a(beam_indices.size());
        for (std::size_t u = 0; u < beam_indices.size(); ++u)
        {
            const std::size_t eta = beam_indices[u];
            if (eta < 1 || eta > nv)
                throw std::out_of_range("beam index outside [1, N_V]");
            const double psi = g - 2.0 * kPi * static_cast<double>(eta) / static_cast<double>(nv);
            a[u] = dirichlet_kernel(nv, psi);
        }
        return a;
    }

    CMat qdft_matrix(std::size_t n_horizontal, int highest_order)
    {
        CMat u(n_horizontal, 2 * highest_order + 1);
        for (int p = -highest_order; p <= highest_order; ++p)
            for (std::size_t n = 0; n < n_horizontal; ++n)
            {
                // reduce the exponent modulo N_H so large |p| stays exact
                const long long e = (static_cast<long long>(n) * p) % static_cast<long long>(n_horizontal);
                u(n, p + highest_order) = std::polar(1.0, 2.0 * kPi * static_cast<double>(e) / static_cast<double>(n_horizontal));
            }
        return u;
    }

    CMat vertical_dft_matrix(std::size_t n_vertical)
    {
        const double centre = 0.5 * (static_cast<double>(n_vertical) + 1.0);
        CMat u(n_vertical, n_vertical);
        for (std::size_t i = 1; i <= n_vertical; ++i)
            for (std::size_t n = 1; n <= n_vertical; ++n)
                u(n - 1, i - 1) = std::polar(1.0, -2.0 * kPi / static_cast<double>(n_vertical) *
                                                      (static_cast<double>(n) - centre) * static_cast<double>(i));
        return u;
    }

    CVec qdft_horizontal(const ArrayConfig &config, double freq, double phi, double theta)
    {
        const CMat u = qdft_matrix(config.n_horizontal(), config.highest_order());
        return u.adjoint() * horizontal_response(config, freq, phi, theta) / std::sqrt(static_cast<double>(config.n_horizontal()));
    }

    SteeringVector vertical_steering(const ArrayConfig &config, std::size_t m, double theta)
    {
        check_theta(theta);
        return {vertical_response(config, config.frequency(m), theta), Plane::vertical, m};
    }

    SteeringVector horizontal_steering(const ArrayConfig &config, std::size_t m, double phi, double theta)
    {
        check_theta(theta);
        return {horizontal_response(config, config.frequency(m), phi, theta), Plane::horizontal, m};
    }

    SteeringVector full_steering(const ArrayConfig &config, std::size_t m, double phi, double theta)
    {
        check_theta(theta);
        const double f = config.frequency(m);
        const CVec v = vertical_response(config, f, theta);
        const CVec h = horizontal_response(config, f, phi, theta);
        CVec a(v.size() * h.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            a.segment(i * h.size(), h.size()) = v[i] * h;
        return {std::move(a), Plane::full, m};
    }

    SteeringVector phase_mode_steering(const ArrayConfig &config, std::size_t m, double phi, double theta)
    {
        check_theta(theta);
        return {phase_mode_response(config, config.frequency(m), phi, theta), Plane::phase_mode_horizontal, m};
    }

    SteeringVector dirichlet_vertical(const ArrayConfig &config, std::size_t m, double theta,
                                      const std::vector<std::size_t> &beam_indices)
    {
        check_theta(theta);
        return {dirichlet_response(config, config.frequency(m), theta, beam_indices), Plane::dirichlet_vertical, m};
    }

    namespace
    {
        // Exact N_H-point Q-DFT coefficients A_p / sqrt(N_H) of a ring with phase kr*cos(phi - varphi_n)
        cplx ring_qdft(std::size_t nh, int p, double kr, double phi)
        {
            cplx s = 0.0;
            for (std::size_t n = 0; n < nh; ++n)
            {
                const long long e = (static_cast<long long>(n) * p) % static_cast<long long>(nh);
                const double varphi = 2.0 * kPi * static_cast<double>(n) / static_cast<double>(nh);
                s += std::polar(1.0, kr * std::cos(phi - varphi) - 2.0 * kPi * static_cast<double>(e) / static_cast<double>(nh));
            }
            return s / static_cast<double>(nh);
        }
    }

    double phase_mode_alias_fraction(std::size_t n_horizontal, int highest_order, double kr, double phi)
    {
        if (n_horizontal < 1 || highest_order < 0)
            throw std::invalid_argument("phase_mode_alias_fraction: invalid ring");
        const auto jv = bessel_j_all(highest_order, kr);
        double err = 0.0, total = 0.0;
        for (int p = -highest_order; p <= highest_order; ++p)
        {
            const cplx exact = ring_qdft(n_horizontal, p, kr, phi);
            const double jp = (p < 0 && (-p & 1)) ? -jv[-p] : jv[std::abs(p)];
            const cplx approx = j_pow(p) * jp * std::polar(1.0, -p * phi);
            err += std::norm(exact - approx);
            total += std::norm(exact);
        }
        return total > 0.0 ? err / total : 0.0;
    }

    double qdft_out_of_band_fraction(std::size_t n_horizontal, int highest_order, double kr, double phi)
    {
        if (n_horizontal < 1 || highest_order < 0)
            throw std::invalid_argument("qdft_out_of_band_fraction: invalid ring");
        // bins p = -floor((N-1)/2) ... floor(N/2) cover the full N_H-point transform once
        const int lo = -static_cast<int>((n_horizontal - 1) / 2);
        const int hi = static_cast<int>(n_horizontal / 2);
        double out = 0.0, total = 0.0;
        for (int p = lo; p <= hi; ++p)
        {
            const double e = std::norm(ring_qdft(n_horizontal, p, kr, phi));
            total += e;
            if (std::abs(p) > highest_order)
                out += e;
        }
        return total > 0.0 ? out / total : 0.0;
    }
}
