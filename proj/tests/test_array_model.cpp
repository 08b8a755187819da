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

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace hucya;

namespace
{
    constexpr double kF0 = 30e9;
    const double kLambda0 = kSpeedOfLight / kF0;

    ArrayConfig array(std::size_t nv, std::size_t nh, double radius_wl = 2.0)
    {
        return ArrayConfig(nv, nh, radius_wl * kLambda0, 0.5 * kLambda0, kF0, 100e6, 20);
    }

    // Power series of J_n(x) in extended precision, summed until the terms vanish
    double series_j(int n, double x)
    {
        const long double half = 0.5L * x;
        long double term = std::pow(half, static_cast<long double>(n)) / std::tgamma(static_cast<long double>(n) + 1.0L);
        long double sum = term;
        for (int k = 1; k < 400; ++k)
        {
            term *= -half * half / (static_cast<long double>(k) * static_cast<long double>(n + k));
            sum += term;
            if (std::fabs(term) < 1e-30L * std::fabs(sum))
                break;
        }
        return static_cast<double>(sum);
    }
}

TEST_CASE("Bessel function values and symmetry", "[array][bessel]")
{
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(3, 0.0) == 0.0);
    CHECK(std::abs(bessel_j(1, 1.0) - 0.4401) < 1e-3);
    CHECK(std::abs(bessel_j(15, 4.0 * kPi)) < 0.1);
    CHECK(std::abs(bessel_j(15, 4.0 * kPi) - series_j(15, 4.0 * kPi)) < 1e-12 * std::abs(series_j(15, 4.0 * kPi)));

    for (int v = 1; v <= 9; ++v)
        for (double x : {0.3, 2.5, 11.0, -4.0})
        {
            CAPTURE(v, x);
            const double sign = (v % 2) ? -1.0 : 1.0;
            CHECK(bessel_j(-v, x) == Catch::Approx(sign * bessel_j(v, x)).margin(1e-300));
            CHECK(bessel_j(v, -x) == Catch::Approx(sign * bessel_j(v, x)).margin(1e-300));
        }
}

TEST_CASE("Bessel function matches the extended-precision series", "[array][bessel]")
{
    double worst = 0.0;
    for (int n = 0; n <= 40; ++n)
        for (double x = 0.05; x <= 16.0; x += 0.37)
        {
            const double ref = series_j(n, x), got = bessel_j(n, x);
            if (std::abs(ref) > 1e-6)
                worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
            else
                CHECK(std::abs(got - ref) < 1e-17);
        }
    INFO("max relative error " << worst);
    CHECK(worst < 1e-12);

    const auto all = bessel_j_all(30, 7.3);
    for (int n = 0; n <= 30; ++n)
        CHECK(all[static_cast<std::size_t>(n)] == Catch::Approx(bessel_j(n, 7.3)).epsilon(1e-13));
}

TEST_CASE("Bessel function domain envelope", "[array][bessel]")
{
    CHECK_NOTHROW(bessel_j(200, 500.0));
    CHECK_THROWS_AS(bessel_j(201, 1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_j(-201, 1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_j(2, 500.5), std::domain_error);
    CHECK_THROWS_AS(bessel_j(2, std::nan("")), std::domain_error);
}

TEST_CASE("Diagonal Bessel values are bounded and nonincreasing in the order", "[array][bessel][bound]")
{
    const double bound = bessel_j(1, 1.0);
    for (int k = 1; k <= 20; ++k)
    {
        const double rho = 0.05 * k;
        double prev = bound;
        for (int v = 1; v <= 50; ++v)
        {
            const double j = bessel_j(v, v * rho);
            CAPTURE(v, rho);
            CHECK(j > 0.0);
            CHECK(j <= bound + 1e-6);
            CHECK(j <= prev + 1e-15);
            prev = j;
        }
    }
}

TEST_CASE("Highest phase-mode order", "[array]")
{
    CHECK(highest_order(kF0, 2.0 * kLambda0) == 12);
    CHECK(highest_order(kF0, kLambda0) == 6);
    CHECK(highest_order(kF0, 1e-9) == 0);
    CHECK(highest_order(kF0, 0.0) == 0);
    CHECK(array(4, 25).highest_order() == 12);
    CHECK(array(4, 25).n_modes() == 25u);
}

TEST_CASE("Array configuration validation", "[array]")
{
    CHECK_THROWS_AS(ArrayConfig(0, 25, 2 * kLambda0, 0.5 * kLambda0, kF0, 1e8, 20), std::invalid_argument);
    CHECK_THROWS_AS(ArrayConfig(4, 25, -1.0, 0.5 * kLambda0, kF0, 1e8, 20), std::invalid_argument);
    CHECK_THROWS_AS(ArrayConfig(4, 25, 2 * kLambda0, 0.5 * kLambda0, kF0, 1e8, 1), std::invalid_argument);
    CHECK_THROWS_AS(ArrayConfig(4, 23, 2 * kLambda0, 0.5 * kLambda0, kF0, 1e8, 20), std::invalid_argument);
    const ArrayConfig a = array(4, 24);
    CHECK(a.frequency(3) == kF0 + 3e8);
    CHECK_THROWS_AS(a.frequency(20), std::out_of_range);
    CHECK(a.bandwidth() == Catch::Approx(2e9));
}

TEST_CASE("Vertical steering vector", "[array][steering]")
{
    const ArrayConfig a = array(4, 25);
    const auto broadside = vertical_steering(a, 0, kPi / 2).entries;
    for (Eigen::Index i = 0; i < broadside.size(); ++i)
        CHECK(std::abs(broadside[i] - cplx(0.5, 0.0)) < 1e-15);

    const double theta = deg2rad(60.0);
    const auto v = vertical_steering(a, 0, theta).entries;
    for (int n = 1; n <= 4; ++n)
    {
        const double ph = -2.0 * kPi / kSpeedOfLight * kF0 * a.ring_spacing() * (n - 2.5) * std::cos(theta);
        CHECK(std::abs(v[n - 1] - std::polar(0.5, ph)) < 1e-14);
    }

    const ArrayConfig single(1, 25, 2 * kLambda0, 0.5 * kLambda0, kF0, 1e8, 20);
    CHECK(std::abs(vertical_steering(single, 5, 1.0).entries[0] - 1.0) < 1e-15);
    CHECK_THROWS_AS(vertical_steering(a, 20, theta), std::out_of_range);
    CHECK_THROWS_AS(vertical_steering(a, 0, 0.0), std::invalid_argument);
}

TEST_CASE("Horizontal steering vector", "[array][steering]")
{
    const ArrayConfig a = array(4, 25);
    const auto h = horizontal_steering(a, 2, 1.3, 0.9).entries;
    for (Eigen::Index i = 0; i < h.size(); ++i)
        CHECK(std::abs(h[i]) == Catch::Approx(1.0 / 5.0));

    const auto axial = horizontal_steering(a, 0, 0.4, 1e-12).entries;
    for (Eigen::Index i = 0; i < axial.size(); ++i)
        CHECK(std::abs(axial[i] - 0.2) < 1e-9);

    // rotating by one element spacing shifts the vector by one position
    const double step = 2 * kPi / 25.0;
    const auto h0 = horizontal_steering(a, 4, 0.7, 1.1).entries;
    const auto h1 = horizontal_steering(a, 4, 0.7 + step, 1.1).entries;
    for (Eigen::Index n = 0; n < 25; ++n)
        CHECK(std::abs(h1[(n + 1) % 25] - h0[n]) < 1e-12);
}

TEST_CASE("Full steering vector is the Kronecker product", "[array][steering]")
{
    const ArrayConfig a = array(5, 26);
    const auto v = vertical_steering(a, 7, 1.2).entries;
    const auto h = horizontal_steering(a, 7, 4.0, 1.2).entries;
    const auto f = full_steering(a, 7, 4.0, 1.2);
    REQUIRE(f.entries.size() == 5 * 26);
    CHECK(f.plane == Plane::full);
    CHECK(f.subcarrier_index == 7u);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index k = 0; k < 26; ++k)
            CHECK(f.entries[i * 26 + k] == v[i] * h[k]);
}

TEST_CASE("Phase-mode steering vector", "[array][steering]")
{
    const ArrayConfig a = array(4, 30);
    const auto axial = phase_mode_steering(a, 0, 1.0, 1e-9).entries;
    const int p_max = a.highest_order();
    for (int p = -p_max; p <= p_max; ++p)
        CHECK(std::abs(axial[p + p_max] - (p == 0 ? 1.0 : 0.0)) < 1e-8);

    const auto pm = phase_mode_steering(a, 3, 2.2, 1.0).entries;
    for (int p = 1; p <= p_max; ++p)
        CHECK(std::abs(pm[p + p_max]) == Catch::Approx(std::abs(pm[-p + p_max])).epsilon(1e-12));

    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int k = 0; k < 10; ++k)
        {
            const double theta = 0.15 + (kPi - 0.3) * i / 9.0, phi = 2 * kPi * k / 10.0;
            const CVec exact = qdft_horizontal(a, kF0, phi, theta);
            const CVec approx = phase_mode_response(a, kF0, phi, theta);
            worst = std::max(worst, (exact - approx).norm() / exact.norm());
        }
    INFO("max relative distance " << worst);
    CHECK(worst < 1e-2);
}

TEST_CASE("Dirichlet vertical response", "[array][steering]")
{
    const ArrayConfig a = array(8, 25);
    const std::size_t nv = 8;
    // a beam exactly aligned with the path
    const double g_target = 2 * kPi * 3 / 8.0;
    const double theta = std::acos(g_target * kSpeedOfLight / (2 * kPi * kF0 * a.ring_spacing()));
    const auto d = dirichlet_vertical(a, 0, theta, {3, 4}).entries;
    CHECK(d[0].real() == Catch::Approx(8.0));
    CHECK(std::abs(d[1]) < 1e-12);

    CHECK(dirichlet_kernel(nv, 0.0) == 8.0);
    CHECK(dirichlet_kernel(7, 2 * kPi) == 7.0);
    CHECK(dirichlet_kernel(8, 2 * kPi) == -8.0);
    CHECK(dirichlet_kernel(8, 2 * kPi / 8) == Catch::Approx(0.0).margin(1e-12));

    // matrix-product oracle: sqrt(N_V) U_d^H a_V
    std::vector<std::size_t> all(nv);
    for (std::size_t i = 0; i < nv; ++i)
        all[i] = i + 1;
    const CMat ud = vertical_dft_matrix(nv);
    for (double th : {0.3, 1.0, 1.9, 2.8})
        for (std::size_t m : {0u, 19u})
        {
            const CVec ref = std::sqrt(8.0) * ud.adjoint() * vertical_steering(a, m, th).entries;
            const CVec got = dirichlet_vertical(a, m, th, all).entries;
            CHECK((ref - got).cwiseAbs().maxCoeff() < 1e-12);
        }
    CHECK_THROWS_AS(dirichlet_vertical(a, 0, 1.0, {9}), std::out_of_range);
}

TEST_CASE("Q-DFT matrix layout", "[array]")
{
    const CMat u = qdft_matrix(10, 3);
    REQUIRE(u.rows() == 10);
    REQUIRE(u.cols() == 7);
    for (int p = -3; p <= 3; ++p)
        for (int n = 0; n < 10; ++n)
            CHECK(std::abs(u(n, p + 3) - std::polar(1.0, 2 * kPi * n * p / 10.0)) < 1e-12);
    // columns are orthogonal for 2P + 1 <= N_H
    const CMat g = u.adjoint() * u;
    CHECK((g - 10.0 * CMat::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Phase-mode truncation leakage", "[array][leakage]")
{
    const double kr_scale = 2 * kPi * 2.0; // 2 pi r / lambda0 with r = 2 lambda0
    double worst30 = 0.0, best10 = 1.0, bins30 = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int k = 0; k < 10; ++k)
        {
            const double theta = 0.1 + (kPi - 0.2) * i / 9.0, phi = 2 * kPi * k / 10.0;
            const double kr = kr_scale * std::sin(theta);
            worst30 = std::max(worst30, phase_mode_alias_fraction(30, 12, kr, phi));
            best10 = std::min(best10, phase_mode_alias_fraction(10, 12, kr, phi));
            bins30 = std::max(bins30, qdft_out_of_band_fraction(30, 12, kr, phi));
        }
    INFO("alias fraction N_H=30 max " << worst30 << ", N_H=10 min " << best10 << ", bins beyond P (N_H=30) max " << bins30);
    CHECK(worst30 < 1e-2);
    CHECK(best10 > 5e-2);
    CHECK(bins30 >= 0.0);
    CHECK(bins30 < 1.0);
}
