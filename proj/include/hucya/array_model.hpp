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

#ifndef HUCYA_ARRAY_MODEL_HPP
#define HUCYA_ARRAY_MODEL_HPP

#include "hucya/common.hpp"

#include <cstddef>
#include <vector>

namespace hucya
{
    // Uniform cylindrical array: N_V stacked rings of N_H isotropic elements, OFDM band with M subcarriers
    // starting at f0 (the lower band edge). Ring n (1-based) sits at height -h*(n - (N_V+1)/2), element k
    // of a ring at azimuth 2*pi*(k-1)/N_H. Antenna index is (n-1)*N_H + (k-1), i.e. ring-major.
    class ArrayConfig
    {
    public:
        ArrayConfig(std::size_t n_vertical, std::size_t n_horizontal, double radius, double ring_spacing,
                    double f0, double delta_f, std::size_t n_subcarriers);

        std::size_t n_vertical() const { return nv_; }
        std::size_t n_horizontal() const { return nh_; }
        std::size_t n_antennas() const { return nv_ * nh_; }
        double radius() const { return r_; }
        double ring_spacing() const { return h_; }
        double f0() const { return f0_; }
        double delta_f() const { return df_; }
        std::size_t n_subcarriers() const { return m_; }

        double frequency(std::size_t m) const; // f_m = f0 + m * delta_f, throws std::out_of_range
        double wavelength0() const { return kSpeedOfLight / f0_; }
        double bandwidth() const { return static_cast<double>(m_) * df_; }
        double center_frequency() const { return f0_ + 0.5 * bandwidth(); }
        int highest_order() const { return p_; }
        std::size_t n_modes() const { return static_cast<std::size_t>(2 * p_ + 1); }

    private:
        std::size_t nv_, nh_;
        double r_, h_, f0_, df_;
        std::size_t m_;
        int p_;
    };

    // P = floor(2*pi*f0*r/c)
    int highest_order(double f0, double radius);
    inline int highest_order(const ArrayConfig &config) { return config.highest_order(); }

    enum class Plane
    {
        vertical,
        horizontal,
        full,
        phase_mode_horizontal,
        dirichlet_vertical
    };

    struct SteeringVector
    {
        CVec entries;
        Plane plane = Plane::full;
        std::size_t subcarrier_index = 0;
    };

    // Bessel function of the first kind of integer order.
    // Valid for |order| <= 200 and |x| <= 500, throws std::domain_error outside.
    double bessel_j(int order, double x);

    // J_0(x) ... J_nmax(x) from a single downward recurrence
    std::vector<double> bessel_j_all(int nmax, double x);

    // Steering vectors at subcarrier m
    SteeringVector vertical_steering(const ArrayConfig &config, std::size_t m, double theta);
    SteeringVector horizontal_steering(const ArrayConfig &config, std::size_t m, double phi, double theta);
    SteeringVector full_steering(const ArrayConfig &config, std::size_t m, double phi, double theta);
    SteeringVector phase_mode_steering(const ArrayConfig &config, std::size_t m, double phi, double theta);

    // Dirichlet-kernel vertical response after DFT beamspace, one entry per (1-based) beam index
    SteeringVector dirichlet_vertical(const ArrayConfig &config, std::size_t m, double theta,
                                      const std::vector<std::size_t> &beam_indices);

    // Frequency-explicit forms, used for the virtual reference-frequency manifold and by the estimators
    CVec vertical_response(const ArrayConfig &config, double freq, double theta);
    CVec horizontal_response(const ArrayConfig &config, double freq, double phi, double theta);
    CVec phase_mode_response(const ArrayConfig &config, double freq, double phi, double theta);
    CVec dirichlet_response(const ArrayConfig &config, double freq, double theta, const std::vector<std::size_t> &beam_indices);

    // Exact Q-DFT of the horizontal response, normalised so that it approximates phase_mode_response:
    // (1/sqrt(N_H)) * U_sH^H * a_H
    CVec qdft_horizontal(const ArrayConfig &config, double freq, double phi, double theta);

    // Dirichlet kernel sin(N psi/2) / sin(psi/2) with the limit at the removable singularity
    double dirichlet_kernel(std::size_t n, double psi);

    // Phase-mode transform matrix U_sH (N_H x (2P+1)), column p+P holds exp(j*2*pi*(n-1)*p/N_H)
    CMat qdft_matrix(std::size_t n_horizontal, int highest_order);

    // Vertical DFT beamspace matrix U_d (N_V x N_V), column i-1 holds exp(-j*2*pi/N_V*(n-(N_V+1)/2)*i)
    CMat vertical_dft_matrix(std::size_t n_vertical);

    // Relative energy of the aliasing terms the phase-mode approximation drops:
    // sum_p |A_p - A~_p|^2 / sum_p |A_p|^2 over p in [-P, P], with A_p the exact Q-DFT of an N_H-element ring
    // and A~_p = j^p J_p(kr) e^{-j p phi}. Works for any N_H >= 1, including N_H < 2P.
    double phase_mode_alias_fraction(std::size_t n_horizontal, int highest_order, double kr, double phi);

    // Energy fraction of the N_H-point Q-DFT outside the retained orders [-P, P]
    double qdft_out_of_band_fraction(std::size_t n_horizontal, int highest_order, double kr, double phi);
}

#endif
