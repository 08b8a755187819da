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

#include "hucya/channel_sim.hpp"

#include <algorithm>
#include <random>

namespace hucya
{
    PathParams::PathParams(double az, double el, double tau, cplx g)
        : azimuth(wrap_two_pi(az)), elevation(el), delay(tau), gain(g)
    {
        if (!std::isfinite(az) || !(el > 0.0 && el < kPi))
            throw std::invalid_argument("PathParams: azimuth must be finite and elevation in (0, pi)");
        if (!(tau >= 0.0) || !std::isfinite(tau))
            throw std::invalid_argument("PathParams: delay must be finite and non-negative");
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag()) || std::abs(g) == 0.0)
            throw std::invalid_argument("PathParams: gain must be finite and nonzero");
    }

    void validate_path(const PathParams &path, const ArrayConfig &config)
    {
        if (!(path.delay >= 0.0 && path.delay < 1.0 / config.delta_f()))
            throw std::invalid_argument("PathParams: delay outside the unambiguous range [0, 1/delta_f)");
        if (!(path.elevation > 0.0 && path.elevation < kPi))
            throw std::invalid_argument("PathParams: elevation outside (0, pi)");
        if (!std::isfinite(std::abs(path.gain)) || std::abs(path.gain) == 0.0)
            throw std::invalid_argument("PathParams: gain must be finite and nonzero");
    }

    double SimulationScenario::mean_path_power() const
    {
        if (paths.empty())
            return 0.0;
        double p = 0.0;
        for (const auto &path : paths)
            p += std::norm(path.gain);
        return p / static_cast<double>(paths.size());
    }

    double SimulationScenario::noise_power(const ArrayConfig &config) const
    {
        if (noiseless())
            return 0.0;
        const double total = mean_path_power() * static_cast<double>(paths.size());
        return std::norm(pilot) * total / (static_cast<double>(config.n_antennas()) * std::pow(10.0, snr_db / 10.0));
    }

    void SimulationScenario::validate(const ArrayConfig &config) const
    {
        if (paths.empty())
            throw std::invalid_argument("scenario: at least one path is required");
        if (n_snapshots < 1)
            throw std::invalid_argument("scenario: at least one snapshot is required");
        if (gain_model == GainModel::per_snapshot_random && n_snapshots < paths.size())
            throw std::invalid_argument("scenario: random gains need at least as many snapshots as paths");
        if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0.0))
            throw std::invalid_argument("scenario: SNR must be finite or +inf");
        if (std::abs(pilot) == 0.0)
            throw std::invalid_argument("scenario: pilot must be nonzero");
        for (const auto &p : paths)
            validate_path(p, config);
    }

    const char *label_name(SpatialLabel label)
    {
        switch (label)
        {
        case SpatialLabel::antenna:
            return "antenna";
        case SpatialLabel::post_stage1:
            return "post_stage1";
        case SpatialLabel::post_stage2:
            return "post_stage2";
        }
        return "unknown";
    }

    SnapshotTensor::SnapshotTensor(std::size_t spatial_dim, std::size_t n_subcarriers, std::size_t n_snapshots, SpatialLabel label)
        : s_(spatial_dim), m_(n_subcarriers), t_(n_snapshots), label_(label), data_(spatial_dim * n_subcarriers * n_snapshots, cplx(0.0))
    {
    }

    bool SnapshotTensor::all_finite() const
    {
        return std::all_of(data_.begin(), data_.end(), [](const cplx &v)
                           { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
    }

    CVec channel_vector(const ArrayConfig &config, const std::vector<PathParams> &paths, std::size_t m)
    {
        const double f = config.frequency(m);
        const std::size_t nh = config.n_horizontal();
        CVec h = CVec::Zero(Eigen::Index(config.n_antennas()));
        for (const auto &p : paths)
        {
            const CVec av = vertical_response(config, f, p.elevation);
            const CVec ah = horizontal_response(config, f, p.azimuth, p.elevation);
            const cplx w = p.gain * std::polar(1.0, -2.0 * kPi * f * p.delay);
            for (Eigen::Index v = 0; v < av.size(); ++v)
                h.segment(v * nh, nh) += (w * av[v]) * ah;
        }
        return h;
    }

    SnapshotTensor simulate_snapshots(const ArrayConfig &config, const SimulationScenario &scenario)
    {
        scenario.validate(config);
        const std::size_t nr = config.n_antennas(), nm = config.n_subcarriers(), nt = scenario.n_snapshots;
        const std::size_t np = scenario.paths.size();
        const std::size_t nh = config.n_horizontal();

        // Per-path, per-subcarrier unit-gain responses a_m(phi_l, theta_l) exp(-j 2 pi f_m tau_l)
        std::vector<CVec> unit(np * nm);
        for (std::size_t m = 0; m < nm; ++m)
        {
            const double f = config.frequency(m);
            for (std::size_t l = 0; l < np; ++l)
            {
                const auto &p = scenario.paths[l];
                const CVec av = vertical_response(config, f, p.elevation);
                const CVec ah = horizontal_response(config, f, p.azimuth, p.elevation);
                const cplx w = std::polar(1.0, -2.0 * kPi * f * p.delay);
                CVec a(nr);
                for (Eigen::Index v = 0; v < av.size(); ++v)
                    a.segment(v * nh, nh) = (w * av[v]) * ah;
                unit[l + np * m] = std::move(a);
            }
        }

        const double sigma2 = scenario.noise_power(config);
        const double noise_sd = std::sqrt(0.5 * sigma2);
        SnapshotTensor out(nr, nm, nt, SpatialLabel::antenna);
        std::vector<cplx> gains(np);

        for (std::size_t t = 0; t < nt; ++t)
        {
            std::mt19937_64 rng(mix_seed(scenario.seed, t));
            std::normal_distribution<double> normal(0.0, 1.0);

            for (std::size_t l = 0; l < np; ++l)
            {
                const cplx beta = scenario.paths[l].gain;
                if (scenario.gain_model == GainModel::fixed)
                    gains[l] = beta;
                else
                {
                    const double sd = std::abs(beta) * std::sqrt(0.5);
                    const double re = normal(rng), im = normal(rng);
                    gains[l] = cplx(sd * re, sd * im);
                }
            }

            for (std::size_t m = 0; m < nm; ++m)
            {
                cplx *col = out.column(m, t);
                Eigen::Map<CVec> y(col, Eigen::Index(nr));
                for (std::size_t l = 0; l < np; ++l)
                    y += (gains[l] * scenario.pilot) * unit[l + np * m];
                if (sigma2 > 0.0)
                    for (std::size_t s = 0; s < nr; ++s)
                    {
                        const double re = normal(rng), im = normal(rng);
                        col[s] += cplx(noise_sd * re, noise_sd * im);
                    }
            }
        }
        return out;
    }
}
