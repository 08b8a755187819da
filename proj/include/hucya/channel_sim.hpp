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

#ifndef HUCYA_CHANNEL_SIM_HPP
#define HUCYA_CHANNEL_SIM_HPP

#include "hucya/array_model.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace hucya
{
    // One propagation path. Azimuth is wrapped into [0, 2*pi).
    struct PathParams
    {
        double azimuth = 0.0;   // rad
        double elevation = 0.0; // rad, from the cylinder axis
        double delay = 0.0;     // s
        cplx gain = 1.0;

        PathParams() = default;
        PathParams(double azimuth, double elevation, double delay, cplx gain); // throws std::invalid_argument
    };

    // Throws std::invalid_argument when the delay falls outside the unambiguous range [0, 1/delta_f)
    void validate_path(const PathParams &path, const ArrayConfig &config);

    enum class GainModel
    {
        fixed,
        per_snapshot_random
    };

    struct SimulationScenario
    {
        std::vector<PathParams> paths;
        double snr_db = std::numeric_limits<double>::infinity(); // +inf disables noise
        std::size_t n_snapshots = 1;
        cplx pilot = 1.0;
        GainModel gain_model = GainModel::per_snapshot_random;
        std::uint64_t seed = 0;

        bool noiseless() const { return std::isinf(snr_db) && snr_db > 0.0; }
        double mean_path_power() const;
        // Per-antenna average SNR: sigma^2 = |pilot|^2 sum_l |beta_l|^2 / (N_R 10^(snr/10)), the mean received
        // signal power per element over unit-norm steering vectors. 0 when noiseless.
        double noise_power(const ArrayConfig &config) const;
        void validate(const ArrayConfig &config) const;
    };

    enum class SpatialLabel
    {
        antenna,
        post_stage1,
        post_stage2
    };

    const char *label_name(SpatialLabel label);

    // Complex observations indexed (s, m, t), stored with s fastest: index = s + S*(m + M*t).
    // The (S*M) block of one snapshot is therefore the subcarrier-major stacked vector.
    class SnapshotTensor
    {
    public:
        SnapshotTensor() = default;
        SnapshotTensor(std::size_t spatial_dim, std::size_t n_subcarriers, std::size_t n_snapshots, SpatialLabel label);

        std::size_t spatial_dim() const { return s_; }
        std::size_t n_subcarriers() const { return m_; }
        std::size_t n_snapshots() const { return t_; }
        SpatialLabel label() const { return label_; }
        void set_label(SpatialLabel label) { label_ = label; }

        cplx &operator()(std::size_t s, std::size_t m, std::size_t t) { return data_[s + s_ * (m + m_ * t)]; }
        cplx operator()(std::size_t s, std::size_t m, std::size_t t) const { return data_[s + s_ * (m + m_ * t)]; }

        cplx *column(std::size_t m, std::size_t t) { return data_.data() + s_ * (m + m_ * t); }
        const cplx *column(std::size_t m, std::size_t t) const { return data_.data() + s_ * (m + m_ * t); }

        // (S*M) x T view, column t = vec of snapshot t
        Eigen::Map<const CMat> stacked() const { return {data_.data(), Eigen::Index(s_ * m_), Eigen::Index(t_)}; }
        Eigen::Map<CMat> stacked() { return {data_.data(), Eigen::Index(s_ * m_), Eigen::Index(t_)}; }

        // S x (M*T) view, column m + M*t
        Eigen::Map<const CMat> spatial() const { return {data_.data(), Eigen::Index(s_), Eigen::Index(m_ * t_)}; }

        std::vector<cplx> &data() { return data_; }
        const std::vector<cplx> &data() const { return data_; }
        bool all_finite() const;

    private:
        std::size_t s_ = 0, m_ = 0, t_ = 0;
        SpatialLabel label_ = SpatialLabel::antenna;
        std::vector<cplx> data_;
    };

    // sum_l beta_l exp(-j 2 pi f_m tau_l) a_m(phi_l, theta_l), length N_V*N_H
    CVec channel_vector(const ArrayConfig &config, const std::vector<PathParams> &paths, std::size_t m);

    // Antenna-level snapshots H_m x_m + n_m. Snapshot t draws from its own generator seeded by
    // mix_seed(seed, t), so the result does not depend on evaluation order.
    SnapshotTensor simulate_snapshots(const ArrayConfig &config, const SimulationScenario &scenario);
}

#endif
