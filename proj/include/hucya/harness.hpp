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

#ifndef HUCYA_HARNESS_HPP
#define HUCYA_HARNESS_HPP

// Seeded Monte-Carlo driver: simulate -> stage 1 -> beam selection -> stage 2 -> interpolation -> joint
// estimation -> (optional) localization, with RMSE / CDF summaries and CSV emission.

#include "hucya/config_file.hpp"
#include "hucya/crlb.hpp"
#include "hucya/jade.hpp"
#include "hucya/localization.hpp"
#include "hucya/mdsi.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hucya
{
    enum class SweepAxis
    {
        none,
        snr_db,
        n_antennas, // values written N_VxN_H, e.g. 8x25
        n_paths
    };

    const char *sweep_axis_name(SweepAxis a);
    SweepAxis parse_sweep_axis(std::string_view text);

    struct SceneReflector
    {
        ReflectorPlane plane;
        cplx gain{0.6, 0.0};
    };

    // Geometric scene; when enabled the paths are generated from it (LOS first, then one bounce per reflector)
    struct SceneSpec
    {
        bool enabled = false;
        Vec3 bs = Vec3::Zero();
        Vec3 ms = Vec3(3.0, 1.0, -1.5);
        bool los = true;
        cplx los_gain = 1.0;
        std::vector<SceneReflector> reflectors;
        double clock_offset_std = 0.0; // s
        bool offset_known = false;
        double weight = 1.0;           // range-difference weight of the two-path fix
    };

    struct ExperimentConfig
    {
        // array
        std::size_t n_vertical = 8, n_horizontal = 25;
        double radius = 0.0;       // m; 0 selects 2 lambda_0
        double ring_spacing = 0.0; // m; 0 selects lambda_0 / 2
        double f0 = 30e9;
        double bandwidth = 2e9;
        std::size_t n_subcarriers = 20;
        // scenario
        double snr_db = 20.0;
        std::size_t n_snapshots = 20;
        GainModel gain_model = GainModel::per_snapshot_random;
        cplx pilot = 1.0;
        std::uint64_t seed = 1;
        std::vector<PathParams> paths;
        SceneSpec scene;
        // sweep
        SweepAxis sweep_axis = SweepAxis::none;
        std::vector<std::string> sweep_values;
        std::size_t trials = 1;
        // estimator
        double eta = 0.9;
        std::optional<double> gamma_override;
        std::size_t min_beams = 2;
        MdsiMode mdsi_mode = MdsiMode::offset_corrected;
        JadeOptions jade;
        bool compute_crlb = true;
        PipelinePoint crlb_point = PipelinePoint::antenna;
        // output
        std::string output_path = ".";
        bool record_timing = false;

        double resolved_radius() const;
        double resolved_ring_spacing() const;
        void validate() const; // throws config_error
    };

    ExperimentConfig parse_experiment(const ConfigDocument &doc);
    ExperimentConfig load_experiment(const std::string &path);

    struct SweepPoint
    {
        std::string value; // as written in the sweep list, "-" when not sweeping
        double snr_db = 0.0;
        std::size_t n_vertical = 0, n_horizontal = 0, n_paths = 0;
    };

    std::vector<SweepPoint> sweep_points(const ExperimentConfig &config);
    ArrayConfig array_for(const ExperimentConfig &config, const SweepPoint &point);

    // Folds the delay into [0, 1/delta_f) and moves the carrier phase of the removed whole periods into the gain,
    // leaving every subcarrier response unchanged
    PathParams fold_delay(const PathParams &path, const ArrayConfig &array);

    struct TruthPath
    {
        PathParams path;                        // folded
        std::optional<std::size_t> reflector;   // empty for LOS or for paths declared without a scene
    };

    std::vector<TruthPath> true_paths(const ExperimentConfig &config, const SweepPoint &point, const ArrayConfig &array,
                                      double clock_offset);

    struct TrialRecord
    {
        std::size_t trial = 0;
        std::uint64_t seed = 0;
        bool ok = false;
        std::string note;
        std::vector<TruthPath> truth;
        std::vector<PathEstimate> estimate; // estimate[k] matched to truth[k]
        std::vector<double> delay_error, elevation_error, azimuth_error; // absolute, s / rad / rad
        double position_error = std::numeric_limits<double>::quiet_NaN(); // m
        double clock_offset = 0.0;
        double wall_ms = 0.0;
        std::size_t n_beams = 0;
        std::size_t digital_channels = 0; // widest digital stage used
        std::size_t channel_bound = 0;    // max(N_V, (2P+1) N_B)
        bool pairing_fallback = false;
    };

    struct SummaryRow
    {
        std::string sweep_axis, sweep_value, parameter;
        double rmse = 0.0, crlb = 0.0;
        std::size_t trials = 0, exclusions = 0;
        double q10 = 0.0, q50 = 0.0, q60 = 0.0, q90 = 0.0, cdf_at_10cm = 0.0;
    };

    struct SweepResult
    {
        SweepPoint point;
        std::vector<TrialRecord> trials;
        std::vector<SummaryRow> summary; // delay, elevation, azimuth, then position when a scene is present
        std::optional<BoundReport> bound;
        std::string bound_error;
    };

    struct ExperimentResult
    {
        std::vector<SweepResult> points;
        SweepAxis axis = SweepAxis::none;
        bool rf_invariant_held = true;
    };

    // Truth-to-estimate assignment minimising sum of (B dtau)^2 + dtheta^2 + dphi^2; result[k] = estimate for truth k
    std::vector<std::size_t> match_estimates(const std::vector<PathParams> &truth, const std::vector<PathEstimate> &estimates,
                                             const ArrayConfig &array);

    TrialRecord run_trial(const ExperimentConfig &config, const SweepPoint &point, std::size_t point_index, std::size_t trial);
    ExperimentResult run_experiment(const ExperimentConfig &config);

    // Inverse of the empirical CDF (smallest sample with F >= p); NaN for an empty sample
    double empirical_quantile(std::vector<double> samples, double p);

    std::string format_number(double v); // %.9g, "nan", "inf", "-inf"
    std::string trials_csv(const ExperimentResult &result);
    std::string summary_csv(const ExperimentResult &result);
    std::vector<SummaryRow> parse_summary_csv(const std::string &text);
    // Writes <dir>/trials.csv and <dir>/summary.csv; throws std::runtime_error when unwritable
    void emit_csv(const ExperimentResult &result, const std::string &dir);

    extern const char *const kTrialsHeader;
    extern const char *const kSummaryHeader;
}

#endif
