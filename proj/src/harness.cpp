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

#include "hucya/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace hucya
{
    const char *const kTrialsHeader =
        "sweep_axis,sweep_value,trial,seed,status,path,tau_true,tau_est,theta_true,theta_est,phi_true,phi_est,"
        "tau_err,theta_err,phi_err,position_err,clock_offset,n_beams,digital_channels,pairing_fallback,wall_ms,note";
    const char *const kSummaryHeader =
        "sweep_axis,sweep_value,parameter,rmse,crlb,trials,exclusions,q10,q50,q60,q90,cdf_at_10cm";

    namespace
    {
        constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

        Vec3 parse_vec3(const ConfigSection &s, const std::string &key, const Vec3 &fallback)
        {
            if (!s.has(key))
                return fallback;
            const auto v = s.get_doubles(key);
            if (v.size() != 3)
                throw config_error("[" + s.name() + "] " + key + " needs three comma-separated numbers");
            return {v[0], v[1], v[2]};
        }

        template <class Fn>
        auto as_config(Fn &&fn) -> decltype(fn())
        {
            try
            {
                return fn();
            }
            catch (const config_error &)
            {
                throw;
            }
            catch (const std::invalid_argument &e)
            {
                throw config_error(e.what());
            }
            catch (const std::out_of_range &e)
            {
                throw config_error(e.what());
            }
        }

        std::string sanitize(std::string s)
        {
            for (auto &c : s)
                if (c == ',' || c == '\n' || c == '\r' || c == '"')
                    c = ';';
            return s;
        }

        std::pair<std::size_t, std::size_t> parse_antenna_pair(const std::string &v)
        {
            const auto x = v.find('x');
            if (x == std::string::npos)
                throw config_error("n_antennas sweep value '" + v + "' must be written N_VxN_H");
            const double a = parse_double(v.substr(0, x), "n_antennas"), b = parse_double(v.substr(x + 1), "n_antennas");
            if (a < 1 || b < 1 || a != std::floor(a) || b != std::floor(b))
                throw config_error("n_antennas sweep value '" + v + "' must hold positive integers");
            return {std::size_t(a), std::size_t(b)};
        }

        std::size_t available_paths(const ExperimentConfig &c)
        {
            if (c.scene.enabled)
                return (c.scene.los ? 1 : 0) + c.scene.reflectors.size();
            return c.paths.size();
        }

        double rmse(const std::vector<double> &e)
        {
            if (e.empty())
                return kNaN;
            double s = 0.0;
            for (double v : e)
                s += v * v;
            return std::sqrt(s / double(e.size()));
        }
    }

    const char *sweep_axis_name(SweepAxis a)
    {
        switch (a)
        {
        case SweepAxis::none:
            return "none";
        case SweepAxis::snr_db:
            return "snr_db";
        case SweepAxis::n_antennas:
            return "n_antennas";
        case SweepAxis::n_paths:
            return "n_paths";
        }
        return "none";
    }

    SweepAxis parse_sweep_axis(std::string_view text)
    {
        for (auto a : {SweepAxis::none, SweepAxis::snr_db, SweepAxis::n_antennas, SweepAxis::n_paths})
            if (text == sweep_axis_name(a))
                return a;
        throw config_error("unknown sweep axis '" + std::string(text) + "' (none, snr_db, n_antennas, n_paths)");
    }

    // ---------------------------------------------------------------- configuration

    double ExperimentConfig::resolved_radius() const { return radius > 0.0 ? radius : 2.0 * kSpeedOfLight / f0; }
    double ExperimentConfig::resolved_ring_spacing() const
    {
        return ring_spacing > 0.0 ? ring_spacing : 0.5 * kSpeedOfLight / f0;
    }

    void ExperimentConfig::validate() const
    {
        if (trials < 1)
            throw config_error("trials must be at least 1");
        if (!(eta > 0.0 && eta <= 1.0))
            throw config_error("eta must lie in (0, 1]");
        if (gamma_override && !(*gamma_override >= 0.0))
            throw config_error("gamma must be non-negative");
        if (n_snapshots < 1)
            throw config_error("n_snapshots must be at least 1");
        if (!(f0 > 0.0) || !(bandwidth > 0.0))
            throw config_error("f0 and bandwidth must be positive");
        if (scene.enabled && !(scene.clock_offset_std >= 0.0))
            throw config_error("clock_offset_std_ns must be non-negative");
        if (sweep_axis == SweepAxis::none && !sweep_values.empty())
            throw config_error("sweep values given without a sweep axis");
        if (sweep_axis != SweepAxis::none && sweep_values.empty())
            throw config_error("sweep axis given without values");
        for (const auto &p : sweep_points(*this))
        {
            const ArrayConfig a = array_for(*this, p);
            if (p.n_paths < 1 || p.n_paths > available_paths(*this))
                throw config_error("sweep point " + p.value + ": needs " + std::to_string(p.n_paths) + " paths, " +
                                   std::to_string(available_paths(*this)) + " declared");
            if (p.n_paths > 16)
                throw config_error("at most 16 paths are supported");
            if (a.n_modes() <= p.n_paths)
                throw config_error("2P+1 must exceed the number of paths");
            if (gain_model == GainModel::per_snapshot_random && n_snapshots < p.n_paths)
                throw config_error("n_snapshots must be at least the number of paths for random gains");
            if (min_beams < 2 || min_beams > a.n_vertical())
                throw config_error("min_beams must lie in [2, N_V]");
        }
    }

    ExperimentConfig parse_experiment(const ConfigDocument &doc)
    {
        static const std::vector<std::string> known = {"array", "scenario", "path", "scene", "reflector", "sweep", "estimator", "output"};
        for (const auto &s : doc.sections())
            if (std::find(known.begin(), known.end(), s.name()) == known.end())
                throw config_error("line " + std::to_string(s.line()) + ": unknown section [" + s.name() + "]");

        ExperimentConfig c;
        if (const auto *s = doc.first("array"))
        {
            c.n_vertical = s->get_count("n_vertical", c.n_vertical);
            c.n_horizontal = s->get_count("n_horizontal", c.n_horizontal);
            c.f0 = s->get_double("f0_hz", c.f0);
            c.bandwidth = s->get_double("bandwidth_hz", c.bandwidth);
            c.n_subcarriers = s->get_count("n_subcarriers", c.n_subcarriers);
            if (s->has("radius_m") && s->has("radius_wavelengths"))
                throw config_error("[array] give radius_m or radius_wavelengths, not both");
            if (s->has("ring_spacing_m") && s->has("ring_spacing_wavelengths"))
                throw config_error("[array] give ring_spacing_m or ring_spacing_wavelengths, not both");
            c.radius = s->get_double("radius_m", 0.0);
            if (s->has("radius_wavelengths"))
                c.radius = s->get_double("radius_wavelengths", 2.0) * kSpeedOfLight / c.f0;
            c.ring_spacing = s->get_double("ring_spacing_m", 0.0);
            if (s->has("ring_spacing_wavelengths"))
                c.ring_spacing = s->get_double("ring_spacing_wavelengths", 0.5) * kSpeedOfLight / c.f0;
            s->reject_unknown();
        }
        if (const auto *s = doc.first("scenario"))
        {
            c.snr_db = s->get_double("snr_db", c.snr_db);
            c.n_snapshots = s->get_count("n_snapshots", c.n_snapshots);
            const std::string gm = s->get_string("gain_model", "per_snapshot_random");
            if (gm == "fixed")
                c.gain_model = GainModel::fixed;
            else if (gm == "per_snapshot_random")
                c.gain_model = GainModel::per_snapshot_random;
            else
                throw config_error("unknown gain_model '" + gm + "' (fixed, per_snapshot_random)");
            c.pilot = cplx(s->get_double("pilot_re", 1.0), s->get_double("pilot_im", 0.0));
            c.seed = s->get_u64("seed", c.seed);
            s->reject_unknown();
        }
        for (const auto *s : doc.all("path"))
        {
            c.paths.push_back(as_config([&]
                                        { return PathParams(deg2rad(s->get_double("azimuth_deg", 0.0)),
                                                            deg2rad(s->get_double("elevation_deg", 90.0)),
                                                            s->get_double("delay_ns", 0.0) * 1e-9,
                                                            cplx(s->get_double("gain_re", 1.0), s->get_double("gain_im", 0.0))); }));
            s->reject_unknown();
        }
        if (const auto *s = doc.first("scene"))
        {
            c.scene.enabled = true;
            c.scene.bs = parse_vec3(*s, "bs", c.scene.bs);
            c.scene.ms = parse_vec3(*s, "ms", c.scene.ms);
            c.scene.los = s->get_bool("los", true);
            c.scene.los_gain = cplx(s->get_double("los_gain_re", 1.0), s->get_double("los_gain_im", 0.0));
            c.scene.clock_offset_std = s->get_double("clock_offset_std_ns", 0.0) * 1e-9;
            c.scene.offset_known = s->get_bool("offset_known", false);
            c.scene.weight = s->get_double("weight", 1.0);
            if (!(c.scene.weight >= 0.0) || !std::isfinite(c.scene.weight))
                throw config_error("[scene] weight must be finite and non-negative");
            s->reject_unknown();
        }
        for (const auto *s : doc.all("reflector"))
        {
            if (!c.scene.enabled)
                throw config_error("line " + std::to_string(s->line()) + ": [reflector] requires a [scene] section");
            SceneReflector r;
            r.plane.point = parse_vec3(*s, "point", Vec3::Zero());
            const Vec3 n = parse_vec3(*s, "normal", Vec3::UnitZ());
            if (n.norm() <= 0.0)
                throw config_error("[reflector] normal must be nonzero");
            r.plane.normal = n.normalized();
            r.gain = cplx(s->get_double("gain_re", 0.6), s->get_double("gain_im", 0.0));
            if (std::abs(r.gain) <= 0.0)
                throw config_error("[reflector] gain must be nonzero");
            c.scene.reflectors.push_back(r);
            s->reject_unknown();
        }
        if (const auto *s = doc.first("sweep"))
        {
            c.sweep_axis = parse_sweep_axis(s->get_string("axis", "none"));
            c.sweep_values = s->get_list("values");
            c.trials = s->get_count("trials", c.trials);
            s->reject_unknown();
        }
        if (const auto *s = doc.first("estimator"))
        {
            c.eta = s->get_double("eta", c.eta);
            if (s->has("gamma"))
                c.gamma_override = s->get_double("gamma", 0.0);
            c.min_beams = s->get_count("min_beams", c.min_beams);
            as_config([&]
                      {
                          c.mdsi_mode = parse_mdsi_mode(s->get_string("mdsi_mode", mdsi_mode_name(c.mdsi_mode)));
                          c.jade.frequency_model = parse_frequency_model(s->get_string("frequency_model", "reference"));
                          c.jade.music_block = parse_music_block(s->get_string("music_block", "kronecker"));
                          c.jade.manifold = parse_manifold(s->get_string("manifold", "exact_qdft"));
                          c.crlb_point = parse_pipeline_point(s->get_string("crlb_point", "antenna"));
                          return 0; });
            c.jade.music_grid = s->get_count("music_grid", c.jade.music_grid);
            c.jade.refine_tol = s->get_double("refine_tol", c.jade.refine_tol);
            c.compute_crlb = s->get_bool("crlb", true);
            if (c.jade.music_grid < 8)
                throw config_error("music_grid must be at least 8");
            if (!(c.jade.refine_tol > 0.0))
                throw config_error("refine_tol must be positive");
            s->reject_unknown();
        }
        if (const auto *s = doc.first("output"))
        {
            c.output_path = s->get_string("path", c.output_path);
            c.record_timing = s->get_bool("timing", false);
            s->reject_unknown();
        }
        if (!c.scene.enabled && c.paths.empty())
            throw config_error(doc.origin() + ": no [path] sections and no [scene]");
        c.validate();
        return c;
    }

    ExperimentConfig load_experiment(const std::string &path)
    {
        return parse_experiment(ConfigDocument::load(path));
    }

    std::vector<SweepPoint> sweep_points(const ExperimentConfig &c)
    {
        SweepPoint base{"-", c.snr_db, c.n_vertical, c.n_horizontal, available_paths(c)};
        if (c.sweep_axis == SweepAxis::none)
            return {base};
        std::vector<SweepPoint> out;
        for (const auto &v : c.sweep_values)
        {
            SweepPoint p = base;
            p.value = v;
            switch (c.sweep_axis)
            {
            case SweepAxis::snr_db:
                p.snr_db = parse_double(v, "snr_db sweep value");
                break;
            case SweepAxis::n_antennas:
                std::tie(p.n_vertical, p.n_horizontal) = parse_antenna_pair(v);
                break;
            case SweepAxis::n_paths:
            {
                const double n = parse_double(v, "n_paths sweep value");
                if (n < 1 || n != std::floor(n))
                    throw config_error("n_paths sweep value '" + v + "' must be a positive integer");
                p.n_paths = std::size_t(n);
                break;
            }
            case SweepAxis::none:
                break;
            }
            out.push_back(p);
        }
        return out;
    }

    ArrayConfig array_for(const ExperimentConfig &c, const SweepPoint &p)
    {
        return as_config([&]
                         { return ArrayConfig(p.n_vertical, p.n_horizontal, c.resolved_radius(), c.resolved_ring_spacing(), c.f0,
                                              c.bandwidth / double(c.n_subcarriers), c.n_subcarriers); });
    }

    PathParams fold_delay(const PathParams &path, const ArrayConfig &array)
    {
        const double period = 1.0 / array.delta_f();
        double folded = std::fmod(path.delay, period);
        if (folded < 0.0)
            folded += period;
        if (folded >= period)
            folded = 0.0;
        PathParams out = path;
        // e^{-j 2 pi f_m tau} = e^{-j 2 pi f0 (tau - tau')} e^{-j 2 pi f_m tau'} whenever tau - tau' is a whole period
        out.gain = path.gain * std::polar(1.0, -2.0 * kPi * array.f0() * (path.delay - folded));
        out.delay = folded;
        return out;
    }

    std::vector<TruthPath> true_paths(const ExperimentConfig &c, const SweepPoint &p, const ArrayConfig &array,
                                      double clock_offset)
    {
        std::vector<TruthPath> out;
        if (!c.scene.enabled)
        {
            for (std::size_t l = 0; l < p.n_paths; ++l)
            {
                PathParams q = c.paths[l];
                q.delay += clock_offset;
                out.push_back({fold_delay(q, array), std::nullopt});
            }
            return out;
        }
        const auto make = [&](const Vec3 &target, cplx gain, std::optional<std::size_t> refl)
        {
            const Vec3 v = target - c.scene.bs;
            const double len = v.norm();
            if (len <= 0.0)
                throw config_error("scene: mobile station coincides with an anchor");
            const double theta = std::acos(std::clamp(v.z() / len, -1.0, 1.0));
            if (!(theta > 0.0 && theta < kPi))
                throw config_error("scene: path arrives along the array axis");
            const PathParams q(wrap_two_pi(std::atan2(v.y(), v.x())), theta, 0.0, gain);
            PathParams r = q;
            r.delay = len / kSpeedOfLight + clock_offset;
            out.push_back({fold_delay(r, array), refl});
        };
        if (c.scene.los)
            make(c.scene.ms, c.scene.los_gain, std::nullopt);
        for (std::size_t i = 0; i < c.scene.reflectors.size(); ++i)
            make(mirror_point(c.scene.ms, c.scene.reflectors[i].plane), c.scene.reflectors[i].gain, i);
        out.resize(std::min(out.size(), p.n_paths));
        return out;
    }

    // ---------------------------------------------------------------- trials

    std::vector<std::size_t> match_estimates(const std::vector<PathParams> &truth, const std::vector<PathEstimate> &est,
                                             const ArrayConfig &array)
    {
        if (truth.size() != est.size())
            throw std::invalid_argument("match_estimates: truth and estimate counts differ");
        const auto n = Eigen::Index(truth.size());
        const double period = 1.0 / array.delta_f();
        RMat cost(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
            {
                const auto &t = truth[std::size_t(i)];
                const auto &e = est[std::size_t(j)];
                const double dt = circular_diff(e.delay, t.delay, period) * array.bandwidth();
                const double dth = e.elevation - t.elevation;
                const double dph = circular_diff(e.azimuth, t.azimuth, 2.0 * kPi);
                cost(i, j) = dt * dt + dth * dth + dph * dph;
            }
        return optimal_assignment(cost);
    }

    TrialRecord run_trial(const ExperimentConfig &c, const SweepPoint &p, std::size_t point_index, std::size_t trial)
    {
        const auto start = std::chrono::steady_clock::now();
        const ArrayConfig array = array_for(c, p);
        TrialRecord rec;
        rec.trial = trial;
        rec.seed = mix_seed(c.seed, (std::uint64_t(point_index) << 32) + trial);

        if (c.scene.enabled && c.scene.clock_offset_std > 0.0)
        {
            std::mt19937_64 g(mix_seed(rec.seed, 0x0ff5e7ULL));
            std::normal_distribution<double> nd(0.0, c.scene.clock_offset_std);
            rec.clock_offset = nd(g);
        }
        rec.truth = true_paths(c, p, array, rec.clock_offset);

        SimulationScenario sc;
        for (const auto &t : rec.truth)
            sc.paths.push_back(t.path);
        sc.snr_db = p.snr_db;
        sc.n_snapshots = c.n_snapshots;
        sc.pilot = c.pilot;
        sc.gain_model = c.gain_model;
        sc.seed = rec.seed;

        try
        {
            const SnapshotTensor y = simulate_snapshots(array, sc);
            const BeamformerStage s1 = build_stage1(array);
            const SnapshotTensor y1 = apply_stage(s1, y);
            const double gamma = c.gamma_override ? *c.gamma_override : dispersion_factor_worst_case(array);
            const BeamSelection sel = select_beams(y1, c.eta, gamma, p.n_paths, c.min_beams);
            const BeamformerStage s2 = build_stage2(array, sel);
            const SnapshotTensor yr = reconstruct(apply_stage(s2, y), array, sel, c.mdsi_mode);
            rec.n_beams = sel.n_beams();
            rec.digital_channels = std::max(s1.rf_chain_count(), s2.rf_chain_count());
            rec.channel_bound = std::max(array.n_vertical(), array.n_modes() * sel.n_beams());

            const JadeEstimates est = estimate_all(yr, sel, array, p.n_paths, c.jade);
            rec.pairing_fallback = est.pairing_fallback;
            const auto match = match_estimates(sc.paths, est.paths, array);
            const double period = 1.0 / array.delta_f();
            for (std::size_t k = 0; k < sc.paths.size(); ++k)
            {
                const PathEstimate &e = est.paths[match[k]];
                rec.estimate.push_back(e);
                rec.delay_error.push_back(std::abs(circular_diff(e.delay, sc.paths[k].delay, period)));
                rec.elevation_error.push_back(std::abs(e.elevation - sc.paths[k].elevation));
                rec.azimuth_error.push_back(std::abs(circular_diff(e.azimuth, sc.paths[k].azimuth, 2.0 * kPi)));
            }
            rec.ok = true;
        }
        catch (const numerical_error &e)
        {
            rec.note = e.what();
        }
        catch (const std::invalid_argument &e)
        {
            rec.note = e.what();
        }
        catch (const std::domain_error &e)
        {
            rec.note = e.what();
        }

        if (rec.ok && c.scene.enabled)
        {
            SceneModel scene;
            scene.bs_position = c.scene.bs;
            for (const auto &r : c.scene.reflectors)
                scene.reflectors.push_back(r.plane);
            if (c.scene.offset_known)
                scene.clock_offset = rec.clock_offset;
            try
            {
                const auto ray = [&](std::size_t k)
                {
                    const auto &e = rec.estimate[k];
                    return ray_from_estimate(e.delay, e.elevation, e.azimuth, scene, rec.truth[k].reflector);
                };
                Vec3 pos;
                if (rec.truth.size() >= 2)
                {
                    TwoPathOptions opt;
                    opt.weight = c.scene.weight;
                    const double dtau = circular_diff(rec.estimate[0].delay, rec.estimate[1].delay, 1.0 / array.delta_f());
                    pos = locate_two_paths(ray(0), ray(1), dtau, 0.0, opt).position;
                }
                else
                    pos = locate_known_offset(ray(0));
                rec.position_error = (pos - c.scene.ms).norm();
            }
            catch (const std::exception &e)
            {
                rec.note = std::string("localization: ") + e.what();
            }
        }
        if (c.record_timing)
            rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return rec;
    }

    double empirical_quantile(std::vector<double> s, double p)
    {
        if (s.empty())
            return kNaN;
        std::sort(s.begin(), s.end());
        const double idx = std::ceil(p * double(s.size()) - 1e-12);
        const auto k = std::size_t(std::clamp(idx, 1.0, double(s.size()))) - 1;
        return s[k];
    }

    ExperimentResult run_experiment(const ExperimentConfig &c)
    {
        c.validate();
        ExperimentResult result;
        result.axis = c.sweep_axis;
        const auto points = sweep_points(c);
        for (std::size_t pi = 0; pi < points.size(); ++pi)
        {
            SweepResult sr;
            sr.point = points[pi];
            const ArrayConfig array = array_for(c, sr.point);
            for (std::size_t t = 0; t < c.trials; ++t)
            {
                sr.trials.push_back(run_trial(c, sr.point, pi, t));
                const auto &r = sr.trials.back();
                if (r.ok && r.digital_channels > r.channel_bound)
                    result.rf_invariant_held = false;
            }

            if (c.compute_crlb && std::isfinite(sr.point.snr_db))
            {
                try
                {
                    SimulationScenario nominal;
                    for (const auto &t : true_paths(c, sr.point, array, 0.0))
                        nominal.paths.push_back(t.path);
                    nominal.snr_db = sr.point.snr_db;
                    nominal.n_snapshots = c.n_snapshots;
                    nominal.pilot = c.pilot;
                    if (c.crlb_point == PipelinePoint::post_stage2)
                    {
                        SimulationScenario clean = nominal;
                        clean.snr_db = std::numeric_limits<double>::infinity();
                        clean.gain_model = GainModel::fixed;
                        clean.n_snapshots = 1;
                        const SnapshotTensor y1 = apply_stage(build_stage1(array), simulate_snapshots(array, clean));
                        const double gamma = c.gamma_override ? *c.gamma_override : dispersion_factor_worst_case(array);
                        const BeamSelection sel = select_beams(y1, c.eta, gamma, sr.point.n_paths, c.min_beams);
                        sr.bound = crlb(array, nominal, c.crlb_point, &sel);
                    }
                    else
                        sr.bound = crlb(array, nominal, c.crlb_point);
                }
                catch (const std::exception &e)
                {
                    sr.bound_error = e.what();
                }
            }

            std::vector<double> de, te, pe, pos;
            std::size_t ok = 0, excluded = 0, pos_missing = 0;
            for (const auto &r : sr.trials)
            {
                if (!r.ok)
                {
                    ++excluded;
                    continue;
                }
                ++ok;
                de.insert(de.end(), r.delay_error.begin(), r.delay_error.end());
                te.insert(te.end(), r.elevation_error.begin(), r.elevation_error.end());
                pe.insert(pe.end(), r.azimuth_error.begin(), r.azimuth_error.end());
                if (std::isfinite(r.position_error))
                    pos.push_back(r.position_error);
                else
                    ++pos_missing;
            }
            const std::string axis = sweep_axis_name(c.sweep_axis);
            const auto row = [&](const char *name, const std::vector<double> &e, const std::vector<double> *bound)
            {
                SummaryRow s{axis, sr.point.value, name, rmse(e), bound ? rmse(*bound) : kNaN, ok, excluded,
                             kNaN, kNaN, kNaN, kNaN, kNaN};
                return s;
            };
            sr.summary.push_back(row("delay", de, sr.bound ? &sr.bound->delay : nullptr));
            sr.summary.push_back(row("elevation", te, sr.bound ? &sr.bound->elevation : nullptr));
            sr.summary.push_back(row("azimuth", pe, sr.bound ? &sr.bound->azimuth : nullptr));
            if (c.scene.enabled)
            {
                SummaryRow s{axis, sr.point.value, "position", rmse(pos), kNaN, pos.size(), excluded + pos_missing,
                             empirical_quantile(pos, 0.1), empirical_quantile(pos, 0.5), empirical_quantile(pos, 0.6),
                             empirical_quantile(pos, 0.9), kNaN};
                if (!pos.empty() || ok > 0)
                {
                    std::size_t below = 0;
                    for (double v : pos)
                        below += v < 0.1 ? 1 : 0;
                    // unusable fixes count as misses
                    s.cdf_at_10cm = ok > 0 ? double(below) / double(ok) : kNaN;
                }
                sr.summary.push_back(s);
            }
            result.points.push_back(std::move(sr));
        }
        return result;
    }

    // ---------------------------------------------------------------- CSV

    std::string format_number(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return buf;
    }

    std::string trials_csv(const ExperimentResult &result)
    {
        std::ostringstream out;
        out << kTrialsHeader << '\n';
        const char *axis = sweep_axis_name(result.axis);
        for (const auto &sr : result.points)
            for (const auto &r : sr.trials)
            {
                const auto prefix = [&](long path)
                {
                    out << axis << ',' << sr.point.value << ',' << r.trial << ',' << r.seed << ',' << (r.ok ? "ok" : "excluded")
                        << ',' << path << ',';
                };
                const auto suffix = [&]
                {
                    out << format_number(r.position_error) << ',' << format_number(r.clock_offset) << ',' << r.n_beams << ','
                        << r.digital_channels << ',' << (r.pairing_fallback ? 1 : 0) << ',' << format_number(r.wall_ms) << ','
                        << sanitize(r.note) << '\n';
                };
                if (!r.ok)
                {
                    prefix(-1);
                    for (int i = 0; i < 9; ++i)
                        out << "nan,";
                    suffix();
                    continue;
                }
                for (std::size_t k = 0; k < r.truth.size(); ++k)
                {
                    const auto &t = r.truth[k].path;
                    const auto &e = r.estimate[k];
                    prefix(long(k));
                    out << format_number(t.delay) << ',' << format_number(e.delay) << ',' << format_number(t.elevation) << ','
                        << format_number(e.elevation) << ',' << format_number(t.azimuth) << ',' << format_number(e.azimuth) << ','
                        << format_number(r.delay_error[k]) << ',' << format_number(r.elevation_error[k]) << ','
                        << format_number(r.azimuth_error[k]) << ',';
                    suffix();
                }
            }
        return out.str();
    }

    std::string summary_csv(const ExperimentResult &result)
    {
        std::ostringstream out;
        out << kSummaryHeader << '\n';
        for (const auto &sr : result.points)
            for (const auto &s : sr.summary)
                out << s.sweep_axis << ',' << s.sweep_value << ',' << s.parameter << ',' << format_number(s.rmse) << ','
                    << format_number(s.crlb) << ',' << s.trials << ',' << s.exclusions << ',' << format_number(s.q10) << ','
                    << format_number(s.q50) << ',' << format_number(s.q60) << ',' << format_number(s.q90) << ','
                    << format_number(s.cdf_at_10cm) << '\n';
        return out.str();
    }

    std::vector<SummaryRow> parse_summary_csv(const std::string &text)
    {
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line) || line != kSummaryHeader)
            throw std::invalid_argument("parse_summary_csv: missing or unexpected header");
        const auto num = [](const std::string &s)
        {
            char *end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size())
                throw std::invalid_argument("parse_summary_csv: bad number '" + s + "'");
            return v;
        };
        std::vector<SummaryRow> out;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            const auto f = split(line, ',');
            if (f.size() != 12)
                throw std::invalid_argument("parse_summary_csv: expected 12 fields");
            SummaryRow r{f[0], f[1], f[2], num(f[3]), num(f[4]), std::size_t(num(f[5])), std::size_t(num(f[6])),
                         num(f[7]), num(f[8]), num(f[9]), num(f[10]), num(f[11])};
            out.push_back(r);
        }
        return out;
    }

    void emit_csv(const ExperimentResult &result, const std::string &dir)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        const auto write = [&](const std::string &name, const std::string &body)
        {
            const auto path = (std::filesystem::path(dir) / name).string();
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            if (!f)
                throw std::runtime_error("cannot write '" + path + "'");
            f << body;
            if (!f)
                throw std::runtime_error("write failed for '" + path + "'");
        };
        write("trials.csv", trials_csv(result));
        write("summary.csv", summary_csv(result));
    }
}
