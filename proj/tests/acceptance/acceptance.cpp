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
// Acceptance suite: one PASS/FAIL line per criterion; exit status 0 only when every criterion passes.
#include "hucya/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#ifndef HUCYA_SOURCE_DIR
#define HUCYA_SOURCE_DIR "."
#endif

using namespace hucya;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    std::string config_path(const char *name) { return std::string(HUCYA_SOURCE_DIR) + "/configs/" + name; }

    std::string fmt(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return buf;
    }

    double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    const SummaryRow &row(const SweepResult &r, const std::string &parameter)
    {
        for (const auto &s : r.summary)
            if (s.parameter == parameter)
                return s;
        throw std::runtime_error("summary has no row for " + parameter);
    }

    // Shared across criteria: every experiment result, for the RF-chain invariant
    struct Ledger
    {
        std::size_t trials = 0, violations = 0;
        bool invariant_flag = true;
        void add(const ExperimentResult &r)
        {
            invariant_flag = invariant_flag && r.rf_invariant_held;
            for (const auto &p : r.points)
                for (const auto &t : p.trials)
                {
                    if (!t.ok)
                        continue;
                    ++trials;
                    if (t.digital_channels > t.channel_bound)
                        ++violations;
                }
        }
    } g_channels;

    ExperimentResult run(const ExperimentConfig &c)
    {
        ExperimentResult r = run_experiment(c);
        g_channels.add(r);
        return r;
    }

    ExperimentConfig single_point(ExperimentConfig c, double snr_db, std::size_t trials)
    {
        c.sweep_axis = SweepAxis::none;
        c.sweep_values.clear();
        c.snr_db = snr_db;
        c.trials = trials;
        return c;
    }

    // Results reused by later criteria
    ExperimentResult g_snr_sweep, g_mdsi_on, g_mdsi_off;
    std::string g_mdsi_mode;

    // ---------------------------------------------------------------- 1

    Outcome noiseless_exactness()
    {
        const ExperimentConfig c = load_experiment(config_path("noiseless.cfg"));
        const auto t0 = std::chrono::steady_clock::now();
        const ExperimentResult r = run(c);
        const double secs = seconds_since(t0);
        double dmax = 0.0, emax = 0.0, amax = 0.0;
        bool ok = r.points.size() == 1 && !r.points[0].trials.empty(), paired = true;
        for (const auto &t : r.points.empty() ? std::vector<TrialRecord>{} : r.points[0].trials)
        {
            ok = ok && t.ok && t.truth.size() == 3;
            if (!t.ok)
                continue;
            for (std::size_t k = 0; k < t.truth.size(); ++k)
            {
                dmax = std::max(dmax, t.delay_error[k]);
                emax = std::max(emax, t.elevation_error[k]);
                amax = std::max(amax, t.azimuth_error[k]);
                // correct pairing: the estimate matched to truth k is nearest to it in every parameter separately
                for (std::size_t j = 0; j < t.truth.size(); ++j)
                    if (j != k)
                    {
                        const auto &e = t.estimate[j];
                        const auto &p = t.truth[k].path;
                        paired = paired && std::abs(e.elevation - p.elevation) > t.elevation_error[k];
                        paired = paired && std::abs(circular_diff(e.azimuth, p.azimuth, 2 * kPi)) > t.azimuth_error[k];
                    }
            }
        }
        const bool pass = ok && paired && dmax <= 1e-12 && emax <= 1e-5 && amax <= 1e-3 && secs < 30.0;
        return {pass, "20x30 M=20 Np=3 noiseless: max errors delay " + fmt(dmax * 1e9) + " ns, elevation " + fmt(emax) +
                          " rad, azimuth " + fmt(amax) + " rad, pairing " + (paired ? "correct" : "WRONG") + ", " +
                          fmt(secs) + " s"};
    }

    // ---------------------------------------------------------------- 2

    Outcome bessel_bound()
    {
        double sup = 0.0;
        bool monotone = true;
        std::vector<double> prev(100, std::numeric_limits<double>::infinity());
        double prev_sup = std::numeric_limits<double>::infinity();
        for (int v = 1; v <= 50; ++v)
        {
            double vs = 0.0;
            for (int i = 0; i < 100; ++i)
            {
                const double rho = 0.01 * (i + 1);
                const double j = std::abs(bessel_j(v, v * rho));
                vs = std::max(vs, j);
                monotone = monotone && j <= prev[std::size_t(i)] * (1.0 + 1e-12);
                prev[std::size_t(i)] = j;
            }
            monotone = monotone && vs <= prev_sup;
            prev_sup = vs;
            sup = std::max(sup, vs);
        }
        return {sup <= 0.4401 + 1e-3 && monotone, "max |J_v(v rho)| over v in [1,50], rho in (0,1] = " + fmt(sup) +
                                                      (monotone ? ", nonincreasing in v" : ", NOT monotone in v")};
    }

    // ---------------------------------------------------------------- 3

    Outcome leakage()
    {
        const double kr_scale = 2 * kPi * 2.0;
        double worst30 = 0.0, best10 = 1.0;
        for (int i = 0; i < 10; ++i)
            for (int k = 0; k < 10; ++k)
            {
                const double theta = 0.1 + (kPi - 0.2) * i / 9.0, phi = 2 * kPi * k / 10.0;
                const double kr = kr_scale * std::sin(theta);
                worst30 = std::max(worst30, phase_mode_alias_fraction(30, 12, kr, phi));
                best10 = std::min(best10, phase_mode_alias_fraction(10, 12, kr, phi));
            }
        return {worst30 < 1e-2 && best10 > 5e-2,
                "P=12, 100-point grid: N_H=30 max fraction " + fmt(worst30) + ", N_H=10 min fraction " + fmt(best10)};
    }

    // ---------------------------------------------------------------- 4

    Outcome highest_order_constant()
    {
        const int p = highest_order(30e9, 2.0 * kSpeedOfLight / 30e9);
        return {p == 12, "r = 2 lambda0 at 30 GHz gives P = " + std::to_string(p)};
    }

    // ---------------------------------------------------------------- 5

    Outcome beam_squint()
    {
        const double lc = kSpeedOfLight / 30e9;
        const double theta = deg2rad(60.0);
        std::vector<std::size_t> all(60);
        std::iota(all.begin(), all.end(), std::size_t(1));
        const ArrayConfig centre(60, 12, lc, 0.5 * lc, 30e9, 1e6, 2);
        const CVec d0 = dirichlet_response(centre, 30e9, theta, all);
        Eigen::Index best = 0;
        d0.cwiseAbs().maxCoeff(&best);
        const std::size_t beam = all[std::size_t(best)];

        // bandwidth giving gamma = 3 at sixty degrees, centred on 30 GHz
        const double bw = 3.0 / (60.0 * 0.25) * 30e9;
        const ArrayConfig a(60, 12, lc, 0.5 * lc, 30e9 - 0.5 * bw, bw / 200.0, 200);
        const double gamma = dispersion_factor(a, {theta});
        double smax = 0, smin = 1e300, cmax = 0, cmin = 1e300;
        for (std::size_t m = 0; m <= 200; ++m)
        {
            const double f = a.f0() + double(m) * a.delta_f();
            const CVec d = dirichlet_response(a, f, theta, {14, 15, 16});
            smax = std::max(smax, std::norm(d[1])), smin = std::min(smin, std::norm(d[1]));
            cmax = std::max(cmax, d.squaredNorm()), cmin = std::min(cmin, d.squaredNorm());
        }
        const double sdb = 10 * std::log10(smax / smin), cdb = 10 * std::log10(cmax / cmin);
        return {beam == 15 && sdb > 3.0 && cdb <= 3.0, "dominant beam " + std::to_string(beam) + ", gamma " + fmt(gamma) +
                                                           ": beam 15 ripple " + fmt(sdb) + " dB, beams {14,15,16} ripple " +
                                                           fmt(cdb) + " dB (gate 3 dB)"};
    }

    // ---------------------------------------------------------------- 6

    Outcome dispersion_boundary()
    {
        const double g = dispersion_factor(60, 1.0 / 15.0, 0.25);
        return {std::abs(g - 1.0) <= 1e-9, "gamma(N_V=60, alpha=1/15, chi=0.25) = " + fmt(g) +
                                               " (|gamma-1| = " + fmt(std::abs(g - 1.0)) + ")"};
    }

    // ---------------------------------------------------------------- 8

    // Mean principal-angle distance of the interpolated stage-2 output to the reference-frequency target
    double distance_to_ideal(const ArrayConfig &a, MdsiMode mode)
    {
        double total = 0.0;
        int count = 0;
        for (int k = 0; k < 12; ++k)
        {
            const double theta = 0.4 + (kPi - 0.8) * k / 11.0;
            SimulationScenario sc;
            sc.paths = {PathParams(0.3 + 0.5 * k, theta, 2e-9, 1.0)};
            sc.gain_model = GainModel::fixed;
            const SnapshotTensor y = simulate_snapshots(a, sc);
            const BeamSelection sel = select_beams(apply_stage(build_stage1(a), y), 0.9, dispersion_factor_worst_case(a), 1);
            const SnapshotTensor r = reconstruct(apply_stage(build_stage2(a, sel), y), a, sel, mode);
            const auto n = Eigen::Index(r.spatial_dim());
            for (std::size_t m = 0; m < a.n_subcarriers(); ++m, ++count)
                total += principal_angle(Eigen::Map<const CVec>(r.column(m, 0), n), ideal_reference(a, sel, sc.paths, m));
        }
        return total / count;
    }

    Outcome mdsi_benefit()
    {
        const ExperimentConfig base = single_point(load_experiment(config_path("mdsi_reference.cfg")), 20.0, 50);
        const ArrayConfig a = array_for(base, sweep_points(base)[0]);
        const double d_printed = distance_to_ideal(a, MdsiMode::as_printed);
        const double d_offset = distance_to_ideal(a, MdsiMode::offset_corrected);
        const double d_off = distance_to_ideal(a, MdsiMode::disabled);
        const MdsiMode chosen = d_printed <= d_offset ? MdsiMode::as_printed : MdsiMode::offset_corrected;
        g_mdsi_mode = mdsi_mode_name(chosen);

        ExperimentConfig on = base, off = base;
        on.mdsi_mode = chosen;
        off.mdsi_mode = MdsiMode::disabled;
        g_mdsi_on = run(on);
        g_mdsi_off = run(off);
        const SweepResult &pon = g_mdsi_on.points[0], &poff = g_mdsi_off.points[0];
        bool better = true;
        std::string cmp;
        for (const char *p : {"delay", "elevation", "azimuth"})
        {
            better = better && row(pon, p).rmse <= row(poff, p).rmse;
            cmp += std::string(" ") + p + " " + fmt(row(pon, p).rmse) + " vs " + fmt(row(poff, p).rmse) + ";";
        }
        const double ratio = row(pon, "delay").rmse / row(pon, "delay").crlb;

        std::string production;
        for (const auto &pt : g_snr_sweep.points)
            if (pt.point.snr_db == 20.0)
                production = " | per-subcarrier model, interpolation off: delay RMSE/CRLB " +
                             fmt(row(pt, "delay").rmse / row(pt, "delay").crlb);
        return {better && ratio <= 3.0,
                "reference model, 8x25, 20 dB, 50 trials, mode " + g_mdsi_mode + " (distance to ideal: as_printed " +
                    fmt(d_printed) + ", offset_corrected " + fmt(d_offset) + ", disabled " + fmt(d_off) +
                    "); RMSE on vs off:" + cmp + " delay RMSE/CRLB " + fmt(ratio) + production};
    }

    // ---------------------------------------------------------------- 9

    Outcome monotonicity()
    {
        const ExperimentConfig snr = load_experiment(config_path("snr_sweep.cfg"));
        g_snr_sweep = run(snr);
        ExperimentConfig ant = single_point(snr, 10.0, 50);
        ant.sweep_axis = SweepAxis::n_antennas;
        ant.sweep_values = {"4x25", "8x25", "12x25"};
        const ExperimentResult nr = run(ant);

        bool pass = true;
        std::ostringstream d;
        for (const ExperimentResult *res : {static_cast<const ExperimentResult *>(&g_snr_sweep), &nr})
        {
            d << (res == &nr ? " | N_R 100/200/300 at 10 dB:" : "SNR 0/10/20 dB:");
            for (const char *p : {"delay", "elevation", "azimuth"})
            {
                d << ' ' << p;
                for (std::size_t i = 0; i < res->points.size(); ++i)
                {
                    const double v = row(res->points[i], p).rmse;
                    d << (i ? "/" : " ") << fmt(v);
                    if (i && !(v <= row(res->points[i - 1], p).rmse))
                        pass = false;
                }
            }
        }
        return {pass, d.str()};
    }

    // ---------------------------------------------------------------- 10

    Outcome pairing_accuracy()
    {
        const ExperimentConfig c = single_point(load_experiment(config_path("snr_sweep.cfg")), 10.0, 200);
        const SweepPoint pt = sweep_points(c)[0];
        const ArrayConfig a = array_for(c, pt);
        const auto truth = true_paths(c, pt, a, 0.0);
        const double period = 1.0 / a.delta_f();
        std::size_t agree = 0, done = 0, fallbacks = 0;
        for (std::size_t trial = 0; trial < c.trials; ++trial)
        {
            SimulationScenario sc;
            for (const auto &t : truth)
                sc.paths.push_back(t.path);
            sc.snr_db = pt.snr_db;
            sc.n_snapshots = c.n_snapshots;
            sc.gain_model = c.gain_model;
            sc.seed = mix_seed(c.seed ^ 0x9a1e, trial);
            const SnapshotTensor y = simulate_snapshots(a, sc);
            const BeamSelection sel =
                select_beams(apply_stage(build_stage1(a), y), c.eta, dispersion_factor_worst_case(a), truth.size(), c.min_beams);
            const BeamformerStage s2 = build_stage2(a, sel);
            ++g_channels.trials;
            if (s2.rf_chain_count() > std::max(a.n_vertical(), a.n_modes() * sel.n_beams()))
                ++g_channels.violations;
            JadeEstimates je;
            try
            {
                je = estimate_all(apply_stage(s2, y), sel, a, truth.size(), c.jade);
            }
            catch (const std::exception &)
            {
                ++done;
                continue;
            }
            ++done;
            fallbacks += je.pairing_fallback;
            const std::size_t np = truth.size();
            // truth behind each elevation estimate, by elevation alone
            RMat ce(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(np));
            for (std::size_t k = 0; k < np; ++k)
                for (std::size_t j = 0; j < np; ++j)
                    ce(Eigen::Index(k), Eigen::Index(j)) = std::abs(je.paths[k].elevation - truth[j].path.elevation);
            const auto who = optimal_assignment(ce);
            // exhaustive oracle: the delay permutation closest to the truth
            std::vector<std::size_t> perm(np), best;
            std::iota(perm.begin(), perm.end(), std::size_t(0));
            double best_cost = std::numeric_limits<double>::infinity();
            do
            {
                double cost = 0.0;
                for (std::size_t k = 0; k < np; ++k)
                    cost += std::abs(circular_diff(je.esprit_delays[perm[k]], truth[who[k]].path.delay, period));
                if (cost < best_cost)
                    best_cost = cost, best = perm;
            } while (std::next_permutation(perm.begin(), perm.end()));
            agree += je.pairing_permutation == best;
        }
        const double rate = done ? double(agree) / double(done) : 0.0;
        return {done == c.trials && rate >= 0.99, "8x25, 10 dB, Np=3: " + std::to_string(agree) + "/" + std::to_string(done) +
                                                      " trials agree with the exhaustive oracle (" +
                                                      std::to_string(fallbacks) + " diagonalisation fallbacks)"};
    }

    // ---------------------------------------------------------------- 11

    Outcome crlb_sanity()
    {
        const ExperimentConfig c = load_experiment(config_path("snr_sweep.cfg"));
        const ArrayConfig a = array_for(c, sweep_points(c)[0]);
        SimulationScenario s;
        s.paths = {PathParams(1.1, 1.4, 3e-9, cplx(0.6, -0.8))};
        s.snr_db = 10.0;
        s.n_snapshots = 4;
        s.gain_model = GainModel::fixed;
        FisherOptions o;
        o.angles = o.gains = false;
        const double fim = fisher_numeric(a, s, PipelinePoint::antenna, o).information(0, 0);
        SimulationScenario unit = s;
        unit.paths[0].gain = 1.0;
        double acc = 0.0;
        for (std::size_t m = 0; m < a.n_subcarriers(); ++m)
            acc += channel_vector(a, unit.paths, m).squaredNorm() * a.frequency(m) * a.frequency(m);
        const double closed = 2.0 * double(s.n_snapshots) / s.noise_power(a) * std::norm(s.paths[0].gain) * 4 * kPi * kPi * acc;
        const double rel = std::abs(fim / closed - 1.0);

        double worst = std::numeric_limits<double>::infinity();
        std::string which;
        auto scan = [&](const ExperimentResult &r, const std::string &label)
        {
            for (const auto &pt : r.points)
                if (pt.point.snr_db == 20.0)
                    for (const char *p : {"delay", "elevation", "azimuth"})
                    {
                        const double q = row(pt, p).rmse / row(pt, p).crlb;
                        if (q < worst)
                            worst = q, which = label + " " + p;
                    }
        };
        scan(g_snr_sweep, "per-subcarrier");
        scan(g_mdsi_on, "reference+" + g_mdsi_mode);
        scan(g_mdsi_off, "reference");
        return {rel <= 1e-3 && worst >= 0.8, "single-delay toy relative error " + fmt(rel) +
                                                  "; smallest RMSE/CRLB at 20 dB = " + fmt(worst) + " (" + which + ")"};
    }

    // ---------------------------------------------------------------- 12

    ExperimentResult g_loc;

    Outcome localization()
    {
        ExperimentConfig quiet = single_point(load_experiment(config_path("localization.cfg")), std::numeric_limits<double>::infinity(), 5);
        quiet.compute_crlb = false;
        quiet.jade.refine_tol = 1e-10;
        const ExperimentResult q = run(quiet);
        double worst = 0.0;
        for (const auto &t : q.points[0].trials)
            worst = std::max(worst, t.ok ? t.position_error : std::numeric_limits<double>::infinity());

        ExperimentConfig noisy = load_experiment(config_path("localization.cfg"));
        noisy.compute_crlb = false;
        g_loc = run(noisy);
        bool monotone = true;
        std::string cdf;
        for (std::size_t i = 0; i < g_loc.points.size(); ++i)
        {
            const SummaryRow &r = row(g_loc.points[i], "position");
            cdf += (i ? ", " : "") + g_loc.points[i].point.value + " " + fmt(r.cdf_at_10cm) + " (median " + fmt(r.q50 * 100) + " cm)";
            if (i && r.cdf_at_10cm < row(g_loc.points[i - 1], "position").cdf_at_10cm)
                monotone = false;
        }
        return {worst <= 1e-6 && monotone, "noiseless two-path fix max error " + fmt(worst) +
                                               " m; 10 dB, 4 ns unknown offset, 200 trials: P(error < 10 cm) " + cdf};
    }

    // ---------------------------------------------------------------- 13

    Outcome determinism()
    {
        ExperimentConfig loc = load_experiment(config_path("localization.cfg"));
        loc.compute_crlb = false;
        const ExperimentResult again = run_experiment(loc);
        const bool loc_same = trials_csv(again) == trials_csv(g_loc) && summary_csv(again) == summary_csv(g_loc);
        const ExperimentResult snr = run_experiment(load_experiment(config_path("snr_sweep.cfg")));
        const bool snr_same = trials_csv(snr) == trials_csv(g_snr_sweep) && summary_csv(snr) == summary_csv(g_snr_sweep);
        return {loc_same && snr_same, std::string("localization CSVs ") + (loc_same ? "identical" : "DIFFER") +
                                          ", SNR sweep CSVs " + (snr_same ? "identical" : "DIFFER")};
    }

    // ---------------------------------------------------------------- 7

    Outcome rf_chain_invariant()
    {
        return {g_channels.invariant_flag && g_channels.violations == 0 && g_channels.trials > 0,
                std::to_string(g_channels.trials) + " estimator runs, " + std::to_string(g_channels.violations) +
                    " exceed max(N_V, (2P+1) N_B)"};
    }
}

int main()
{
    struct Criterion
    {
        int id;
        const char *name;
        std::function<Outcome()> fn;
    };
    // run order: producers before consumers (9 before 8 and 11, 12 before 13, 7 last)
    const std::vector<Criterion> order = {
        {1, "noiseless exactness", noiseless_exactness},
        {2, "Bessel bound", bessel_bound},
        {3, "phase-mode leakage", leakage},
        {4, "highest-order constant", highest_order_constant},
        {5, "beam squint", beam_squint},
        {6, "dispersion boundary", dispersion_boundary},
        {9, "RMSE monotonicity", monotonicity},
        {8, "interpolation benefit", mdsi_benefit},
        {10, "pairing accuracy", pairing_accuracy},
        {11, "CRLB sanity", crlb_sanity},
        {12, "localization", localization},
        {13, "determinism", determinism},
        {7, "RF-chain invariant", rf_chain_invariant},
    };
    std::vector<std::pair<int, std::string>> lines;
    bool all = true;
    for (const auto &c : order)
    {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try
        {
            o = c.fn();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("error: ") + e.what()};
        }
        all = all && o.pass;
        std::string line = std::string("criterion ") + (c.id < 10 ? " " : "") + std::to_string(c.id) + " " +
                           (o.pass ? "PASS" : "FAIL") + "  " + c.name + ": " + o.detail + " [" + fmt(seconds_since(t0)) + " s]";
        std::fprintf(stderr, "%s\n", line.c_str());
        lines.emplace_back(c.id, std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    for (const auto &l : lines)
        std::printf("%s\n", l.second.c_str());
    return all ? 0 : 1;
}
