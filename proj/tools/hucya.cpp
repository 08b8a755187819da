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

// Command-line driver: run (Monte-Carlo experiment), crlb (bounds only), selftest (invariant checks).
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "hucya/harness.hpp"
#include "hucya/selftest.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace
{
    constexpr int kExitConfig = 2;
    constexpr int kExitNumerical = 3;

    struct Overrides
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
        std::optional<std::string> mdsi_mode;
    };

    void add_common(CLI::App *cmd, Overrides &o)
    {
        cmd->add_option("config", o.config, "Experiment config file")->required();
        cmd->add_option("--seed", o.seed, "Master seed (overrides [scenario] seed)");
        cmd->add_option("--out", o.out, "Output directory (overrides [output] path)");
        cmd->add_option("--mdsi-mode", o.mdsi_mode, "as_printed | offset_corrected | disabled");
    }

    hucya::ExperimentConfig load(const Overrides &o)
    {
        auto c = hucya::load_experiment(o.config);
        if (o.seed)
            c.seed = *o.seed;
        if (o.out)
            c.output_path = *o.out;
        if (o.mdsi_mode)
        {
            try
            {
                c.mdsi_mode = hucya::parse_mdsi_mode(*o.mdsi_mode);
            }
            catch (const std::invalid_argument &e)
            {
                throw hucya::config_error(e.what());
            }
        }
        return c;
    }

    int cmd_run(const Overrides &o)
    {
        const auto c = load(o);
        const auto result = hucya::run_experiment(c);
        hucya::emit_csv(result, c.output_path);
        std::cout << hucya::summary_csv(result);
        bool starved = false;
        for (const auto &p : result.points)
        {
            std::size_t ok = 0;
            for (const auto &t : p.trials)
                ok += t.ok ? 1 : 0;
            if (ok == 0)
            {
                starved = true;
                std::cerr << "sweep point " << p.point.value << ": every trial failed";
                if (!p.trials.empty())
                    std::cerr << " (" << p.trials.front().note << ")";
                std::cerr << '\n';
            }
        }
        if (!result.rf_invariant_held)
            std::cerr << "warning: a digital stage exceeded max(N_V, (2P+1) N_B) channels\n";
        return starved ? kExitNumerical : 0;
    }

    int cmd_crlb(const Overrides &o)
    {
        const auto c = load(o);
        std::ostringstream csv;
        csv << "sweep_axis,sweep_value,point,path,delay,elevation,azimuth,condition_number\n";
        for (const auto &p : hucya::sweep_points(c))
        {
            const auto array = hucya::array_for(c, p);
            hucya::SimulationScenario sc;
            for (const auto &t : hucya::true_paths(c, p, array, 0.0))
                sc.paths.push_back(t.path);
            sc.snr_db = p.snr_db;
            sc.n_snapshots = c.n_snapshots;
            sc.pilot = c.pilot;
            if (sc.noiseless())
                throw hucya::config_error("crlb: the bound needs a finite snr_db");
            std::optional<hucya::BeamSelection> sel;
            if (c.crlb_point == hucya::PipelinePoint::post_stage2)
            {
                auto clean = sc;
                clean.snr_db = std::numeric_limits<double>::infinity();
                clean.gain_model = hucya::GainModel::fixed;
                clean.n_snapshots = 1;
                const auto y1 = hucya::apply_stage(hucya::build_stage1(array), hucya::simulate_snapshots(array, clean));
                const double gamma = c.gamma_override ? *c.gamma_override : hucya::dispersion_factor_worst_case(array);
                sel = hucya::select_beams(y1, c.eta, gamma, p.n_paths, c.min_beams);
            }
            const auto b = hucya::crlb(array, sc, c.crlb_point, sel ? &*sel : nullptr);
            for (std::size_t l = 0; l < b.delay.size(); ++l)
                csv << hucya::sweep_axis_name(c.sweep_axis) << ',' << p.value << ',' << hucya::pipeline_point_name(c.crlb_point)
                    << ',' << l << ',' << hucya::format_number(b.delay[l]) << ',' << hucya::format_number(b.elevation[l]) << ','
                    << hucya::format_number(b.azimuth[l]) << ',' << hucya::format_number(b.condition_number) << '\n';
        }
        std::filesystem::create_directories(c.output_path);
        const auto path = (std::filesystem::path(c.output_path) / "crlb.csv").string();
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f || !(f << csv.str()))
            throw hucya::config_error("cannot write '" + path + "'");
        std::cout << csv.str();
        return 0;
    }

    int cmd_selftest()
    {
        bool all = true;
        for (const auto &r : hucya::run_selftest())
        {
            std::printf("%s %s (%s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
            all = all && r.passed;
        }
        return all ? 0 : kExitNumerical;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"hucya: wideband channel-parameter estimation for hybrid cylindrical arrays"};
    app.require_subcommand(1);
    Overrides run_opts, crlb_opts;
    auto *run = app.add_subcommand("run", "Run a Monte-Carlo experiment and write trials.csv / summary.csv");
    add_common(run, run_opts);
    auto *bound = app.add_subcommand("crlb", "Compute numerical Cramer-Rao bounds and write crlb.csv");
    add_common(bound, crlb_opts);
    auto *self = app.add_subcommand("selftest", "Run the built-in invariant checks");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return kExitConfig;
    }

    try
    {
        if (*run)
            return cmd_run(run_opts);
        if (*bound)
            return cmd_crlb(crlb_opts);
        if (*self)
            return cmd_selftest();
    }
    catch (const hucya::config_error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const hucya::numerical_error &e)
    {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
