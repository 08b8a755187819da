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

#include "hucya/selftest.hpp"
#include "hucya/jade.hpp"
#include "hucya/kernels.hpp"
#include "hucya/mdsi.hpp"

#include <cstdio>
#include <functional>
#include <random>

namespace hucya
{
    namespace
    {
        std::string fmt(const char *f, double v)
        {
            char b[96];
            std::snprintf(b, sizeof b, f, v);
            return b;
        }

        ArrayConfig small_array()
        {
            const double lam = kSpeedOfLight / 30e9;
            return ArrayConfig(8, 16, lam, 0.5 * lam, 30e9, 10e6, 8);
        }

        SelfTestResult kernels_match()
        {
            std::mt19937_64 g(11);
            std::normal_distribution<double> nd;
            std::vector<cplx> a(37), b(37);
            for (std::size_t i = 0; i < a.size(); ++i)
                a[i] = {nd(g), nd(g)}, b[i] = {nd(g), nd(g)};
            const auto &s = kernels::scalar_table();
            double err = 0.0;
            if (kernels::cpu_supports(kernels::Isa::avx2))
            {
                const auto &v = kernels::avx2_table();
                err = std::max(err, std::abs(s.dotc(a.data(), b.data(), a.size()) - v.dotc(a.data(), b.data(), a.size())));
                err = std::max(err, std::abs(s.norm2(a.data(), a.size()) - v.norm2(a.data(), a.size())));
            }
            return {"kernels: vector ISA matches scalar reference", err < 1e-12,
                    std::string(kernels::isa_name(kernels::active_isa())) + fmt(", max diff %.3g", err)};
        }

        SelfTestResult bessel_bound()
        {
            double worst = 0.0;
            bool mono = true;
            for (int k = 1; k <= 20; ++k)
            {
                const double rho = 0.05 * k;
                double prev = 1.0;
                for (int v = 1; v <= 50; ++v)
                {
                    const double j = bessel_j(v, v * rho);
                    worst = std::max(worst, j);
                    mono = mono && j <= prev + 1e-15;
                    prev = j;
                }
            }
            return {"bessel: J_v(v rho) bounded by J_1(1) and nonincreasing", mono && worst <= bessel_j(1, 1.0) + 1e-6,
                    fmt("max %.6f", worst)};
        }

        SelfTestResult kronecker_steering()
        {
            const ArrayConfig a = small_array();
            const CVec v = vertical_steering(a, 3, 1.1).entries, h = horizontal_steering(a, 3, 2.0, 1.1).entries;
            const CVec f = full_steering(a, 3, 2.0, 1.1).entries;
            double err = 0.0;
            for (Eigen::Index i = 0; i < v.size(); ++i)
                err = std::max(err, (f.segment(i * h.size(), h.size()) - v[i] * h).cwiseAbs().maxCoeff());
            return {"array: full steering equals vertical (x) horizontal", err == 0.0, fmt("max diff %.3g", err)};
        }

        SelfTestResult unit_modulus()
        {
            const ArrayConfig a = small_array();
            const auto s2 = build_stage2(a, fixed_selection({2, 3, 4}));
            const double dev = (s2.phase_shifters.cwiseAbs().array() - 1.0).abs().maxCoeff();
            return {"beamformer: stage-2 phase shifters have unit modulus", dev < 1e-12, fmt("max deviation %.3g", dev)};
        }

        SelfTestResult noiseless_single_path()
        {
            const ArrayConfig a = small_array();
            SimulationScenario sc;
            sc.paths = {PathParams(deg2rad(120.0), deg2rad(60.0), 20e-9, 1.0)};
            sc.n_snapshots = 4;
            const SnapshotTensor y = simulate_snapshots(a, sc);
            const SnapshotTensor y1 = apply_stage(build_stage1(a), y);
            const BeamSelection sel = select_beams(y1, 0.9, dispersion_factor_worst_case(a), 1);
            const SnapshotTensor y2 = apply_stage(build_stage2(a, sel), y);
            JadeOptions opt;
            opt.frequency_model = FrequencyModel::per_subcarrier;
            const auto est = estimate_all(y2, sel, a, 1, opt).paths.at(0);
            const double err = std::max({std::abs(est.delay - 20e-9) * 1e9, std::abs(est.elevation - deg2rad(60.0)),
                                         std::abs(circular_diff(est.azimuth, deg2rad(120.0), 2 * kPi))});
            return {"jade: noiseless single path recovered", err < 1e-3, fmt("max error %.3g (ns / rad)", err)};
        }

        SelfTestResult commuting_pair()
        {
            CMat t(3, 3);
            t << 1.0, 0.2, cplx(0, 0.1), 0.3, 1.0, 0.1, cplx(0.1, 0.2), 0.0, 1.0;
            const CMat d = CVec::Map(std::vector<cplx>{std::polar(1.0, -0.3), std::polar(1.0, -1.1), std::polar(1.0, -2.0)}.data(), 3).asDiagonal();
            const CMat v = CVec::Map(std::vector<cplx>{2.0, 0.5, -1.0}.data(), 3).asDiagonal();
            const CMat ti = t.inverse();
            const PairMatch pm = pair_match(t * d * ti, t * v * ti);
            const double p = pm.perturbation.norm();
            const bool ident = pm.pairing == std::vector<std::size_t>{0, 1, 2};
            return {"pairing: shared eigenvectors need no perturbation", p < 1e-9 && ident, fmt("|P_D| %.3g", p)};
        }

        SelfTestResult mdsi_constant()
        {
            const ArrayConfig a = small_array();
            const BeamSelection sel = fixed_selection({1, 2});
            SnapshotTensor y(a.n_modes() * 2, a.n_subcarriers(), 1, SpatialLabel::post_stage2);
            for (auto &v : y.data())
                v = cplx(0.3, -0.7);
            const SnapshotTensor r = reconstruct(y, a, sel, MdsiMode::as_printed);
            double err = 0.0;
            for (std::size_t i = 0; i < y.data().size(); ++i)
                err = std::max(err, std::abs(r.data()[i] - y.data()[i]));
            return {"interpolation: spatially constant input unchanged", err < 1e-15, fmt("max diff %.3g", err)};
        }
    }

    std::vector<SelfTestResult> run_selftest()
    {
        const std::vector<std::function<SelfTestResult()>> checks = {kernels_match, bessel_bound, kronecker_steering,
                                                                     unit_modulus, mdsi_constant, commuting_pair,
                                                                     noiseless_single_path};
        std::vector<SelfTestResult> out;
        for (const auto &c : checks)
        {
            try
            {
                out.push_back(c());
            }
            catch (const std::exception &e)
            {
                out.push_back({"exception", false, e.what()});
            }
        }
        return out;
    }
}
