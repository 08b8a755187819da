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

#include "hucya/hybrid_beamformer.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>

using namespace hucya;

namespace
{
    const double kLambda0 = kSpeedOfLight / 30e9;

    ArrayConfig array(std::size_t nv = 8, std::size_t nh = 25)
    {
        return ArrayConfig(nv, nh, 2 * kLambda0, 0.5 * kLambda0, 30e9, 100e6, 20);
    }

    SnapshotTensor single_path(const ArrayConfig &a, double phi, double theta, double snr_db = std::numeric_limits<double>::infinity())
    {
        SimulationScenario sc;
        sc.paths = {PathParams(phi, theta, 3e-9, cplx(0.8, -0.2))};
        sc.gain_model = GainModel::fixed;
        sc.snr_db = snr_db;
        sc.n_snapshots = 3;
        sc.seed = 5;
        return simulate_snapshots(a, sc);
    }
}

TEST_CASE("Stage 1 factorisation and orthogonality", "[beamformer]")
{
    const ArrayConfig a = array();
    const BeamformerStage s = build_stage1(a);
    CHECK(s.composite.rows() == 200);
    CHECK(s.composite.cols() == 8);
    CHECK(s.rf_chain_count() == 8u);
    CHECK(s.input_label == SpatialLabel::antenna);
    CHECK(s.output_label == SpatialLabel::post_stage1);

    const CMat ud = vertical_dft_matrix(8);
    CHECK((ud.adjoint() * ud - 8.0 * CMat::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);

    // G_AC routes every element of ring n to combiner n
    for (Eigen::Index r = 0; r < 200; ++r)
        for (Eigen::Index c = 0; c < 8; ++c)
            CHECK(s.array_combiners(r, c) == (r / 25 == c ? 1.0 : 0.0));
    // connected phase shifters have unit modulus
    for (Eigen::Index r = 0; r < s.phase_shifters.rows(); ++r)
        for (Eigen::Index c = 0; c < s.phase_shifters.cols(); ++c)
            if (std::abs(s.phase_shifters(r, c)) > 0.0)
                CHECK(std::abs(std::abs(s.phase_shifters(r, c)) - 1.0) < 1e-15);
    CHECK((s.baseband - CMat::Identity(8, 8) / std::sqrt(8.0)).norm() == 0.0);

    const ArrayConfig one = array(1, 25);
    const BeamformerStage s1 = build_stage1(one);
    CHECK(s1.composite.cols() == 1);
    CHECK((s1.composite.array().abs() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("Applying a stage", "[beamformer]")
{
    const ArrayConfig a = array();
    const BeamformerStage s = build_stage1(a);

    SnapshotTensor zero(200, 20, 2, SpatialLabel::antenna);
    const SnapshotTensor z = apply_stage(s, zero);
    CHECK(std::all_of(z.data().begin(), z.data().end(), [](cplx v) { return v == cplx(0.0); }));
    CHECK(z.label() == SpatialLabel::post_stage1);

    SnapshotTensor small(4, 3, 2, SpatialLabel::antenna);
    for (std::size_t i = 0; i < small.data().size(); ++i)
        small.data()[i] = cplx(double(i), -0.5 * double(i));
    const SnapshotTensor same = apply_stage(make_stage(CMat::Identity(4, 4), SpatialLabel::antenna, SpatialLabel::post_stage1), small);
    CHECK(same.data() == small.data());

    // linearity
    const SnapshotTensor x = single_path(a, 0.4, 1.1, 5.0), y = single_path(a, 2.9, 2.0, 0.0);
    SnapshotTensor mix(200, 20, 3, SpatialLabel::antenna);
    const cplx al(0.3, 1.2), be(-2.0, 0.1);
    for (std::size_t i = 0; i < mix.data().size(); ++i)
        mix.data()[i] = al * x.data()[i] + be * y.data()[i];
    const SnapshotTensor ox = apply_stage(s, x), oy = apply_stage(s, y), om = apply_stage(s, mix);
    double err = 0.0;
    for (std::size_t i = 0; i < om.data().size(); ++i)
        err = std::max(err, std::abs(om.data()[i] - (al * ox.data()[i] + be * oy.data()[i])));
    CHECK(err < 1e-12);

    // power is preserved for inputs in the span of orthonormal-scaled columns
    const CMat q = s.composite / std::sqrt(25.0);
    SnapshotTensor in(200, 2, 1, SpatialLabel::antenna);
    CVec coeffs(8);
    for (Eigen::Index i = 0; i < 8; ++i)
        coeffs[i] = cplx(std::cos(double(i)), std::sin(2.0 * double(i)));
    Eigen::Map<CVec>(in.column(1, 0), 200) = q * coeffs;
    const SnapshotTensor out = apply_stage(make_stage(q, SpatialLabel::antenna, SpatialLabel::post_stage1), in);
    CHECK(Eigen::Map<const CVec>(out.column(1, 0), 8).squaredNorm() == Catch::Approx(coeffs.squaredNorm()).epsilon(1e-9));

    CHECK_THROWS_AS(apply_stage(s, ox), std::invalid_argument);
    SnapshotTensor wrong(100, 20, 1, SpatialLabel::antenna);
    CHECK_THROWS_AS(apply_stage(s, wrong), std::invalid_argument);
}

TEST_CASE("Dispersion factor", "[beamformer][dispersion]")
{
    CHECK(std::abs(dispersion_factor(60, 1.0 / 15.0, 0.25) - 1.0) < 1e-9);
    const ArrayConfig a = array();
    CHECK(dispersion_factor(a, {kPi / 2}) == Catch::Approx(0.0).margin(1e-12));

    const double lam = kLambda0;
    const ArrayConfig sim(60, 25, 2 * lam, 0.5 * lam, 30e9, 100e6, 20);
    const double expected = 60.0 * (2.0 / 31.0) * (31.0 / 30.0 * 0.5 * 0.5);
    CHECK(dispersion_factor(sim, {deg2rad(60.0)}) == Catch::Approx(expected).epsilon(1e-12));
    CHECK(dispersion_factor(sim, {deg2rad(60.0), deg2rad(120.0)}) == Catch::Approx(expected).epsilon(1e-12));
    CHECK(dispersion_factor_worst_case(sim) == Catch::Approx(2.0 * expected).epsilon(1e-12));
    CHECK_THROWS_AS(dispersion_factor(sim, {}), std::invalid_argument);
}

TEST_CASE("Narrowband beam index at sixty degrees", "[beamformer][selection]")
{
    // carrier 30 GHz, 60 rings at half-wavelength spacing
    const ArrayConfig a(60, 12, kLambda0, 0.5 * kLambda0, 30e9, 1e3, 2);
    SimulationScenario sc;
    sc.paths = {PathParams(0.3, deg2rad(60.0), 0.0, 1.0)};
    sc.gain_model = GainModel::fixed;
    const SnapshotTensor y1 = apply_stage(build_stage1(a), simulate_snapshots(a, sc));
    const RMat p = beam_powers(y1);
    Eigen::Index best = 0;
    p.col(0).maxCoeff(&best);
    CHECK(best + 1 == 15);
}

TEST_CASE("Beam selection meets the power threshold", "[beamformer][selection]")
{
    const ArrayConfig a = array();
    const SnapshotTensor y1 = apply_stage(build_stage1(a), single_path(a, 1.0, deg2rad(70.0)));
    const BeamSelection sel = select_beams(y1, 0.9, 0.0, 1, 1);
    const RMat p = beam_powers(y1);
    REQUIRE(sel.per_subcarrier.size() == 20u);
    for (std::size_t m = 0; m < 20; ++m)
    {
        double got = 0.0;
        for (std::size_t i : sel.per_subcarrier[m])
            got += p(Eigen::Index(i - 1), Eigen::Index(m));
        CHECK(got >= 0.9 * p.col(Eigen::Index(m)).sum());
        for (std::size_t i : sel.per_subcarrier[m])
            CHECK(std::binary_search(sel.indices.begin(), sel.indices.end(), i));
    }
    CHECK(std::is_sorted(sel.indices.begin(), sel.indices.end()));
    CHECK(std::adjacent_find(sel.indices.begin(), sel.indices.end()) == sel.indices.end());
    CHECK(sel.n_beams() <= 8u);

    // a beam-aligned plane wave keeps 90% of its power within ceil(gamma) + 1 beams at every subcarrier
    const double g_on_grid = 2 * kPi * 2.0 / 8.0;
    const double theta_on = std::acos(g_on_grid / (2 * kPi * 30e9 * a.ring_spacing() / kSpeedOfLight));
    const SnapshotTensor y_on = apply_stage(build_stage1(a), single_path(a, 1.0, theta_on));
    const double gamma = dispersion_factor_worst_case(a);
    for (const auto &u : select_beams(y_on, 0.9, 0.0, 1, 1).per_subcarrier)
        CHECK(u.size() <= std::size_t(std::ceil(gamma)) + 1);

    const SnapshotTensor noisy = apply_stage(build_stage1(a), single_path(a, 1.0, deg2rad(70.0), 10.0));
    CHECK(select_beams(noisy, 1.0, 0.0, 1).n_beams() == 8u);

    const BeamSelection padded = select_beams(y1, 0.5, 4.0, 1, 1);
    CHECK(padded.n_beams() >= 4u);
    CHECK(padded.n_padded > 0u);
    CHECK(select_beams(y1, 0.5, 0.0, 1, 3).n_beams() >= 3u);

    CHECK_THROWS_AS(select_beams(y1, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(select_beams(y1, 1.1, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(select_beams(y1, 0.9, -1.0, 1), std::invalid_argument);
}

TEST_CASE("Stage 2 construction", "[beamformer][stage2]")
{
    const ArrayConfig a = array();
    const BeamSelection sel = fixed_selection({5, 2, 3});
    CHECK(sel.indices == std::vector<std::size_t>{2, 3, 5});
    CHECK_THROWS_AS(fixed_selection({1, 1}), std::invalid_argument);

    const BeamformerStage s = build_stage2(a, sel);
    CHECK(s.rf_chain_count() == 25u * 3u);
    CHECK(s.composite.rows() == 200);
    CHECK((s.phase_shifters.array().abs() - 1.0).abs().maxCoeff() < 1e-15);
    CHECK((s.baseband - std::sqrt(8.0 / 25.0) * CMat::Identity(75, 75)).norm() < 1e-15);

    // W_RF = U_sV (x) U_sH with U_sV the selected DFT columns
    const CMat usv = vertical_dft_matrix(8) * beam_selection_matrix(8, sel.indices).cast<cplx>();
    const CMat ush = qdft_matrix(25, 12);
    const CMat wrf = s.phase_shifters * s.array_combiners.cast<cplx>();
    for (Eigen::Index i = 0; i < 8; ++i)
        for (Eigen::Index j = 0; j < 3; ++j)
            CHECK((wrf.block(i * 25, j * 25, 25, 25) - usv(i, j) * ush).cwiseAbs().maxCoeff() < 1e-14);

    // all beams: the column set is the DFT basis
    std::vector<std::size_t> all(8);
    for (std::size_t i = 0; i < 8; ++i)
        all[i] = i + 1;
    const CMat jb = beam_selection_matrix(8, all);
    CHECK((jb - RMat::Identity(8, 8)).norm() == 0.0);
    CHECK_THROWS_AS(beam_selection_matrix(8, {9}), std::out_of_range);
    CHECK_THROWS_AS(build_stage2(a, BeamSelection{}), std::invalid_argument);
}

TEST_CASE("Stage 2 output of a single path is the Dirichlet-by-phase-mode product", "[beamformer][stage2]")
{
    const ArrayConfig a(8, 30, 2 * kLambda0, 0.5 * kLambda0, 30e9, 100e6, 20);
    const BeamSelection sel = fixed_selection({1, 2, 3, 4});
    const BeamformerStage s = build_stage2(a, sel);
    for (double theta : {0.6, 1.2, 2.0})
        for (double phi : {0.3, 2.5, 5.0})
        {
            SimulationScenario sc;
            sc.paths = {PathParams(phi, theta, 0.0, 1.0)};
            sc.gain_model = GainModel::fixed;
            const SnapshotTensor y = apply_stage(s, simulate_snapshots(a, sc));
            for (std::size_t m : {0u, 10u, 19u})
            {
                const double f = a.frequency(m);
                const CVec d = dirichlet_response(a, f, theta, sel.indices);
                const CVec q = phase_mode_response(a, f, phi, theta);
                const CVec qx = qdft_horizontal(a, f, phi, theta);
                CVec ref(d.size() * q.size()), exact(d.size() * q.size());
                for (Eigen::Index u = 0; u < d.size(); ++u)
                {
                    ref.segment(u * q.size(), q.size()) = d[u] * q;
                    exact.segment(u * q.size(), q.size()) = d[u] * qx;
                }
                const Eigen::Map<const CVec> got(y.column(m, 0), ref.size());
                CAPTURE(theta, phi, m);
                CHECK((got - exact).norm() < 1e-10 * exact.norm());
                CHECK((got - ref).norm() < 1e-2 * ref.norm());
            }
        }
}

TEST_CASE("Combined adjacent beams flatten the squinted response", "[beamformer][squint]")
{
    // 60 rings, half-wavelength spacing at 30 GHz, bandwidth chosen so that gamma = 3 at sixty degrees
    const double lc = kSpeedOfLight / 30e9;
    const double bw = 3.0 / (60.0 * 0.25) * 30e9;
    const ArrayConfig a(60, 12, lc, 0.5 * lc, 30e9 - 0.5 * bw, bw / 200.0, 200);
    REQUIRE(dispersion_factor(a, {deg2rad(60.0)}) == Catch::Approx(3.0).epsilon(1e-9));
    double single_max = 0, single_min = 1e300, comb_max = 0, comb_min = 1e300;
    for (std::size_t m = 0; m <= 200; ++m)
    {
        const double f = a.f0() + double(m) * a.delta_f();
        const CVec d = dirichlet_response(a, f, deg2rad(60.0), {14, 15, 16});
        const double p15 = std::norm(d[1]), pc = d.squaredNorm();
        single_max = std::max(single_max, p15), single_min = std::min(single_min, p15);
        comb_max = std::max(comb_max, pc), comb_min = std::min(comb_min, pc);
    }
    const double single_db = 10 * std::log10(single_max / single_min), comb_db = 10 * std::log10(comb_max / comb_min);
    INFO("single beam ripple " << single_db << " dB, combined " << comb_db << " dB");
    CHECK(single_db > 3.0);
    CHECK(comb_max / comb_min <= 2.0 * single_max / single_min);
}
