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

#include "hucya/crlb.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <string>

namespace hucya
{
    namespace
    {
        enum class Kind
        {
            tau,
            theta,
            phi,
            re_beta,
            im_beta
        };

        struct Param
        {
            std::size_t path;
            Kind kind;
        };

        void set_value(std::vector<PathParams> &paths, const Param &p, double v)
        {
            auto &q = paths[p.path];
            switch (p.kind)
            {
            case Kind::tau:
                q.delay = v;
                break;
            case Kind::theta:
                q.elevation = v;
                break;
            case Kind::phi:
                q.azimuth = v;
                break;
            case Kind::re_beta:
                q.gain.real(v);
                break;
            case Kind::im_beta:
                q.gain.imag(v);
                break;
            }
        }

        double get_value(const std::vector<PathParams> &paths, const Param &p)
        {
            const auto &q = paths[p.path];
            switch (p.kind)
            {
            case Kind::tau:
                return q.delay;
            case Kind::theta:
                return q.elevation;
            case Kind::phi:
                return q.azimuth;
            case Kind::re_beta:
                return q.gain.real();
            case Kind::im_beta:
                return q.gain.imag();
            }
            return 0.0;
        }

        // Stacked noiseless mean over subcarriers, whitened when a front-end is present
        struct MeanModel
        {
            const ArrayConfig *config;
            cplx pilot;
            const CMat *whitened_combiner = nullptr; // L^{-1} W^H

            CVec operator()(const std::vector<PathParams> &paths) const
            {
                const std::size_t nm = config->n_subcarriers();
                const Eigen::Index n = whitened_combiner ? whitened_combiner->rows() : Eigen::Index(config->n_antennas());
                CVec out(n * Eigen::Index(nm));
                for (std::size_t m = 0; m < nm; ++m)
                {
                    const CVec h = pilot * channel_vector(*config, paths, m);
                    if (whitened_combiner)
                        out.segment(Eigen::Index(m) * n, n) = *whitened_combiner * h;
                    else
                        out.segment(Eigen::Index(m) * n, n) = h;
                }
                return out;
            }
        };

        double step_scale(const ArrayConfig &config, const std::vector<PathParams> &paths, const Param &p)
        {
            switch (p.kind)
            {
            case Kind::tau:
                return 1.0 / config.bandwidth();
            case Kind::theta:
            case Kind::phi:
                return 1.0;
            default:
                return std::abs(paths[p.path].gain);
            }
        }
    }

    const char *pipeline_point_name(PipelinePoint p) { return p == PipelinePoint::antenna ? "antenna" : "post_stage2"; }

    PipelinePoint parse_pipeline_point(std::string_view text)
    {
        if (text == "antenna")
            return PipelinePoint::antenna;
        if (text == "post_stage2")
            return PipelinePoint::post_stage2;
        throw std::invalid_argument("unknown pipeline point '" + std::string(text) + "' (antenna, post_stage2)");
    }

    FisherMatrix fisher_numeric(const ArrayConfig &config, const SimulationScenario &scenario, PipelinePoint point,
                                const FisherOptions &options)
    {
        if (scenario.paths.empty())
            throw std::invalid_argument("fisher_numeric: scenario has no paths");
        if (scenario.noiseless())
            throw std::invalid_argument("fisher_numeric: noise power is zero; the bound is undefined");
        if (!(options.relative_step > 0.0))
            throw std::invalid_argument("fisher_numeric: relative step must be positive");
        for (const auto &p : scenario.paths)
            validate_path(p, config);

        std::vector<Param> params;
        FisherMatrix out;
        for (std::size_t l = 0; l < scenario.paths.size(); ++l)
        {
            const auto add = [&](Kind k, const char *name)
            {
                params.push_back({l, k});
                out.names.push_back(name + std::to_string(l));
            };
            if (options.delays)
                add(Kind::tau, "tau");
            if (options.angles)
            {
                add(Kind::theta, "theta");
                add(Kind::phi, "phi");
            }
            if (options.gains)
            {
                add(Kind::re_beta, "re_beta");
                add(Kind::im_beta, "im_beta");
            }
        }
        if (params.empty())
            throw std::invalid_argument("fisher_numeric: no parameters enabled");

        MeanModel model{&config, scenario.pilot};
        CMat whitened;
        if (point == PipelinePoint::post_stage2)
        {
            if (!options.selection)
                throw std::invalid_argument("fisher_numeric: post_stage2 requires a beam selection");
            const BeamformerStage s2 = build_stage2(config, *options.selection);
            const CMat wh = s2.composite.adjoint();
            const CMat gram = wh * s2.composite;
            Eigen::LLT<CMat> llt(gram);
            if (llt.info() != Eigen::Success)
                throw numerical_error("fisher_numeric: front-end noise covariance is singular");
            whitened = llt.matrixL().solve(wh);
            model.whitened_combiner = &whitened;
        }

        const std::vector<PathParams> base = scenario.paths;
        const auto n = Eigen::Index(params.size());
        CMat jac;
        for (Eigen::Index k = 0; k < n; ++k)
        {
            const Param &p = params[std::size_t(k)];
            const double v0 = get_value(base, p);
            const double h = options.relative_step * std::max(std::abs(v0), step_scale(config, base, p));
            const auto central = [&](double step)
            {
                std::vector<PathParams> plus = base, minus = base;
                set_value(plus, p, v0 + step);
                set_value(minus, p, v0 - step);
                return CVec((model(plus) - model(minus)) / (2.0 * step));
            };
            const CVec d1 = central(h), d2 = central(0.5 * h);
            const CVec d = (4.0 * d2 - d1) / 3.0;
            if (jac.size() == 0)
                jac.resize(d.size(), n);
            jac.col(k) = d;
        }

        const double sigma2 = scenario.noise_power(config);
        out.information = (2.0 * double(scenario.n_snapshots) / sigma2) * (jac.adjoint() * jac).real();
        out.information = 0.5 * (out.information + out.information.transpose()).eval();
        return out;
    }

    double equilibrated_condition(const RMat &f)
    {
        const RVec d = f.diagonal();
        if ((d.array() <= 0.0).any())
            return std::numeric_limits<double>::infinity();
        const RVec s = d.array().rsqrt();
        const RMat e = s.asDiagonal() * f * s.asDiagonal();
        Eigen::SelfAdjointEigenSolver<RMat> es(e, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
        if (lo <= 0.0)
            return std::numeric_limits<double>::infinity();
        return hi / lo;
    }

    BoundReport crlb(const ArrayConfig &config, const SimulationScenario &scenario, PipelinePoint point,
                     const BeamSelection *selection)
    {
        FisherOptions opt;
        opt.selection = selection;
        const FisherMatrix fim = fisher_numeric(config, scenario, point, opt);
        BoundReport r;
        r.snr_db = scenario.snr_db;
        r.condition_number = equilibrated_condition(fim.information);
        if (!(r.condition_number < 1e12))
            throw numerical_error("crlb: Fisher matrix is singular or ill-conditioned; scenario is unidentifiable");

        const RVec s = fim.information.diagonal().array().rsqrt();
        const RMat e = s.asDiagonal() * fim.information * s.asDiagonal();
        const RMat inv = s.asDiagonal() * RMat(e.ldlt().solve(RMat::Identity(e.rows(), e.cols()))) * s.asDiagonal();
        for (std::size_t l = 0; l < scenario.paths.size(); ++l)
        {
            const auto b = Eigen::Index(5 * l);
            r.delay.push_back(std::sqrt(inv(b, b)));
            r.elevation.push_back(std::sqrt(inv(b + 1, b + 1)));
            r.azimuth.push_back(std::sqrt(inv(b + 2, b + 2)));
        }
        return r;
    }
}
