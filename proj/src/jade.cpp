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

#include "hucya/jade.hpp"
#include "hucya/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <numeric>
#include <string>

namespace hucya
{
    namespace
    {
        constexpr std::size_t kMaxPaths = 16;
        constexpr double kGolden = 0.6180339887498949;

        template <class Fn>
        auto with_stage(const char *stage, Fn &&fn) -> decltype(fn())
        {
            try
            {
                return fn();
            }
            catch (const numerical_error &e)
            {
                throw numerical_error(std::string("jade/") + stage + ": " + e.what());
            }
            catch (const std::invalid_argument &e)
            {
                throw std::invalid_argument(std::string("jade/") + stage + ": " + e.what());
            }
        }

        // Leading k left singular vectors of x
        CMat leading_subspace(const CMat &x, std::size_t k)
        {
            if (x.cols() == 0 || x.rows() == 0)
                throw numerical_error("empty observation");
            Eigen::BDCSVD<CMat> svd(x, Eigen::ComputeThinU);
            const auto kk = Eigen::Index(std::min<std::size_t>(k, std::size_t(svd.matrixU().cols())));
            return svd.matrixU().leftCols(kk);
        }

        // Reorders eigen-systems of `other` to follow `ref` by maximal total eigenvector correlation
        std::vector<std::size_t> align_eigenvectors(const CMat &ref, const CMat &other)
        {
            const auto n = ref.cols();
            RMat cost(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    cost(i, j) = -std::abs(ref.col(i).dot(other.col(j)));
            return optimal_assignment(cost);
        }

        double delay_from_eigenvalue(cplx lambda, double delta_f)
        {
            const double tau = wrap_two_pi(-std::arg(lambda)) / (2.0 * kPi * delta_f);
            return tau >= 1.0 / delta_f ? 0.0 : tau;
        }

        void check_paths(std::size_t n_paths)
        {
            if (n_paths < 1 || n_paths > kMaxPaths)
                throw std::invalid_argument("number of paths must lie in [1, 16]");
        }

        std::size_t block_size(const SubspaceDecomposition &d, const ArrayConfig &config)
        {
            const auto rows = std::size_t(d.signal_basis.rows());
            if (rows % config.n_subcarriers() != 0)
                throw std::invalid_argument("signal basis rows are not a multiple of the subcarrier count");
            return rows / config.n_subcarriers();
        }
    }

    FrequencyModel parse_frequency_model(std::string_view text)
    {
        if (text == "reference")
            return FrequencyModel::reference;
        if (text == "per_subcarrier")
            return FrequencyModel::per_subcarrier;
        throw std::invalid_argument("unknown frequency model '" + std::string(text) + "' (reference, per_subcarrier)");
    }

    MusicBlock parse_music_block(std::string_view text)
    {
        if (text == "first_block")
            return MusicBlock::first_block;
        if (text == "block_average")
            return MusicBlock::block_average;
        if (text == "kronecker")
            return MusicBlock::kronecker;
        throw std::invalid_argument("unknown music block '" + std::string(text) + "' (first_block, block_average, kronecker)");
    }

    HorizontalManifold parse_manifold(std::string_view text)
    {
        if (text == "exact_qdft")
            return HorizontalManifold::exact_qdft;
        if (text == "phase_mode")
            return HorizontalManifold::phase_mode;
        throw std::invalid_argument("unknown manifold '" + std::string(text) + "' (exact_qdft, phase_mode)");
    }

    const char *frequency_model_name(FrequencyModel v) { return v == FrequencyModel::reference ? "reference" : "per_subcarrier"; }
    const char *music_block_name(MusicBlock v)
    {
        return v == MusicBlock::first_block ? "first_block" : v == MusicBlock::block_average ? "block_average" : "kronecker";
    }
    const char *manifold_name(HorizontalManifold v) { return v == HorizontalManifold::exact_qdft ? "exact_qdft" : "phase_mode"; }

    // ---------------------------------------------------------------- covariance and subspace

    CMat vectorize_and_covariance(const SnapshotTensor &y)
    {
        if (y.n_snapshots() == 0)
            throw std::invalid_argument("vectorize_and_covariance: no snapshots");
        const auto z = y.stacked();
        const auto n = z.rows();
        CMat r = CMat::Zero(n, n);
        const auto &k = kernels::active();
        for (Eigen::Index t = 0; t < z.cols(); ++t)
            k.rank1_update(r.data(), std::size_t(n), z.col(t).data(), 1.0 / double(z.cols()));
        return r;
    }

    SubspaceDecomposition subspace(const CMat &r, std::size_t n_paths)
    {
        check_paths(n_paths);
        if (r.rows() != r.cols())
            throw std::invalid_argument("subspace: covariance must be square");
        const auto n = r.rows();
        if (Eigen::Index(n_paths) >= n)
            throw std::invalid_argument("subspace: more paths than observation dimensions");
        const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
        if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale)
            throw std::invalid_argument("subspace: covariance is not Hermitian");

        Eigen::SelfAdjointEigenSolver<CMat> es(r);
        if (es.info() != Eigen::Success)
            throw numerical_error("subspace: eigen-decomposition failed");
        // ascending -> nonincreasing
        SubspaceDecomposition d;
        d.eigenvalues = es.eigenvalues().reverse();
        const CMat v = es.eigenvectors().rowwise().reverse();
        const auto np = Eigen::Index(n_paths);
        d.signal_basis = v.leftCols(np);
        d.noise_basis = v.rightCols(n - np);
        d.noise_power_estimate = d.eigenvalues.tail(n - np).mean();
        return d;
    }

    SubspaceDecomposition subspace_from_data(const SnapshotTensor &y, std::size_t n_paths)
    {
        check_paths(n_paths);
        const auto z = y.stacked();
        const auto n = z.rows(), t = z.cols();
        if (t < Eigen::Index(n_paths))
            throw numerical_error("subspace: fewer snapshots than paths");
        if (Eigen::Index(n_paths) >= n)
            throw std::invalid_argument("subspace: more paths than observation dimensions");

        Eigen::BDCSVD<CMat> svd(z, Eigen::ComputeThinU);
        const RVec s = svd.singularValues();
        SubspaceDecomposition d;
        d.eigenvalues = s.array().square() / double(t);
        const auto np = Eigen::Index(n_paths);
        d.signal_basis = svd.matrixU().leftCols(np);
        const double total = z.squaredNorm() / double(t);
        const double signal = d.eigenvalues.head(np).sum();
        d.noise_power_estimate = std::max(0.0, total - signal) / double(n - np);
        if (d.eigenvalues[np - 1] <= 1e-13 * std::max(d.eigenvalues[0], 1e-300))
            throw numerical_error("subspace: observation has rank below the number of paths");
        return d;
    }

    // ---------------------------------------------------------------- delay

    DelayEstimates esprit_delay(const SubspaceDecomposition &decomp, const ArrayConfig &config)
    {
        const std::size_t nm = config.n_subcarriers();
        const std::size_t n = block_size(decomp, config);
        const CMat &es = decomp.signal_basis;
        const auto np = es.cols();
        if (nm < 2)
            throw std::invalid_argument("esprit_delay: at least two subcarriers required");

        const auto rows = Eigen::Index((nm - 1) * n);
        DelayEstimates out;
        out.psi_delay = tls_solve(es.topRows(rows), es.bottomRows(rows));

        const EigenPair joint = eigen_general(out.psi_delay);
        std::vector<std::vector<cplx>> phasors(static_cast<std::size_t>(np));
        for (std::size_t m = 0; m + 1 < nm; ++m)
        {
            const CMat psi = tls_solve(es.middleRows(Eigen::Index(m * n), Eigen::Index(n)),
                                       es.middleRows(Eigen::Index((m + 1) * n), Eigen::Index(n)));
            const EigenPair ep = eigen_general(psi);
            const auto match = align_eigenvectors(joint.vectors, ep.vectors);
            for (Eigen::Index l = 0; l < np; ++l)
                phasors[std::size_t(l)].push_back(ep.values[Eigen::Index(match[std::size_t(l)])]);
        }

        std::vector<std::size_t> order(static_cast<std::size_t>(np));
        std::vector<double> tau(static_cast<std::size_t>(np));
        for (std::size_t l = 0; l < std::size_t(np); ++l)
            tau[l] = delay_from_eigenvalue(std::polar(1.0, circular_mean_phase(phasors[l])), config.delta_f());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tau[a] < tau[b]; });
        for (std::size_t k : order)
        {
            out.delays.push_back(tau[k]);
            out.eigenvalues.push_back(std::polar(1.0, -2.0 * kPi * config.delta_f() * tau[k]));
        }
        return out;
    }

    // ---------------------------------------------------------------- elevation

    RecurrenceMatrices build_recurrence_matrices(const BeamSelection &selection, std::size_t n_vertical)
    {
        const std::size_t nb = selection.n_beams();
        if (nb < 2)
            throw std::invalid_argument("build_recurrence_matrices: at least two selected beams are required");
        RecurrenceMatrices r{RMat::Zero(Eigen::Index(nb - 1), Eigen::Index(nb)), RMat::Zero(Eigen::Index(nb - 1), Eigen::Index(nb))};
        for (std::size_t u = 0; u + 1 < nb; ++u)
        {
            for (std::size_t k = 0; k < 2; ++k)
            {
                const std::size_t eta = selection.indices[u + k];
                if (eta < 1 || eta > n_vertical)
                    throw std::out_of_range("beam index outside [1, N_V]");
                const double a = kPi * double(eta) / double(n_vertical);
                const double sign = ((eta % 2) ? -1.0 : 1.0) * (k == 0 ? 1.0 : -1.0);
                r.f0(Eigen::Index(u), Eigen::Index(u + k)) = sign * std::cos(a);
                r.f1(Eigen::Index(u), Eigen::Index(u + k)) = sign * std::sin(a);
            }
        }
        return r;
    }

    double elevation_from_eigenvalue(cplx lambda, const ArrayConfig &config, double freq, bool *valid)
    {
        const double arg = kSpeedOfLight * std::atan(lambda.real()) / (kPi * freq * config.ring_spacing());
        const bool ok = arg >= -1.0 && arg <= 1.0;
        if (valid)
            *valid = ok;
        return std::acos(std::clamp(arg, -1.0 + 1e-15, 1.0 - 1e-15));
    }

    EigenPair sorted_elevation_eigen(const CMat &psi_elev)
    {
        EigenPair ep = eigen_general(psi_elev);
        std::vector<Eigen::Index> order(static_cast<std::size_t>(ep.values.size()));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b)
                         { return ep.values[a].real() > ep.values[b].real(); });
        EigenPair out{CVec(ep.values.size()), CMat(ep.vectors.rows(), ep.vectors.cols())};
        for (std::size_t k = 0; k < order.size(); ++k)
        {
            out.values[Eigen::Index(k)] = ep.values[order[k]];
            out.vectors.col(Eigen::Index(k)) = ep.vectors.col(order[k]);
        }
        return out;
    }

    namespace
    {
        // Stacks F0 * E_{m,p} and F1 * E_{m,p} over the requested subcarriers and all modes
        CMat solve_elevation_operator(const CMat &es, const RecurrenceMatrices &rm, std::size_t n, std::size_t nq,
                                      std::size_t nb, std::size_t m_begin, std::size_t m_end)
        {
            const auto np = es.cols();
            const auto rows_per = Eigen::Index(nb - 1);
            const auto slices = Eigen::Index((m_end - m_begin) * nq);
            CMat lhs(rows_per * slices, np), rhs(rows_per * slices, np);
            CMat e(Eigen::Index(nb), np);
            Eigen::Index s = 0;
            for (std::size_t m = m_begin; m < m_end; ++m)
                for (std::size_t p = 0; p < nq; ++p, ++s)
                {
                    for (std::size_t u = 0; u < nb; ++u)
                        e.row(Eigen::Index(u)) = es.row(Eigen::Index(m * n + u * nq + p));
                    lhs.middleRows(s * rows_per, rows_per) = rm.f0.cast<cplx>() * e;
                    rhs.middleRows(s * rows_per, rows_per) = rm.f1.cast<cplx>() * e;
                }
            return tls_solve(lhs, rhs);
        }
    }

    ElevationEstimates esprit_elevation(const SubspaceDecomposition &decomp, const BeamSelection &selection,
                                        const ArrayConfig &config, FrequencyModel model)
    {
        const std::size_t nm = config.n_subcarriers(), nq = config.n_modes(), nb = selection.n_beams();
        const std::size_t n = block_size(decomp, config);
        if (n != nq * nb)
            throw std::invalid_argument("esprit_elevation: signal basis does not match (2P+1) N_B");
        const RecurrenceMatrices rm = build_recurrence_matrices(selection, config.n_vertical());
        const CMat &es = decomp.signal_basis;
        const auto np = std::size_t(es.cols());

        ElevationEstimates out;
        if (model == FrequencyModel::reference)
        {
            out.psi_elevation = solve_elevation_operator(es, rm, n, nq, nb, 0, nm);
            const EigenPair ep = sorted_elevation_eigen(out.psi_elevation);
            for (std::size_t l = 0; l < np; ++l)
            {
                bool ok = true;
                out.eigenvalues.push_back(ep.values[Eigen::Index(l)]);
                out.elevations.push_back(elevation_from_eigenvalue(ep.values[Eigen::Index(l)], config, config.f0(), &ok));
                out.valid.push_back(ok);
            }
            return out;
        }

        // Per subcarrier: same eigenvectors, eigenvalues tan(pi f_m h cos(theta)/c); align on subcarrier 0
        EigenPair ref;
        std::vector<double> sum(np, 0.0);
        std::vector<bool> valid(np, true);
        for (std::size_t m = 0; m < nm; ++m)
        {
            const CMat psi = solve_elevation_operator(es, rm, n, nq, nb, m, m + 1);
            if (m == 0)
            {
                out.psi_elevation = psi;
                ref = sorted_elevation_eigen(psi);
                for (std::size_t l = 0; l < np; ++l)
                {
                    bool ok = true;
                    sum[l] += elevation_from_eigenvalue(ref.values[Eigen::Index(l)], config, config.frequency(0), &ok);
                    valid[l] = valid[l] && ok;
                    out.eigenvalues.push_back(ref.values[Eigen::Index(l)]);
                }
                continue;
            }
            const EigenPair ep = eigen_general(psi);
            const auto match = align_eigenvectors(ref.vectors, ep.vectors);
            for (std::size_t l = 0; l < np; ++l)
            {
                bool ok = true;
                sum[l] += elevation_from_eigenvalue(ep.values[Eigen::Index(match[l])], config, config.frequency(m), &ok);
                valid[l] = valid[l] && ok;
            }
        }
        for (std::size_t l = 0; l < np; ++l)
        {
            out.elevations.push_back(sum[l] / double(nm));
            out.valid.push_back(valid[l]);
        }
        return out;
    }

    // ---------------------------------------------------------------- pairing

    PairMatch pair_match(const CMat &psi_delay, const CMat &psi_elev, const std::vector<cplx> &delay_eigenvalues)
    {
        const auto np = psi_delay.rows();
        if (psi_delay.cols() != np || psi_elev.rows() != np || psi_elev.cols() != np || np == 0)
            throw std::invalid_argument("pair_match: both operators must be N_p x N_p");

        // (Psi_V^T (x) I - I (x) Psi_V) vec(P) = vec(Psi_V Psi_D - Psi_D Psi_V)
        const auto n2 = np * np;
        CMat op = CMat::Zero(n2, n2);
        const CMat id = CMat::Identity(np, np);
        for (Eigen::Index i = 0; i < np; ++i)
            for (Eigen::Index j = 0; j < np; ++j)
            {
                op.block(i * np, j * np, np, np) += psi_elev(j, i) * id;
                if (i == j)
                    op.block(i * np, j * np, np, np) -= psi_elev;
            }
        const CMat rhs_m = psi_elev * psi_delay - psi_delay * psi_elev;
        const CVec rhs = Eigen::Map<const CVec>(rhs_m.data(), n2);

        Eigen::JacobiSVD<CMat> svd(op, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const RVec s = svd.singularValues();
        const double cutoff = 1e-10 * std::max(s.size() ? s[0] : 0.0, 1e-300);
        CVec sol = CVec::Zero(n2);
        const CVec utb = svd.matrixU().adjoint() * rhs;
        for (Eigen::Index k = 0; k < s.size(); ++k)
            if (s[k] > cutoff)
                sol += svd.matrixV().col(k) * (utb[k] / s[k]);

        PairMatch out;
        out.perturbation = Eigen::Map<const CMat>(sol.data(), np, np);

        std::vector<cplx> lambda_d = delay_eigenvalues;
        EigenPair dep;
        if (lambda_d.empty() || Eigen::Index(lambda_d.size()) != np)
        {
            dep = eigen_general(psi_delay);
            std::vector<Eigen::Index> order(static_cast<std::size_t>(np));
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b)
                             { return wrap_two_pi(-std::arg(dep.values[a])) < wrap_two_pi(-std::arg(dep.values[b])); });
            lambda_d.clear();
            EigenPair sorted{CVec(np), CMat(np, np)};
            for (std::size_t k = 0; k < order.size(); ++k)
            {
                sorted.values[Eigen::Index(k)] = dep.values[order[k]];
                sorted.vectors.col(Eigen::Index(k)) = dep.vectors.col(order[k]);
                lambda_d.push_back(dep.values[order[k]]);
            }
            dep = sorted;
        }

        const EigenPair vep = sorted_elevation_eigen(psi_elev);
        const double cond = condition_number(vep.vectors);
        RMat cost(np, np);
        if (std::isfinite(cond) && cond < 1e8)
        {
            const CMat t = vep.vectors;
            const CMat d = t.partialPivLu().solve((psi_delay + out.perturbation) * t);
            for (Eigen::Index k = 0; k < np; ++k)
            {
                out.paired_eigenvalues.push_back(d(k, k));
                for (Eigen::Index j = 0; j < np; ++j)
                    cost(k, j) = std::norm(d(k, k) - lambda_d[std::size_t(j)]);
            }
        }
        else
        {
            out.fallback = true;
            if (dep.vectors.size() == 0)
            {
                // caller supplied its own delay order: align eig(Psi_D) to it by eigenvalue proximity
                const EigenPair raw = eigen_general(psi_delay);
                RMat c(np, np);
                for (Eigen::Index i = 0; i < np; ++i)
                    for (Eigen::Index j = 0; j < np; ++j)
                        c(i, j) = std::norm(lambda_d[std::size_t(i)] - raw.values[j]);
                const auto a = optimal_assignment(c);
                dep = EigenPair{CVec(np), CMat(np, np)};
                for (Eigen::Index i = 0; i < np; ++i)
                {
                    dep.values[i] = raw.values[Eigen::Index(a[std::size_t(i)])];
                    dep.vectors.col(i) = raw.vectors.col(Eigen::Index(a[std::size_t(i)]));
                }
            }
            for (Eigen::Index k = 0; k < np; ++k)
            {
                out.paired_eigenvalues.push_back(0.0);
                for (Eigen::Index j = 0; j < np; ++j)
                    cost(k, j) = -std::abs(vep.vectors.col(k).dot(dep.vectors.col(j)));
            }
        }
        out.pairing = optimal_assignment(cost);
        if (out.fallback)
            for (Eigen::Index k = 0; k < np; ++k)
                out.paired_eigenvalues[std::size_t(k)] = lambda_d[out.pairing[std::size_t(k)]];
        return out;
    }

    // ---------------------------------------------------------------- azimuth

    CVec stage2_response(const ArrayConfig &config, const BeamSelection &selection, double freq, double phi, double theta,
                         HorizontalManifold manifold)
    {
        const CVec av = dirichlet_response(config, freq, theta, selection.indices);
        const CVec ah = manifold == HorizontalManifold::exact_qdft ? qdft_horizontal(config, freq, phi, theta)
                                                                    : phase_mode_response(config, freq, phi, theta);
        CVec b(av.size() * ah.size());
        for (Eigen::Index u = 0; u < av.size(); ++u)
            b.segment(u * ah.size(), ah.size()) = av[u] * ah;
        return b;
    }

    namespace
    {
        struct MusicSubspace
        {
            CMat q;          // orthonormal signal basis of the rows in use
            double freq;     // manifold frequency
            Eigen::Index row0, nrows;
        };

        struct MusicContext
        {
            std::vector<MusicSubspace> parts;
            const ArrayConfig *config;
            const BeamSelection *selection;
            JadeOptions options;
        };

        MusicContext build_music_context(const SnapshotTensor &y, const BeamSelection &selection, const ArrayConfig &config,
                                         std::size_t n_paths, const JadeOptions &opt)
        {
            const std::size_t nq = config.n_modes(), nb = selection.n_beams(), n = nq * nb;
            if (y.spatial_dim() != n || y.label() != SpatialLabel::post_stage2)
                throw std::invalid_argument("music_azimuth: expected stage-2 observations of size (2P+1) N_B");
            const auto spatial = y.spatial();

            std::vector<std::pair<Eigen::Index, Eigen::Index>> row_sets;
            if (opt.music_block == MusicBlock::kronecker)
                row_sets.emplace_back(0, Eigen::Index(n));
            else if (opt.music_block == MusicBlock::first_block)
                row_sets.emplace_back(0, Eigen::Index(nq));
            else
                for (std::size_t u = 0; u < nb; ++u)
                    row_sets.emplace_back(Eigen::Index(u * nq), Eigen::Index(nq));
            for (const auto &rs : row_sets)
                if (rs.second <= Eigen::Index(n_paths))
                    throw std::invalid_argument("music_azimuth: noise subspace is empty ((2P+1) <= N_p)");

            MusicContext ctx{{}, &config, &selection, opt};
            const std::size_t nm = y.n_subcarriers(), nt = y.n_snapshots();
            for (const auto &rs : row_sets)
            {
                if (opt.frequency_model == FrequencyModel::reference)
                    ctx.parts.push_back({leading_subspace(spatial.middleRows(rs.first, rs.second), n_paths), config.f0(), rs.first, rs.second});
                else
                    for (std::size_t m = 0; m < nm; ++m)
                    {
                        CMat block(rs.second, Eigen::Index(nt));
                        for (std::size_t t = 0; t < nt; ++t)
                            block.col(Eigen::Index(t)) = spatial.col(Eigen::Index(m + nm * t)).segment(rs.first, rs.second);
                        ctx.parts.push_back({leading_subspace(block, n_paths), config.frequency(m), rs.first, rs.second});
                    }
            }
            return ctx;
        }

        double context_cost(const MusicContext &ctx, double phi, double theta)
        {
            const auto &k = kernels::active();
            double total = 0.0;
            // cache responses per frequency; parts share a frequency across row sets
            double last_f = -1.0;
            CVec b;
            for (const auto &part : ctx.parts)
            {
                if (part.freq != last_f)
                {
                    b = stage2_response(*ctx.config, *ctx.selection, part.freq, phi, theta, ctx.options.manifold);
                    last_f = part.freq;
                }
                const cplx *seg = b.data() + part.row0;
                const double nb2 = k.norm2(seg, std::size_t(part.nrows));
                if (nb2 <= 0.0)
                {
                    total += 1.0;
                    continue;
                }
                double proj = 0.0;
                for (Eigen::Index c = 0; c < part.q.cols(); ++c)
                    proj += std::norm(k.dotc(part.q.col(c).data(), seg, std::size_t(part.nrows)));
                total += std::max(0.0, 1.0 - proj / nb2);
            }
            return total / double(ctx.parts.size());
        }

        double golden_minimize(const MusicContext &ctx, double theta, double a, double b, double tol)
        {
            double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
            double fc = context_cost(ctx, c, theta), fd = context_cost(ctx, d, theta);
            while (b - a > tol)
            {
                if (fc < fd)
                {
                    b = d, d = c, fd = fc;
                    c = b - kGolden * (b - a);
                    fc = context_cost(ctx, c, theta);
                }
                else
                {
                    a = c, c = d, fc = fd;
                    d = a + kGolden * (b - a);
                    fd = context_cost(ctx, d, theta);
                }
            }
            return 0.5 * (a + b);
        }
    }

    double music_cost(const SnapshotTensor &y, const BeamSelection &selection, const ArrayConfig &config, double phi,
                      double theta, std::size_t n_paths, const JadeOptions &options)
    {
        const MusicContext ctx = build_music_context(y, selection, config, n_paths, options);
        return context_cost(ctx, phi, theta);
    }

    std::vector<double> music_azimuth(const SnapshotTensor &y, const BeamSelection &selection, const ArrayConfig &config,
                                      const std::vector<double> &elevations, std::size_t n_paths, const JadeOptions &options)
    {
        check_paths(n_paths);
        if (options.music_grid < 8)
            throw std::invalid_argument("music_azimuth: grid size must be at least 8");
        if (!(options.refine_tol > 0.0))
            throw std::invalid_argument("music_azimuth: refinement tolerance must be positive");
        const MusicContext ctx = build_music_context(y, selection, config, n_paths, options);

        const std::size_t g = options.music_grid;
        const double step = 2.0 * kPi / double(g);
        std::vector<double> out;
        std::vector<double> cost(g);
        for (double theta : elevations)
        {
            for (std::size_t i = 0; i < g; ++i)
                cost[i] = context_cost(ctx, double(i) * step, theta);
            // refine the lowest circular local minima; a null narrower than the grid step can rank below another basin
            std::vector<std::size_t> minima;
            for (std::size_t i = 0; i < g; ++i)
                if (cost[i] <= cost[(i + g - 1) % g] && cost[i] <= cost[(i + 1) % g])
                    minima.push_back(i);
            std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
            minima.resize(std::min(minima.size(), n_paths + 2));
            double best_phi = 0.0, best_cost = std::numeric_limits<double>::infinity();
            for (std::size_t i : minima)
            {
                const double centre = double(i) * step;
                const double phi = golden_minimize(ctx, theta, centre - step, centre + step, options.refine_tol);
                const double c = context_cost(ctx, phi, theta);
                if (c < best_cost)
                    best_cost = c, best_phi = phi;
            }
            out.push_back(wrap_two_pi(best_phi));
        }
        return out;
    }

    // ---------------------------------------------------------------- orchestration

    namespace
    {
        // Delays from the path amplitudes once angles are known: G_m = B_m^+ E_m = diag(e^{-j 2 pi f_m tau}) T
        std::vector<double> manifold_delays(const SubspaceDecomposition &decomp, const BeamSelection &selection,
                                            const ArrayConfig &config, const std::vector<double> &theta,
                                            const std::vector<double> &phi, HorizontalManifold manifold)
        {
            const std::size_t nm = config.n_subcarriers(), np = theta.size();
            const std::size_t n = block_size(decomp, config);
            std::vector<CMat> g(nm);
            for (std::size_t m = 0; m < nm; ++m)
            {
                CMat b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(np));
                for (std::size_t l = 0; l < np; ++l)
                    b.col(Eigen::Index(l)) = stage2_response(config, selection, config.frequency(m), phi[l], theta[l], manifold);
                g[m] = b.colPivHouseholderQr().solve(decomp.signal_basis.middleRows(Eigen::Index(m * n), Eigen::Index(n)));
            }
            std::vector<double> tau(np);
            for (std::size_t l = 0; l < np; ++l)
            {
                cplx acc = 0.0;
                for (std::size_t m = 0; m + 1 < nm; ++m)
                    acc += g[m + 1].row(Eigen::Index(l)).dot(g[m].row(Eigen::Index(l)));
                // row(m+1) . conj(row(m)): Eigen's dot conjugates the first argument
                tau[l] = delay_from_eigenvalue(std::conj(acc), config.delta_f());
            }
            return tau;
        }
    }

    JadeEstimates estimate_all(const SnapshotTensor &y, const BeamSelection &selection, const ArrayConfig &config,
                               std::size_t n_paths, const JadeOptions &options)
    {
        check_paths(n_paths);
        if (y.label() != SpatialLabel::post_stage2)
            throw std::invalid_argument("estimate_all: expected stage-2 observations");

        const SubspaceDecomposition decomp = with_stage("subspace", [&] { return subspace_from_data(y, n_paths); });
        const DelayEstimates de = with_stage("delay", [&] { return esprit_delay(decomp, config); });
        const ElevationEstimates ee = with_stage("elevation", [&]
                                                 { return esprit_elevation(decomp, selection, config, options.frequency_model); });
        const PairMatch pm = with_stage("pairing", [&] { return pair_match(de.psi_delay, ee.psi_elevation, de.eigenvalues); });
        const std::vector<double> az = with_stage("azimuth", [&]
                                                  { return music_azimuth(y, selection, config, ee.elevations, n_paths, options); });

        JadeEstimates out;
        out.psi_delay = de.psi_delay;
        out.psi_elevation = ee.psi_elevation;
        out.perturbation = pm.perturbation;
        out.pairing_permutation = pm.pairing;
        out.pairing_fallback = pm.fallback;
        out.esprit_delays = de.delays;
        out.noise_power_estimate = decomp.noise_power_estimate;

        std::vector<double> tau(n_paths);
        if (options.frequency_model == FrequencyModel::per_subcarrier)
            tau = with_stage("delay", [&] { return manifold_delays(decomp, selection, config, ee.elevations, az, options.manifold); });
        else
            for (std::size_t k = 0; k < n_paths; ++k)
                tau[k] = de.delays[pm.pairing[k]];

        for (std::size_t k = 0; k < n_paths; ++k)
            out.paths.push_back({tau[k], ee.elevations[k], az[k], ee.valid[k]});
        return out;
    }
}
