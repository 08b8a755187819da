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

#ifndef HUCYA_JADE_HPP
#define HUCYA_JADE_HPP

// Joint delay / elevation / azimuth estimation on stage-2 (optionally interpolated) observations.
//
// Stacked observation per snapshot: z = [y_0; y_1; ...; y_{M-1}], y_m of length n = (2P+1) N_B with
// index u*(2P+1) + (p+P). Noiseless, z = A s with column l of A equal to e^{-j 2 pi f_m tau_l} b_{l,m},
// b_{l,m} = D_m(theta_l) (x) q_m(phi_l, theta_l) (Dirichlet vertical response times Q-DFT ring response).

#include "hucya/hybrid_beamformer.hpp"
#include "hucya/linalg.hpp"

#include <string_view>
#include <vector>

namespace hucya
{
    // reference:      every subcarrier is modelled at f0 (the manifold MDSI aims for)
    // per_subcarrier: subcarrier m is modelled at f_m; elevation and azimuth are fitted per subcarrier
    //                 and delays are read from the angle-informed path amplitudes, exact under beam squint
    enum class FrequencyModel
    {
        reference,
        per_subcarrier
    };

    // Which stage-2 rows feed the azimuth search
    enum class MusicBlock
    {
        first_block,   // horizontal modes of the first selected beam only
        block_average, // average of the per-beam pseudo-spectra
        kronecker      // full vertical (x) horizontal manifold over all selected beams
    };

    enum class HorizontalManifold
    {
        exact_qdft, // N_H-point transform of the exact ring response
        phase_mode  // j^p J_p(kr) e^{-j p phi}
    };

    struct JadeOptions
    {
        FrequencyModel frequency_model = FrequencyModel::reference;
        MusicBlock music_block = MusicBlock::kronecker;
        HorizontalManifold manifold = HorizontalManifold::exact_qdft;
        std::size_t music_grid = 100;
        double refine_tol = 1e-4; // rad
    };

    FrequencyModel parse_frequency_model(std::string_view text);
    MusicBlock parse_music_block(std::string_view text);
    HorizontalManifold parse_manifold(std::string_view text);
    const char *frequency_model_name(FrequencyModel v);
    const char *music_block_name(MusicBlock v);
    const char *manifold_name(HorizontalManifold v);

    struct SubspaceDecomposition
    {
        CMat signal_basis;  // E_s, orthonormal columns
        CMat noise_basis;   // E_n; left empty by the data-SVD route, where only E_s is formed
        RVec eigenvalues;   // nonincreasing
        double noise_power_estimate = 0.0;
    };

    // R = (1/T) sum_t z_t z_t^H. Dense (nM)^2 storage, intended for small problems and cross-checks.
    CMat vectorize_and_covariance(const SnapshotTensor &reconstructed);

    // Hermitian EVD of R; E_s = leading n_paths eigenvectors, noise power = mean of the rest
    SubspaceDecomposition subspace(const CMat &r, std::size_t n_paths);

    // Same decomposition from the thin SVD of the (nM x T) data matrix, without forming R
    SubspaceDecomposition subspace_from_data(const SnapshotTensor &reconstructed, std::size_t n_paths);

    struct DelayEstimates
    {
        std::vector<double> delays;     // s, ascending, in [0, 1/delta_f)
        std::vector<cplx> eigenvalues;  // e^{-j 2 pi delta_f tau} of the reported delays
        CMat psi_delay;                 // joint shift operator over all subcarrier pairs
    };

    // Per pair (m, m+1): E_{m+1} = E_m Psi_m by TLS on the full spatial blocks; eigenvalues aligned across
    // pairs by eigenvector correlation and combined by circular mean.
    DelayEstimates esprit_delay(const SubspaceDecomposition &decomp, const ArrayConfig &config);

    struct RecurrenceMatrices
    {
        RMat f0, f1; // (N_B - 1) x N_B
    };

    // Row u: (-1)^{eta_u} c(eta_u) at column u, -(-1)^{eta_{u+1}} c(eta_{u+1}) at column u+1, with
    // c = cos(pi eta / N_V) for F0 and sin(pi eta / N_V) for F1; tan(g/2) F0 a = F1 a for the Dirichlet response
    RecurrenceMatrices build_recurrence_matrices(const BeamSelection &selection, std::size_t n_vertical);

    struct ElevationEstimates
    {
        std::vector<double> elevations; // rad, ordered by decreasing Re(lambda) of psi_elevation
        std::vector<cplx> eigenvalues;  // of psi_elevation, same order
        std::vector<bool> valid;        // false when the arccos argument left [-1, 1] and was clamped
        CMat psi_elevation;
    };

    // Solves F0 E_V Psi_V = F1 E_V by TLS, with E_V stacking every (subcarrier, mode) slice of the selected
    // beams; theta = arccos(c atan(Re lambda) / (pi f h)). per_subcarrier fits each subcarrier separately.
    ElevationEstimates esprit_elevation(const SubspaceDecomposition &decomp, const BeamSelection &selection,
                                        const ArrayConfig &config, FrequencyModel model = FrequencyModel::reference);

    // theta from an elevation eigenvalue at frequency freq
    double elevation_from_eigenvalue(cplx lambda, const ArrayConfig &config, double freq, bool *valid = nullptr);

    struct PairMatch
    {
        CMat perturbation;                  // P_D
        std::vector<std::size_t> pairing;   // pairing[k] = delay index matched to elevation k
        std::vector<cplx> paired_eigenvalues; // diag(T^{-1} (Psi_D + P_D) T), elevation order
        bool fallback = false;              // true when Psi_V was too ill-conditioned to diagonalise
    };

    // Minimum-norm perturbation making Psi_D commute with Psi_V (P_V = 0), then joint diagonalisation.
    // delay_eigenvalues lists the delay eigenvalues in the caller's delay order; defaults to eig(Psi_D)
    // sorted by ascending delay.
    PairMatch pair_match(const CMat &psi_delay, const CMat &psi_elev, const std::vector<cplx> &delay_eigenvalues = {});

    // Eigenvalues of psi_elev sorted by decreasing real part, with matching unit eigenvectors
    EigenPair sorted_elevation_eigen(const CMat &psi_elev);

    // Azimuth per elevation by a grid search of the MUSIC cost 1 - |E_s^H b|^2 / |b|^2, then golden-section refinement
    // of the N_p + 2 lowest grid minima
    std::vector<double> music_azimuth(const SnapshotTensor &reconstructed, const BeamSelection &selection,
                                      const ArrayConfig &config, const std::vector<double> &elevations,
                                      std::size_t n_paths, const JadeOptions &options = {});

    // Normalised MUSIC cost at one azimuth, exposed for tests and diagnostics
    double music_cost(const SnapshotTensor &reconstructed, const BeamSelection &selection, const ArrayConfig &config,
                      double phi, double theta, std::size_t n_paths, const JadeOptions &options = {});

    // Spatial response model b_m(phi, theta) at frequency freq over the selected beams
    CVec stage2_response(const ArrayConfig &config, const BeamSelection &selection, double freq, double phi, double theta,
                         HorizontalManifold manifold = HorizontalManifold::exact_qdft);

    struct PathEstimate
    {
        double delay = 0.0;     // s
        double elevation = 0.0; // rad
        double azimuth = 0.0;   // rad
        bool elevation_valid = true;
    };

    struct JadeEstimates
    {
        std::vector<PathEstimate> paths;
        CMat psi_delay, psi_elevation, perturbation;
        std::vector<std::size_t> pairing_permutation;
        std::vector<double> esprit_delays; // unpaired delay list the pairing indexes into
        bool pairing_fallback = false;
        double noise_power_estimate = 0.0;
    };

    JadeEstimates estimate_all(const SnapshotTensor &reconstructed, const BeamSelection &selection, const ArrayConfig &config,
                               std::size_t n_paths, const JadeOptions &options = {});
}

#endif
