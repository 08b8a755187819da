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

#ifndef HUCYA_LOCALIZATION_HPP
#define HUCYA_LOCALIZATION_HPP

// 3D positioning from matched path estimates. BS frame: z along the cylinder axis, elevation from +z,
// azimuth from +x counter-clockwise. Single-bounce NLOS paths use the virtual-anchor construction.

#include "hucya/common.hpp"

#include <optional>
#include <vector>

namespace hucya
{
    using Vec3 = Eigen::Vector3d;

    struct ReflectorPlane
    {
        Vec3 point = Vec3::Zero();
        Vec3 normal = Vec3::UnitZ(); // unit length
    };

    struct SceneModel
    {
        Vec3 bs_position = Vec3::Zero();
        std::vector<ReflectorPlane> reflectors;
        std::optional<double> clock_offset; // s; empty when unknown to the receiver

        void validate() const; // throws std::invalid_argument on non-unit normals
    };

    struct RayHypothesis
    {
        Vec3 origin = Vec3::Zero();
        Vec3 direction = Vec3::UnitX(); // unit length
        double path_length = 0.0;       // m
        bool length_uncertain = true;   // set when the clock offset is unknown
    };

    // Unit vector (sin t cos p, sin t sin p, cos t)
    Vec3 direction_from_angles(double elevation, double azimuth);

    Vec3 mirror_point(const Vec3 &x, const ReflectorPlane &plane);
    Vec3 mirror_direction(const Vec3 &d, const ReflectorPlane &plane);

    // LOS when reflector_index is empty, otherwise single bounce off scene.reflectors[*reflector_index].
    // path_length = c (delay - clock_offset) when the offset is known.
    RayHypothesis ray_from_estimate(double delay, double elevation, double azimuth, const SceneModel &scene,
                                    std::optional<std::size_t> reflector_index = std::nullopt);

    // origin + path_length * direction; throws std::invalid_argument when the length is uncertain
    Vec3 locate_known_offset(const RayHypothesis &ray);

    struct TwoPathFix
    {
        Vec3 position = Vec3::Zero();
        double residual = 0.0; // final objective value, m^2
        std::size_t iterations = 0;
    };

    struct TwoPathOptions
    {
        double weight = 1.0;      // on the squared range-difference residual (m^2)
        double step_tol = 1e-10;  // m
        std::size_t max_iterations = 100;
    };

    // Minimises sum_i dist(x, ray_i)^2 + weight * (s_1(x) - s_2(x) - c (tau_1 - tau_2))^2, where s_i(x) is the
    // distance along ray i from its origin to the projection of x, by damped Gauss-Newton from the midpoint
    // of the common perpendicular. Throws std::invalid_argument for rays within 1e-4 rad of parallel.
    TwoPathFix locate_two_paths(const RayHypothesis &ray1, const RayHypothesis &ray2, double tau1, double tau2,
                                const TwoPathOptions &options = {});

    // Midpoint of the shortest segment between the two (infinite) ray lines
    Vec3 common_perpendicular_midpoint(const RayHypothesis &ray1, const RayHypothesis &ray2);
}

#endif
