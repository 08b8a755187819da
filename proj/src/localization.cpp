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

#include "hucya/localization.hpp"

#include <Eigen/Cholesky>

#include <algorithm>

namespace hucya
{
    namespace
    {
        constexpr double kParallelTol = 1e-4;

        void check_ray(const RayHypothesis &r)
        {
            if (std::abs(r.direction.norm() - 1.0) > 1e-9)
                throw std::invalid_argument("ray direction must be a unit vector");
        }

        struct Residuals
        {
            Eigen::Matrix<double, 7, 1> r;
            Eigen::Matrix<double, 7, 3> jac;
        };

        Residuals evaluate(const Vec3 &x, const RayHypothesis &a, const RayHypothesis &b, double range_diff, double weight)
        {
            Residuals out;
            const Eigen::Matrix3d pa = Eigen::Matrix3d::Identity() - a.direction * a.direction.transpose();
            const Eigen::Matrix3d pb = Eigen::Matrix3d::Identity() - b.direction * b.direction.transpose();
            const double sw = std::sqrt(weight);
            out.r.segment<3>(0) = pa * (x - a.origin);
            out.r.segment<3>(3) = pb * (x - b.origin);
            out.r(6) = sw * (a.direction.dot(x - a.origin) - b.direction.dot(x - b.origin) - range_diff);
            out.jac.block<3, 3>(0, 0) = pa;
            out.jac.block<3, 3>(3, 0) = pb;
            out.jac.row(6) = sw * (a.direction - b.direction).transpose();
            return out;
        }
    }

    void SceneModel::validate() const
    {
        for (const auto &p : reflectors)
            if (std::abs(p.normal.norm() - 1.0) > 1e-9)
                throw std::invalid_argument("reflector normal must be a unit vector");
        if (clock_offset && !std::isfinite(*clock_offset))
            throw std::invalid_argument("clock offset must be finite");
    }

    Vec3 direction_from_angles(double elevation, double azimuth)
    {
        return {std::sin(elevation) * std::cos(azimuth), std::sin(elevation) * std::sin(azimuth), std::cos(elevation)};
    }

    Vec3 mirror_point(const Vec3 &x, const ReflectorPlane &plane)
    {
        return x - 2.0 * plane.normal.dot(x - plane.point) * plane.normal;
    }

    Vec3 mirror_direction(const Vec3 &d, const ReflectorPlane &plane)
    {
        return d - 2.0 * plane.normal.dot(d) * plane.normal;
    }

    RayHypothesis ray_from_estimate(double delay, double elevation, double azimuth, const SceneModel &scene,
                                    std::optional<std::size_t> reflector_index)
    {
        scene.validate();
        RayHypothesis ray;
        const Vec3 d = direction_from_angles(elevation, azimuth);
        if (reflector_index)
        {
            if (*reflector_index >= scene.reflectors.size())
                throw std::invalid_argument("ray_from_estimate: reflector index out of range");
            const auto &plane = scene.reflectors[*reflector_index];
            ray.origin = mirror_point(scene.bs_position, plane);
            ray.direction = mirror_direction(d, plane).normalized();
        }
        else
        {
            ray.origin = scene.bs_position;
            ray.direction = d;
        }
        if (scene.clock_offset)
        {
            ray.path_length = kSpeedOfLight * (delay - *scene.clock_offset);
            ray.length_uncertain = false;
        }
        else
        {
            ray.path_length = kSpeedOfLight * delay;
            ray.length_uncertain = true;
        }
        return ray;
    }

    Vec3 locate_known_offset(const RayHypothesis &ray)
    {
        if (ray.length_uncertain)
            throw std::invalid_argument("locate_known_offset: path length is offset-uncertain");
        check_ray(ray);
        return ray.origin + ray.path_length * ray.direction;
    }

    Vec3 common_perpendicular_midpoint(const RayHypothesis &a, const RayHypothesis &b)
    {
        const Vec3 w = a.origin - b.origin;
        const double bb = a.direction.dot(b.direction);
        const double den = 1.0 - bb * bb;
        if (den < kParallelTol * kParallelTol)
            throw std::invalid_argument("rays are parallel; the two-path fix is ill-posed");
        const double d1 = a.direction.dot(w), d2 = b.direction.dot(w);
        const double s = (bb * d2 - d1) / den;
        const double t = (d2 - bb * d1) / den;
        return 0.5 * ((a.origin + s * a.direction) + (b.origin + t * b.direction));
    }

    TwoPathFix locate_two_paths(const RayHypothesis &a, const RayHypothesis &b, double tau1, double tau2,
                                const TwoPathOptions &opt)
    {
        check_ray(a);
        check_ray(b);
        if (!(opt.weight >= 0.0) || !std::isfinite(opt.weight))
            throw std::invalid_argument("locate_two_paths: weight must be finite and non-negative");
        if (std::acos(std::clamp(std::abs(a.direction.dot(b.direction)), 0.0, 1.0)) < kParallelTol)
            throw std::invalid_argument("locate_two_paths: rays are parallel; the two-path fix is ill-posed");

        const double range_diff = kSpeedOfLight * (tau1 - tau2);
        TwoPathFix fix;
        Vec3 x = common_perpendicular_midpoint(a, b);
        Residuals cur = evaluate(x, a, b, range_diff, opt.weight);
        double cost = cur.r.squaredNorm();
        double lambda = 1e-3;
        for (; fix.iterations < opt.max_iterations; ++fix.iterations)
        {
            const Eigen::Matrix3d jtj = cur.jac.transpose() * cur.jac;
            const Vec3 g = cur.jac.transpose() * cur.r;
            Eigen::Matrix3d damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
            const Vec3 step = -damped.ldlt().solve(g);
            const Vec3 trial = x + step;
            const Residuals next = evaluate(trial, a, b, range_diff, opt.weight);
            const double next_cost = next.r.squaredNorm();
            if (next_cost <= cost)
            {
                x = trial;
                cur = next;
                cost = next_cost;
                lambda = std::max(lambda / 10.0, 1e-12);
                if (step.norm() < opt.step_tol)
                    break;
            }
            else
            {
                lambda *= 10.0;
                if (lambda > 1e12)
                    break;
            }
        }
        if (!x.allFinite())
            throw numerical_error("locate_two_paths: solution is not finite");
        fix.position = x;
        fix.residual = cost;
        return fix;
    }
}
