/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/render/shading.hpp
 *
 * Copyright 2026 The gazekit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef GAZEKIT_RENDER_SHADING_HPP
#define GAZEKIT_RENDER_SHADING_HPP

#include "gazekit/core/image.hpp"
#include "gazekit/model/asset.hpp"
#include "gazekit/model/pose.hpp"

#include "Eigen/Core"
#include "Eigen/Dense"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gazekit {
namespace render {

// Eyelid ambient-occlusion constants: minimum occlusion factor and the width
// of the falloff band in eyeball-uv units.
constexpr double kAoMin = 0.3;
constexpr double kAoBand = 0.15;
/// Specular weight of the reflection-map contribution on the eyeball.
constexpr double kReflectionStrength = 0.18;
constexpr int kReflectionMapCount = 5;

/// Samples a texture by normalized uv in [0,1]^2 (texel centres at
/// ((i+0.5)/w, (j+0.5)/h)), bilinear with border clamp.
inline Eigen::Vector3d sample_texture(const core::ImageRgb& tex, const Eigen::Vector2d& uv)
{
    return core::sample_bilinear(tex, uv.x() * tex.width() - 0.5, uv.y() * tex.height() - 0.5);
}

/// Lambertian shading: albedo * (ambient + directional * max(0, n.l)).
inline Eigen::Vector3d shade_lambert(const Eigen::Vector3d& albedo, const Eigen::Vector3d& normal,
                                     const Eigen::Vector3d& light_direction,
                                     const Eigen::Vector3d& ambient, const Eigen::Vector3d& directional)
{
    const double diffuse = std::max(0.0, normal.dot(light_direction));
    return albedo.cwiseProduct(ambient + diffuse * directional);
}

/// Mirror reflection of an incident direction about a unit normal.
inline Eigen::Vector3d reflect(const Eigen::Vector3d& incident, const Eigen::Vector3d& normal)
{
    return incident - 2.0 * incident.dot(normal) * normal;
}

/**
 * @brief Snell refraction of a unit incident direction at a surface with unit
 * normal (pointing against the incident ray) and relative index eta = n1/n2.
 *
 * Returns std::nullopt on total internal reflection (cannot occur entering
 * the denser cornea, but guarded anyway).
 */
inline std::optional<Eigen::Vector3d> refract_direction(const Eigen::Vector3d& incident,
                                                        const Eigen::Vector3d& normal, double eta)
{
    const double cos_i = -incident.dot(normal);
    const double sin2_t = eta * eta * (1.0 - cos_i * cos_i);
    if (sin2_t > 1.0)
        return std::nullopt;
    return (eta * incident + (eta * cos_i - std::sqrt(1.0 - sin2_t)) * normal).normalized();
}

/**
 * @brief Traces a view ray (eyeball-local frame) through the corneal surface
 * onto the iris plane: intersects the cornea sphere, refracts by Snell's law,
 * and intersects the refracted ray with the plane z = iris_plane_z.
 *
 * @param n_override refractive index to use; 0 selects geom.refractive_index.
 * @return the iris-plane point, or std::nullopt if the ray misses the cornea
 *         or the refracted ray cannot reach the plane.
 */
inline std::optional<Eigen::Vector3d> refract_to_iris_plane(const model::EyeballGeometry& geom,
                                                            const Eigen::Vector3d& ray_origin,
                                                            const Eigen::Vector3d& ray_direction,
                                                            double n_override = 0.0)
{
    const Eigen::Vector3d centre(0.0, 0.0, geom.cornea_center_z());
    const Eigen::Vector3d oc = ray_origin - centre;
    const double b = oc.dot(ray_direction);
    const double c = oc.squaredNorm() - geom.cornea_radius * geom.cornea_radius;
    const double disc = b * b - c;
    if (disc < 0.0)
        return std::nullopt;
    const double t = -b - std::sqrt(disc); // near intersection
    if (t < 0.0)
        return std::nullopt;
    const Eigen::Vector3d hit = ray_origin + t * ray_direction;
    const Eigen::Vector3d normal = (hit - centre).normalized();

    const double n = n_override > 0.0 ? n_override : geom.refractive_index;
    const auto refracted = refract_direction(ray_direction, normal, 1.0 / n);
    if (!refracted)
        return std::nullopt;
    const double dz = refracted->z();
    if (std::abs(dz) < 1e-12)
        return std::nullopt;
    const double s = (geom.iris_plane_z - hit.z()) / dz;
    if (s < 0.0)
        return std::nullopt;
    return hit + s * (*refracted);
}

// ---------------------------------------------------------------------------
// Eyelid ambient occlusion
// ---------------------------------------------------------------------------

/// Polar eyeball uv of a local-frame surface direction (pupil at the centre).
inline Eigen::Vector2d eyeball_uv(const model::EyeballGeometry& geom, const Eigen::Vector3d& dir)
{
    const double theta = std::atan2(std::hypot(dir.x(), dir.y()), dir.z());
    const double phi = std::atan2(dir.y(), dir.x());
    const double rho = geom.uv_radius(theta);
    return {0.5 + rho * std::cos(phi), 0.5 + rho * std::sin(phi)};
}

/**
 * @brief Cubic lid curves fitted in eyeball uv space, used for the eyeball's
 * ambient-occlusion factor.
 */
struct LidOcclusion
{
    bool active = false; ///< false => factor 1 everywhere (degenerate fit)
    Eigen::Vector4d upper = Eigen::Vector4d::Zero();
    Eigen::Vector4d lower = Eigen::Vector4d::Zero();

    static double eval_cubic(const Eigen::Vector4d& c, double u)
    {
        return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
    }
};

/// Least-squares cubic v = P(u); requires at least 10 points.
inline std::optional<Eigen::Vector4d> fit_cubic(const std::vector<Eigen::Vector2d>& points)
{
    if (points.size() < 10)
        return std::nullopt;
    Eigen::MatrixXd a(points.size(), 4);
    Eigen::VectorXd b(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        const double u = points[i].x();
        a(i, 0) = 1.0;
        a(i, 1) = u;
        a(i, 2) = u * u;
        a(i, 3) = u * u * u;
        b(i) = points[i].y();
    }
    return Eigen::Vector4d(a.colPivHouseholderQr().solve(b));
}

/**
 * @brief Projects the lid-margin vertices of one face part into the matching
 * eyeball's uv space and fits the upper/lower lid cubics.
 */
inline LidOcclusion fit_lid_occlusion(const model::Scene& scene, int side)
{
    LidOcclusion occ;
    if (!scene.lid_margin || scene.lid_margin->empty())
        return occ;
    const auto& face = scene.face[side];
    const auto& eye = scene.eye[side];
    const Eigen::Isometry3d eye_from_cam = eye.cam_from_eye.inverse();

    std::vector<Eigen::Vector2d> upper_points, lower_points;
    for (const int v : *scene.lid_margin)
    {
        const Eigen::Vector3d local = eye_from_cam * face.vertices[v];
        const Eigen::Vector2d uv = eyeball_uv(scene.eyeball_shading, local.normalized());
        if (local.y() > 0.0)
            upper_points.push_back(uv);
        else
            lower_points.push_back(uv);
    }
    const auto upper = fit_cubic(upper_points);
    const auto lower = fit_cubic(lower_points);
    if (!upper || !lower)
        return occ; // degenerate: factor 1 everywhere
    occ.active = true;
    occ.upper = *upper;
    occ.lower = *lower;
    return occ;
}

/**
 * @brief Occlusion multiplier for an eyeball fragment at uv: a smooth
 * monotone function of the signed uv-distance to the nearest lid curve,
 * clamped to [kAoMin, 1].
 */
inline double ao_factor(const LidOcclusion& occ, const Eigen::Vector2d& uv)
{
    if (!occ.active)
        return 1.0;
    const double upper_v = LidOcclusion::eval_cubic(occ.upper, uv.x());
    const double lower_v = LidOcclusion::eval_cubic(occ.lower, uv.x());
    // Positive distance = exposed side (below the upper lid, above the lower).
    const double distance = std::min(upper_v - uv.y(), uv.y() - lower_v);
    const double t = std::clamp(distance / kAoBand, 0.0, 1.0);
    const double smooth = t * t * (3.0 - 2.0 * t);
    return kAoMin + (1.0 - kAoMin) * smooth;
}

// ---------------------------------------------------------------------------
// Reflection maps
// ---------------------------------------------------------------------------

namespace detail {

inline double env_smoothstep(double lo, double hi, double x)
{
    const double t = std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

/// Procedurally paints one of the five environment maps (64x32 lat-long).
inline core::ImageRgb make_reflection_map(int id)
{
    const int w = 64, h = 32;
    core::ImageRgb env(w, h);
    for (int y = 0; y < h; ++y)
    {
        const double elevation = M_PI / 2.0 - M_PI * (y + 0.5) / h; // +pi/2 top
        for (int x = 0; x < w; ++x)
        {
            const double azimuth = 2.0 * M_PI * (x + 0.5) / w - M_PI;
            Eigen::Vector3d c = Eigen::Vector3d::Zero();
            switch (id)
            {
            case 0: // window: bright rectangle to one side
            {
                const double in_az = env_smoothstep(0.30, 0.45, azimuth) *
                                     (1.0 - env_smoothstep(1.05, 1.25, azimuth));
                const double in_el = env_smoothstep(0.10, 0.25, elevation) *
                                     (1.0 - env_smoothstep(0.75, 0.95, elevation));
                c = Eigen::Vector3d(0.02, 0.02, 0.025) +
                    2.2 * in_az * in_el * Eigen::Vector3d(1.0, 0.98, 0.92);
                break;
            }
            case 1: // ring light around the forward axis
            {
                const double forward_angle =
                    std::acos(std::clamp(std::cos(elevation) * std::cos(azimuth), -1.0, 1.0));
                const double ring = env_smoothstep(0.20, 0.30, forward_angle) *
                                    (1.0 - env_smoothstep(0.48, 0.60, forward_angle));
                c = Eigen::Vector3d(0.03, 0.03, 0.03) + 2.0 * ring * Eigen::Vector3d(1.0, 1.0, 1.0);
                break;
            }
            case 2: // outdoor sky: bright blue above, dim ground below
            {
                const double sky = env_smoothstep(-0.15, 0.35, elevation);
                c = sky * Eigen::Vector3d(0.55, 0.75, 1.15) +
                    (1.0 - sky) * Eigen::Vector3d(0.16, 0.13, 0.09);
                break;
            }
            case 3: // indoor warm: dim warm base with a ceiling patch
            {
                const double ceiling = env_smoothstep(0.85, 1.15, elevation);
                c = Eigen::Vector3d(0.14, 0.10, 0.07) +
                    1.4 * ceiling * Eigen::Vector3d(1.0, 0.85, 0.6);
                break;
            }
            case 4: // dark
                c = Eigen::Vector3d(0.01, 0.01, 0.01);
                break;
            default:
                break;
            }
            env(x, y) = c;
        }
    }
    return env;
}

} // namespace detail

/// The five baked spherical reflection maps. @throws std::out_of_range on bad id.
inline const core::ImageRgb& reflection_map(int id)
{
    if (id < 0 || id >= kReflectionMapCount)
        throw std::out_of_range("reflection_map: id must be in [0,4]");
    static const std::array<core::ImageRgb, kReflectionMapCount> maps = {
        detail::make_reflection_map(0), detail::make_reflection_map(1),
        detail::make_reflection_map(2), detail::make_reflection_map(3),
        detail::make_reflection_map(4)};
    return maps[id];
}

/// Lat-long lookup of an environment map by direction (y up).
inline Eigen::Vector3d sample_environment(const core::ImageRgb& env, const Eigen::Vector3d& dir)
{
    const double azimuth = std::atan2(dir.x(), dir.z());
    const double elevation = std::asin(std::clamp(dir.y(), -1.0, 1.0));
    const double u = (azimuth + M_PI) / (2.0 * M_PI);
    const double v = (M_PI / 2.0 - elevation) / M_PI;
    return core::sample_bilinear(env, u * env.width() - 0.5, v * env.height() - 0.5);
}

/**
 * @brief Specular contribution of reflection map `map_id` for a fragment seen
 * along `view_direction` (unit, camera towards surface) with unit `normal`.
 */
inline Eigen::Vector3d reflection_delta(const Eigen::Vector3d& view_direction,
                                        const Eigen::Vector3d& normal, int map_id)
{
    const Eigen::Vector3d mirrored = reflect(view_direction, normal);
    return kReflectionStrength * sample_environment(reflection_map(map_id), mirrored);
}

} // namespace render
} // namespace gazekit

#endif /* GAZEKIT_RENDER_SHADING_HPP */
