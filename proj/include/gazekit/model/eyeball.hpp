/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/model/eyeball.hpp
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

#ifndef GAZEKIT_MODEL_EYEBALL_HPP
#define GAZEKIT_MODEL_EYEBALL_HPP

#include "gazekit/core/image.hpp"
#include "gazekit/model/asset.hpp"
#include "gazekit/model/parameters.hpp"

#include "Eigen/Core"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gazekit {
namespace model {

/**
 * @brief Tessellated eyeball mesh in its local frame (centre at origin,
 * optical axis +z) together with its baked texture.
 */
struct EyeballMesh
{
    std::vector<Eigen::Vector3d> positions;
    std::vector<Eigen::Vector3i> triangles;
    std::vector<int> iris_boundary; ///< vertex ring exactly at the limbus
    core::ImageRgb texture;         ///< base texture with iris/sclera tints applied
    double beta_iris = 1.0;
};

namespace detail {

/// Latitude rings of the fixed eyeball tessellation, degrees from the optical
/// axis. Ring 4 sits exactly on the limbus (asin(6/12) = 30 degrees).
inline const std::vector<double>& eyeball_latitudes_deg()
{
    static const std::vector<double> lats = {6.0,  12.0, 18.0, 24.0, 30.0,  38.0, 48.0,
                                             60.0, 75.0, 90.0, 110.0, 135.0, 160.0};
    return lats;
}

constexpr int kEyeballLongitudes = 32;
constexpr int kLimbusRing = 4;

/// Surface point at polar angle theta (from +z) and azimuth phi: on the
/// cornea sphere inside the limbus, on the sclera sphere outside.
inline Eigen::Vector3d eyeball_surface_point(const EyeballGeometry& geom, double theta, double phi)
{
    const Eigen::Vector3d dir(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                              std::cos(theta));
    if (theta <= geom.limbus_angle() + 1e-12)
    {
        // Ray from the origin along dir, intersected with the cornea sphere.
        const double cz = geom.cornea_center_z();
        const double b = dir.z() * cz;
        const double disc = b * b - cz * cz + geom.cornea_radius * geom.cornea_radius;
        const double t = b + std::sqrt(std::max(disc, 0.0));
        return t * dir;
    }
    return geom.sclera_radius * dir;
}

} // namespace detail

/// Pupil centre in the eyeball local frame (on the axis, in the iris plane).
inline Eigen::Vector3d pupil_center(const EyeballGeometry& geom)
{
    return {0.0, 0.0, geom.iris_plane_z};
}

/**
 * @brief Builds the eyeball mesh and material for one eye.
 *
 * Vertices on and inside the iris boundary are scaled radially about the
 * pupil centre by beta_iris (blending back to 1 over a narrow band on the
 * sclera side). The base texture's iris region is multiplied by tau_iris and
 * its sclera region by tau_tint.
 *
 * @throws std::invalid_argument if beta_iris leaves the (0.5, 2.0) guard range.
 */
inline EyeballMesh build_eyeball(const EyeballGeometry& geom, double beta_iris,
                                 const Eigen::Vector3d& tau_iris, const Eigen::Vector3d& tau_tint)
{
    if (!(beta_iris > kBetaIrisMin && beta_iris < kBetaIrisMax))
        throw std::invalid_argument("build_eyeball: beta_iris outside guard range (0.5, 2.0)");

    const auto& lats = detail::eyeball_latitudes_deg();
    const int n_lon = detail::kEyeballLongitudes;
    const int n_rings = static_cast<int>(lats.size());

    EyeballMesh mesh;
    mesh.beta_iris = beta_iris;
    mesh.positions.reserve(static_cast<std::size_t>(n_rings) * n_lon + 2);

    // Apex pole, rings, back pole.
    mesh.positions.push_back(detail::eyeball_surface_point(geom, 0.0, 0.0));
    for (int j = 0; j < n_rings; ++j)
    {
        const double theta = deg_to_rad(lats[j]);
        for (int i = 0; i < n_lon; ++i)
        {
            const double phi = 2.0 * M_PI * i / n_lon;
            mesh.positions.push_back(detail::eyeball_surface_point(geom, theta, phi));
        }
    }
    mesh.positions.push_back({0.0, 0.0, -geom.sclera_radius});
    const int back_pole = static_cast<int>(mesh.positions.size()) - 1;

    const auto ring_vertex = [&](int ring, int i) { return 1 + ring * n_lon + (i % n_lon); };

    // Apex fan (triangles wound counter-clockwise seen from outside, +z).
    for (int i = 0; i < n_lon; ++i)
        mesh.triangles.push_back({0, ring_vertex(0, i), ring_vertex(0, i + 1)});
    // Ring bands.
    for (int j = 0; j + 1 < n_rings; ++j)
    {
        for (int i = 0; i < n_lon; ++i)
        {
            const int a = ring_vertex(j, i);
            const int b = ring_vertex(j, i + 1);
            const int c = ring_vertex(j + 1, i);
            const int d = ring_vertex(j + 1, i + 1);
            mesh.triangles.push_back({a, c, d});
            mesh.triangles.push_back({a, d, b});
        }
    }
    // Back fan.
    for (int i = 0; i < n_lon; ++i)
        mesh.triangles.push_back({back_pole, ring_vertex(n_rings - 1, i + 1), ring_vertex(n_rings - 1, i)});

    for (int i = 0; i < n_lon; ++i)
        mesh.iris_boundary.push_back(ring_vertex(detail::kLimbusRing, i));

    // Iris-size scaling about the pupil centre. Inside the limbus the factor
    // is exactly beta_iris; it blends back to 1 by the next sclera ring.
    const Eigen::Vector3d pupil = pupil_center(geom);
    const double limbus = geom.limbus_angle();
    const double blend_end = deg_to_rad(lats[detail::kLimbusRing + 1]);
    for (auto& p : mesh.positions)
    {
        const double theta = std::atan2(std::hypot(p.x(), p.y()), p.z());
        double factor = 1.0;
        if (theta <= limbus + 1e-12)
            factor = beta_iris;
        else if (theta < blend_end)
        {
            const double t = (theta - limbus) / (blend_end - limbus);
            factor = beta_iris + (1.0 - beta_iris) * t;
        }
        if (factor != 1.0)
            p = pupil + factor * (p - pupil);
    }

    // Bake color multipliers into the base texture. Unit multipliers leave
    // the base texture bit-identical.
    mesh.texture = geom.texture;
    if ((tau_iris.array() == 1.0).all() && (tau_tint.array() == 1.0).all())
        return mesh;
    for (int y = 0; y < mesh.texture.height(); ++y)
    {
        for (int x = 0; x < mesh.texture.width(); ++x)
        {
            const double iris = geom.iris_mask(x, y);
            const double sclera = geom.sclera_mask(x, y);
            Eigen::Vector3d& c = mesh.texture(x, y);
            for (int k = 0; k < 3; ++k)
            {
                const double factor =
                    iris * tau_iris[k] + sclera * tau_tint[k] + (1.0 - iris - sclera);
                c[k] *= factor;
            }
        }
    }
    return mesh;
}

} // namespace model
} // namespace gazekit

#endif /* GAZEKIT_MODEL_EYEBALL_HPP */
