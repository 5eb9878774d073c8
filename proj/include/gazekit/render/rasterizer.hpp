/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/render/rasterizer.hpp
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

#ifndef GAZEKIT_RENDER_RASTERIZER_HPP
#define GAZEKIT_RENDER_RASTERIZER_HPP

#include "gazekit/core/camera.hpp"
#include "gazekit/core/image.hpp"
#include "gazekit/model/pose.hpp"
#include "gazekit/render/raster.hpp"
#include "gazekit/render/shading.hpp"

#include "Eigen/Core"
#include "Eigen/Geometry"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gazekit {
namespace render {

namespace detail {

/// Minimum distance in front of the camera; nearer triangles are culled
/// (the scene is expected to sit hundreds of millimetres away).
constexpr double kNearLimit = 0.1;

struct Surface
{
    model::PartId id = model::PartId::background;
    const std::vector<Eigen::Vector3d>* positions = nullptr;
    const std::vector<Eigen::Vector3i>* triangles = nullptr;
};

/// Visibility buffer: depth winner per pixel with its perspective-correct
/// barycentric coordinates (in the surface's original vertex order).
struct GBuffer
{
    int width = 0;
    int height = 0;
    core::ImageGray depth;
    std::vector<std::int32_t> surface;  ///< -1 on background
    std::vector<std::int32_t> triangle;
    std::vector<Eigen::Vector3d> bary;

    GBuffer(int w, int h)
        : width(w), height(h), depth(w, h, std::numeric_limits<double>::infinity()),
          surface(static_cast<std::size_t>(w) * h, -1),
          triangle(static_cast<std::size_t>(w) * h, -1),
          bary(static_cast<std::size_t>(w) * h, Eigen::Vector3d::Zero())
    {
    }

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

inline double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

/// Top-left fill rule tie-break for a pixel exactly on an edge with
/// direction d (for our positive-area orientation: left edges run upward).
inline bool edge_owns_boundary(const Eigen::Vector2d& d)
{
    return d.y() < 0.0 || (d.y() == 0.0 && d.x() > 0.0);
}

/**
 * @brief Z-buffered rasterization of a surface list with the top-left fill
 * convention and perspective-correct barycentrics. Triangles with a vertex
 * closer than kNearLimit (or behind the camera) are culled; no clipping.
 */
inline GBuffer rasterize(const std::vector<Surface>& surfaces, const core::Camera& camera)
{
    camera.validate();
    GBuffer gb(camera.width, camera.height);

    std::vector<Eigen::Vector2d> screen;
    std::vector<double> inv_depth; // 1/(-z); 0 marks a culled vertex
    for (std::size_t si = 0; si < surfaces.size(); ++si)
    {
        const Surface& surface = surfaces[si];
        if (!surface.positions || !surface.triangles || surface.positions->empty())
            continue;
        const auto& positions = *surface.positions;

        screen.assign(positions.size(), Eigen::Vector2d::Zero());
        inv_depth.assign(positions.size(), 0.0);
        for (std::size_t v = 0; v < positions.size(); ++v)
        {
            const double w = -positions[v].z();
            if (w < kNearLimit)
                continue;
            inv_depth[v] = 1.0 / w;
            screen[v] = {camera.cx + camera.fx * positions[v].x() * inv_depth[v],
                         camera.cy + camera.fy * positions[v].y() * inv_depth[v]};
        }

        const auto& triangles = *surface.triangles;
        for (std::size_t t = 0; t < triangles.size(); ++t)
        {
            const Eigen::Vector3i& tri = triangles[t];
            if (inv_depth[tri[0]] == 0.0 || inv_depth[tri[1]] == 0.0 || inv_depth[tri[2]] == 0.0)
                continue;

            // Permute to positive signed area so the fill rule is uniform.
            int order[3] = {0, 1, 2};
            Eigen::Vector2d s0 = screen[tri[0]];
            Eigen::Vector2d s1 = screen[tri[1]];
            Eigen::Vector2d s2 = screen[tri[2]];
            double area2 = cross2(s1 - s0, s2 - s0);
            if (area2 == 0.0)
                continue;
            if (area2 < 0.0)
            {
                std::swap(s1, s2);
                std::swap(order[1], order[2]);
                area2 = -area2;
            }
            const double inv_area2 = 1.0 / area2;
            const Eigen::Vector2d d0 = s2 - s1; // opposite vertex 0
            const Eigen::Vector2d d1 = s0 - s2;
            const Eigen::Vector2d d2 = s1 - s0;
            const bool own0 = edge_owns_boundary(d0);
            const bool own1 = edge_owns_boundary(d1);
            const bool own2 = edge_owns_boundary(d2);

            const double min_x = std::min({s0.x(), s1.x(), s2.x()});
            const double max_x = std::max({s0.x(), s1.x(), s2.x()});
            const double min_y = std::min({s0.y(), s1.y(), s2.y()});
            const double max_y = std::max({s0.y(), s1.y(), s2.y()});
            const int x_begin = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
            const int x_end = std::min(camera.width - 1, static_cast<int>(std::floor(max_x - 0.5)));
            const int y_begin = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
            const int y_end = std::min(camera.height - 1, static_cast<int>(std::floor(max_y - 0.5)));

            const double iz0 = inv_depth[tri[order[0]]];
            const double iz1 = inv_depth[tri[order[1]]];
            const double iz2 = inv_depth[tri[order[2]]];

            for (int y = y_begin; y <= y_end; ++y)
            {
                for (int x = x_begin; x <= x_end; ++x)
                {
                    const Eigen::Vector2d p(x + 0.5, y + 0.5);
                    const double e0 = cross2(d0, p - s1);
                    const double e1 = cross2(d1, p - s2);
                    const double e2 = cross2(d2, p - s0);
                    if ((e0 < 0.0 || (e0 == 0.0 && !own0)) || (e1 < 0.0 || (e1 == 0.0 && !own1)) ||
                        (e2 < 0.0 || (e2 == 0.0 && !own2)))
                        continue;

                    const double w0 = e0 * inv_area2;
                    const double w1 = e1 * inv_area2;
                    const double w2 = e2 * inv_area2;
                    const double inv_w = w0 * iz0 + w1 * iz1 + w2 * iz2;
                    const double depth = 1.0 / inv_w;
                    if (depth >= gb.depth(x, y))
                        continue;

                    gb.depth(x, y) = depth;
                    const std::size_t i = gb.index(x, y);
                    gb.surface[i] = static_cast<std::int32_t>(si);
                    gb.triangle[i] = static_cast<std::int32_t>(t);
                    Eigen::Vector3d pb;
                    pb[order[0]] = w0 * iz0 * depth;
                    pb[order[1]] = w1 * iz1 * depth;
                    pb[order[2]] = w2 * iz2 * depth;
                    gb.bary[i] = pb;
                }
            }
        }
    }
    return gb;
}

/// Low-level corneal refraction against an explicit sphere, onto a z-plane.
inline std::optional<Eigen::Vector3d> refract_sphere_to_plane(double center_z, double radius,
                                                              double refractive_index, double plane_z,
                                                              const Eigen::Vector3d& origin,
                                                              const Eigen::Vector3d& direction)
{
    const Eigen::Vector3d centre(0.0, 0.0, center_z);
    const Eigen::Vector3d oc = origin - centre;
    const double b = oc.dot(direction);
    const double c = oc.squaredNorm() - radius * radius;
    const double disc = b * b - c;
    if (disc < 0.0)
        return std::nullopt;
    const double t = -b - std::sqrt(disc);
    if (t < 0.0)
        return std::nullopt;
    const Eigen::Vector3d hit = origin + t * direction;
    const Eigen::Vector3d normal = (hit - centre) / radius;
    const auto refracted = refract_direction(direction, normal, 1.0 / refractive_index);
    if (!refracted)
        return std::nullopt;
    if (std::abs(refracted->z()) < 1e-12)
        return std::nullopt;
    const double s = (plane_z - hit.z()) / refracted->z();
    if (s < 0.0)
        return std::nullopt;
    return hit + s * (*refracted);
}

} // namespace detail

/**
 * @brief Renders the posed scene: z-buffered rasterization with
 * perspective-correct interpolation, Lambertian face shading, and the eyeball
 * shader (corneal refraction, eyelid ambient occlusion, reflection-map
 * specular). Deterministic: identical Scene and Camera give a bit-identical
 * Raster.
 */
inline Raster render(const model::Scene& scene, const core::Camera& camera)
{
    std::vector<detail::Surface> surfaces;
    for (int side = 0; side < 2; ++side)
    {
        if (!scene.face[side].sub_positions.empty())
            surfaces.push_back({scene.face[side].id, &scene.face[side].sub_positions,
                                scene.face[side].sub_triangles});
    }
    for (int side = 0; side < 2; ++side)
    {
        if (scene.eye[side].mesh && !scene.eye[side].vertices.empty())
            surfaces.push_back(
                {scene.eye[side].id, &scene.eye[side].vertices, &scene.eye[side].mesh->triangles});
    }

    const detail::GBuffer gb = detail::rasterize(surfaces, camera);
    Raster raster(camera.width, camera.height);
    raster.depth = gb.depth;

    // Per-eye shading setup.
    struct EyeShading
    {
        const model::EyeballPart* eye = nullptr;
        Eigen::Isometry3d eye_from_cam = Eigen::Isometry3d::Identity();
        LidOcclusion occlusion;
        double cornea_center_z = 0.0;
        double cornea_radius = 0.0;
        double cap_radius = 0.0;
    };
    std::array<EyeShading, 2> eye_shading;
    const model::EyeballGeometry& geom = scene.eyeball_shading;
    for (int side = 0; side < 2; ++side)
    {
        if (!scene.eye[side].mesh)
            continue;
        EyeShading& es = eye_shading[side];
        es.eye = &scene.eye[side];
        es.eye_from_cam = scene.eye[side].cam_from_eye.inverse();
        es.occlusion = fit_lid_occlusion(scene, side);
        const double beta = scene.eye[side].mesh->beta_iris;
        // The iris-size scaling maps the corneal cap to another sphere.
        es.cornea_center_z = geom.iris_plane_z + beta * (geom.cornea_center_z() - geom.iris_plane_z);
        es.cornea_radius = beta * geom.cornea_radius;
        es.cap_radius = beta * geom.iris_radius;
    }

    const double theta_limbus = geom.limbus_angle();
    for (int y = 0; y < camera.height; ++y)
    {
        for (int x = 0; x < camera.width; ++x)
        {
            const std::size_t i = gb.index(x, y);
            if (gb.surface[i] < 0)
                continue;
            const detail::Surface& surface = surfaces[gb.surface[i]];
            const Eigen::Vector3i& tri = (*surface.triangles)[gb.triangle[i]];
            const Eigen::Vector3d& pb = gb.bary[i];
            raster.part(x, y) = static_cast<std::uint8_t>(surface.id);

            if (model::is_face_part(surface.id))
            {
                const int side = surface.id == model::PartId::face_left ? 0 : 1;
                const model::FacePart& part = scene.face[side];
                const Eigen::Vector2d uv = pb[0] * (*part.sub_uv)[tri[0]] +
                                           pb[1] * (*part.sub_uv)[tri[1]] +
                                           pb[2] * (*part.sub_uv)[tri[2]];
                Eigen::Vector3d normal = pb[0] * part.sub_normals[tri[0]] +
                                         pb[1] * part.sub_normals[tri[1]] +
                                         pb[2] * part.sub_normals[tri[2]];
                const double len = normal.norm();
                if (len > 0.0)
                    normal /= len;
                const Eigen::Vector3d albedo = sample_texture(*scene.face_texture, uv);
                const Eigen::Vector3d color = shade_lambert(albedo, normal, scene.light_direction,
                                                            scene.ambient, scene.directional);
                raster.color(x, y) = color.cwiseMax(0.0).cwiseMin(1.0);
            } else
            {
                const int side = surface.id == model::PartId::eye_left ? 0 : 1;
                const EyeShading& es = eye_shading[side];
                const auto& verts = es.eye->vertices;
                const Eigen::Vector3d p_cam =
                    pb[0] * verts[tri[0]] + pb[1] * verts[tri[1]] + pb[2] * verts[tri[2]];
                const Eigen::Vector3d view_cam = p_cam.normalized();
                const Eigen::Vector3d origin_loc = es.eye_from_cam.translation();
                const Eigen::Vector3d view_loc = es.eye_from_cam.linear() * view_cam;
                const Eigen::Vector3d p_loc = es.eye_from_cam * p_cam;
                const Eigen::Vector3d surface_dir = p_loc.normalized();

                Eigen::Vector3d albedo;
                Eigen::Vector3d normal_loc;
                bool corneal = false;
                {
                    // Corneal path: first hit on the (scaled) cornea sphere
                    // within the cap radius, refracted onto the iris plane.
                    const Eigen::Vector3d centre(0.0, 0.0, es.cornea_center_z);
                    const Eigen::Vector3d oc = origin_loc - centre;
                    const double b = oc.dot(view_loc);
                    const double c = oc.squaredNorm() - es.cornea_radius * es.cornea_radius;
                    const double disc = b * b - c;
                    if (disc >= 0.0)
                    {
                        const double t = -b - std::sqrt(disc);
                        if (t > 0.0)
                        {
                            const Eigen::Vector3d hit = origin_loc + t * view_loc;
                            if (std::hypot(hit.x(), hit.y()) <= es.cap_radius && hit.z() > 0.0)
                            {
                                normal_loc = (hit - centre) / es.cornea_radius;
                                const auto refracted = refract_direction(view_loc, normal_loc,
                                                                         1.0 / geom.refractive_index);
                                if (refracted && std::abs(refracted->z()) > 1e-12)
                                {
                                    const double s = (geom.iris_plane_z - hit.z()) / refracted->z();
                                    const Eigen::Vector3d iris_point = hit + s * (*refracted);
                                    const double beta = es.eye->mesh->beta_iris;
                                    const double r_plane =
                                        std::hypot(iris_point.x(), iris_point.y());
                                    const double theta_tex =
                                        theta_limbus * r_plane / (beta * geom.iris_radius);
                                    const double rho = geom.uv_radius(std::min(theta_tex, M_PI));
                                    const double phi = std::atan2(iris_point.y(), iris_point.x());
                                    const Eigen::Vector2d uv(0.5 + rho * std::cos(phi),
                                                             0.5 + rho * std::sin(phi));
                                    albedo = sample_texture(es.eye->mesh->texture, uv);
                                    corneal = true;
                                }
                            }
                        }
                    }
                }
                if (!corneal)
                {
                    normal_loc = surface_dir;
                    const Eigen::Vector2d uv = eyeball_uv(geom, surface_dir);
                    albedo = sample_texture(es.eye->mesh->texture, uv);
                }

                const Eigen::Vector3d normal_cam = es.eye->cam_from_eye.linear() * normal_loc;
                const double ao = ao_factor(es.occlusion, eyeball_uv(geom, surface_dir));
                Eigen::Vector3d color = ao * shade_lambert(albedo, normal_cam, scene.light_direction,
                                                           scene.ambient, scene.directional);
                color += reflection_delta(view_cam, normal_cam, scene.reflection_map_id);
                raster.color(x, y) = color.cwiseMax(0.0).cwiseMin(1.0);
            }
        }
    }
    return raster;
}

/**
 * @brief Rasterizes the face parts (un-subdivided geometry) interpolating a
 * per-vertex 2D attribute, e.g. screen-space flow. Occlusion between the two
 * parts is resolved by depth; uncovered pixels carry zero attribute.
 *
 * @param attributes one entry per face-part vertex, globally indexed
 *        ([0,229) left part, [229,458) right part).
 */
inline FlowField render_attributes(const model::Scene& scene, const core::Camera& camera,
                                   const std::vector<Eigen::Vector2d>& attributes)
{
    if (attributes.size() != static_cast<std::size_t>(model::kFlowVertexCount))
        throw std::invalid_argument("render_attributes: expected one 2D attribute per face vertex");

    std::vector<detail::Surface> surfaces;
    for (int side = 0; side < 2; ++side)
    {
        if (!scene.face[side].vertices.empty())
            surfaces.push_back(
                {scene.face[side].id, &scene.face[side].vertices, scene.face[side].triangles});
    }
    const detail::GBuffer gb = detail::rasterize(surfaces, camera);

    FlowField field(camera.width, camera.height);
    for (int y = 0; y < camera.height; ++y)
    {
        for (int x = 0; x < camera.width; ++x)
        {
            const std::size_t i = gb.index(x, y);
            if (gb.surface[i] < 0)
                continue;
            const detail::Surface& surface = surfaces[gb.surface[i]];
            const int base = surface.id == model::PartId::face_left ? 0 : model::kFaceVertexCount;
            const Eigen::Vector3i& tri = (*surface.triangles)[gb.triangle[i]];
            const Eigen::Vector3d& pb = gb.bary[i];
            field.coverage(x, y) = 1;
            field.flow(x, y) = pb[0] * attributes[base + tri[0]] + pb[1] * attributes[base + tri[1]] +
                               pb[2] * attributes[base + tri[2]];
        }
    }
    return field;
}

} // namespace render
} // namespace gazekit

#endif /* GAZEKIT_RENDER_RASTERIZER_HPP */
