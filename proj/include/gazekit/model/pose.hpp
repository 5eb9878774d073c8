/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/model/pose.hpp
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

#ifndef GAZEKIT_MODEL_POSE_HPP
#define GAZEKIT_MODEL_POSE_HPP

#include "gazekit/core/mesh.hpp"
#include "gazekit/model/asset.hpp"
#include "gazekit/model/eyeball.hpp"
#include "gazekit/model/parameters.hpp"
#include "gazekit/model/sampling.hpp"

#include "Eigen/Core"
#include "Eigen/Geometry"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gazekit {
namespace model {

/// Scene part identifiers; doubles as the raster mask value.
enum class PartId : std::uint8_t
{
    background = 0,
    face_left = 1,
    face_right = 2,
    eye_left = 3,
    eye_right = 4,
};

inline bool is_eye_part(PartId id) { return id == PartId::eye_left || id == PartId::eye_right; }
inline bool is_face_part(PartId id) { return id == PartId::face_left || id == PartId::face_right; }

/// Global rotation convention: R = Rz(rz) * Ry(ry) * Rx(rx).
inline Eigen::Matrix3d euler_to_rotation(const Eigen::Vector3d& angles)
{
    return (Eigen::AngleAxisd(angles.z(), Eigen::Vector3d::UnitZ()) *
            Eigen::AngleAxisd(angles.y(), Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(angles.x(), Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

/// Inverse of euler_to_rotation (principal branch).
inline Eigen::Vector3d rotation_to_euler(const Eigen::Matrix3d& rotation)
{
    const double sy = -rotation(2, 0);
    const double ry = std::asin(std::clamp(sy, -1.0, 1.0));
    double rx, rz;
    if (std::abs(std::cos(ry)) > 1e-9)
    {
        rx = std::atan2(rotation(2, 1), rotation(2, 2));
        rz = std::atan2(rotation(1, 0), rotation(0, 0));
    } else
    {
        rx = std::atan2(-rotation(1, 2), rotation(1, 1));
        rz = 0.0;
    }
    return {rx, ry, rz};
}

/// Unit gaze direction for pitch/yaw (local frame; rest gaze is +z).
inline Eigen::Vector3d gaze_direction(double pitch, double yaw)
{
    return {std::sin(yaw) * std::cos(pitch), std::sin(pitch), std::cos(yaw) * std::cos(pitch)};
}

/// Eyeball orientation for pitch/yaw: maps +z onto gaze_direction(pitch, yaw).
inline Eigen::Matrix3d gaze_rotation(double pitch, double yaw)
{
    return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) *
            Eigen::AngleAxisd(-pitch, Eigen::Vector3d::UnitX()))
        .toRotationMatrix();
}

/// Per-eye yaw under the symmetric vergence convention; side 0 = left.
inline double eye_yaw(double yaw, double vergence, int side)
{
    return side == 0 ? yaw + 0.5 * vergence : yaw - 0.5 * vergence;
}

/**
 * @brief Rotates eyelid-region vertices about the eye-corner axis.
 *
 * Each vertex turns by theta_lid times its per-vertex weight, about the line
 * through the two corner vertices of the (already deformed) face mesh.
 * Vertices with zero weight are returned bit-identically.
 *
 * @throws std::invalid_argument if |theta_lid| exceeds the 35 degree guard.
 */
inline std::vector<Eigen::Vector3d> eyelid_pose(const std::vector<Eigen::Vector3d>& vertices,
                                                const EyeRegionModel& model, double theta_lid)
{
    if (std::abs(theta_lid) > kThetaLidGuard)
        throw std::invalid_argument("eyelid_pose: |theta_lid| exceeds the 35 degree guard");
    if (vertices.size() != static_cast<std::size_t>(kFaceVertexCount))
        throw std::invalid_argument("eyelid_pose: expected 229 vertices");
    if (theta_lid == 0.0)
        return vertices;

    const Eigen::Vector3d origin = vertices[model.eyelid_axis[0]];
    const Eigen::Vector3d axis = (vertices[model.eyelid_axis[1]] - origin).normalized();

    std::vector<Eigen::Vector3d> posed = vertices;
    for (int v = 0; v < kFaceVertexCount; ++v)
    {
        const double weight = model.eyelid_weights[v];
        if (weight == 0.0)
            continue;
        const double angle = theta_lid * weight;
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        const Eigen::Vector3d rel = vertices[v] - origin;
        posed[v] = origin + rel * c + axis.cross(rel) * s + axis * (axis.dot(rel) * (1.0 - c));
    }
    return posed;
}

/// One posed facial eye-region part. `vertices` are the un-subdivided posed
/// camera-space positions (index v here is global index part*229 + v).
struct FacePart
{
    PartId id = PartId::background;
    std::vector<Eigen::Vector3d> vertices;
    const std::vector<Eigen::Vector3i>* triangles = nullptr; ///< winding-corrected, owned by the model
    // Render-resolution geometry (one Loop subdivision step):
    std::vector<Eigen::Vector3d> sub_positions;
    std::vector<Eigen::Vector3d> sub_normals;
    const std::vector<Eigen::Vector2d>* sub_uv = nullptr;      ///< owned by the model
    const std::vector<Eigen::Vector3i>* sub_triangles = nullptr; ///< winding-corrected, owned by the model
};

/// One posed eyeball. The mesh (geometry + baked texture) is shared so that
/// scene copies stay cheap; cam_from_eye maps eye-local to camera space.
struct EyeballPart
{
    PartId id = PartId::background;
    std::shared_ptr<const EyeballMesh> mesh;
    Eigen::Isometry3d cam_from_eye = Eigen::Isometry3d::Identity();
    std::vector<Eigen::Vector3d> vertices; ///< camera-space positions
};

/**
 * @brief A fully posed scene in camera space: two face parts, two eyeballs,
 * materials and lighting. Immutable during rendering.
 */
struct Scene
{
    std::array<FacePart, 2> face;  ///< [left, right]
    std::array<EyeballPart, 2> eye; ///< [left, right]
    std::shared_ptr<const core::ImageRgb> face_texture;
    Eigen::Vector3d light_direction = Eigen::Vector3d::UnitZ(); ///< unit, towards the light
    Eigen::Vector3d ambient = Eigen::Vector3d::Zero();
    Eigen::Vector3d directional = Eigen::Vector3d::Zero();
    int reflection_map_id = 2;
    EyeballGeometry eyeball_shading; ///< geometry constants for the eyeball shader (textures unused)
    const std::vector<int>* lid_margin = nullptr; ///< margin ring vertex indices, owned by the model
    std::array<Eigen::Vector3d, 2> eye_centers_cam;
};

/// Derived per-model render data computed once at load (namespaced here to
/// keep EyeRegionModel free of pose/render dependencies).
struct ModelRenderData
{
    std::vector<Eigen::Vector3i> triangles_right;     ///< winding-flipped topology
    std::vector<Eigen::Vector3i> sub_triangles_left;  ///< refined topology
    std::vector<Eigen::Vector3i> sub_triangles_right; ///< refined, winding-flipped
    std::vector<Eigen::Vector2d> sub_uv;              ///< refined texture coordinates
    std::vector<int> lid_margin; ///< inner boundary loop (lid margin) vertex indices
};

namespace detail {

/// Finds the inner boundary loop of the face topology: of the mesh's boundary
/// loops, the one whose rest-pose vertices sit closest to the eyeball centre.
inline std::vector<int> find_lid_margin(const EyeRegionModel& model)
{
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& tri : model.topology)
    {
        for (int e = 0; e < 3; ++e)
        {
            const int a = tri[e];
            const int b = tri[(e + 1) % 3];
            ++edge_use[{std::min(a, b), std::max(a, b)}];
        }
    }
    std::vector<std::vector<int>> boundary_adj(kFaceVertexCount);
    for (const auto& [key, uses] : edge_use)
    {
        if (uses == 1)
        {
            boundary_adj[key.first].push_back(key.second);
            boundary_adj[key.second].push_back(key.first);
        }
    }
    std::vector<bool> seen(kFaceVertexCount, false);
    std::vector<int> best_loop;
    double best_distance = std::numeric_limits<double>::infinity();
    for (int start = 0; start < kFaceVertexCount; ++start)
    {
        if (seen[start] || boundary_adj[start].empty())
            continue;
        std::vector<int> loop;
        int current = start;
        int previous = -1;
        while (true)
        {
            loop.push_back(current);
            seen[current] = true;
            int next = -1;
            for (const int n : boundary_adj[current])
            {
                if (n != previous && !(n == start && loop.size() < 3))
                {
                    next = n;
                    break;
                }
            }
            if (next == -1 || next == start)
                break;
            previous = current;
            current = next;
        }
        double mean_distance = 0.0;
        for (const int v : loop)
            mean_distance += model.mu_geo.segment<3>(3 * v).norm();
        mean_distance /= static_cast<double>(loop.size());
        if (mean_distance < best_distance)
        {
            best_distance = mean_distance;
            best_loop = loop;
        }
    }
    return best_loop;
}

} // namespace detail

inline ModelRenderData build_render_data(const EyeRegionModel& model)
{
    ModelRenderData data;
    data.triangles_right.reserve(model.topology.size());
    for (const auto& t : model.topology)
        data.triangles_right.push_back({t[0], t[2], t[1]});
    data.sub_triangles_left = model.subdivision_stencils.refined_triangles;
    data.sub_triangles_right.reserve(data.sub_triangles_left.size());
    for (const auto& t : data.sub_triangles_left)
        data.sub_triangles_right.push_back({t[0], t[2], t[1]});
    data.sub_uv = model.subdivision_stencils.apply(model.face_uv);
    data.lid_margin = detail::find_lid_margin(model);
    return data;
}

/// Memoizes the expensive sampled materials across pose_scene calls; keyed by
/// exact coefficient equality (the Jacobian loop perturbs one group at a time).
struct SceneCache
{
    Eigen::Matrix<double, kTextureModes, 1> tau_face_key;
    std::shared_ptr<const core::ImageRgb> face_texture;
    Eigen::Matrix<double, 7, 1> eyeball_key; ///< beta_iris, tau_iris, tau_tint
    std::shared_ptr<const EyeballMesh> eyeball_mesh;
    std::shared_ptr<const ModelRenderData> render_data;
};

/**
 * @brief Poses the full scene from parameters: samples shape and texture,
 * poses eyelids, mirrors the face parts, places and orients the eyeballs,
 * and subdivides the face geometry for rendering.
 *
 * Left and right face parts are mirror images of the single sampled shape,
 * separated by theta_iod, then transformed by the global rotation and
 * translation. Each eyeball rotates about its own centre by
 * (theta_pitch, theta_yaw +- theta_vergence/2).
 */
inline Scene pose_scene(const EyeRegionModel& model, const ParameterVector& phi,
                        SceneCache* cache = nullptr)
{
    phi.validate();

    SceneCache local_cache;
    SceneCache& c = cache ? *cache : local_cache;
    if (!c.render_data)
        c.render_data = std::make_shared<ModelRenderData>(build_render_data(model));

    if (!c.face_texture || c.tau_face_key != phi.tau_face)
    {
        c.face_texture = std::make_shared<core::ImageRgb>(texture_sample(model, phi.tau_face));
        c.tau_face_key = phi.tau_face;
    }
    Eigen::Matrix<double, 7, 1> eye_key;
    eye_key << phi.beta_iris, phi.tau_iris, phi.tau_tint;
    if (!c.eyeball_mesh || c.eyeball_key != eye_key)
    {
        c.eyeball_mesh = std::make_shared<EyeballMesh>(
            build_eyeball(model.eyeball, phi.beta_iris, phi.tau_iris, phi.tau_tint));
        c.eyeball_key = eye_key;
    }

    const auto sampled = shape_sample(model, phi.beta_face);
    const auto lidded = eyelid_pose(sampled, model, phi.theta_lid);

    const Eigen::Matrix3d global_rotation = euler_to_rotation(phi.theta_rot);
    const Eigen::Vector3d& translation = phi.theta_trans;
    const double half_iod = 0.5 * phi.theta_iod;

    Scene scene;
    scene.face_texture = c.face_texture;
    scene.ambient = phi.iota_ambient;
    scene.directional = phi.iota_directional;
    scene.light_direction = gaze_direction(phi.iota_rot[0], phi.iota_rot[1]);
    scene.eyeball_shading = model.eyeball;
    scene.eyeball_shading.texture = core::ImageRgb();
    scene.eyeball_shading.iris_mask = core::ImageGray();
    scene.eyeball_shading.sclera_mask = core::ImageGray();
    scene.lid_margin = &c.render_data->lid_margin;

    for (int side = 0; side < 2; ++side)
    {
        const double mirror = side == 0 ? 1.0 : -1.0;
        const Eigen::Vector3d part_offset(side == 0 ? -half_iod : half_iod, 0.0, 0.0);

        FacePart& part = scene.face[side];
        part.id = side == 0 ? PartId::face_left : PartId::face_right;
        part.triangles = side == 0 ? &model.topology : &c.render_data->triangles_right;
        part.sub_triangles =
            side == 0 ? &c.render_data->sub_triangles_left : &c.render_data->sub_triangles_right;
        part.sub_uv = &c.render_data->sub_uv;

        part.vertices.resize(kFaceVertexCount);
        for (int v = 0; v < kFaceVertexCount; ++v)
        {
            Eigen::Vector3d p = lidded[v];
            p.x() *= mirror;
            part.vertices[v] = global_rotation * (p + part_offset) + translation;
        }
        part.sub_positions = model.subdivision_stencils.apply(part.vertices);
        part.sub_normals = core::vertex_normals(part.sub_positions, *part.sub_triangles);

        EyeballPart& eye = scene.eye[side];
        eye.id = side == 0 ? PartId::eye_left : PartId::eye_right;
        eye.mesh = c.eyeball_mesh;
        const Eigen::Matrix3d eye_rotation =
            gaze_rotation(phi.theta_pitch, eye_yaw(phi.theta_yaw, phi.theta_vergence, side));
        Eigen::Isometry3d cam_from_eye = Eigen::Isometry3d::Identity();
        cam_from_eye.linear() = global_rotation * eye_rotation;
        cam_from_eye.translation() = global_rotation * part_offset + translation;
        eye.cam_from_eye = cam_from_eye;
        scene.eye_centers_cam[side] = cam_from_eye.translation();
        eye.vertices.resize(eye.mesh->positions.size());
        for (std::size_t v = 0; v < eye.vertices.size(); ++v)
            eye.vertices[v] = cam_from_eye * eye.mesh->positions[v];
    }
    return scene;
}

/// New gaze parameters produced by gaze_from_target.
struct GazeAngles
{
    double pitch = 0.0;
    double yaw = 0.0;
    double vergence = 0.0;
    double lid = 0.0;
};

/**
 * @brief Solves gaze pitch/yaw/vergence so both eyeballs point at a 3D target
 * (camera-space mm), and sets the eyelid pitch to match.
 *
 * Per-eye aim is exact for targets on the eyes' perpendicular bisector plane
 * and in the far-field limit; for near off-axis targets the shared pitch is
 * the per-eye mean (the parameterization has no vertical vergence).
 *
 * @throws std::invalid_argument if the target lies inside either eyeball.
 */
inline GazeAngles gaze_from_target(const EyeRegionModel& model, const ParameterVector& phi,
                                   const Eigen::Vector3d& target)
{
    const Eigen::Matrix3d global_rotation = euler_to_rotation(phi.theta_rot);
    const double half_iod = 0.5 * phi.theta_iod;

    double pitch[2], yaw[2];
    for (int side = 0; side < 2; ++side)
    {
        const Eigen::Vector3d part_offset(side == 0 ? -half_iod : half_iod, 0.0, 0.0);
        const Eigen::Vector3d center = global_rotation * part_offset + phi.theta_trans;
        const Eigen::Vector3d to_target = target - center;
        if (to_target.norm() <= model.eyeball.sclera_radius)
            throw std::invalid_argument("gaze_from_target: target inside an eyeball");
        const Eigen::Vector3d d = (global_rotation.transpose() * to_target).normalized();
        pitch[side] = std::asin(std::clamp(d.y(), -1.0, 1.0));
        yaw[side] = std::atan2(d.x(), d.z());
    }

    GazeAngles angles;
    angles.pitch = 0.5 * (pitch[0] + pitch[1]);
    angles.yaw = 0.5 * (yaw[0] + yaw[1]);
    angles.vergence = yaw[0] - yaw[1];
    angles.lid = angles.pitch;
    return angles;
}

/// Camera-space optical-axis direction of one posed eyeball.
inline Eigen::Vector3d eye_gaze_ray(const ParameterVector& phi, int side)
{
    const Eigen::Matrix3d global_rotation = euler_to_rotation(phi.theta_rot);
    const Eigen::Matrix3d eye_rotation =
        gaze_rotation(phi.theta_pitch, eye_yaw(phi.theta_yaw, phi.theta_vergence, side));
    return global_rotation * eye_rotation * Eigen::Vector3d::UnitZ();
}

} // namespace model
} // namespace gazekit

#endif /* GAZEKIT_MODEL_POSE_HPP */
