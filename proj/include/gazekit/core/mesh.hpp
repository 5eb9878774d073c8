/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/core/mesh.hpp
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

#ifndef GAZEKIT_CORE_MESH_HPP
#define GAZEKIT_CORE_MESH_HPP

#include "Eigen/Core"

#include <vector>

namespace gazekit {
namespace core {

/**
 * @brief Triangle mesh with optional per-vertex attributes.
 *
 * Attribute vectors are either empty or sized like `positions`.
 */
struct TriMesh
{
    std::vector<Eigen::Vector3d> positions;
    std::vector<Eigen::Vector3i> triangles;
    std::vector<Eigen::Vector2d> uv;
    std::vector<Eigen::Vector3d> normals;
};

/// Area-weighted per-vertex normals (normalized; zero for isolated vertices).
inline std::vector<Eigen::Vector3d> vertex_normals(const std::vector<Eigen::Vector3d>& positions,
                                                   const std::vector<Eigen::Vector3i>& triangles)
{
    std::vector<Eigen::Vector3d> normals(positions.size(), Eigen::Vector3d::Zero());
    for (const auto& tri : triangles)
    {
        const Eigen::Vector3d face_normal = (positions[tri[1]] - positions[tri[0]])
                                                .cross(positions[tri[2]] - positions[tri[0]]);
        normals[tri[0]] += face_normal;
        normals[tri[1]] += face_normal;
        normals[tri[2]] += face_normal;
    }
    for (auto& n : normals)
    {
        const double len = n.norm();
        if (len > 0.0)
            n /= len;
    }
    return normals;
}

} // namespace core
} // namespace gazekit

#endif /* GAZEKIT_CORE_MESH_HPP */
