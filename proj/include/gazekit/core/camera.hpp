/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/core/camera.hpp
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

#ifndef GAZEKIT_CORE_CAMERA_HPP
#define GAZEKIT_CORE_CAMERA_HPP

#include "Eigen/Core"

#include <stdexcept>
#include <string>
#include <vector>

namespace gazekit {
namespace core {

/**
 * @brief Pinhole camera intrinsics.
 *
 * Conventions: right-handed camera frame, camera at the origin looking down
 * -Z, world units in millimetres. Image origin top-left, pixel units, with
 * pixel (ix, iy) covering the square [ix, ix+1) x [iy, iy+1) so its centre
 * sits at (ix + 0.5, iy + 0.5).
 */
struct Camera
{
    double fx = 0.0; ///< focal length in px
    double fy = 0.0; ///< focal length in px
    double cx = 0.0; ///< principal point in px
    double cy = 0.0; ///< principal point in px
    int width = 0;   ///< image width in px
    int height = 0;  ///< image height in px

    /**
     * Projects a camera-space point (z < 0, in front of the camera) to
     * continuous pixel coordinates: u = cx + fx*x/(-z), v = cy + fy*y/(-z).
     *
     * @throws std::domain_error if the point is at or behind the camera plane.
     */
    Eigen::Vector2d project(const Eigen::Vector3d& v) const
    {
        if (!(v.z() < 0.0))
        {
            throw std::domain_error("Camera::project: point at or behind the camera plane");
        }
        const double inv_depth = 1.0 / (-v.z());
        return {cx + fx * v.x() * inv_depth, cy + fy * v.y() * inv_depth};
    }

    /**
     * Validates the intrinsics. Hard failures (non-positive focal lengths or
     * image size) throw; soft issues are returned as warnings.
     */
    std::vector<std::string> validate() const
    {
        if (!(fx > 0.0) || !(fy > 0.0))
        {
            throw std::invalid_argument("Camera: fx and fy must be positive");
        }
        if (width <= 0 || height <= 0)
        {
            throw std::invalid_argument("Camera: image size must be positive");
        }
        std::vector<std::string> warnings;
        if (cx < 0.0 || cx > width || cy < 0.0 || cy > height)
        {
            warnings.push_back("Camera: principal point lies outside the image");
        }
        return warnings;
    }
};

} // namespace core
} // namespace gazekit

#endif /* GAZEKIT_CORE_CAMERA_HPP */
