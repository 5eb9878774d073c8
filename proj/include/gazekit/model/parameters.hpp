/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/model/parameters.hpp
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

#ifndef GAZEKIT_MODEL_PARAMETERS_HPP
#define GAZEKIT_MODEL_PARAMETERS_HPP

#include "Eigen/Core"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gazekit {
namespace model {

constexpr int kShapeModes = 16;   ///< facial shape PCA coefficients
constexpr int kTextureModes = 8;  ///< facial texture PCA coefficients
constexpr int kParameterCount = 50;
constexpr int kLandmarkCount = 25;

/// Guard range for the iris size scale.
constexpr double kBetaIrisMin = 0.5;
constexpr double kBetaIrisMax = 2.0;
/// Guard range for the eyelid pitch, radians (+-35 degrees).
constexpr double kThetaLidGuard = 35.0 * M_PI / 180.0;

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

/**
 * @brief The full model parameter set: shape, texture, pose, illumination.
 *
 * Flattens to exactly 50 scalars in the fixed order documented in
 * docs/formats.md:
 *
 *   [ 0,16)  beta_face      shape PCA coefficients (1.0 = one stddev)
 *   [16]     beta_iris      iris size scale
 *   [17,25)  tau_face       texture PCA coefficients (1.0 = one stddev)
 *   [25,28)  tau_iris       iris RGB multiplier, each in [0,1]
 *   [28,31)  tau_tint       sclera RGB tint, each in [0,1]
 *   [31,34)  theta_rot      global rotation, XYZ Euler angles (rad)
 *   [34,37)  theta_trans    global translation (mm)
 *   [37]     theta_iod      interocular distance (mm)
 *   [38]     theta_pitch    gaze pitch (rad, positive = up)
 *   [39]     theta_yaw      gaze yaw (rad, positive = +x)
 *   [40]     theta_vergence yaw vergence (rad, positive = convergent)
 *   [41]     theta_lid      eyelid pitch (rad)
 *   [42,45)  iota_ambient   ambient RGB intensity, >= 0
 *   [45,48)  iota_directional directional RGB intensity, >= 0
 *   [48,50)  iota_rot       light direction pitch/yaw (rad)
 */
struct ParameterVector
{
    Eigen::Matrix<double, kShapeModes, 1> beta_face = Eigen::Matrix<double, kShapeModes, 1>::Zero();
    double beta_iris = 1.0;
    Eigen::Matrix<double, kTextureModes, 1> tau_face = Eigen::Matrix<double, kTextureModes, 1>::Zero();
    Eigen::Vector3d tau_iris = {1.0, 1.0, 1.0};
    Eigen::Vector3d tau_tint = {1.0, 1.0, 1.0};
    Eigen::Vector3d theta_rot = Eigen::Vector3d::Zero();
    Eigen::Vector3d theta_trans = Eigen::Vector3d::Zero();
    double theta_iod = 62.0;
    double theta_pitch = 0.0;
    double theta_yaw = 0.0;
    double theta_vergence = 0.0;
    double theta_lid = 0.0;
    Eigen::Vector3d iota_ambient = {0.65, 0.65, 0.65};
    Eigen::Vector3d iota_directional = {0.55, 0.55, 0.55};
    Eigen::Vector2d iota_rot = {0.25, -0.20};

    Eigen::Matrix<double, kParameterCount, 1> flatten() const
    {
        Eigen::Matrix<double, kParameterCount, 1> phi;
        phi.segment<kShapeModes>(0) = beta_face;
        phi[16] = beta_iris;
        phi.segment<kTextureModes>(17) = tau_face;
        phi.segment<3>(25) = tau_iris;
        phi.segment<3>(28) = tau_tint;
        phi.segment<3>(31) = theta_rot;
        phi.segment<3>(34) = theta_trans;
        phi[37] = theta_iod;
        phi[38] = theta_pitch;
        phi[39] = theta_yaw;
        phi[40] = theta_vergence;
        phi[41] = theta_lid;
        phi.segment<3>(42) = iota_ambient;
        phi.segment<3>(45) = iota_directional;
        phi.segment<2>(48) = iota_rot;
        return phi;
    }

    static ParameterVector unflatten(const Eigen::Matrix<double, kParameterCount, 1>& phi)
    {
        ParameterVector p;
        p.beta_face = phi.segment<kShapeModes>(0);
        p.beta_iris = phi[16];
        p.tau_face = phi.segment<kTextureModes>(17);
        p.tau_iris = phi.segment<3>(25);
        p.tau_tint = phi.segment<3>(28);
        p.theta_rot = phi.segment<3>(31);
        p.theta_trans = phi.segment<3>(34);
        p.theta_iod = phi[37];
        p.theta_pitch = phi[38];
        p.theta_yaw = phi[39];
        p.theta_vergence = phi[40];
        p.theta_lid = phi[41];
        p.iota_ambient = phi.segment<3>(42);
        p.iota_directional = phi.segment<3>(45);
        p.iota_rot = phi.segment<2>(48);
        return p;
    }

    /// @throws std::invalid_argument if any hard invariant is violated.
    void validate() const
    {
        if (!flatten().allFinite())
            throw std::invalid_argument("ParameterVector: non-finite value");
        if (!(theta_iod > 0.0))
            throw std::invalid_argument("ParameterVector: theta_iod must be positive");
        if (!(beta_iris > 0.0))
            throw std::invalid_argument("ParameterVector: beta_iris must be positive");
        for (int k = 0; k < 3; ++k)
        {
            if (tau_iris[k] < 0.0 || tau_iris[k] > 1.0 || tau_tint[k] < 0.0 || tau_tint[k] > 1.0)
                throw std::invalid_argument("ParameterVector: tau_iris/tau_tint must be in [0,1]");
            if (iota_ambient[k] < 0.0 || iota_directional[k] < 0.0)
                throw std::invalid_argument("ParameterVector: light intensities must be >= 0");
        }
    }

    /**
     * Projects the parameters into their valid box. Used by the solver to
     * keep Gauss-Newton trial points inside the model's guard ranges.
     */
    ParameterVector clamped_to_valid() const
    {
        ParameterVector p = *this;
        p.beta_iris = std::clamp(p.beta_iris, kBetaIrisMin + 0.05, kBetaIrisMax - 0.05);
        p.theta_lid = std::clamp(p.theta_lid, -kThetaLidGuard + 0.02, kThetaLidGuard - 0.02);
        p.theta_iod = std::clamp(p.theta_iod, 40.0, 90.0);
        for (int k = 0; k < 3; ++k)
        {
            p.tau_iris[k] = std::clamp(p.tau_iris[k], 0.0, 1.0);
            p.tau_tint[k] = std::clamp(p.tau_tint[k], 0.0, 1.0);
            p.iota_ambient[k] = std::clamp(p.iota_ambient[k], 0.0, 4.0);
            p.iota_directional[k] = std::clamp(p.iota_directional[k], 0.0, 4.0);
        }
        const double gaze_guard = deg_to_rad(60.0);
        p.theta_pitch = std::clamp(p.theta_pitch, -gaze_guard, gaze_guard);
        p.theta_yaw = std::clamp(p.theta_yaw, -gaze_guard, gaze_guard);
        p.theta_vergence = std::clamp(p.theta_vergence, -deg_to_rad(20.0), deg_to_rad(20.0));
        return p;
    }
};

/// Named parameter groups, used for masking and per-group derivative steps.
enum class ParameterGroup
{
    shape,
    iris_size,
    texture,
    iris_color,
    tint,
    rotation,
    translation,
    iod,
    gaze,
    lid,
    ambient,
    directional,
    light_direction,
};

inline ParameterGroup parameter_group(int index)
{
    if (index < 0 || index >= kParameterCount)
        throw std::out_of_range("parameter index out of range");
    if (index < 16) return ParameterGroup::shape;
    if (index == 16) return ParameterGroup::iris_size;
    if (index < 25) return ParameterGroup::texture;
    if (index < 28) return ParameterGroup::iris_color;
    if (index < 31) return ParameterGroup::tint;
    if (index < 34) return ParameterGroup::rotation;
    if (index < 37) return ParameterGroup::translation;
    if (index == 37) return ParameterGroup::iod;
    if (index < 41) return ParameterGroup::gaze;
    if (index == 41) return ParameterGroup::lid;
    if (index < 45) return ParameterGroup::ambient;
    if (index < 48) return ParameterGroup::directional;
    return ParameterGroup::light_direction;
}

inline const std::array<std::string, 13>& parameter_group_names()
{
    static const std::array<std::string, 13> names = {
        "shape",      "iris_size",   "texture", "iris_color", "tint",
        "rotation",   "translation", "iod",     "gaze",       "lid",
        "ambient",    "directional", "light_direction"};
    return names;
}

inline ParameterGroup parameter_group_from_name(const std::string& name)
{
    const auto& names = parameter_group_names();
    for (std::size_t i = 0; i < names.size(); ++i)
    {
        if (names[i] == name)
            return static_cast<ParameterGroup>(i);
    }
    throw std::invalid_argument("unknown parameter group: " + name);
}

/// Boolean mask over the flattened parameter vector.
using ParameterMask = std::array<bool, kParameterCount>;

inline ParameterMask full_mask()
{
    ParameterMask mask;
    mask.fill(true);
    return mask;
}

inline ParameterMask empty_mask()
{
    ParameterMask mask;
    mask.fill(false);
    return mask;
}

inline ParameterMask mask_from_groups(const std::vector<ParameterGroup>& groups)
{
    ParameterMask mask = empty_mask();
    for (int i = 0; i < kParameterCount; ++i)
    {
        for (const auto g : groups)
        {
            if (parameter_group(i) == g)
            {
                mask[i] = true;
                break;
            }
        }
    }
    return mask;
}

/**
 * Mask used when tracking video frames after the first: shape, texture and
 * illumination stay frozen while pose, gaze and eyelid keep optimizing.
 */
inline ParameterMask video_tracking_mask()
{
    return mask_from_groups({ParameterGroup::rotation, ParameterGroup::translation,
                             ParameterGroup::iod, ParameterGroup::gaze, ParameterGroup::lid});
}

} // namespace model
} // namespace gazekit

#endif /* GAZEKIT_MODEL_PARAMETERS_HPP */
