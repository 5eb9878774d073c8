/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/model/sampling.hpp
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

#ifndef GAZEKIT_MODEL_SAMPLING_HPP
#define GAZEKIT_MODEL_SAMPLING_HPP

#include "gazekit/core/image.hpp"
#include "gazekit/model/asset.hpp"
#include "gazekit/model/parameters.hpp"

#include "Eigen/Core"

#include <stdexcept>
#include <vector>

namespace gazekit {
namespace model {

/**
 * @brief Samples the PCA shape model: mu_geo + U diag(sigma_geo) beta.
 *
 * @return 229 canonical face-part vertex positions in mm.
 */
inline std::vector<Eigen::Vector3d> shape_sample(
    const EyeRegionModel& model, const Eigen::Ref<const Eigen::VectorXd>& beta_face)
{
    if (beta_face.size() != kShapeModes)
        throw std::invalid_argument("shape_sample: expected 16 shape coefficients");
    const Eigen::VectorXd flat =
        model.mu_geo + model.shape_basis * (model.sigma_geo.asDiagonal() * beta_face);
    std::vector<Eigen::Vector3d> vertices(kFaceVertexCount);
    for (int v = 0; v < kFaceVertexCount; ++v)
        vertices[v] = flat.segment<3>(3 * v);
    return vertices;
}

/**
 * @brief Samples the PCA texture model: mu_tex + V diag(sigma_tex) tau,
 * clamped to [0,1] after combination.
 */
inline core::ImageRgb texture_sample(const EyeRegionModel& model,
                                     const Eigen::Ref<const Eigen::VectorXd>& tau_face)
{
    if (tau_face.size() != kTextureModes)
        throw std::invalid_argument("texture_sample: expected 8 texture coefficients");
    const Eigen::VectorXd offset = model.texture_basis * (model.sigma_tex.asDiagonal() * tau_face);
    core::ImageRgb tex(model.mu_tex.width(), model.mu_tex.height());
    Eigen::Index i = 0;
    for (int y = 0; y < tex.height(); ++y)
    {
        for (int x = 0; x < tex.width(); ++x)
        {
            const Eigen::Vector3d& mean = model.mu_tex(x, y);
            for (int k = 0; k < 3; ++k)
                tex(x, y)[k] = std::clamp(mean[k] + offset[i + k], 0.0, 1.0);
            i += 3;
        }
    }
    return tex;
}

/// texture_sample without the [0,1] clamp; used by linearity checks.
inline core::ImageRgb texture_sample_unclamped(const EyeRegionModel& model,
                                               const Eigen::Ref<const Eigen::VectorXd>& tau_face)
{
    if (tau_face.size() != kTextureModes)
        throw std::invalid_argument("texture_sample: expected 8 texture coefficients");
    const Eigen::VectorXd offset = model.texture_basis * (model.sigma_tex.asDiagonal() * tau_face);
    core::ImageRgb tex(model.mu_tex.width(), model.mu_tex.height());
    Eigen::Index i = 0;
    for (int y = 0; y < tex.height(); ++y)
    {
        for (int x = 0; x < tex.width(); ++x)
        {
            const Eigen::Vector3d& mean = model.mu_tex(x, y);
            for (int k = 0; k < 3; ++k)
                tex(x, y)[k] = mean[k] + offset[i + k];
            i += 3;
        }
    }
    return tex;
}

} // namespace model
} // namespace gazekit

#endif /* GAZEKIT_MODEL_SAMPLING_HPP */
