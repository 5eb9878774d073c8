/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/render/raster.hpp
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

#ifndef GAZEKIT_RENDER_RASTER_HPP
#define GAZEKIT_RENDER_RASTER_HPP

#include "gazekit/core/image.hpp"
#include "gazekit/core/io.hpp"
#include "gazekit/model/pose.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace gazekit {
namespace render {

/**
 * @brief Rendered output: color image, part-id mask and depth buffer.
 *
 * mask == background exactly where depth == +infinity; color is black on
 * background pixels.
 */
struct Raster
{
    core::ImageRgb color;
    core::Image<std::uint8_t> part; ///< model::PartId values
    core::ImageGray depth;          ///< -z in mm; +infinity on background

    Raster() = default;
    Raster(int width, int height)
        : color(width, height, Eigen::Vector3d::Zero()),
          part(width, height, static_cast<std::uint8_t>(model::PartId::background)),
          depth(width, height, std::numeric_limits<double>::infinity())
    {
    }

    model::PartId part_at(int x, int y) const { return static_cast<model::PartId>(part(x, y)); }
    int foreground_count() const
    {
        int count = 0;
        for (int y = 0; y < part.height(); ++y)
            for (int x = 0; x < part.width(); ++x)
                if (part(x, y) != 0)
                    ++count;
        return count;
    }
};

/**
 * @brief Dense per-pixel 2D displacement field with a coverage mask.
 *
 * Displacement is zero outside coverage and finite everywhere.
 */
struct FlowField
{
    core::ImageVec2 flow;
    core::Image<std::uint8_t> coverage; ///< 1 where a face part rasterized

    FlowField() = default;
    FlowField(int width, int height)
        : flow(width, height, Eigen::Vector2d::Zero()), coverage(width, height, 0)
    {
    }
};

/// Debug dump of raster channels (color, depth, mask) as a PFCH float file.
inline void dump_raster(const Raster& raster, const std::string& path)
{
    const int w = raster.color.width();
    const int h = raster.color.height();
    std::vector<float> samples(static_cast<std::size_t>(w) * h * 5);
    std::size_t i = 0;
    for (int y = 0; y < h; ++y)
    {
        for (int x = 0; x < w; ++x)
        {
            samples[i++] = static_cast<float>(raster.color(x, y)[0]);
            samples[i++] = static_cast<float>(raster.color(x, y)[1]);
            samples[i++] = static_cast<float>(raster.color(x, y)[2]);
            samples[i++] = static_cast<float>(raster.depth(x, y));
            samples[i++] = static_cast<float>(raster.part(x, y));
        }
    }
    core::write_pfch(samples, w, h, 5, path);
}

} // namespace render
} // namespace gazekit

#endif /* GAZEKIT_RENDER_RASTER_HPP */
