/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/core/image.hpp
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

#ifndef GAZEKIT_CORE_IMAGE_HPP
#define GAZEKIT_CORE_IMAGE_HPP

#include "Eigen/Core"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace gazekit {
namespace core {

/**
 * @brief Dense 2D pixel grid with value semantics, stored row-major.
 *
 * Pixel (x, y) addresses column x in row y; y = 0 is the top row.
 */
template <typename T>
class Image
{
public:
    Image() = default;

    Image(int width, int height, const T& value = T{})
        : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, value)
    {
        assert(width >= 0 && height >= 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    T& operator()(int x, int y)
    {
        assert(contains(x, y));
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    const T& operator()(int x, int y) const
    {
        assert(contains(x, y));
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

    bool contains(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

    void fill(const T& value) { std::fill(data_.begin(), data_.end(), value); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    bool operator==(const Image& other) const
    {
        return width_ == other.width_ && height_ == other.height_ && data_ == other.data_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using ImageRgb = Image<Eigen::Vector3d>;
using ImageGray = Image<double>;
using ImageVec2 = Image<Eigen::Vector2d>;

/**
 * @brief Bilinear sample at continuous coordinates with border clamping.
 *
 * The sample lattice sits on integer coordinates: sample_bilinear(img, i, j)
 * returns img(i, j) exactly, with no interpolation arithmetic applied.
 */
template <typename T>
inline T sample_bilinear(const Image<T>& img, double x, double y)
{
    assert(!img.empty());
    const double xc = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
    const double yc = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
    const int x0 = static_cast<int>(std::floor(xc));
    const int y0 = static_cast<int>(std::floor(yc));
    const double fx = xc - x0;
    const double fy = yc - y0;
    if (fx == 0.0 && fy == 0.0)
    {
        return img(x0, y0);
    }
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    return (1.0 - fy) * ((1.0 - fx) * img(x0, y0) + fx * img(x1, y0)) +
           fy * ((1.0 - fx) * img(x0, y1) + fx * img(x1, y1));
}

} // namespace core
} // namespace gazekit

#endif /* GAZEKIT_CORE_IMAGE_HPP */
