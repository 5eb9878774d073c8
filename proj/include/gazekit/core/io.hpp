/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/core/io.hpp
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

#ifndef GAZEKIT_CORE_IO_HPP
#define GAZEKIT_CORE_IO_HPP

#include "gazekit/core/image.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// All binary formats below are little-endian; this library targets
// little-endian hosts only.
static_assert(std::endian::native == std::endian::little,
              "gazekit binary file formats require a little-endian host");

namespace gazekit {
namespace core {

namespace detail {

inline std::ifstream open_input(const std::string& path, std::ios::openmode mode = std::ios::in)
{
    std::ifstream in(path, mode);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

// Skips PNM whitespace and '#' comment lines, then reads one integer token.
inline int read_pnm_int(std::istream& in)
{
    int c = in.get();
    while (c == '#' || std::isspace(c))
    {
        if (c == '#')
        {
            while (c != '\n' && c != EOF)
                c = in.get();
        }
        c = in.get();
    }
    in.unget();
    int value = 0;
    if (!(in >> value))
        throw std::runtime_error("malformed PNM header");
    return value;
}

} // namespace detail

/// Writes an RGB image in [0,1] as binary PPM (P6), 8 bits per channel.
inline void write_ppm(const ImageRgb& img, const std::string& path)
{
    auto out = detail::open_output(path, std::ios::binary);
    out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width()) * 3);
    for (int y = 0; y < img.height(); ++y)
    {
        for (int x = 0; x < img.width(); ++x)
        {
            const Eigen::Vector3d& c = img(x, y);
            for (int k = 0; k < 3; ++k)
            {
                const double v = std::clamp(c[k], 0.0, 1.0);
                row[3 * x + k] = static_cast<std::uint8_t>(std::lround(v * 255.0));
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw std::runtime_error("failed writing PPM: " + path);
}

/// Reads a binary PPM (P6) or PGM (P5) image into RGB doubles in [0,1].
inline ImageRgb read_pnm(const std::string& path)
{
    auto in = detail::open_input(path, std::ios::binary);
    std::string magic;
    in >> magic;
    if (magic != "P6" && magic != "P5")
        throw std::runtime_error("unsupported PNM magic '" + magic + "' in " + path);
    const bool gray = magic == "P5";
    const int width = detail::read_pnm_int(in);
    const int height = detail::read_pnm_int(in);
    const int maxval = detail::read_pnm_int(in);
    if (width <= 0 || height <= 0 || maxval != 255)
        throw std::runtime_error("unsupported PNM dimensions/maxval in " + path);
    in.get(); // single whitespace after header

    ImageRgb img(width, height);
    const int channels = gray ? 1 : 3;
    std::vector<std::uint8_t> row(static_cast<std::size_t>(width) * channels);
    for (int y = 0; y < height; ++y)
    {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (!in)
            throw std::runtime_error("truncated PNM data in " + path);
        for (int x = 0; x < width; ++x)
        {
            if (gray)
            {
                const double v = row[x] / 255.0;
                img(x, y) = {v, v, v};
            } else
            {
                img(x, y) = {row[3 * x] / 255.0, row[3 * x + 1] / 255.0, row[3 * x + 2] / 255.0};
            }
        }
    }
    return img;
}

/// Writes raw little-endian float32 values.
inline void write_f32_blob(const std::vector<float>& values, const std::string& path)
{
    auto out = detail::open_output(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(float)));
    if (!out)
        throw std::runtime_error("failed writing blob: " + path);
}

/// Reads raw little-endian float32 values; count must match the file size.
inline std::vector<float> read_f32_blob(const std::string& path, std::size_t count)
{
    auto in = detail::open_input(path, std::ios::binary);
    std::vector<float> values(count);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float))
        throw std::runtime_error("blob too short: " + path);
    if (in.get() != EOF)
        throw std::runtime_error("blob larger than expected: " + path);
    return values;
}

/// Writes raw little-endian uint32 values.
inline void write_u32_blob(const std::vector<std::uint32_t>& values, const std::string& path)
{
    auto out = detail::open_output(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(std::uint32_t)));
    if (!out)
        throw std::runtime_error("failed writing blob: " + path);
}

/// Reads raw little-endian uint32 values; count must match the file size.
inline std::vector<std::uint32_t> read_u32_blob(const std::string& path, std::size_t count)
{
    auto in = detail::open_input(path, std::ios::binary);
    std::vector<std::uint32_t> values(count);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(std::uint32_t))
        throw std::runtime_error("blob too short: " + path);
    if (in.get() != EOF)
        throw std::runtime_error("blob larger than expected: " + path);
    return values;
}

/**
 * @brief Multi-channel float dump: text header "PFCH\nwidth height channels\n"
 * followed by row-major, channel-interleaved little-endian float32 samples.
 */
inline void write_pfch(const std::vector<float>& samples, int width, int height, int channels,
                       const std::string& path)
{
    if (samples.size() != static_cast<std::size_t>(width) * height * channels)
        throw std::invalid_argument("write_pfch: sample count does not match dimensions");
    auto out = detail::open_output(path, std::ios::binary);
    out << "PFCH\n" << width << " " << height << " " << channels << "\n";
    out.write(reinterpret_cast<const char*>(samples.data()),
              static_cast<std::streamsize>(samples.size() * sizeof(float)));
    if (!out)
        throw std::runtime_error("failed writing PFCH: " + path);
}

struct PfchData
{
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> samples;
};

inline PfchData read_pfch(const std::string& path)
{
    auto in = detail::open_input(path, std::ios::binary);
    std::string magic;
    in >> magic;
    if (magic != "PFCH")
        throw std::runtime_error("bad PFCH magic in " + path);
    PfchData data;
    in >> data.width >> data.height >> data.channels;
    if (!in || data.width <= 0 || data.height <= 0 || data.channels <= 0)
        throw std::runtime_error("bad PFCH header in " + path);
    in.get();
    data.samples.resize(static_cast<std::size_t>(data.width) * data.height * data.channels);
    in.read(reinterpret_cast<char*>(data.samples.data()),
            static_cast<std::streamsize>(data.samples.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != data.samples.size() * sizeof(float))
        throw std::runtime_error("truncated PFCH data in " + path);
    return data;
}

/**
 * @brief Two-channel flow dump: text header "PFLO\nwidth height\n" followed by
 * row-major (dx, dy) little-endian float32 pairs.
 */
inline void write_pflo(const ImageVec2& flow, const std::string& path)
{
    auto out = detail::open_output(path, std::ios::binary);
    out << "PFLO\n" << flow.width() << " " << flow.height() << "\n";
    std::vector<float> row(static_cast<std::size_t>(flow.width()) * 2);
    for (int y = 0; y < flow.height(); ++y)
    {
        for (int x = 0; x < flow.width(); ++x)
        {
            row[2 * x] = static_cast<float>(flow(x, y).x());
            row[2 * x + 1] = static_cast<float>(flow(x, y).y());
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out)
        throw std::runtime_error("failed writing PFLO: " + path);
}

inline ImageVec2 read_pflo(const std::string& path)
{
    auto in = detail::open_input(path, std::ios::binary);
    std::string magic;
    in >> magic;
    if (magic != "PFLO")
        throw std::runtime_error("bad PFLO magic in " + path);
    int width = 0, height = 0;
    in >> width >> height;
    if (!in || width <= 0 || height <= 0)
        throw std::runtime_error("bad PFLO header in " + path);
    in.get();
    ImageVec2 flow(width, height);
    std::vector<float> row(static_cast<std::size_t>(width) * 2);
    for (int y = 0; y < height; ++y)
    {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in)
            throw std::runtime_error("truncated PFLO data in " + path);
        for (int x = 0; x < width; ++x)
            flow(x, y) = {row[2 * x], row[2 * x + 1]};
    }
    return flow;
}

} // namespace core
} // namespace gazekit

#endif /* GAZEKIT_CORE_IO_HPP */
