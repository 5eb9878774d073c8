/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/model/asset.hpp
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

#ifndef GAZEKIT_MODEL_ASSET_HPP
#define GAZEKIT_MODEL_ASSET_HPP

#include "gazekit/core/image.hpp"
#include "gazekit/core/io.hpp"
#include "gazekit/model/parameters.hpp"
#include "gazekit/render/subdivision.hpp"

#include "Eigen/Core"

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gazekit {
namespace model {

constexpr int kFaceVertexCount = 229; ///< vertices per facial eye-region part
constexpr int kFlowVertexCount = 2 * kFaceVertexCount; ///< both parts, indices [0,458)

/// One landmark as a barycentric combination of up to three mesh vertices.
/// Vertex indices are global: [0,229) left part, [229,458) right part.
struct LandmarkRow
{
    std::array<int, 3> vertex = {0, 0, 0};
    std::array<double, 3> weight = {1.0, 0.0, 0.0};
    std::string name;
};

/**
 * @brief Two-sphere eyeball geometry plus its base texture.
 *
 * The eyeball local frame has its centre at the origin and the optical axis
 * along +z. The texture uses an azimuthal-equidistant style mapping centred
 * on the pupil: a surface direction at polar angle theta from the axis maps
 * to texture radius 0.5*(theta/pi)^uv_gamma from the texture centre.
 */
struct EyeballGeometry
{
    double sclera_radius = 12.0;
    double cornea_radius = 8.0;
    double iris_radius = 6.0; ///< limbus radius
    double iris_plane_z = 9.8;
    double refractive_index = 1.376;
    double uv_gamma = 0.65;
    core::ImageRgb texture;
    core::ImageGray iris_mask;
    core::ImageGray sclera_mask;

    double limbus_angle() const { return std::asin(iris_radius / sclera_radius); }
    double limbus_z() const
    {
        return std::sqrt(sclera_radius * sclera_radius - iris_radius * iris_radius);
    }
    /// z of the cornea sphere centre (on the optical axis, through the limbus).
    double cornea_center_z() const
    {
        return limbus_z() - std::sqrt(cornea_radius * cornea_radius - iris_radius * iris_radius);
    }
    double uv_radius(double theta) const { return 0.5 * std::pow(theta / M_PI, uv_gamma); }
    double theta_from_uv_radius(double rho) const
    {
        return M_PI * std::pow(std::max(0.0, 2.0 * rho), 1.0 / uv_gamma);
    }
};

/**
 * @brief The loaded eye region model: PCA shape/texture bases, face topology,
 * landmark mapping, eyelid rig, and eyeball geometry.
 *
 * All quantities are double precision in memory; the on-disk asset format
 * stores float32 (see docs/formats.md). Instances are immutable after
 * finalize() and safe to share across threads.
 */
class EyeRegionModel
{
public:
    // --- shape model (face part, canonical frame: eyeball centre at origin)
    Eigen::VectorXd mu_geo;       ///< 3*229, [x0 y0 z0 x1 ...] in mm
    Eigen::MatrixXd shape_basis;  ///< (3*229) x 16, unit-norm columns
    Eigen::VectorXd sigma_geo;    ///< 16 stddevs, > 0

    // --- texture model
    core::ImageRgb mu_tex;         ///< mean texture map
    Eigen::MatrixXd texture_basis; ///< (h*w*3) x 8, unit-norm columns
    Eigen::VectorXd sigma_tex;     ///< 8 stddevs, > 0

    // --- face topology and rig
    std::vector<Eigen::Vector3i> topology; ///< canonical part triangles
    std::vector<Eigen::Vector2d> face_uv;  ///< per-vertex texture coordinates
    std::vector<double> eyelid_weights;    ///< per-vertex lid influence in [0,1]
    std::array<int, 2> eyelid_axis = {0, 0}; ///< eye-corner vertex indices (nasal, temporal)

    std::vector<LandmarkRow> landmarks; ///< 25 rows, global vertex indices

    EyeballGeometry eyeball;
    double iod_default = 62.0;
    double beta_iris_default = 1.0;

    /// Precomputed one-step Loop stencils over the face topology.
    render::SubdivisionStencils subdivision_stencils;

    /// Computes derived data (subdivision stencils). Call once after filling fields.
    void finalize() { subdivision_stencils = render::build_loop_stencils(topology, kFaceVertexCount); }

    /**
     * Checks the model invariants.
     * @param tolerance absolute tolerance for unit-norm and weight-sum checks
     *        (use ~1e-5 for float32-quantized assets, 1e-10 for in-memory models).
     * @throws std::runtime_error on violation.
     */
    void validate(double tolerance = 1e-5) const
    {
        auto fail = [](const std::string& what) { throw std::runtime_error("EyeRegionModel: " + what); };
        if (mu_geo.size() != 3 * kFaceVertexCount)
            fail("mu_geo must hold exactly 229 vertices");
        if (shape_basis.rows() != 3 * kFaceVertexCount || shape_basis.cols() != kShapeModes)
            fail("shape basis must be (3*229) x 16");
        if (sigma_geo.size() != kShapeModes || (sigma_geo.array() <= 0.0).any())
            fail("sigma_geo must hold 16 positive stddevs");
        if (mu_tex.empty())
            fail("missing mean texture");
        const auto texels = static_cast<Eigen::Index>(mu_tex.size()) * 3;
        if (texture_basis.rows() != texels || texture_basis.cols() != kTextureModes)
            fail("texture basis shape mismatch");
        if (sigma_tex.size() != kTextureModes || (sigma_tex.array() <= 0.0).any())
            fail("sigma_tex must hold 8 positive stddevs");
        for (int k = 0; k < kShapeModes; ++k)
        {
            if (std::abs(shape_basis.col(k).norm() - 1.0) > tolerance)
                fail("shape basis column " + std::to_string(k) + " is not unit norm");
        }
        for (int k = 0; k < kTextureModes; ++k)
        {
            if (std::abs(texture_basis.col(k).norm() - 1.0) > tolerance)
                fail("texture basis column " + std::to_string(k) + " is not unit norm");
        }
        if (topology.empty())
            fail("empty topology");
        for (const auto& tri : topology)
        {
            for (int e = 0; e < 3; ++e)
            {
                if (tri[e] < 0 || tri[e] >= kFaceVertexCount)
                    fail("topology index out of range");
            }
        }
        if (face_uv.size() != kFaceVertexCount)
            fail("face_uv must hold one entry per vertex");
        if (eyelid_weights.size() != kFaceVertexCount)
            fail("eyelid_weights must hold one entry per vertex");
        for (const double w : eyelid_weights)
        {
            if (!(w >= 0.0 && w <= 1.0))
                fail("eyelid weight outside [0,1]");
        }
        for (const int corner : eyelid_axis)
        {
            if (corner < 0 || corner >= kFaceVertexCount)
                fail("eyelid axis vertex out of range");
        }
        if (eyelid_axis[0] == eyelid_axis[1])
            fail("eyelid axis vertices must be distinct");
        if (landmarks.size() != static_cast<std::size_t>(kLandmarkCount))
            fail("landmark_map must hold exactly 25 rows");
        for (const auto& row : landmarks)
        {
            double sum = 0.0;
            for (int e = 0; e < 3; ++e)
            {
                if (row.vertex[e] < 0 || row.vertex[e] >= kFlowVertexCount)
                    fail("landmark vertex index outside [0,458]");
                sum += row.weight[e];
            }
            if (std::abs(sum - 1.0) > tolerance)
                fail("landmark row weights must sum to 1");
        }
        if (!(eyeball.sclera_radius > 0.0) || !(eyeball.cornea_radius > 0.0) ||
            !(eyeball.iris_radius > 0.0) || eyeball.iris_radius >= eyeball.sclera_radius ||
            eyeball.iris_radius >= eyeball.cornea_radius)
            fail("inconsistent eyeball radii");
        if (eyeball.texture.empty() || eyeball.iris_mask.empty() || eyeball.sclera_mask.empty())
            fail("missing eyeball texture or masks");
        if (!(iod_default > 0.0))
            fail("iod_default must be positive");
    }
};

namespace detail {

class Manifest
{
public:
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

    template <typename T>
    void set_number(const std::string& key, T value)
    {
        std::ostringstream os;
        os.precision(17);
        os << value;
        entries_[key] = os.str();
    }

    const std::string& get(const std::string& key) const
    {
        const auto it = entries_.find(key);
        if (it == entries_.end())
            throw std::runtime_error("asset manifest: missing key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key) const { return std::stod(get(key)); }
    int get_int(const std::string& key) const { return std::stoi(get(key)); }

    void write(const std::string& path) const
    {
        auto out = core::detail::open_output(path);
        for (const auto& [key, value] : entries_)
            out << key << " " << value << "\n";
    }

    static Manifest read(const std::string& path)
    {
        auto in = core::detail::open_input(path);
        Manifest m;
        std::string line;
        while (std::getline(in, line))
        {
            if (line.empty() || line[0] == '#')
                continue;
            const auto split = line.find(' ');
            if (split == std::string::npos)
                throw std::runtime_error("asset manifest: malformed line '" + line + "'");
            m.entries_[line.substr(0, split)] = line.substr(split + 1);
        }
        return m;
    }

private:
    std::map<std::string, std::string> entries_;
};

inline std::vector<float> to_f32(const Eigen::Ref<const Eigen::MatrixXd>& m)
{
    std::vector<float> out(static_cast<std::size_t>(m.size()));
    Eigen::Index i = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            out[i++] = static_cast<float>(m(r, c));
    return out;
}

inline Eigen::MatrixXd from_f32(const std::vector<float>& v, Eigen::Index rows, Eigen::Index cols)
{
    Eigen::MatrixXd m(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, c) = v[i++];
    return m;
}

inline std::vector<float> image_to_f32(const core::ImageRgb& img)
{
    std::vector<float> out(img.size() * 3);
    std::size_t i = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int k = 0; k < 3; ++k)
                out[i++] = static_cast<float>(img(x, y)[k]);
    return out;
}

inline core::ImageRgb image_from_f32(const std::vector<float>& v, int width, int height)
{
    core::ImageRgb img(width, height);
    std::size_t i = 0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int k = 0; k < 3; ++k)
                img(x, y)[k] = v[i++];
    return img;
}

inline std::vector<float> gray_to_f32(const core::ImageGray& img)
{
    std::vector<float> out(img.size());
    std::size_t i = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out[i++] = static_cast<float>(img(x, y));
    return out;
}

inline core::ImageGray gray_from_f32(const std::vector<float>& v, int width, int height)
{
    core::ImageGray img(width, height);
    std::size_t i = 0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            img(x, y) = v[i++];
    return img;
}

} // namespace detail

/**
 * @brief Serializes a model to an asset directory (text manifest plus raw
 * little-endian float32/uint32 arrays; layout documented in docs/formats.md).
 */
inline void save_asset(const EyeRegionModel& model, const std::string& directory)
{
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const auto file = [&](const char* name) { return (fs::path(directory) / name).string(); };

    detail::Manifest m;
    m.set("format", "gazekit-asset 1");
    m.set_number("vertex_count", kFaceVertexCount);
    m.set_number("triangle_count", static_cast<int>(model.topology.size()));
    m.set_number("shape_modes", kShapeModes);
    m.set_number("texture_modes", kTextureModes);
    m.set_number("texture_width", model.mu_tex.width());
    m.set_number("texture_height", model.mu_tex.height());
    m.set_number("eyeball_texture_width", model.eyeball.texture.width());
    m.set_number("eyeball_texture_height", model.eyeball.texture.height());
    m.set_number("landmark_count", kLandmarkCount);
    m.set_number("sclera_radius", model.eyeball.sclera_radius);
    m.set_number("cornea_radius", model.eyeball.cornea_radius);
    m.set_number("iris_radius", model.eyeball.iris_radius);
    m.set_number("iris_plane_z", model.eyeball.iris_plane_z);
    m.set_number("refractive_index", model.eyeball.refractive_index);
    m.set_number("uv_gamma", model.eyeball.uv_gamma);
    m.set_number("iod_default", model.iod_default);
    m.set_number("beta_iris_default", model.beta_iris_default);
    m.set("eyelid_axis", std::to_string(model.eyelid_axis[0]) + " " + std::to_string(model.eyelid_axis[1]));
    {
        std::string names;
        for (const auto& row : model.landmarks)
            names += (names.empty() ? "" : " ") + row.name;
        m.set("landmark_names", names);
    }
    m.write(file("manifest.txt"));

    core::write_f32_blob(detail::to_f32(model.mu_geo), file("mu_geo.f32"));
    core::write_f32_blob(detail::to_f32(model.shape_basis), file("shape_basis.f32"));
    core::write_f32_blob(detail::to_f32(model.sigma_geo), file("sigma_geo.f32"));
    core::write_f32_blob(detail::image_to_f32(model.mu_tex), file("mu_tex.f32"));
    core::write_f32_blob(detail::to_f32(model.texture_basis), file("texture_basis.f32"));
    core::write_f32_blob(detail::to_f32(model.sigma_tex), file("sigma_tex.f32"));

    std::vector<std::uint32_t> tris;
    tris.reserve(model.topology.size() * 3);
    for (const auto& t : model.topology)
        for (int e = 0; e < 3; ++e)
            tris.push_back(static_cast<std::uint32_t>(t[e]));
    core::write_u32_blob(tris, file("topology.u32"));

    std::vector<float> uv;
    uv.reserve(model.face_uv.size() * 2);
    for (const auto& p : model.face_uv)
    {
        uv.push_back(static_cast<float>(p.x()));
        uv.push_back(static_cast<float>(p.y()));
    }
    core::write_f32_blob(uv, file("face_uv.f32"));

    std::vector<float> lid(model.eyelid_weights.begin(), model.eyelid_weights.end());
    core::write_f32_blob(lid, file("eyelid_weights.f32"));

    std::vector<std::uint32_t> lm_idx;
    std::vector<float> lm_w;
    for (const auto& row : model.landmarks)
    {
        for (int e = 0; e < 3; ++e)
        {
            lm_idx.push_back(static_cast<std::uint32_t>(row.vertex[e]));
            lm_w.push_back(static_cast<float>(row.weight[e]));
        }
    }
    core::write_u32_blob(lm_idx, file("landmark_indices.u32"));
    core::write_f32_blob(lm_w, file("landmark_weights.f32"));

    core::write_f32_blob(detail::image_to_f32(model.eyeball.texture), file("eyeball_texture.f32"));
    core::write_f32_blob(detail::gray_to_f32(model.eyeball.iris_mask), file("eyeball_iris_mask.f32"));
    core::write_f32_blob(detail::gray_to_f32(model.eyeball.sclera_mask), file("eyeball_sclera_mask.f32"));
}

/**
 * @brief Loads, finalizes and validates a model from an asset directory.
 * @throws std::runtime_error on missing files or invariant violations.
 */
inline EyeRegionModel load_asset(const std::string& directory)
{
    namespace fs = std::filesystem;
    const auto file = [&](const char* name) { return (fs::path(directory) / name).string(); };

    const auto m = detail::Manifest::read(file("manifest.txt"));
    if (m.get("format") != "gazekit-asset 1")
        throw std::runtime_error("unsupported asset format: " + m.get("format"));
    if (m.get_int("vertex_count") != kFaceVertexCount)
        throw std::runtime_error("asset vertex_count must be 229");
    if (m.get_int("shape_modes") != kShapeModes || m.get_int("texture_modes") != kTextureModes)
        throw std::runtime_error("asset basis dimensionality mismatch");

    const int tri_count = m.get_int("triangle_count");
    const int tw = m.get_int("texture_width");
    const int th = m.get_int("texture_height");
    const int ew = m.get_int("eyeball_texture_width");
    const int eh = m.get_int("eyeball_texture_height");
    constexpr int n3 = 3 * kFaceVertexCount;

    EyeRegionModel model;
    model.mu_geo = detail::from_f32(core::read_f32_blob(file("mu_geo.f32"), n3), n3, 1);
    model.shape_basis =
        detail::from_f32(core::read_f32_blob(file("shape_basis.f32"), n3 * kShapeModes), n3, kShapeModes);
    model.sigma_geo =
        detail::from_f32(core::read_f32_blob(file("sigma_geo.f32"), kShapeModes), kShapeModes, 1);
    model.mu_tex = detail::image_from_f32(
        core::read_f32_blob(file("mu_tex.f32"), static_cast<std::size_t>(tw) * th * 3), tw, th);
    model.texture_basis = detail::from_f32(
        core::read_f32_blob(file("texture_basis.f32"),
                            static_cast<std::size_t>(tw) * th * 3 * kTextureModes),
        static_cast<Eigen::Index>(tw) * th * 3, kTextureModes);
    model.sigma_tex =
        detail::from_f32(core::read_f32_blob(file("sigma_tex.f32"), kTextureModes), kTextureModes, 1);

    const auto tris = core::read_u32_blob(file("topology.u32"), static_cast<std::size_t>(tri_count) * 3);
    model.topology.resize(tri_count);
    for (int t = 0; t < tri_count; ++t)
        model.topology[t] = {static_cast<int>(tris[3 * t]), static_cast<int>(tris[3 * t + 1]),
                             static_cast<int>(tris[3 * t + 2])};

    const auto uv = core::read_f32_blob(file("face_uv.f32"), kFaceVertexCount * 2);
    model.face_uv.resize(kFaceVertexCount);
    for (int v = 0; v < kFaceVertexCount; ++v)
        model.face_uv[v] = {uv[2 * v], uv[2 * v + 1]};

    const auto lid = core::read_f32_blob(file("eyelid_weights.f32"), kFaceVertexCount);
    model.eyelid_weights.assign(lid.begin(), lid.end());

    {
        std::istringstream axis(m.get("eyelid_axis"));
        axis >> model.eyelid_axis[0] >> model.eyelid_axis[1];
        if (!axis)
            throw std::runtime_error("asset manifest: malformed eyelid_axis");
    }

    const auto lm_idx = core::read_u32_blob(file("landmark_indices.u32"), kLandmarkCount * 3);
    const auto lm_w = core::read_f32_blob(file("landmark_weights.f32"), kLandmarkCount * 3);
    std::istringstream names(m.get("landmark_names"));
    model.landmarks.resize(kLandmarkCount);
    for (int i = 0; i < kLandmarkCount; ++i)
    {
        auto& row = model.landmarks[i];
        for (int e = 0; e < 3; ++e)
        {
            row.vertex[e] = static_cast<int>(lm_idx[3 * i + e]);
            row.weight[e] = lm_w[3 * i + e];
        }
        if (!(names >> row.name))
            throw std::runtime_error("asset manifest: missing landmark names");
    }

    model.eyeball.sclera_radius = m.get_double("sclera_radius");
    model.eyeball.cornea_radius = m.get_double("cornea_radius");
    model.eyeball.iris_radius = m.get_double("iris_radius");
    model.eyeball.iris_plane_z = m.get_double("iris_plane_z");
    model.eyeball.refractive_index = m.get_double("refractive_index");
    model.eyeball.uv_gamma = m.get_double("uv_gamma");
    model.eyeball.texture = detail::image_from_f32(
        core::read_f32_blob(file("eyeball_texture.f32"), static_cast<std::size_t>(ew) * eh * 3), ew, eh);
    model.eyeball.iris_mask = detail::gray_from_f32(
        core::read_f32_blob(file("eyeball_iris_mask.f32"), static_cast<std::size_t>(ew) * eh), ew, eh);
    model.eyeball.sclera_mask = detail::gray_from_f32(
        core::read_f32_blob(file("eyeball_sclera_mask.f32"), static_cast<std::size_t>(ew) * eh), ew, eh);
    model.iod_default = m.get_double("iod_default");
    model.beta_iris_default = m.get_double("beta_iris_default");

    model.finalize();
    model.validate(1e-4);
    return model;
}

} // namespace model
} // namespace gazekit

#endif /* GAZEKIT_MODEL_ASSET_HPP */
