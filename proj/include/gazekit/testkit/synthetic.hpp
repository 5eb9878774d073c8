/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/testkit/synthetic.hpp
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

#ifndef GAZEKIT_TESTKIT_SYNTHETIC_HPP
#define GAZEKIT_TESTKIT_SYNTHETIC_HPP

#include "gazekit/model/asset.hpp"
#include "gazekit/model/parameters.hpp"

#include "Eigen/Core"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gazekit {
namespace testkit {

/**
 * @brief Controls the synthetic eye-region model generator, the stand-in for
 * scan-derived assets. Same spec => byte-identical asset.
 */
struct SyntheticModelSpec
{
    std::uint64_t seed = 1;
    int texture_size = 256;         ///< face texture resolution (square)
    int eyeball_texture_size = 256; ///< eyeball texture resolution (square)
    double shape_amplitude = 1.0;   ///< scales shape mode stddevs
    double texture_amplitude = 1.0; ///< scales texture mode stddevs
};

namespace detail {

/// Portable uniform double in [0,1): fixed mapping from the mt19937_64 stream.
inline double u01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double u_range(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * u01(rng);
}

inline double smoothstep(double lo, double hi, double x)
{
    const double t = std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

/// Modified Gram-Schmidt (two passes), in place. Columns must be independent.
inline void orthonormalize_columns(Eigen::MatrixXd& m)
{
    for (int pass = 0; pass < 2; ++pass)
    {
        for (Eigen::Index k = 0; k < m.cols(); ++k)
        {
            for (Eigen::Index j = 0; j < k; ++j)
                m.col(k) -= m.col(j).dot(m.col(k)) * m.col(j);
            m.col(k) /= m.col(k).norm();
        }
    }
}

/// Annulus face-part grid: 28 angular steps x 8 rings, plus 5 brow splits.
constexpr int kAngular = 28;
constexpr int kRings = 8;

inline int ring_vertex(int ring, int a) { return ring * kAngular + ((a % kAngular) + kAngular) % kAngular; }

struct FacePartGrid
{
    std::vector<Eigen::Vector3d> positions; ///< 229 rest positions
    std::vector<Eigen::Vector3i> triangles; ///< 402 triangles
};

/// Builds the canonical face-part surface around an eyeball at the origin:
/// an elliptical annulus from the lid margin to the orbit boundary, with a
/// gentle lid bulge, plus five lifted brow vertices from triangle splits.
inline FacePartGrid build_face_grid()
{
    FacePartGrid grid;
    const double margin_a = 14.0, margin_b = 5.5; ///< palpebral opening semi-axes (mm)
    const double orbit_a = 30.0, orbit_b = 24.0;  ///< orbit boundary semi-axes (mm)
    const double orbit_z = 2.0;

    grid.positions.reserve(model::kFaceVertexCount);
    for (int r = 0; r < kRings; ++r)
    {
        const double t = static_cast<double>(r) / (kRings - 1);
        const double ea = margin_a + (orbit_a - margin_a) * t;
        const double eb = margin_b + (orbit_b - margin_b) * t;
        for (int a = 0; a < kAngular; ++a)
        {
            const double phi = 2.0 * M_PI * a / kAngular;
            const double x = ea * std::cos(phi);
            const double y = eb * std::sin(phi);
            // Lid margin z tracks the eyeball front; skin recedes outward.
            const double dm2 = std::pow(margin_a * std::cos(phi), 2.0) +
                               std::pow(margin_b * std::sin(phi), 2.0);
            const double margin_z = 11.5 - 4.5 * dm2 / (margin_a * margin_a);
            const double bulge = 2.5 * 4.0 * t * (1.0 - t) * (1.0 + 0.15 * std::sin(phi));
            const double z = margin_z + (orbit_z - margin_z) * t + bulge;
            grid.positions.push_back({x, y, z});
        }
    }

    grid.triangles.reserve(402);
    for (int r = 0; r + 1 < kRings; ++r)
    {
        for (int a = 0; a < kAngular; ++a)
        {
            const int v00 = ring_vertex(r, a);
            const int v01 = ring_vertex(r, a + 1);
            const int v10 = ring_vertex(r + 1, a);
            const int v11 = ring_vertex(r + 1, a + 1);
            grid.triangles.push_back({v00, v01, v11});
            grid.triangles.push_back({v00, v11, v10});
        }
    }

    // Five 1-to-3 splits in the brow band bring the count to exactly 229.
    const int split_quads[5] = {2, 5, 8, 11, 13};
    for (const int a : split_quads)
    {
        const int tri_index = (5 * kAngular + a) * 2;
        const Eigen::Vector3i tri = grid.triangles[tri_index];
        const int centre = static_cast<int>(grid.positions.size());
        Eigen::Vector3d c =
            (grid.positions[tri[0]] + grid.positions[tri[1]] + grid.positions[tri[2]]) / 3.0;
        c.z() += 0.8;
        grid.positions.push_back(c);
        grid.triangles[tri_index] = {tri[0], tri[1], centre};
        grid.triangles.push_back({tri[1], tri[2], centre});
        grid.triangles.push_back({tri[2], tri[0], centre});
    }
    return grid;
}

/// Smooth random 3D displacement field over the rest vertices.
inline Eigen::VectorXd smooth_shape_field(std::mt19937_64& rng,
                                          const std::vector<Eigen::Vector3d>& rest)
{
    Eigen::VectorXd field(3 * rest.size());
    struct Wave
    {
        Eigen::Vector3d direction;
        Eigen::Vector3d frequency;
        double phase;
        double amplitude;
    };
    std::vector<Wave> waves(3);
    for (auto& w : waves)
    {
        w.direction = Eigen::Vector3d(u_range(rng, -1, 1), u_range(rng, -1, 1), u_range(rng, -1, 1))
                          .normalized();
        w.frequency = {u_range(rng, 0.02, 0.12), u_range(rng, 0.02, 0.12), u_range(rng, 0.02, 0.12)};
        w.phase = u_range(rng, 0.0, 2.0 * M_PI);
        w.amplitude = u_range(rng, 0.5, 1.0);
    }
    for (std::size_t v = 0; v < rest.size(); ++v)
    {
        Eigen::Vector3d d = Eigen::Vector3d::Zero();
        for (const auto& w : waves)
            d += w.amplitude * std::cos(w.frequency.dot(rest[v]) + w.phase) * w.direction;
        field.segment<3>(3 * v) = d;
    }
    return field;
}

/// Smooth random RGB field over texture space, flattened.
inline Eigen::VectorXd smooth_texture_field(std::mt19937_64& rng, int size)
{
    Eigen::VectorXd field(static_cast<Eigen::Index>(size) * size * 3);
    struct Wave
    {
        Eigen::Vector3d color;
        double fu, fv, phase, amplitude;
    };
    std::vector<Wave> waves(4);
    for (auto& w : waves)
    {
        w.color = Eigen::Vector3d(u_range(rng, -1, 1), u_range(rng, -1, 1), u_range(rng, -1, 1))
                      .normalized();
        w.fu = u_range(rng, 1.5, 7.0);
        w.fv = u_range(rng, 1.5, 7.0);
        w.phase = u_range(rng, 0.0, 2.0 * M_PI);
        w.amplitude = u_range(rng, 0.5, 1.0);
    }
    Eigen::Index i = 0;
    for (int y = 0; y < size; ++y)
    {
        const double v = (y + 0.5) / size;
        for (int x = 0; x < size; ++x)
        {
            const double u = (x + 0.5) / size;
            Eigen::Vector3d c = Eigen::Vector3d::Zero();
            for (const auto& w : waves)
                c += w.amplitude * std::cos(w.fu * u + w.fv * v + w.phase) * w.color;
            field.segment<3>(i) = c;
            i += 3;
        }
    }
    return field;
}

inline core::ImageRgb make_mean_face_texture(int size)
{
    core::ImageRgb tex(size, size);
    for (int y = 0; y < size; ++y)
    {
        const double v = (y + 0.5) / size;
        for (int x = 0; x < size; ++x)
        {
            const double u = (x + 0.5) / size;
            Eigen::Vector3d c(0.72, 0.56, 0.47);
            c *= 1.0 - 0.15 * (v - 0.5);                              // vertical shading
            c *= 1.0 - 0.20 * std::exp(-std::pow((v - 0.16) / 0.09, 2.0)); // brow band
            const double blotch = 0.05 * std::sin(5.1 * u + 1.3) * std::sin(4.3 * v + 0.7) +
                                  0.03 * std::sin(9.7 * u + 0.4) * std::sin(8.9 * v + 2.1);
            c.array() += blotch;
            for (int k = 0; k < 3; ++k)
                tex(x, y)[k] = std::clamp(c[k], 0.12, 0.92);
        }
    }
    return tex;
}

/// Paints the base eyeball texture and its iris/sclera partition masks.
inline void make_eyeball_texture(model::EyeballGeometry& geom, int size)
{
    geom.texture = core::ImageRgb(size, size);
    geom.iris_mask = core::ImageGray(size, size);
    geom.sclera_mask = core::ImageGray(size, size);

    const double theta_limbus = geom.limbus_angle();
    const double theta_pupil = std::asin(2.0 / geom.sclera_radius);
    const double band = model::deg_to_rad(2.0);

    for (int y = 0; y < size; ++y)
    {
        for (int x = 0; x < size; ++x)
        {
            const double du = (x + 0.5) / size - 0.5;
            const double dv = (y + 0.5) / size - 0.5;
            const double rho = std::hypot(du, dv);
            const double theta = std::min(geom.theta_from_uv_radius(rho), M_PI);
            const double phi = std::atan2(dv, du);

            // Iris: radial fibre pattern, darker rim, soft pupil.
            const double fibre = 0.5 + 0.5 * std::sin(16.0 * phi + 1.7 * std::sin(3.0 * phi + 0.9));
            Eigen::Vector3d iris(0.30, 0.34, 0.40);
            iris *= 0.80 + 0.35 * fibre;
            iris *= 1.0 - 0.35 * smoothstep(0.55 * theta_limbus, theta_limbus, theta);
            const double pupil_t = smoothstep(theta_pupil - band, theta_pupil + band, theta);
            iris = (1.0 - pupil_t) * Eigen::Vector3d(0.02, 0.02, 0.02) + pupil_t * iris;

            // Sclera: warm white with faint radial veins.
            Eigen::Vector3d sclera(0.93, 0.89, 0.87);
            const double vein =
                std::pow(std::max(0.0, std::sin(9.0 * phi + 3.0 * std::sin(2.0 * phi + 1.0))), 8.0);
            sclera[1] -= 0.10 * vein;
            sclera[2] -= 0.12 * vein;
            sclera *= 1.0 - 0.25 * smoothstep(0.5 * M_PI, M_PI, theta);

            const double limb_t =
                smoothstep(theta_limbus - 1.25 * band, theta_limbus + 1.25 * band, theta);
            Eigen::Vector3d c = (1.0 - limb_t) * iris + limb_t * sclera;
            // Dark limbal ring.
            const double ring = std::exp(-std::pow((theta - theta_limbus) / band, 2.0));
            c *= 1.0 - 0.40 * ring;

            geom.texture(x, y) = c;
            geom.iris_mask(x, y) = 1.0 - limb_t;
            geom.sclera_mask(x, y) = limb_t;
        }
    }
}

} // namespace detail

/**
 * @brief Builds the synthetic model in memory at double precision.
 *
 * The in-memory model satisfies the orthonormality invariants to ~1e-12;
 * serializing through generate_model quantizes to the float32 asset format.
 */
inline model::EyeRegionModel build_model(const SyntheticModelSpec& spec)
{
    using namespace detail;
    std::mt19937_64 rng(spec.seed);

    model::EyeRegionModel m;
    const FacePartGrid grid = build_face_grid();
    m.topology = grid.triangles;
    m.mu_geo.resize(3 * model::kFaceVertexCount);
    for (int v = 0; v < model::kFaceVertexCount; ++v)
        m.mu_geo.segment<3>(3 * v) = grid.positions[v];

    // Shape basis: smooth random fields, orthonormalized.
    Eigen::MatrixXd shape_raw(3 * model::kFaceVertexCount, model::kShapeModes);
    for (int k = 0; k < model::kShapeModes; ++k)
        shape_raw.col(k) = smooth_shape_field(rng, grid.positions);
    orthonormalize_columns(shape_raw);
    m.shape_basis = shape_raw;
    m.sigma_geo.resize(model::kShapeModes);
    for (int k = 0; k < model::kShapeModes; ++k)
        m.sigma_geo[k] = spec.shape_amplitude * 30.0 * std::pow(0.87, k);

    // Texture model.
    m.mu_tex = make_mean_face_texture(spec.texture_size);
    Eigen::MatrixXd tex_raw(static_cast<Eigen::Index>(spec.texture_size) * spec.texture_size * 3,
                            model::kTextureModes);
    for (int k = 0; k < model::kTextureModes; ++k)
        tex_raw.col(k) = smooth_texture_field(rng, spec.texture_size);
    orthonormalize_columns(tex_raw);
    m.texture_basis = tex_raw;
    m.sigma_tex.resize(model::kTextureModes);
    for (int k = 0; k < model::kTextureModes; ++k)
        m.sigma_tex[k] = spec.texture_amplitude * 20.0 * std::pow(0.80, k);

    // Texture coordinates: planar projection of the rest positions.
    Eigen::Vector2d lo(1e30, 1e30), hi(-1e30, -1e30);
    for (const auto& p : grid.positions)
    {
        lo = lo.cwiseMin(p.head<2>());
        hi = hi.cwiseMax(p.head<2>());
    }
    m.face_uv.resize(model::kFaceVertexCount);
    for (int v = 0; v < model::kFaceVertexCount; ++v)
    {
        const auto& p = grid.positions[v];
        m.face_uv[v] = {0.05 + 0.90 * (p.x() - lo.x()) / (hi.x() - lo.x()),
                        0.05 + 0.90 * (hi.y() - p.y()) / (hi.y() - lo.y())};
    }

    // Eyelid rig: weight 1 at the margin falling to 0 by two-thirds of the
    // way to the orbit, tapered to 0 at the corners; lower lid at half gain.
    m.eyelid_weights.assign(model::kFaceVertexCount, 0.0);
    for (int r = 0; r < kRings; ++r)
    {
        const double t = static_cast<double>(r) / (kRings - 1);
        const double radial = 1.0 - smoothstep(0.0, 0.65, t);
        for (int a = 0; a < kAngular; ++a)
        {
            const double phi = 2.0 * M_PI * a / kAngular;
            const double taper = std::pow(std::abs(std::sin(phi)), 1.5);
            const double gain = std::sin(phi) > 0.0 ? 1.0 : 0.55;
            m.eyelid_weights[ring_vertex(r, a)] = radial * taper * gain;
        }
    }
    m.eyelid_axis = {ring_vertex(0, 0), ring_vertex(0, kAngular / 2)};

    // Landmarks: eyelid margins and brows per part, shared nose bridge.
    auto single = [](int global, const std::string& name) {
        model::LandmarkRow row;
        row.vertex = {global, global, global};
        row.weight = {1.0, 0.0, 0.0};
        row.name = name;
        return row;
    };
    auto blend2 = [](int g0, int g1, double w0, const std::string& name) {
        model::LandmarkRow row;
        row.vertex = {g0, g1, g0};
        row.weight = {w0, 1.0 - w0, 0.0};
        row.name = name;
        return row;
    };
    m.landmarks.clear();
    const char* side_tag[2] = {"l", "r"};
    for (int side = 0; side < 2; ++side)
    {
        const int base = side * model::kFaceVertexCount;
        for (int i = 0; i < 5; ++i)
        {
            const int a = 3 + 2 * i; // brow arc
            m.landmarks.push_back(blend2(base + ring_vertex(6, a), base + ring_vertex(7, a), 0.55,
                                         std::string("brow_") + side_tag[side] + "_" +
                                             std::to_string(i)));
        }
    }
    m.landmarks.push_back(blend2(ring_vertex(7, 1), model::kFaceVertexCount + ring_vertex(7, 1), 0.5,
                                 "nose_upper"));
    m.landmarks.push_back(blend2(ring_vertex(7, 0), model::kFaceVertexCount + ring_vertex(7, 0), 0.5,
                                 "nose_bridge"));
    m.landmarks.push_back(blend2(ring_vertex(7, kAngular - 1),
                                 model::kFaceVertexCount + ring_vertex(7, kAngular - 1), 0.5,
                                 "nose_lower"));
    for (int side = 0; side < 2; ++side)
    {
        const int base = side * model::kFaceVertexCount;
        const int upper[3] = {4, 7, 10};
        const int lower[3] = {18, 21, 24};
        for (int i = 0; i < 3; ++i)
            m.landmarks.push_back(single(base + ring_vertex(0, upper[i]),
                                         std::string("lid_") + side_tag[side] + "_u" +
                                             std::to_string(i)));
        for (int i = 0; i < 3; ++i)
            m.landmarks.push_back(single(base + ring_vertex(0, lower[i]),
                                         std::string("lid_") + side_tag[side] + "_d" +
                                             std::to_string(i)));
    }

    detail::make_eyeball_texture(m.eyeball, spec.eyeball_texture_size);
    m.iod_default = 62.0;
    m.beta_iris_default = 1.0;

    m.finalize();
    m.validate(1e-9);
    return m;
}

/// Builds the synthetic model and serializes it as an asset directory.
inline void generate_model(const SyntheticModelSpec& spec, const std::string& directory)
{
    save_asset(build_model(spec), directory);
}

} // namespace testkit
} // namespace gazekit

#endif /* GAZEKIT_TESTKIT_SYNTHETIC_HPP */
