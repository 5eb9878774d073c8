/*
 * gazekit - eye region model fitting and gaze redirection in modern C++.
 *
 * File: include/gazekit/render/subdivision.hpp
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

#ifndef GAZEKIT_RENDER_SUBDIVISION_HPP
#define GAZEKIT_RENDER_SUBDIVISION_HPP

#include "Eigen/Core"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gazekit {
namespace render {

/**
 * @brief Precomputed one-step Loop subdivision weights.
 *
 * Each refined vertex is a fixed linear combination of coarse vertices, so a
 * subdivision step reduces to one sparse matrix application per attribute.
 * Rows are stored in CSR form. Refined vertex i < coarse_vertex_count is the
 * repositioned coarse vertex i; the remaining rows are edge midpoints in
 * edge-discovery order.
 */
struct SubdivisionStencils
{
    int coarse_vertex_count = 0;
    int refined_vertex_count = 0;
    std::vector<Eigen::Vector3i> refined_triangles;
    std::vector<std::int32_t> row_offsets;  ///< size refined_vertex_count + 1
    std::vector<std::int32_t> column_index; ///< coarse vertex per entry
    std::vector<double> weight;             ///< stencil weight per entry

    /// Applies the stencils to any per-vertex attribute (positions, uv, flow).
    template <typename Attr>
    std::vector<Attr> apply(const std::vector<Attr>& coarse) const
    {
        if (static_cast<int>(coarse.size()) != coarse_vertex_count)
            throw std::invalid_argument("SubdivisionStencils::apply: attribute count mismatch");
        std::vector<Attr> refined(refined_vertex_count);
        for (int i = 0; i < refined_vertex_count; ++i)
        {
            Attr acc = weight[row_offsets[i]] * coarse[column_index[row_offsets[i]]];
            for (std::int32_t e = row_offsets[i] + 1; e < row_offsets[i + 1]; ++e)
                acc += weight[e] * coarse[column_index[e]];
            refined[i] = acc;
        }
        return refined;
    }
};

namespace detail {

/// Loop's interior even-vertex weight for valence k.
inline double loop_beta(int k)
{
    const double c = 3.0 / 8.0 + 0.25 * std::cos(2.0 * M_PI / k);
    return (5.0 / 8.0 - c * c) / k;
}

} // namespace detail

/**
 * @brief Builds one-step Loop subdivision stencils for a manifold triangle
 * mesh (boundaries handled with the standard crease rules).
 *
 * @throws std::invalid_argument on non-manifold input (an edge shared by more
 * than two triangles, or a boundary vertex without exactly two boundary
 * neighbours).
 */
inline SubdivisionStencils build_loop_stencils(const std::vector<Eigen::Vector3i>& triangles,
                                               int vertex_count)
{
    struct EdgeInfo
    {
        int refined_index = -1;
        int opposite[2] = {-1, -1};
        int triangle_count = 0;
    };

    std::map<std::pair<int, int>, EdgeInfo> edges;
    auto edge_key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };

    SubdivisionStencils st;
    st.coarse_vertex_count = vertex_count;

    int next_index = vertex_count;
    for (const auto& tri : triangles)
    {
        for (int e = 0; e < 3; ++e)
        {
            const int a = tri[e];
            const int b = tri[(e + 1) % 3];
            const int opposite = tri[(e + 2) % 3];
            if (a < 0 || a >= vertex_count || b < 0 || b >= vertex_count || a == b)
                throw std::invalid_argument("build_loop_stencils: bad triangle index");
            auto& info = edges[edge_key(a, b)];
            if (info.triangle_count >= 2)
                throw std::invalid_argument("build_loop_stencils: non-manifold edge");
            if (info.triangle_count == 0)
                info.refined_index = next_index++;
            info.opposite[info.triangle_count] = opposite;
            ++info.triangle_count;
        }
    }
    st.refined_vertex_count = next_index;

    // Vertex adjacency and boundary neighbours.
    std::vector<std::vector<int>> neighbours(vertex_count);
    std::vector<std::vector<int>> boundary_neighbours(vertex_count);
    for (const auto& [key, info] : edges)
    {
        neighbours[key.first].push_back(key.second);
        neighbours[key.second].push_back(key.first);
        if (info.triangle_count == 1)
        {
            boundary_neighbours[key.first].push_back(key.second);
            boundary_neighbours[key.second].push_back(key.first);
        }
    }

    std::vector<std::vector<std::pair<int, double>>> rows(st.refined_vertex_count);

    // Even vertices (repositioned originals).
    for (int v = 0; v < vertex_count; ++v)
    {
        auto& row = rows[v];
        if (!boundary_neighbours[v].empty())
        {
            if (boundary_neighbours[v].size() != 2)
                throw std::invalid_argument("build_loop_stencils: non-manifold boundary vertex");
            row.push_back({v, 0.75});
            row.push_back({boundary_neighbours[v][0], 0.125});
            row.push_back({boundary_neighbours[v][1], 0.125});
        } else if (neighbours[v].empty())
        {
            row.push_back({v, 1.0}); // isolated vertex passes through
        } else
        {
            const int k = static_cast<int>(neighbours[v].size());
            const double beta = detail::loop_beta(k);
            row.push_back({v, 1.0 - k * beta});
            for (const int n : neighbours[v])
                row.push_back({n, beta});
        }
    }

    // Odd vertices (one per edge).
    for (const auto& [key, info] : edges)
    {
        auto& row = rows[info.refined_index];
        if (info.triangle_count == 2)
        {
            row.push_back({key.first, 0.375});
            row.push_back({key.second, 0.375});
            row.push_back({info.opposite[0], 0.125});
            row.push_back({info.opposite[1], 0.125});
        } else
        {
            row.push_back({key.first, 0.5});
            row.push_back({key.second, 0.5});
        }
    }

    // Refined topology: each triangle splits into four.
    st.refined_triangles.reserve(triangles.size() * 4);
    for (const auto& tri : triangles)
    {
        const int ab = edges[edge_key(tri[0], tri[1])].refined_index;
        const int bc = edges[edge_key(tri[1], tri[2])].refined_index;
        const int ca = edges[edge_key(tri[2], tri[0])].refined_index;
        st.refined_triangles.push_back({tri[0], ab, ca});
        st.refined_triangles.push_back({tri[1], bc, ab});
        st.refined_triangles.push_back({tri[2], ca, bc});
        st.refined_triangles.push_back({ab, bc, ca});
    }

    // Pack CSR.
    st.row_offsets.resize(st.refined_vertex_count + 1, 0);
    std::size_t total = 0;
    for (int i = 0; i < st.refined_vertex_count; ++i)
    {
        st.row_offsets[i] = static_cast<std::int32_t>(total);
        total += rows[i].size();
    }
    st.row_offsets[st.refined_vertex_count] = static_cast<std::int32_t>(total);
    st.column_index.reserve(total);
    st.weight.reserve(total);
    for (const auto& row : rows)
    {
        for (const auto& [index, w] : row)
        {
            st.column_index.push_back(index);
            st.weight.push_back(w);
        }
    }
    return st;
}

} // namespace render
} // namespace gazekit

#endif /* GAZEKIT_RENDER_SUBDIVISION_HPP */
