// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/dec.hpp"
#include "surfflow/mesh.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace surfflow::testing {

inline constexpr double pi = std::numbers::pi;

inline Eigen::VectorXd gaussian_vector(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
}

inline Eigen::VectorXd remove_mean(const Dec& dec, Eigen::VectorXd f)
{
    f.array() -= dec.mean(Cochain0{f});
    return f;
}

inline double mass_norm(const Eigen::VectorXd& mass, const Eigen::VectorXd& f)
{
    return std::sqrt(f.cwiseAbs2().dot(mass));
}

inline double relative_error(const Eigen::VectorXd& mass, const Eigen::VectorXd& got, const Eigen::VectorXd& want)
{
    return mass_norm(mass, got - want) / mass_norm(mass, want);
}

/// Random trigonometric polynomial of degree <= `degree` on the torus chart.
inline Eigen::VectorXd torus_trig_field(const TriangleMesh& mesh, int degree, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    const auto& chart = *mesh.chart();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int a = -degree; a <= degree; ++a) {
        for (int b = 0; b <= degree; ++b) {
            if (a * a + b * b == 0 || a * a + b * b > degree * degree) continue;
            const double c = normal(rng), s = normal(rng);
            for (int v = 0; v < mesh.num_vertices(); ++v) {
                const double phase = 2 * pi * (a * chart(v, 0) + b * chart(v, 1));
                f[v] += c * std::cos(phase) + s * std::sin(phase);
            }
        }
    }
    return f;
}

/// Random polynomial of total degree <= 4 in the ambient coordinates.
inline Eigen::VectorXd sphere_poly_field(const TriangleMesh& mesh, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    std::vector<std::array<int, 3>> monomials;
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; a + b <= 4; ++b)
            for (int c = 0; a + b + c <= 4; ++c) monomials.push_back({a, b, c});
    Eigen::VectorXd coeff(monomials.size());
    for (auto& x : coeff) x = normal(rng);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto p = mesh.positions().row(v);
        for (std::size_t m = 0; m < monomials.size(); ++m)
            f[v] += coeff[m] * std::pow(p.x(), monomials[m][0]) * std::pow(p.y(), monomials[m][1])
                    * std::pow(p.z(), monomials[m][2]);
    }
    return f;
}

/// Mean-zero vorticity corpus: smooth fields plus white noise.
inline std::vector<Eigen::VectorXd> vorticity_corpus(const Dec& dec, int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const TriangleMesh& mesh = dec.mesh();
    std::vector<Eigen::VectorXd> corpus;
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd f;
        if (i % 4 == 3) {
            f = gaussian_vector(mesh.num_vertices(), rng);
        } else if (mesh.model() == SurfaceModel::flat_torus) {
            f = torus_trig_field(mesh, 2 + i % 5, rng);
        } else {
            f = sphere_poly_field(mesh, rng);
        }
        corpus.push_back(remove_mean(dec, f));
    }
    return corpus;
}

/// Flux cochain of an ambient velocity field: edge integral of -J v at the midpoint.
template <class Field>
Cochain1 flux_of(const TriangleMesh& mesh, Field&& velocity)
{
    Cochain1 out{Eigen::VectorXd(mesh.num_edges())};
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Eigen::Vector3d p0 = mesh.positions().row(mesh.edges()[e][0]).head<3>();
        const Eigen::Vector3d p1 = mesh.positions().row(mesh.edges()[e][1]).head<3>();
        const Eigen::Vector3d m = 0.5 * (p0 + p1);
        const Eigen::Vector3d n = m.normalized();
        const Eigen::Vector3d v = velocity(m);
        out.values[e] = -(n.cross(v)).dot(p1 - p0);
    }
    return out;
}

} // namespace surfflow::testing
