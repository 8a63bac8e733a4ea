// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "surfflow/fourier.hpp"
#include "surfflow/hodge.hpp"
#include "surfflow/surface.hpp"

using namespace surfflow;
using namespace surfflow::testing;

namespace {

double star1_norm(const Dec& dec, const Eigen::VectorXd& a) { return std::sqrt(a.dot(dec.star1().cwiseProduct(a))); }

/// Mesh Biot-Savart of sin(2 pi x) against the FFT oracle, relative L2 at vertices.
double oracle_error(int n)
{
    const TriangleMesh mesh = make_flat_torus(n);
    const Dec dec(mesh);
    const HodgeSolver hodge(dec);
    const auto& chart = *mesh.chart();
    Eigen::MatrixXd grid(n, n);
    Eigen::VectorXd omega(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        omega[v] = std::sin(2 * pi * chart(v, 0));
        grid(v % n, v / n) = omega[v];
    }
    const GridVelocity exact = fourier_biot_savart(grid);
    const DivFreeVelocity vel = hodge.biot_savart(Cochain0{remove_mean(dec, omega)}, CohomologyClass::zero(2));
    const Eigen::MatrixXd mesh_v = vertex_vectors(mesh, hodge.velocity(vel));
    double err = 0.0, ref = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Eigen::Vector2d want(exact.u(v % n, v / n), exact.v(v % n, v / n));
        err += mesh.vertex_areas()[v] * (mesh_v.row(v).transpose() - want).squaredNorm();
        ref += mesh.vertex_areas()[v] * want.squaredNorm();
    }
    return std::sqrt(err / ref);
}

} // namespace

TEST_CASE("harmonic basis dimension")
{
    const TriangleMesh sphere = make_icosphere(3);
    CHECK(harmonic_basis(Dec(sphere)).size() == 0);

    for (const TriangleMesh& mesh : {make_flat_torus(16), load_mesh(SURFFLOW_TEST_DATA "/genus2.obj")}) {
        const Dec dec(mesh);
        const HarmonicBasis basis = harmonic_basis(dec);
        CHECK(basis.size() == 2 * mesh.genus());
        for (const Cochain1& h : basis.forms) {
            CHECK(star1_norm(dec, h.values) == doctest::Approx(1.0));
            const double dh = std::sqrt(dec.inner(dec.d(h), dec.d(h)));
            const double codh = dec.norm(dec.codifferential(h));
            CHECK(dh <= 1e-9);
            CHECK(codh <= 1e-9);
        }
    }
}

TEST_CASE("torus harmonic forms span dx and dy")
{
    const TriangleMesh mesh = make_flat_torus(16);
    const Dec dec(mesh);
    const HarmonicBasis basis = harmonic_basis(dec);
    REQUIRE(basis.size() == 2);
    const auto& chart = *mesh.chart();
    for (int axis = 0; axis < 2; ++axis) {
        Eigen::VectorXd d(mesh.num_edges());
        for (int e = 0; e < mesh.num_edges(); ++e) {
            double gap = chart(mesh.edges()[e][1], axis) - chart(mesh.edges()[e][0], axis);
            d[e] = gap - std::round(gap);
        }
        Eigen::VectorXd rest = d;
        for (const Cochain1& h : basis.forms) rest -= h.values.dot(dec.star1().cwiseProduct(d)) * h.values;
        CHECK(rest.cwiseAbs().maxCoeff() <= 1e-10);
        // period of the lattice direction: the loop along the axis integrates to 1
        double period = 0.0;
        for (int i = 0; i < 16; ++i) {
            const int a = axis == 0 ? i : 16 * i, b = axis == 0 ? (i + 1) % 16 : 16 * ((i + 1) % 16);
            for (int e = 0; e < mesh.num_edges(); ++e) {
                if (mesh.edges()[e] == std::array<int, 2>{std::min(a, b), std::max(a, b)})
                    period += (a < b ? 1 : -1) * d[e];
            }
        }
        CHECK(period == doctest::Approx(1.0));
    }
}

TEST_CASE("Hodge decomposition")
{
    const TriangleMesh mesh = make_flat_torus(32);
    const Dec dec(mesh);
    const HodgeSolver hodge(dec);
    std::mt19937_64 rng(21);

    const Cochain0 f{gaussian_vector(mesh.num_vertices(), rng)};
    const Cochain1 df = dec.d(f);
    HodgeParts parts = hodge.decompose(df);
    CHECK(star1_norm(dec, parts.exact.values - df.values) <= 1e-9 * star1_norm(dec, df.values));
    CHECK(star1_norm(dec, parts.coexact.values) <= 1e-9 * star1_norm(dec, df.values));
    CHECK(star1_norm(dec, parts.harmonic.values) <= 1e-9 * star1_norm(dec, df.values));

    const Cochain1 h = hodge.harmonic().forms[1];
    parts = hodge.decompose(h);
    CHECK(star1_norm(dec, parts.exact.values) <= 1e-9);
    CHECK(star1_norm(dec, parts.coexact.values) <= 1e-9);
    CHECK(star1_norm(dec, parts.harmonic.values - h.values) <= 1e-9);

    const Cochain1 alpha{gaussian_vector(mesh.num_edges(), rng)};
    parts = hodge.decompose(alpha);
    const double scale = dec.inner(alpha, alpha);
    CHECK(std::abs(dec.inner(parts.exact, parts.coexact)) <= 1e-9 * scale);
    CHECK(std::abs(dec.inner(parts.exact, parts.harmonic)) <= 1e-9 * scale);
    CHECK(std::abs(dec.inner(parts.coexact, parts.harmonic)) <= 1e-9 * scale);
    const Eigen::VectorXd sum = parts.exact.values + parts.coexact.values + parts.harmonic.values;
    CHECK((sum - alpha.values).norm() <= 1e-9 * alpha.values.norm());
}

TEST_CASE("Biot-Savart is a right inverse of curl")
{
    for (const TriangleMesh& mesh : {make_flat_torus(32), make_icosphere(3), load_mesh(SURFFLOW_TEST_DATA "/genus2.obj")}) {
        const Dec dec(mesh);
        const HodgeSolver hodge(dec);
        std::mt19937_64 rng(5);
        for (const Eigen::VectorXd& omega : vorticity_corpus(dec, 8, 17)) {
            const CohomologyClass cls{gaussian_vector(hodge.cohomology_dimension(), rng)};
            const DivFreeVelocity v = hodge.biot_savart(Cochain0{omega}, cls);
            CHECK(relative_error(dec.star0(), hodge.curl(v).values, omega) <= 1e-8);
            const double div = hodge.divergence(v).values.cwiseAbs().maxCoeff();
            CHECK(div <= 1e-9 * std::max(1.0, v.flux.values.cwiseAbs().maxCoeff() * dec.star2().maxCoeff()));
            const CohomologyClass back = hodge.class_of(v.flux);
            CHECK((back.coefficients - cls.coefficients).norm() <= 1e-9);

            // left inverse on divergence-free fields
            const DivFreeVelocity again = hodge.biot_savart(hodge.curl(v), hodge.class_of(v.flux));
            CHECK(star1_norm(dec, again.flux.values - v.flux.values) <= 1e-8 * star1_norm(dec, v.flux.values));

            // changing the class only adds a harmonic form
            const CohomologyClass other{gaussian_vector(hodge.cohomology_dimension(), rng)};
            const DivFreeVelocity w = hodge.biot_savart(Cochain0{omega}, other);
            const HodgeParts diff = hodge.decompose(Cochain1{w.flux.values - v.flux.values});
            CHECK(star1_norm(dec, diff.exact.values) <= 1e-9 * std::max(1.0, star1_norm(dec, v.flux.values)));
            CHECK(star1_norm(dec, diff.coexact.values) <= 1e-9 * std::max(1.0, star1_norm(dec, v.flux.values)));
        }
    }
}

TEST_CASE("Biot-Savart edge cases")
{
    const TriangleMesh mesh = make_flat_torus(16);
    const Dec dec(mesh);
    const HodgeSolver hodge(dec);
    const Cochain0 zero{Eigen::VectorXd::Zero(mesh.num_vertices())};
    CHECK(hodge.biot_savart(zero, CohomologyClass::zero(2)).flux.values.norm() == 0.0);

    const CohomologyClass cls{Eigen::Vector2d(0.3, -1.2)};
    const DivFreeVelocity pure = hodge.biot_savart(zero, cls);
    const Cochain1 h = hodge.harmonic_part(pure.flux);
    CHECK((h.values - pure.flux.values).norm() <= 1e-12);
    CHECK(hodge.curl(pure).values.cwiseAbs().maxCoeff() <= 1e-9);

    const Cochain0 one{Eigen::VectorXd::Ones(mesh.num_vertices())};
    CHECK_THROWS_AS(hodge.biot_savart(one, CohomologyClass::zero(2)), HodgeError);
    CHECK_THROWS_AS(hodge.biot_savart(zero, CohomologyClass::zero(3)), HodgeError);
}

TEST_CASE("Killing rotation on the sphere has vorticity 2z")
{
    const TriangleMesh mesh = make_icosphere(5);
    const Dec dec(mesh);
    const HodgeSolver hodge(dec);
    const Cochain1 flux = flux_of(mesh, [](const Eigen::Vector3d& p) { return Eigen::Vector3d(-p.y(), p.x(), 0.0); });
    // midpoint fluxes are not exactly closed; the curl only needs the flux
    CHECK_THROWS_AS(hodge.from_flux(flux), HodgeError);
    const DivFreeVelocity v{flux, CohomologyClass::zero(0), {}};
    Eigen::VectorXd expected(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) expected[i] = 2.0 * mesh.positions()(i, 2);
    const double err = relative_error(dec.star0(), hodge.curl(v).values, expected);
    MESSAGE("Killing curl relative L2 error ", err);
    CHECK(err <= 0.02);
}

TEST_CASE("Fourier oracle")
{
    const int n = 32;
    Eigen::MatrixXd omega(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) omega(i, j) = std::sin(2 * pi * i / n);
    const GridVelocity v = fourier_biot_savart(omega);
    for (int i = 0; i < n; ++i) {
        CHECK(std::abs(v.u(i, 3)) <= 1e-14);
        CHECK(v.v(i, 5) == doctest::Approx(-std::cos(2 * pi * i / n) / (2 * pi)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(fourier_biot_savart(Eigen::MatrixXd::Ones(n, n)), FourierError);
    CHECK_THROWS_AS(fourier_biot_savart(Eigen::MatrixXd::Zero(24, 24)), FourierError);

    // band-limited random field: spectral identities hold to rounding
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int a = -4; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b) {
            if (a == 0 && b == 0) continue;
            const double c = normal(rng), s = normal(rng);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double phase = 2 * pi * (a * i + b * j) / n;
                    w(i, j) += c * std::cos(phase) + s * std::sin(phase);
                }
        }
    w.array() -= w.mean();
    const GridVelocity u = fourier_biot_savart(w);
    CHECK(fourier_divergence(u).cwiseAbs().maxCoeff() <= 1e-12 * w.cwiseAbs().maxCoeff());
    CHECK((fourier_curl(u) - w).cwiseAbs().maxCoeff() <= 1e-12 * w.cwiseAbs().maxCoeff());
}

TEST_CASE("mesh Biot-Savart against the Fourier oracle")
{
    const double e64 = oracle_error(64);
    const double e128 = oracle_error(128);
    MESSAGE("relative L2 error: 64 -> ", e64, ", 128 -> ", e128, ", ratio ", e64 / e128);
    CHECK(e64 <= 0.02);
    CHECK(e128 <= 0.006);
}
