// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "surfflow/microglobal.hpp"
#include "surfflow/surface.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

using namespace surfflow;
using testing::pi;

namespace {

FlowMap map_from(const TriangleMesh& mesh, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& g)
{
    const TriangleLocator faces = face_locator(mesh);
    FlowMap phi;
    for (int v = 0; v < mesh.num_vertices(); ++v) phi.image.push_back(locate_point(faces, g(vertex_coordinates(mesh, v))));
    return phi;
}

Eigen::VectorXd vertex_function(const TriangleMesh& mesh, const std::function<double(const Eigen::Vector3d&)>& f)
{
    Eigen::VectorXd out(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) out[v] = f(vertex_coordinates(mesh, v));
    return out;
}

Eigen::Vector3d wrap(double x, double y) { return {x - std::floor(x), y - std::floor(y), 0.0}; }

// x += a sin(2 pi y), then y += b sin(2 pi x), and its inverse.
Eigen::Vector3d double_shear(const Eigen::Vector3d& p, double a, double b)
{
    const double x = p.x() + a * std::sin(2 * pi * p.y());
    return wrap(x, p.y() + b * std::sin(2 * pi * x));
}

Eigen::Vector3d double_shear_inverse(const Eigen::Vector3d& p, double a, double b)
{
    const double y = p.y() - b * std::sin(2 * pi * p.x());
    return wrap(p.x() - a * std::sin(2 * pi * y), y);
}

double chain_rule_error(int n)
{
    const TriangleMesh torus = make_flat_torus(n);
    const FlowMap phi = map_from(torus, [](const Eigen::Vector3d& p) { return double_shear(p, 0.05, 0.04); });
    const FlowMap psi = map_from(torus, [](const Eigen::Vector3d& p) { return double_shear_inverse(p, 0.05, 0.04); });
    const EmbeddedFlow e = embed_flow(torus, phi, psi);
    double err = 0.0;
    for (int v = 0; v < torus.num_vertices(); ++v)
        err = std::max(err, (e.DPsiAtImage[v] * e.DPhi[v] - embedded_projector(torus, v)).norm());
    return err;
}

Eigen::Matrix3d rotation(const Eigen::Vector3d& axis, double angle)
{
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

FlowMap sphere_rotation(const TriangleMesh& sphere, const Eigen::Matrix3d& R)
{
    return map_from(sphere, [&](const Eigen::Vector3d& p) -> Eigen::Vector3d { return R * p; });
}

struct SmallTorus {
    TriangleMesh mesh = make_flat_torus(32);
    Dec dec{mesh};
    HodgeSolver hodge{dec};
    SpectralBasis basis = compute_spectral_basis(dec, 120);
    Paracalculus para{basis};
};

const SmallTorus& small_torus()
{
    static const SmallTorus fixture;
    return fixture;
}

} // namespace

TEST_CASE("embedded flows")
{
    const TriangleMesh torus = make_flat_torus(16);
    const FlowMap id = FlowMap::identity(torus);
    const EmbeddedFlow e = embed_flow(torus, id, id);
    CHECK(e.Phi.cols() == 4);
    for (int v = 0; v < torus.num_vertices(); ++v) {
        CHECK((e.Phi.row(v).transpose() - embed(torus, vertex_coordinates(torus, v))).norm() < 1e-12);
        CHECK((e.DPhi[v] - embedded_projector(torus, v)).norm() < 1e-10);
        CHECK((e.DPsiAtImage[v] - embedded_projector(torus, v)).norm() < 1e-10);
    }

    const TriangleMesh sphere = make_icosphere(3);
    const Eigen::Matrix3d R = rotation({1.0, 2.0, 3.0}, 0.7);
    const EmbeddedFlow r = embed_flow(sphere, sphere_rotation(sphere, R), sphere_rotation(sphere, R.transpose()));
    double err = 0.0;
    for (int v = 0; v < sphere.num_vertices(); ++v) err = std::max(err, (r.DPhi[v] - R * embedded_projector(sphere, v)).norm());
    CHECK(err < 1e-6);

    const double coarse = chain_rule_error(32), fine = chain_rule_error(64);
    MESSAGE("chain rule error " << coarse << " -> " << fine);
    CHECK(fine < 2e-2);
    CHECK(coarse / fine > 3.0);

    FlowMap short_map = id;
    short_map.image.pop_back();
    CHECK_THROWS_AS(embed_flow(torus, short_map, id), ProbeError);
}

TEST_CASE("W and its time derivative")
{
    const SmallTorus& t = small_torus();
    const FlowMap id = FlowMap::identity(t.mesh);
    const EmbeddedFlow e = embed_flow(t.mesh, id, id);
    const WQuantity w = compute_W(t.para, e, 0.0);
    REQUIRE(w.W.rows() == t.mesh.num_vertices());
    // smooth inputs: the energy sits in the lowest modes
    for (int i = 0; i < w.W.cols(); ++i) {
        const Eigen::VectorXd c = t.basis.eigenvectors.transpose() * t.basis.mass.asDiagonal() * w.W.col(i);
        CHECK(c.head(20).squaredNorm() >= 0.999 * c.squaredNorm());
    }

    EmbeddedFlow zero = e;
    zero.Phi.setZero();
    CHECK(compute_W(t.para, zero, 0.0).W.norm() == 0.0);
    zero = e;
    for (auto& m : zero.DPsiAtImage) m.setZero();
    CHECK(compute_W(t.para, zero, 0.0).W.norm() == 0.0);

    WQuantity before = w, after = w;
    before.time = -0.1;
    after.time = 0.1;
    CHECK(compute_U(t.mesh, before, w, after).norm() == 0.0);
    before.time = -1e-9;
    after.time = 1e-9;
    CHECK_THROWS_AS(compute_U(t.mesh, before, w, after), ProbeError);
    before.time = -0.1;
    after.time = 0.2;
    CHECK_THROWS_AS(compute_U(t.mesh, before, w, after), ProbeError);
}

TEST_CASE("U under a steady rotation")
{
    const TriangleMesh sphere = make_icosphere(3);
    const Dec dec(sphere);
    const SpectralBasis basis = compute_spectral_basis(dec, 60);
    const Paracalculus para(basis);
    const Eigen::Vector3d axis(0.0, 0.0, 1.0);
    auto W = [&](double time) {
        const Eigen::Matrix3d R = rotation(axis, time);
        return compute_W(para, embed_flow(sphere, sphere_rotation(sphere, R), sphere_rotation(sphere, R.transpose())), time);
    };
    // unit angular speed: |v| = distance to the axis
    double speed = 0.0;
    for (int v = 0; v < sphere.num_vertices(); ++v) speed += sphere.positions().row(v).head<2>().squaredNorm();
    speed = std::sqrt(speed);
    std::vector<double> norms;
    for (double time : {0.3, 0.6, 0.9}) norms.push_back(compute_U(sphere, W(time - 0.05), W(time), W(time + 0.05)).norm());
    const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
    MESSAGE("|U| over time " << norms[0] << " " << norms[1] << " " << norms[2] << " against |v| " << speed);
    CHECK(*hi - *lo <= 0.02 * speed);
}

TEST_CASE("U is a second order difference")
{
    const SmallTorus& t = small_torus();
    auto W = [&](double time) {
        const double a = 0.05 * time, b = 0.04 * time;
        const FlowMap phi = map_from(t.mesh, [&](const Eigen::Vector3d& p) { return double_shear(p, a, b); });
        const FlowMap psi = map_from(t.mesh, [&](const Eigen::Vector3d& p) { return double_shear_inverse(p, a, b); });
        return compute_W(t.para, embed_flow(t.mesh, phi, psi), time);
    };
    auto U = [&](double delta) { return compute_U(t.mesh, W(0.5 - delta), W(0.5), W(0.5 + delta)); };
    const Eigen::MatrixXd u1 = U(0.2), u2 = U(0.1), u3 = U(0.05);
    const double d1 = (u1 - u2).norm(), d2 = (u2 - u3).norm();
    MESSAGE("delta halving " << d1 << " -> " << d2 << " of " << u3.norm());
    CHECK(u3.norm() > 0.0);
    CHECK(d1 / d2 > 3.0);
}

TEST_CASE("divergence smoothness branches")
{
    const SmallTorus& t = small_torus();
    const auto [first, last] = standard_slope_window(t.basis.size());
    const CohomologyClass zero = CohomologyClass::zero(2);

    const Cochain0 w = synthetic_field(t.basis, 2.2, 1, t.basis.size(), 3);
    const DivSmoothness exact = check_div_smoothness(t.hodge, t.hodge.biot_savart(w, zero), t.basis, first, last);
    CHECK(exact.exact_zero_divergence);
    CHECK(exact.pass);
    CHECK(exact.gap == std::numeric_limits<double>::infinity());

    const Cochain0 f = synthetic_field(t.basis, 2.2, 1, t.basis.size(), 4);
    const DivSmoothness df = check_div_smoothness(t.dec, t.dec.d(f), t.basis, first, last);
    CHECK(df.exact_zero_curl);
    CHECK_FALSE(df.pass);

    const Eigen::MatrixXd grad = VertexInterpolator(t.mesh).gradients(f.values);
    const DivSmoothness g = check_div_smoothness(t.dec, vertex_field_flat(t.mesh, grad), t.basis, first, last);
    CHECK_FALSE(g.pass);

    // a rough field with both parts equally rough
    const Cochain0 h = synthetic_field(t.basis, 2.2, 1, t.basis.size(), 5);
    const Eigen::MatrixXd mixed = grad + rotate_vertex_field(t.mesh, VertexInterpolator(t.mesh).gradients(h.values));
    const DivSmoothness m = check_div_smoothness(t.dec, vertex_field_flat(t.mesh, mixed), t.basis, first, last);
    MESSAGE("mixed gap " << m.gap);
    CHECK(std::abs(m.gap) < 0.3);
    CHECK_FALSE(m.pass);
}

TEST_CASE("principal symbols")
{
    const Eigen::Vector2cd e1 = symbol_biot_savart({1.0, 0.0});
    CHECK(std::abs(e1[0]) < 1e-15);
    CHECK(std::abs(e1[1] - std::complex<double>(0.0, -1.0 / (2 * pi))) < 1e-15);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    for (int i = 0; i < 100; ++i) {
        const double a = angle(rng);
        const Eigen::Vector2d xi(std::cos(a), std::sin(a));
        const Eigen::Vector2cd s = symbol_biot_savart(xi);
        CHECK(std::abs(xi[0] * s[0] + xi[1] * s[1]) <= 1e-12);
        CHECK(std::abs(s.norm() - 1.0 / (2 * pi)) <= 1e-12);
        CHECK(std::abs(symbol_main(xi, Eigen::Matrix2d::Identity()) - 1.0) <= 1e-12);
        const Eigen::Matrix2d Rot = Eigen::Rotation2Dd(angle(rng)).toRotationMatrix();
        CHECK(std::abs(symbol_main(xi, Rot) - 1.0) <= 1e-12);
        Eigen::Matrix2d A;
        A << 1.3, 0.4, -0.2, 0.9;
        CHECK(std::abs(symbol_main(xi, Rot * A) - symbol_main(xi, A)) <= 1e-12);
        CHECK(std::abs(symbol_main(xi, A) - symbol_main_pushforward(xi, A)) <= 1e-12);
    }
    const Eigen::Matrix2d stretch = Eigen::Vector2d(2.0, 0.5).asDiagonal();
    const double raw = symbol_main({1.0, 0.0}, stretch);
    CHECK(raw > 0.0);
    CHECK(std::abs(raw - symbol_main_pushforward({1.0, 0.0}, stretch)) <= 1e-12);
    CHECK(std::abs(raw - 4.0) <= 1e-12);

    CHECK_THROWS_AS(symbol_biot_savart(Eigen::Vector2d::Zero()), ProbeError);
    CHECK_THROWS_AS(symbol_main(Eigen::Vector2d::Zero(), stretch), ProbeError);
    CHECK_THROWS_AS(symbol_main({1.0, 0.0}, Eigen::Matrix2d::Zero()), ProbeError);
}

TEST_CASE("ellipticity certificates")
{
    const TriangleMesh torus = make_flat_torus(64);
    const EllipticityCertificate id = ellipticity_certificate(torus, FlowMap::identity(torus), 10000, 1);
    CHECK(id.pass);
    CHECK(std::abs(id.min_symbol - 1.0) <= 1e-12);
    CHECK(std::abs(id.conditioning_bound - 1.0) <= 1e-12);
    int total = 0;
    for (int c : id.histogram) total += c;
    CHECK(total == 10000);

    const Dec dec(torus);
    const HodgeSolver hodge(dec);
    EulerConfig cfg;
    cfg.dt = 1.0 / 64;
    const Eigen::VectorXd w = vertex_function(torus, [](const Eigen::Vector3d& p) { return -0.4 * pi * std::cos(2 * pi * p.y()); });
    const FlowMap shear = exp_map(hodge, hodge.biot_savart({w}, CohomologyClass::zero(2)), cfg);
    const EllipticityCertificate cert = ellipticity_certificate(torus, shear, 10000, 2);
    // x -> x + 0.2 sin(2 pi y): worst stretch where |cos| = 1
    const double s = 0.4 * pi, want = (std::sqrt(s * s + 4) - s) / (std::sqrt(s * s + 4) + s);
    MESSAGE("shear min symbol " << cert.min_symbol << " bound " << cert.conditioning_bound << " closed form " << want);
    CHECK(cert.pass);
    CHECK(cert.min_symbol >= cert.conditioning_bound);
    CHECK(cert.min_symbol <= 2.0 * cert.conditioning_bound);
    CHECK(std::abs(cert.conditioning_bound / want - 1.0) < 0.05);

    const EllipticityCertificate again = ellipticity_certificate(torus, shear, 10000, 2);
    CHECK(again.min_symbol == cert.min_symbol);
    CHECK(again.histogram == cert.histogram);
    std::ostringstream csv;
    write_symbol_histogram_csv(csv, cert);
    const std::string text = csv.str();
    CHECK(text.rfind("log2_lower,log2_upper,count\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 33);

    const FlowMap mirror = map_from(torus, [](const Eigen::Vector3d& p) { return wrap(-p.x(), p.y()); });
    CHECK_THROWS_AS(ellipticity_certificate(torus, mirror, 100, 3), FoldOverError);
}

TEST_CASE("B-tilde on a small torus")
{
    const SmallTorus& t = small_torus();
    const Eigen::VectorXd background = vertex_function(t.mesh, [](const Eigen::Vector3d& p) { return 0.4 * pi * std::cos(2 * pi * p.y()); });
    EulerConfig cfg;
    cfg.dt = 1.0 / 32;
    const BTildeOperator B(t.hodge, t.para, {background}, 0.2, cfg);
    CHECK(B.flow().size() == t.mesh.num_vertices());

    CHECK(B.apply({Eigen::VectorXd::Zero(t.mesh.num_vertices())}).values.norm() == 0.0);
    CHECK_THROWS_AS(B.apply({Eigen::VectorXd::Ones(t.mesh.num_vertices())}), ProbeError);

    const Cochain0 a{t.basis.eigenvectors.col(30)}, b{t.basis.eigenvectors.col(45)};
    const Cochain0 ba = B.apply(a), bb = B.apply(b), sum = B.apply({2.0 * a.values + b.values});
    CHECK(std::abs(t.dec.mean(ba)) <= 1e-8 * ba.values.cwiseAbs().maxCoeff());
    CHECK(testing::relative_error(t.dec.star0(), sum.values, 2.0 * ba.values + bb.values) <= 1e-10);
    CHECK_THROWS_AS(BTildeOperator(t.hodge, t.para, {background}, -1.0, cfg), ProbeError);
}

TEST_CASE("B-tilde reduces to the identity at t = 0" * doctest::may_fail())
{
    const TriangleMesh torus = make_flat_torus(128);
    const Dec dec(torus);
    const HodgeSolver hodge(dec);
    const SpectralBasis basis = cached_spectral_basis(dec, 400, std::filesystem::temp_directory_path() / "surfflow_torus128_400.bin");
    const Paracalculus para(basis);
    const BTildeOperator B(hodge, para, {Eigen::VectorXd::Zero(torus.num_vertices())}, 0.0);
    std::mt19937_64 rng(7);
    const Eigen::VectorXd c = testing::gaussian_vector(161, rng);
    const Eigen::VectorXd w = basis.eigenvectors.middleCols(160, 161) * c;
    const double err = testing::relative_error(dec.star0(), B.apply({w}).values, w);
    MESSAGE("t = 0 relative deviation on modes [160, 320]: " << err);
    CHECK(err <= 0.10);
}

TEST_CASE("dexp on a small torus")
{
    const TriangleMesh torus = make_flat_torus(16);
    const Dec dec(torus);
    const HodgeSolver hodge(dec);
    const SpectralBasis basis = compute_spectral_basis(dec, 13);
    const CohomologyClass zero = CohomologyClass::zero(2);
    DexpConfig cfg;
    cfg.euler.dt = 1.0 / 16;
    const DivFreeVelocity still = hodge.biot_savart({Eigen::VectorXd::Zero(torus.num_vertices())}, zero);
    const JacobianSpectrum id = dexp_jacobian(hodge, basis, still, 12, cfg);
    REQUIRE(id.size() == 12);
    const double gap = Eigen::JacobiSVD<Eigen::MatrixXd>(id.matrix - Eigen::MatrixXd::Identity(12, 12)).singularValues()[0];
    MESSAGE("|dExp(0) - I| = " << gap);
    CHECK(gap <= 1e-2);
    for (std::size_t i = 0; i < id.thresholds.size(); ++i) {
        CHECK(id.rank[i] == 12);
        CHECK(id.kernel[i] == id.cokernel[i]);
    }

    const Eigen::VectorXd w = vertex_function(torus, [](const Eigen::Vector3d& p) { return 0.2 * pi * std::cos(2 * pi * p.y()); });
    const DivFreeVelocity shear = hodge.biot_savart({w}, zero);
    const JacobianSpectrum a = dexp_jacobian(hodge, basis, shear, 12, cfg);
    DexpConfig half = cfg;
    half.epsilon /= 2;
    const JacobianSpectrum b = dexp_jacobian(hodge, basis, shear, 12, half);
    CHECK((a.singular_values - b.singular_values).cwiseAbs().maxCoeff() <= 1e-2);

    std::ostringstream csv;
    write_spectrum_csv(csv, a);
    const std::string text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 13);

    DexpConfig bad = cfg;
    bad.epsilon = 0.1;
    CHECK_THROWS_AS(dexp_jacobian(hodge, basis, shear, 12, bad), ProbeError);
    CHECK_THROWS_AS(dexp_jacobian(hodge, basis, shear, 13, cfg), ProbeError);
}
