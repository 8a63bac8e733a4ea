// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/paracalculus.hpp"

#include "surfflow/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

namespace surfflow {

namespace {

double factorial(int n)
{
    double out = 1.0;
    for (int k = 2; k <= n; ++k) out *= k;
    return out;
}

/// Upper incomplete gamma function Gamma(n, x) for integer n >= 1.
double upper_gamma(int n, double x)
{
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < n; ++k) {
        term *= x / k;
        sum += term;
    }
    return factorial(n - 1) * std::exp(-x) * sum;
}

Eigen::VectorXd log_nodes(double t_min, double t_max, int Q)
{
    Eigen::VectorXd t(Q);
    const double a = std::log(t_min), b = std::log(t_max);
    for (int q = 0; q < Q; ++q) t[q] = std::exp(a + (b - a) * q / (Q - 1));
    return t;
}

} // namespace

double window_normalization(int n) { return 1.0 / (factorial(n - 1) * (1.0 - std::ldexp(1.0, -n))); }

double window(double x, Window which, int n)
{
    if (n < 2) throw ParacalculusError("window order must be at least 2");
    if (!(x >= 0.0)) throw ParacalculusError("window argument must be nonnegative");
    const double c0 = window_normalization(n);
    switch (which) {
    case Window::psi:
        return c0 * std::pow(x, n) * std::exp(-x) * -std::expm1(-x);
    case Window::psi_tilde:
        return c0 * std::pow(x, n - 1) * std::exp(-x) * -std::expm1(-x);
    case Window::phi:
        return -c0 * (upper_gamma(n + 1, x) - upper_gamma(n + 1, 2 * x) * std::ldexp(1.0, -(n + 1)));
    case Window::phi_tilde:
        return -c0 * (upper_gamma(n, x) - upper_gamma(n, 2 * x) * std::ldexp(1.0, -n));
    }
    return 0.0;
}

Paracalculus::Paracalculus(const SpectralBasis& basis, ParaproductConfig config)
    : basis_(&basis)
    , config_(config)
{
    if (config_.N < 2) throw ParacalculusError("window order N must be at least 2");
    if (config_.Q < 2) throw ParacalculusError("quadrature needs at least 2 nodes");
    if (basis.size() < 2) throw ParacalculusError("paraproduct needs a basis with a nonconstant mode");
    if (config_.t_min <= 0.0) config_.t_min = 0.01 / basis.max_eigenvalue();
    if (config_.t_max <= 0.0) config_.t_max = 64.0 / basis.first_positive_eigenvalue();
    if (!(config_.t_min < config_.t_max)) throw ParacalculusError("quadrature range is empty");
    t_ = log_nodes(config_.t_min, config_.t_max, config_.Q);
}

Eigen::MatrixXd Paracalculus::paraproduct_rows(const std::vector<std::vector<Eigen::VectorXd>>& ch,
                                               const std::vector<Eigen::VectorXd>& cf, int Q) const
{
    const SpectralBasis& B = *basis_;
    const Eigen::VectorXd t = Q == config_.Q ? t_ : log_nodes(config_.t_min, config_.t_max, Q);
    const int M = B.size();
    Eigen::MatrixXd xphi(M, Q), phi(M, Q), psi(M, Q), psit(M, Q);
    for (int q = 0; q < Q; ++q)
        for (int k = 0; k < M; ++k) {
            const double x = t[q] * std::max(B.eigenvalues[k], 0.0);
            phi(k, q) = window(x, Window::phi_tilde, config_.N);
            xphi(k, q) = x * phi(k, q);
            psi(k, q) = window(x, Window::psi, config_.N);
            psit(k, q) = window(x, Window::psi_tilde, config_.N);
        }
    const Eigen::MatrixXd& U = B.eigenvectors;
    const int terms = static_cast<int>(cf.size());
    std::vector<Eigen::MatrixXd> hi(terms), band(terms);
    for (int j = 0; j < terms; ++j) {
        if (cf[j].isZero(0.0)) continue;
        hi[j] = U * (cf[j].asDiagonal() * xphi);
        band[j] = U * (cf[j].asDiagonal() * psi);
    }
    const double step = std::log(config_.t_max / config_.t_min) / (Q - 1);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M, static_cast<int>(ch.size()));
    for (std::size_t i = 0; i < ch.size(); ++i) {
        Eigen::MatrixXd acc1 = Eigen::MatrixXd::Zero(U.rows(), Q), acc2 = acc1;
        bool any = false;
        for (int j = 0; j < terms; ++j) {
            if (hi[j].size() == 0 || ch[i][j].isZero(0.0)) continue;
            const Eigen::MatrixXd lo = U * (ch[i][j].asDiagonal() * phi);
            acc1 += hi[j].cwiseProduct(lo);
            acc2 += band[j].cwiseProduct(lo);
            any = true;
        }
        if (!any) continue;
        const Eigen::MatrixXd c1 = U.transpose() * (B.mass.asDiagonal() * acc1);
        const Eigen::MatrixXd c2 = U.transpose() * (B.mass.asDiagonal() * acc2);
        for (int q = 0; q < Q; ++q) {
            const double w = (q == 0 || q == Q - 1) ? 0.5 * step : step;
            out.col(i) += w * (psit.col(q).cwiseProduct(c1.col(q)) + phi.col(q).cwiseProduct(c2.col(q)));
        }
    }
    return out;
}

Eigen::MatrixXd Paracalculus::checked_rows(const std::vector<std::vector<Eigen::VectorXd>>& ch,
                                           const std::vector<Eigen::VectorXd>& cf) const
{
    const Eigen::MatrixXd c = paraproduct_rows(ch, cf, config_.Q);
    if (config_.quadrature_tolerance > 0.0) {
        const Eigen::MatrixXd fine = paraproduct_rows(ch, cf, 2 * config_.Q - 1);
        for (int i = 0; i < c.cols(); ++i) {
            const double norm = fine.col(i).norm();
            const double change = norm > 0.0 ? (fine.col(i) - c.col(i)).norm() / norm : 0.0;
            if (change > config_.quadrature_tolerance) {
                std::ostringstream msg;
                msg << "paraproduct quadrature did not stabilize: relative change " << change << " under node doubling";
                throw ParacalculusError(msg.str());
            }
        }
    }
    return c;
}

Cochain0 Paracalculus::paraproduct(const Cochain0& h, const Cochain0& f) const
{
    const Eigen::MatrixXd c =
        checked_rows({{basis_->coefficients(h.values)}}, {basis_->coefficients(f.values)});
    return {basis_->synthesize(c.col(0))};
}

double Paracalculus::quadrature_change(const Cochain0& h, const Cochain0& f) const
{
    const Eigen::VectorXd ch = basis_->coefficients(h.values);
    const Eigen::VectorXd cf = basis_->coefficients(f.values);
    const Eigen::VectorXd coarse = paraproduct_rows({{ch}}, {cf}, config_.Q).col(0);
    const Eigen::VectorXd fine = paraproduct_rows({{ch}}, {cf}, 2 * config_.Q - 1).col(0);
    return (fine - coarse).norm() / std::max(fine.norm(), 1e-300);
}

double Paracalculus::truncation_residual(const Cochain0& f) const
{
    const Eigen::VectorXd r = f.values - basis_->synthesize(basis_->coefficients(f.values));
    const double norm = std::sqrt(f.values.cwiseAbs2().dot(basis_->mass));
    return norm > 0.0 ? std::sqrt(r.cwiseAbs2().dot(basis_->mass)) / norm : 0.0;
}

Cochain0 Paracalculus::bony_remainder(const Cochain0& f, const Cochain0& h) const
{
    return {f.values.cwiseProduct(h.values) - paraproduct(f, h).values - paraproduct(h, f).values};
}

std::vector<Cochain0> Paracalculus::vector_paraproduct(const std::vector<std::vector<Cochain0>>& A,
                                                       const std::vector<Cochain0>& V) const
{
    std::vector<Eigen::VectorXd> cv;
    for (const auto& v : V) cv.push_back(basis_->coefficients(v.values));
    std::vector<std::vector<Eigen::VectorXd>> ca(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i].size() != V.size()) {
            std::ostringstream msg;
            msg << "vector paraproduct: row " << i << " has " << A[i].size() << " entries, vector has " << V.size();
            throw ParacalculusError(msg.str());
        }
        for (const auto& a : A[i]) ca[i].push_back(basis_->coefficients(a.values));
    }
    const Eigen::MatrixXd c = checked_rows(ca, cv);
    std::vector<Cochain0> out;
    for (int i = 0; i < c.cols(); ++i) out.push_back({basis_->synthesize(c.col(i))});
    return out;
}

Eigen::MatrixXd embedded_gradient(const Dec& dec, const Cochain0& f)
{
    const TriangleMesh& mesh = dec.mesh();
    const Eigen::MatrixXd g = VertexInterpolator(mesh).gradients(f.values);
    const int m = embedding_dimension(mesh);
    Eigen::MatrixXd out(mesh.num_vertices(), m);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        out.row(v) = embed_vector(mesh, vertex_coordinates(mesh, v), g.row(v).transpose()).transpose();
    }
    return out;
}

Paracomposition Paracalculus::paracomposition(const Dec& dec, const FlowMap& phi, const Cochain0& f) const
{
    return paracompositions(dec, phi, {f}).front();
}

std::vector<Paracomposition> Paracalculus::paracompositions(const Dec& dec, const FlowMap& phi,
                                                            const std::vector<Cochain0>& fs) const
{
    const TriangleMesh& mesh = dec.mesh();
    const int nv = mesh.num_vertices();
    if (phi.size() != nv) throw ParacalculusError("paracomposition: flow map and mesh disagree");
    const int m = embedding_dimension(mesh);
    const VertexInterpolator interp(mesh);

    Eigen::MatrixXd coords(nv, m);
    for (int v = 0; v < nv; ++v) coords.row(v) = embed(mesh, point_coordinates(mesh, phi.image[v])).transpose();
    std::vector<Eigen::VectorXd> cf;
    for (int j = 0; j < m; ++j) cf.push_back(basis_->coefficients(coords.col(j)));

    std::vector<Paracomposition> out(fs.size());
    std::vector<std::vector<Eigen::VectorXd>> ch(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const Cochain0& f = fs[i];
        const Eigen::MatrixXd df = interp.gradients(f.values);
        Eigen::MatrixXd grad(nv, m);
        for (int v = 0; v < nv; ++v)
            grad.row(v) = embed_vector(mesh, vertex_coordinates(mesh, v), df.row(v).transpose()).transpose();
        std::vector<Eigen::MatrixXd> ddf(m);
        for (int j = 0; j < m; ++j) ddf[j] = interp.gradients(grad.col(j));

        out[i].composite.values.resize(nv);
        Eigen::MatrixXd grad_at(nv, m);
        for (int v = 0; v < nv; ++v) {
            const SurfacePoint& p = phi.image[v];
            out[i].composite.values[v] = interp.cubic(f.values, df, p);
            for (int j = 0; j < m; ++j) grad_at(v, j) = interp.cubic(grad.col(j), ddf[j], p);
        }
        for (int j = 0; j < m; ++j) ch[i].push_back(basis_->coefficients(grad_at.col(j)));
    }
    const Eigen::MatrixXd c = checked_rows(ch, cf);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        out[i].gradient_terms.values = basis_->synthesize(c.col(static_cast<int>(i)));
        out[i].result.values = out[i].composite.values - out[i].gradient_terms.values;
    }
    return out;
}

RegularitySlope sobolev_slope_of_coefficients(const Eigen::VectorXd& coefficients, const Eigen::VectorXd& eigenvalues,
                                              int first, int last)
{
    if (first < 0 || last > coefficients.size() || last - first < 20) {
        std::ostringstream msg;
        msg << "slope window [" << first << ", " << last << ") must lie in the basis and hold at least 20 modes";
        throw ParacalculusError(msg.str());
    }
    RegularitySlope fit;
    fit.first_mode = first;
    fit.last_mode = last;
    std::vector<int> modes;
    double peak = 0.0;
    for (int k = first; k < last; ++k) {
        if (eigenvalues[k] <= 0.0) continue;
        modes.push_back(k);
        peak = std::max(peak, std::abs(coefficients[k]));
    }
    if (peak == 0.0) throw ParacalculusError("slope window has only zero coefficients");
    const auto energetic = std::count_if(modes.begin(), modes.end(),
                                         [&](int k) { return std::abs(coefficients[k]) > 1e-10 * peak; });
    if (energetic < 20) {
        fit.degenerate = true;
        return fit;
    }

    const int nb = std::clamp(static_cast<int>(modes.size()) / 8, 4, 16);
    const double lo = std::log(eigenvalues[modes.front()]), hi = std::log(eigenvalues[modes.back()]);
    std::vector<double> energy(nb, 0.0), logl(nb, 0.0), count(nb, 0.0);
    for (int k : modes) {
        const double x = std::log(eigenvalues[k]);
        const int b = hi > lo ? std::min(nb - 1, static_cast<int>(nb * (x - lo) / (hi - lo))) : 0;
        energy[b] += coefficients[k] * coefficients[k];
        logl[b] += x;
        count[b] += 1.0;
    }
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<std::array<double, 3>> points;
    for (int b = 0; b < nb; ++b) {
        if (count[b] == 0.0 || energy[b] == 0.0) continue;
        const double x = logl[b] / count[b];
        const double y = 0.5 * std::log(energy[b] / count[b]);
        const double w = count[b];
        points.push_back({x, y, w});
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    fit.bins = static_cast<int>(points.size());
    const double denom = sw * sxx - sx * sx;
    if (fit.bins < 2 || denom <= 0.0) {
        fit.degenerate = true;
        return fit;
    }
    fit.exponent = (sw * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.exponent * sx) / sw;
    double r2 = 0.0;
    for (const auto& [x, y, w] : points) {
        const double r = y - (fit.intercept + fit.exponent * x);
        r2 += w * r * r;
    }
    fit.residual = std::sqrt(r2 / sw);
    fit.slope = -2.0 * fit.exponent;
    return fit;
}

RegularitySlope sobolev_slope(const Cochain0& f, const SpectralBasis& basis, int first, int last)
{
    return sobolev_slope_of_coefficients(basis.coefficients(f.values), basis.eigenvalues, first, last);
}

std::pair<int, int> standard_slope_window(int modes) { return {20, (7 * modes) / 10}; }

Cochain0 synthetic_field(const SpectralBasis& basis, double s, int first, int last, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
    for (int k = std::max(first, 0); k < std::min(last, basis.size()); ++k) {
        const double sign = (rng() & 1u) ? 1.0 : -1.0;
        if (basis.eigenvalues[k] > 0.0) c[k] = sign * std::pow(basis.eigenvalues[k], -0.5 * s);
    }
    return {basis.synthesize(c)};
}

void write_slope_csv(std::ostream& out, const Cochain0& f, const SpectralBasis& basis, const RegularitySlope& fit)
{
    const Eigen::VectorXd c = basis.coefficients(f.values);
    out << "mode,lambda,abs_coefficient,fitted\n";
    char buf[128];
    for (int k = fit.first_mode; k < fit.last_mode; ++k) {
        const double lambda = basis.eigenvalues[k];
        const double fitted = lambda > 0.0 ? std::exp(fit.intercept + fit.exponent * std::log(lambda)) : 0.0;
        std::snprintf(buf, sizeof buf, "%d,%.10e,%.10e,%.10e\n", k, lambda, std::abs(c[k]), fitted);
        out << buf;
    }
}

} // namespace surfflow
