// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

namespace surfflow {

namespace {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

int checked_size(const Eigen::MatrixXd& grid)
{
    const int n = static_cast<int>(grid.rows());
    if (grid.cols() != n || n < 2 || (n & (n - 1)) != 0) {
        std::ostringstream msg;
        msg << "grid must be N x N with N a power of two, got " << grid.rows() << " x " << grid.cols();
        throw FourierError(msg.str());
    }
    return n;
}

/// Full complex spectrum, indexed [i * n + j] for wavenumbers (i, j).
Spectrum forward(const Eigen::MatrixXd& grid)
{
    const int n = static_cast<int>(grid.rows());
    Spectrum data(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) data[i * n + j] = grid(i, j);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan = fftw_plan_dft_2d(n, n, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return data;
}

Eigen::MatrixXd inverse(Spectrum data, int n)
{
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan = fftw_plan_dft_2d(n, n, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = data[i * n + j].real() / (double(n) * n);
    return out;
}

/// Signed wavenumber; the Nyquist mode is dropped from derivatives.
double wavenumber(int i, int n)
{
    if (2 * i == n) return 0.0;
    return 2.0 * std::numbers::pi * (2 * i < n ? i : i - n);
}

} // namespace

GridVelocity fourier_biot_savart(const Eigen::MatrixXd& omega)
{
    const int n = checked_size(omega);
    const Spectrum w = forward(omega);
    const double scale = std::max(omega.cwiseAbs().maxCoeff(), 1e-300) * n * n;
    if (std::abs(w[0]) > 1e-12 * scale) throw FourierError("vorticity has a nonzero mean (zero mode)");
    Spectrum u(n * n), v(n * n);
    const Complex i_unit(0.0, 1.0);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double x = wavenumber(a, n), y = wavenumber(b, n);
            const double norm2 = x * x + y * y;
            if (norm2 == 0.0) continue;
            // J xi = (-xi_y, xi_x)
            u[a * n + b] = -i_unit * w[a * n + b] * (-y) / norm2;
            v[a * n + b] = -i_unit * w[a * n + b] * x / norm2;
        }
    }
    return {inverse(std::move(u), n), inverse(std::move(v), n)};
}

Eigen::MatrixXd fourier_divergence(const GridVelocity& velocity)
{
    const int n = checked_size(velocity.u);
    const Spectrum u = forward(velocity.u), v = forward(velocity.v);
    Spectrum out(n * n);
    const Complex i_unit(0.0, 1.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            out[a * n + b] = i_unit * (wavenumber(a, n) * u[a * n + b] + wavenumber(b, n) * v[a * n + b]);
    return inverse(std::move(out), n);
}

Eigen::MatrixXd fourier_curl(const GridVelocity& velocity)
{
    const int n = checked_size(velocity.u);
    const Spectrum u = forward(velocity.u), v = forward(velocity.v);
    Spectrum out(n * n);
    const Complex i_unit(0.0, 1.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            out[a * n + b] = i_unit * (wavenumber(a, n) * v[a * n + b] - wavenumber(b, n) * u[a * n + b]);
    return inverse(std::move(out), n);
}

} // namespace surfflow
