// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace surfflow {

class FourierError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Velocity samples on the periodic N x N grid; entry (i, j) sits at (i/N, j/N).
struct GridVelocity {
    Eigen::MatrixXd u;
    Eigen::MatrixXd v;
};

/// Biot-Savart on the unit flat torus by FFT: u_hat = -i omega_hat J xi / |xi|^2
/// with xi = 2 pi k and J = [[0, -1], [1, 0]]. N must be a power of two and the
/// zero mode of omega must vanish.
GridVelocity fourier_biot_savart(const Eigen::MatrixXd& omega);

/// Spectral divergence and curl of a grid velocity.
Eigen::MatrixXd fourier_divergence(const GridVelocity& velocity);
Eigen::MatrixXd fourier_curl(const GridVelocity& velocity);

} // namespace surfflow
