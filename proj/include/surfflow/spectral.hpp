// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/dec.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>

namespace surfflow {

class SpectralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lowest eigenpairs of the generalized problem K u = lambda M u
/// (cotangent stiffness, lumped mass). Eigenvectors are the columns of
/// `eigenvectors`, orthonormal in the mass inner product.
struct SpectralBasis {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    Eigen::VectorXd mass;
    /// ||Delta_0 u - lambda u||_M per mode.
    Eigen::VectorXd residuals;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    int num_vertices() const { return static_cast<int>(eigenvectors.rows()); }
    double max_eigenvalue() const { return eigenvalues[size() - 1]; }
    /// Smallest nonzero eigenvalue.
    double first_positive_eigenvalue() const { return size() > 1 ? eigenvalues[1] : 1.0; }

    /// Mass projections <f, u_k>_M.
    Eigen::VectorXd coefficients(const Eigen::VectorXd& f) const;
    Eigen::VectorXd synthesize(const Eigen::VectorXd& coefficients) const;
};

struct EigenOptions {
    /// Bound on ||Delta_0 u - lambda u||_M / ((1 + lambda) ||u||_M).
    double tolerance = 1e-8;
    /// Cap on the number of block shift-invert iterations, in units of M.
    int max_iterations_per_mode = 10;
    int block_size = 12;
    std::uint64_t seed = 0x5eed;
    /// Meshes with at most this many vertices are solved densely.
    int dense_limit = 1500;
};

SpectralBasis compute_spectral_basis(const Dec& dec, int modes, const EigenOptions& options = {});

/// Binary basis files (native byte order).
void save_spectral_basis(const SpectralBasis& basis, const std::filesystem::path& path);
SpectralBasis load_spectral_basis(const std::filesystem::path& path);
/// Loads `path` when it holds `modes` modes with the mass of this mesh;
/// otherwise computes the basis and writes it there.
SpectralBasis cached_spectral_basis(const Dec& dec, int modes, const std::filesystem::path& path,
                                    const EigenOptions& options = {});

/// Sum_k b(lambda_k) <f, u_k>_M u_k. If `truncation_residual` is given it
/// receives ||f - P f||_M / ||f||_M for the projection P onto the basis.
Cochain0 spectral_multiplier(const std::function<double(double)>& b, const SpectralBasis& basis,
                             const Cochain0& f, double* truncation_residual = nullptr);

} // namespace surfflow
