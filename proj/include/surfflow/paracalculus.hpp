// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/euler.hpp"
#include "surfflow/spectral.hpp"

#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <vector>

namespace surfflow {

class ParacalculusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Window { psi, phi, psi_tilde, phi_tilde };

/// Littlewood-Paley window of order n (n >= 2):
///   psi(x) = c0 x^n e^{-x} (1 - e^{-x}),  psi~(x) = psi(x) / x,
///   phi = -int_x^inf psi,  phi~ = -int_x^inf psi~,
/// with c0 = 1 / (Gamma(n) (1 - 2^-n)) so that int_0^inf psi(u) du/u = 1.
double window(double x, Window which, int n = 8);
double window_normalization(int n);

struct ParaproductConfig {
    int N = 8;
    /// Trapezoid nodes in log t.
    int Q = 64;
    /// Quadrature range; zero selects 0.01 / lambda_max and 64 / lambda_1.
    double t_min = 0.0;
    double t_max = 0.0;
    /// When positive, every paraproduct is recomputed with 2Q - 1 nodes and a
    /// relative change above this value raises ParacalculusError.
    double quadrature_tolerance = 1e-8;
};

struct Paracomposition {
    /// f o phi at the vertices.
    Cochain0 composite;
    /// sum_j Pi_{(D_j f) o phi} phi^j.
    Cochain0 gradient_terms;
    /// K_phi f = composite - gradient_terms.
    Cochain0 result;
};

/// Heat-semigroup paraproduct and derived operators over a truncated
/// eigenbasis of Delta_0. All spectral functions act on the basis coefficients;
/// pointwise products are taken at the vertices.
class Paracalculus {
public:
    Paracalculus(const SpectralBasis& basis, ParaproductConfig config = {});

    const SpectralBasis& basis() const { return *basis_; }
    const ParaproductConfig& config() const { return config_; }
    const Eigen::VectorXd& nodes() const { return t_; }

    /// Pi_h f: high frequencies of f against low frequencies of h.
    Cochain0 paraproduct(const Cochain0& h, const Cochain0& f) const;
    /// fh - Pi_f h - Pi_h f.
    Cochain0 bony_remainder(const Cochain0& f, const Cochain0& h) const;
    /// (Pi_A V)^i = sum_j Pi_{A^i_j} V^j; A is indexed [i][j].
    std::vector<Cochain0> vector_paraproduct(const std::vector<std::vector<Cochain0>>& A,
                                             const std::vector<Cochain0>& V) const;
    /// K_phi f = f o phi - sum_j Pi_{(D_j f) o phi} phi^j in the embedding coordinates.
    /// f and D_j f are resampled at phi with the cubic interpolant.
    Paracomposition paracomposition(const Dec& dec, const FlowMap& phi, const Cochain0& f) const;
    /// Several functions under one map; the quadrature tables of phi^j are shared.
    std::vector<Paracomposition> paracompositions(const Dec& dec, const FlowMap& phi,
                                                  const std::vector<Cochain0>& fs) const;

    /// Relative L2 change of Pi_h f when the node count doubles.
    double quadrature_change(const Cochain0& h, const Cochain0& f) const;
    /// ||f - P f|| / ||f|| for the basis projection P.
    double truncation_residual(const Cochain0& f) const;

private:
    /// Column i: coefficients of sum_j Pi_{h_ij} f_j.
    Eigen::MatrixXd paraproduct_rows(const std::vector<std::vector<Eigen::VectorXd>>& ch,
                                     const std::vector<Eigen::VectorXd>& cf, int Q) const;
    Eigen::MatrixXd checked_rows(const std::vector<std::vector<Eigen::VectorXd>>& ch,
                                 const std::vector<Eigen::VectorXd>& cf) const;

    const SpectralBasis* basis_;
    ParaproductConfig config_;
    Eigen::VectorXd t_;
};

/// Tangential gradient of a vertex function in embedding coordinates (V x m),
/// from the local quadratic fit.
Eigen::MatrixXd embedded_gradient(const Dec& dec, const Cochain0& f);

struct RegularitySlope {
    /// Fitted s in |<f, u_k>| ~ lambda_k^{-s/2}; white noise reads 0.
    double slope = 0.0;
    /// Weighted RMS deviation of the binned log amplitudes from the fitted line.
    double residual = 0.0;
    int first_mode = 0;
    int last_mode = 0;
    int bins = 0;
    /// Fewer than 20 modes carry energy, so the slope is meaningless.
    bool degenerate = false;
    /// Fitted line: log amplitude = intercept + exponent * log lambda.
    double intercept = 0.0;
    double exponent = 0.0;
};

/// Decay-slope fit over modes [first, last). Modes are grouped into log-spaced
/// eigenvalue bins; each bin contributes its RMS coefficient, weighted by count.
RegularitySlope sobolev_slope(const Cochain0& f, const SpectralBasis& basis, int first, int last);
RegularitySlope sobolev_slope_of_coefficients(const Eigen::VectorXd& coefficients, const Eigen::VectorXd& eigenvalues,
                                              int first, int last);

/// Default fit window [20, 7M/10): low modes are dominated by the smooth part,
/// top modes of products lose partners beyond the truncation.
std::pair<int, int> standard_slope_window(int modes);

/// Field with coefficients +-lambda_k^{-s/2} (random signs) on modes [first, last).
Cochain0 synthetic_field(const SpectralBasis& basis, double s, int first, int last, std::uint64_t seed);

/// Slope report: one row per mode in the window with the fitted amplitude.
void write_slope_csv(std::ostream& out, const Cochain0& f, const SpectralBasis& basis, const RegularitySlope& fit);

} // namespace surfflow
