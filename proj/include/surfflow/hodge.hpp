// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/dec.hpp"

#include <Eigen/SparseCholesky>

#include <memory>
#include <stdexcept>
#include <vector>

namespace surfflow {

class HodgeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Harmonic 1-forms, orthonormal in the *1 inner product.
struct HarmonicBasis {
    std::vector<Cochain1> forms;
    /// Gram matrix of the forms before orthonormalization.
    Eigen::MatrixXd gram;

    int size() const { return static_cast<int>(forms.size()); }
};

/// Coordinates of the harmonic part of a velocity's flux against HarmonicBasis.
struct CohomologyClass {
    Eigen::VectorXd coefficients;

    static CohomologyClass zero(int dimension) { return {Eigen::VectorXd::Zero(dimension)}; }
};

/// Divergence-free velocity v = J grad(psi) + harmonic part, stored as its flux
/// cochain phi = d psi + sum c_i h_i. The flux is the primal 1-form whose
/// Whitney field, rotated by J, is v; its *1 norm is the L2 norm of v.
struct DivFreeVelocity {
    Cochain1 flux;
    CohomologyClass cls;
    /// Mean-zero stream function of the exact part.
    Cochain0 stream;
};

struct HodgeParts {
    Cochain1 exact;
    Cochain1 coexact;
    Cochain1 harmonic;
};

/// Tree-cotree harmonic basis: closed generator cochains with their exact
/// parts removed, Gram-Schmidt orthonormalized.
HarmonicBasis harmonic_basis(const Dec& dec);

/// Factorized scalar Poisson problem plus the harmonic basis; owns the
/// Biot-Savart operator for one mesh.
class HodgeSolver {
public:
    explicit HodgeSolver(const Dec& dec);

    const Dec& dec() const { return *dec_; }
    const HarmonicBasis& harmonic() const { return harmonic_; }
    int cohomology_dimension() const { return harmonic_.size(); }

    /// Mean-zero u with K u = rhs; rhs must sum to zero (it is projected if not).
    Eigen::VectorXd solve_stiffness(const Eigen::VectorXd& rhs) const;

    HodgeParts decompose(const Cochain1& alpha) const;
    /// *1-orthogonal projection onto the harmonic forms.
    Cochain1 harmonic_part(const Cochain1& alpha) const;
    CohomologyClass class_of(const Cochain1& flux) const;

    /// omega = *d v-flat at vertices; equals -d* of the flux.
    Cochain0 curl(const DivFreeVelocity& v) const;
    /// Discrete divergence *2 d1 of the flux (per face).
    Cochain2 divergence(const DivFreeVelocity& v) const;
    DivFreeVelocity biot_savart(const Cochain0& omega, const CohomologyClass& cls) const;
    DivFreeVelocity from_flux(const Cochain1& flux) const;

    /// Face velocity J sharp(flux).
    TangentField velocity(const DivFreeVelocity& v) const;
    double kinetic_energy(const DivFreeVelocity& v) const;

private:
    const Dec* dec_;
    HarmonicBasis harmonic_;
    std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> poisson_;
    SparseMatrix reduced_;
};

} // namespace surfflow
