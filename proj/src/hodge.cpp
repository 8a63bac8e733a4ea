// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/hodge.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <queue>
#include <sstream>

namespace surfflow {

namespace {

using Solve = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Closed 1-cochains dual to the non-tree, non-cotree edges.
std::vector<Eigen::VectorXd> generator_cocycles(const TriangleMesh& mesh)
{
    const int nv = mesh.num_vertices();
    const int ne = mesh.num_edges();
    const int nf = mesh.num_faces();

    std::vector<std::vector<int>> vertex_edges(nv);
    for (int e = 0; e < ne; ++e) {
        vertex_edges[mesh.edges()[e][0]].push_back(e);
        vertex_edges[mesh.edges()[e][1]].push_back(e);
    }
    std::vector<char> in_tree(ne, 0);
    std::vector<char> seen(nv, 0);
    std::queue<int> queue;
    queue.push(0);
    seen[0] = 1;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop();
        for (int e : vertex_edges[v]) {
            const int w = mesh.edges()[e][0] == v ? mesh.edges()[e][1] : mesh.edges()[e][0];
            if (seen[w]) continue;
            seen[w] = 1;
            in_tree[e] = 1;
            queue.push(w);
        }
    }

    // dual spanning tree over edges not in the primal tree
    std::vector<int> parent_edge(nf, -1);
    std::vector<int> order;
    std::vector<char> in_cotree(ne, 0);
    std::vector<char> visited(nf, 0);
    queue.push(0);
    visited[0] = 1;
    while (!queue.empty()) {
        const int f = queue.front();
        queue.pop();
        order.push_back(f);
        for (int k = 0; k < 3; ++k) {
            const int e = mesh.face_edge(f, k);
            if (in_tree[e]) continue;
            const int g = mesh.face_neighbor(f, k);
            if (visited[g]) continue;
            visited[g] = 1;
            in_cotree[e] = 1;
            parent_edge[g] = e;
            queue.push(g);
        }
    }

    std::vector<Eigen::VectorXd> cocycles;
    for (int gen = 0; gen < ne; ++gen) {
        if (in_tree[gen] || in_cotree[gen]) continue;
        Eigen::VectorXd z = Eigen::VectorXd::Zero(ne);
        std::vector<char> known(ne, 0);
        for (int e = 0; e < ne; ++e) known[e] = !in_cotree[e];
        z[gen] = 1.0;
        // leaves first: every face fixes the edge to its parent by closure
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int f = *it;
            const int pe = parent_edge[f];
            if (pe < 0) continue;
            double sum = 0.0;
            int sign = 0;
            for (int k = 0; k < 3; ++k) {
                const int e = mesh.face_edge(f, k);
                if (e == pe) {
                    sign = mesh.face_edge_sign(f, k);
                    continue;
                }
                sum += mesh.face_edge_sign(f, k) * z[e];
            }
            z[pe] = -sum / sign;
            known[pe] = 1;
        }
        cocycles.push_back(std::move(z));
    }
    return cocycles;
}

HarmonicBasis build_harmonic_basis(const Dec& dec, const Solve& solve)
{
    const TriangleMesh& mesh = dec.mesh();
    std::vector<Eigen::VectorXd> raw;
    for (Eigen::VectorXd& z : generator_cocycles(mesh)) {
        const Eigen::VectorXd rhs = dec.d0().transpose() * dec.star1().cwiseProduct(z);
        raw.push_back(z - dec.d0() * solve(rhs));
    }
    const int expected = 2 * mesh.genus();
    if (static_cast<int>(raw.size()) != expected) {
        std::ostringstream msg;
        msg << "tree-cotree produced " << raw.size() << " generators, expected " << expected;
        throw HodgeError(msg.str());
    }
    HarmonicBasis basis;
    const int n = expected;
    basis.gram.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) basis.gram(i, j) = raw[i].dot(dec.star1().cwiseProduct(raw[j]));
    if (n > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(basis.gram);
        const double smallest = eig.eigenvalues().minCoeff();
        const double largest = eig.eigenvalues().maxCoeff();
        if (!(smallest > 1e-10 * largest)) {
            std::ostringstream msg;
            msg << "numerical rank of the harmonic space is below " << n << " (Gram eigenvalues " << smallest << " .. "
                << largest << ")";
            throw HodgeError(msg.str());
        }
    }
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd h = raw[i];
        for (int pass = 0; pass < 2; ++pass)
            for (const Cochain1& q : basis.forms) h -= q.values.dot(dec.star1().cwiseProduct(h)) * q.values;
        h /= std::sqrt(h.dot(dec.star1().cwiseProduct(h)));
        basis.forms.push_back({h});
    }
    return basis;
}

} // namespace

HarmonicBasis harmonic_basis(const Dec& dec) { return HodgeSolver(dec).harmonic(); }

HodgeSolver::HodgeSolver(const Dec& dec)
    : dec_(&dec)
{
    const SparseMatrix& K = dec.stiffness();
    const int n = static_cast<int>(K.rows());
    // pin vertex 0
    std::vector<Eigen::Triplet<double>> triplets;
    for (int col = 0; col < K.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(K, col); it; ++it)
            if (it.row() > 0 && it.col() > 0) triplets.emplace_back(it.row() - 1, it.col() - 1, it.value());
    reduced_.resize(n - 1, n - 1);
    reduced_.setFromTriplets(triplets.begin(), triplets.end());
    poisson_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(reduced_);
    if (poisson_->info() != Eigen::Success) throw HodgeError("Poisson factorization failed");
    harmonic_ = build_harmonic_basis(dec, [this](const Eigen::VectorXd& rhs) { return solve_stiffness(rhs); });
}

Eigen::VectorXd HodgeSolver::solve_stiffness(const Eigen::VectorXd& rhs) const
{
    const int n = static_cast<int>(rhs.size());
    Eigen::VectorXd b = rhs.tail(n - 1).array() - rhs.sum() / n;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    u.tail(n - 1) = poisson_->solve(b);
    if (poisson_->info() != Eigen::Success) throw HodgeError("Poisson solve failed");
    // one step of iterative refinement
    Eigen::VectorXd r = b - reduced_ * u.tail(n - 1);
    u.tail(n - 1) += poisson_->solve(r);
    const Eigen::VectorXd& mass = dec_->star0();
    u.array() -= u.dot(mass) / mass.sum();
    return u;
}

Cochain1 HodgeSolver::harmonic_part(const Cochain1& alpha) const
{
    Eigen::VectorXd h = Eigen::VectorXd::Zero(alpha.values.size());
    for (const Cochain1& q : harmonic_.forms) h += q.values.dot(dec_->star1().cwiseProduct(alpha.values)) * q.values;
    return {h};
}

CohomologyClass HodgeSolver::class_of(const Cochain1& flux) const
{
    CohomologyClass c{Eigen::VectorXd(harmonic_.size())};
    for (int i = 0; i < harmonic_.size(); ++i)
        c.coefficients[i] = harmonic_.forms[i].values.dot(dec_->star1().cwiseProduct(flux.values));
    return c;
}

HodgeParts HodgeSolver::decompose(const Cochain1& alpha) const
{
    const Eigen::VectorXd potential = solve_stiffness(dec_->d0().transpose() * dec_->star1().cwiseProduct(alpha.values));
    HodgeParts parts;
    parts.exact = {dec_->d0() * potential};
    const Cochain1 rest{alpha.values - parts.exact.values};
    parts.harmonic = harmonic_part(rest);
    parts.coexact = {rest.values - parts.harmonic.values};
    return parts;
}

Cochain0 HodgeSolver::curl(const DivFreeVelocity& v) const { return {-dec_->codifferential(v.flux).values}; }

Cochain2 HodgeSolver::divergence(const DivFreeVelocity& v) const
{
    return {dec_->star2().cwiseProduct(dec_->d1() * v.flux.values)};
}

DivFreeVelocity HodgeSolver::biot_savart(const Cochain0& omega, const CohomologyClass& cls) const
{
    if (cls.coefficients.size() != harmonic_.size()) {
        std::ostringstream msg;
        msg << "cohomology class has " << cls.coefficients.size() << " coefficients, expected " << harmonic_.size();
        throw HodgeError(msg.str());
    }
    const Eigen::VectorXd& mass = dec_->star0();
    const double total = mass.sum();
    const double mean = omega.values.dot(mass) / total;
    const double rms = std::sqrt(omega.values.cwiseAbs2().dot(mass) / total);
    if (std::abs(mean) > 1e-10 * std::max(rms, 1e-300) && std::abs(mean) > 1e-300) {
        std::ostringstream msg;
        msg << "vorticity is not compatible: mean " << mean << " (rms " << rms << ")";
        throw HodgeError(msg.str());
    }
    DivFreeVelocity v;
    v.stream = {solve_stiffness(-mass.cwiseProduct(omega.values))};
    v.flux = {dec_->d0() * v.stream.values};
    for (int i = 0; i < harmonic_.size(); ++i) v.flux.values += cls.coefficients[i] * harmonic_.forms[i].values;
    v.cls = cls;
    return v;
}

DivFreeVelocity HodgeSolver::from_flux(const Cochain1& flux) const
{
    const double scale = std::sqrt(flux.values.dot(dec_->star1().cwiseProduct(flux.values)));
    const Eigen::VectorXd div = dec_->d1() * flux.values;
    if (div.cwiseAbs().maxCoeff() > 1e-9 * std::max(scale, flux.values.cwiseAbs().maxCoeff())) {
        throw HodgeError("flux is not divergence free");
    }
    DivFreeVelocity v;
    v.stream = {solve_stiffness(dec_->d0().transpose() * dec_->star1().cwiseProduct(flux.values))};
    v.cls = class_of(flux);
    v.flux = flux;
    return v;
}

TangentField HodgeSolver::velocity(const DivFreeVelocity& v) const { return rotate_J(dec_->sharp(v.flux)); }

double HodgeSolver::kinetic_energy(const DivFreeVelocity& v) const
{
    return 0.5 * v.flux.values.dot(dec_->star1().cwiseProduct(v.flux.values));
}

} // namespace surfflow
