// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace surfflow {

Eigen::VectorXd SpectralBasis::coefficients(const Eigen::VectorXd& f) const
{
    return eigenvectors.transpose() * mass.cwiseProduct(f);
}

Eigen::VectorXd SpectralBasis::synthesize(const Eigen::VectorXd& c) const { return eigenvectors * c; }

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double mass_norm(const VectorXd& mass, const VectorXd& x) { return std::sqrt(x.dot(mass.cwiseProduct(x))); }

/// ||M^-1 K u - lambda u||_M / ||u||_M
double true_residual(const SparseMatrix& K, const VectorXd& mass, const VectorXd& u, double lambda)
{
    const VectorXd r = (K * u).cwiseQuotient(mass) - lambda * u;
    return mass_norm(mass, r) / mass_norm(mass, u);
}

void fix_sign(VectorXd& u)
{
    Eigen::Index i = 0;
    u.cwiseAbs().maxCoeff(&i);
    if (u[i] < 0) u = -u;
}

SpectralBasis dense_basis(const SparseMatrix& K, const VectorXd& mass, int modes)
{
    const MatrixXd Kd(K);
    const VectorXd inv_sqrt = mass.cwiseSqrt().cwiseInverse();
    const MatrixXd S = inv_sqrt.asDiagonal() * Kd * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (S + S.transpose()));
    SpectralBasis out;
    out.mass = mass;
    out.eigenvalues = eig.eigenvalues().head(modes).cwiseMax(0.0);
    out.eigenvalues[0] = 0.0;
    out.eigenvectors = inv_sqrt.asDiagonal() * eig.eigenvectors().leftCols(modes);
    return out;
}

/// Orthonormalizes the columns of X in the mass inner product against `basis`
/// (first `count` columns) and among themselves. Returns the upper-triangular
/// factor R with X_in - basis*C = X_out*R; rank-deficient columns are replaced
/// by fresh random directions with a zero row in R.
MatrixXd orthonormalize(MatrixXd& X, const MatrixXd& basis, int count, const VectorXd& mass, std::mt19937_64& rng,
                        MatrixXd* coefficients)
{
    const int b = static_cast<int>(X.cols());
    if (coefficients) coefficients->setZero(count, b);
    for (int pass = 0; pass < 2; ++pass) {
        if (count == 0) break;
        const MatrixXd C = basis.leftCols(count).transpose() * (mass.asDiagonal() * X);
        X.noalias() -= basis.leftCols(count) * C;
        if (coefficients) *coefficients += C;
    }
    MatrixXd R = MatrixXd::Zero(b, b);
    std::normal_distribution<double> normal;
    for (int j = 0; j < b; ++j) {
        const double original = mass_norm(mass, X.col(j));
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < j; ++i) {
                const double c = X.col(i).dot(mass.cwiseProduct(X.col(j)));
                X.col(j) -= c * X.col(i);
                R(i, j) += c;
            }
        }
        double norm = mass_norm(mass, X.col(j));
        if (norm > 1e-10 * std::max(original, 1e-300) && norm > 0.0) {
            R(j, j) = norm;
            X.col(j) /= norm;
            continue;
        }
        // breakdown: replace by a random direction orthogonal to everything so far
        R(j, j) = 0.0;
        for (int attempt = 0; attempt < 4; ++attempt) {
            VectorXd y(X.rows());
            for (Eigen::Index k = 0; k < y.size(); ++k) y[k] = normal(rng);
            for (int pass = 0; pass < 2; ++pass) {
                if (count > 0) y -= basis.leftCols(count) * (basis.leftCols(count).transpose() * mass.cwiseProduct(y));
                for (int i = 0; i < j; ++i) y -= X.col(i).dot(mass.cwiseProduct(y)) * X.col(i);
            }
            norm = mass_norm(mass, y);
            if (norm > 1e-8) {
                X.col(j) = y / norm;
                break;
            }
        }
    }
    return R;
}

/// Two rounds of Cholesky QR in the mass inner product.
void cholesky_orthonormalize(MatrixXd& X, const VectorXd& mass)
{
    for (int round = 0; round < 2; ++round) {
        const MatrixXd B = X.transpose() * (mass.asDiagonal() * X);
        Eigen::LLT<MatrixXd> llt(0.5 * (B + B.transpose()));
        if (llt.info() != Eigen::Success) throw SpectralError("loss of orthogonality in subspace iteration");
        X = llt.matrixU().solve<Eigen::OnTheRight>(X);
    }
}

struct Window {
    std::vector<double> values;
    std::vector<VectorXd> vectors;
};

/// One shift-invert block Lanczos pass deflated against the first `locked`
/// columns of `found`. Returns the converged pairs that are contiguous from the
/// bottom of the unlocked spectrum, judged by the Ritz residual bound
/// ||Op x - theta x||_M <= tolerance * theta.
Window lanczos_window(const SparseMatrix& K, const VectorXd& mass, const MatrixXd& found, int locked, double sigma,
                      int want, int block, int max_dim, double tolerance, std::mt19937_64& rng, int& applications)
{
    const int n = static_cast<int>(K.rows());
    SparseMatrix shifted = K;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma * mass[i];
    Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
    if (solver.info() != Eigen::Success) throw SpectralError("shift-invert factorization failed at shift " + std::to_string(sigma));

    max_dim = std::min(max_dim, n - locked);
    block = std::min(block, max_dim);
    MatrixXd Q(n, max_dim + block);
    MatrixXd T = MatrixXd::Zero(max_dim + block, max_dim + block);

    std::normal_distribution<double> normal;
    MatrixXd start(n, block);
    for (Eigen::Index i = 0; i < start.size(); ++i) start.data()[i] = normal(rng);
    orthonormalize(start, found, locked, mass, rng, nullptr);
    Q.leftCols(block) = start;

    int dim = block;
    int last_check = 0;
    while (true) {
        const int j0 = dim - block;
        MatrixXd W = solver.solve(mass.asDiagonal() * Q.middleCols(j0, block));
        ++applications;
        // deflate locked modes, then block Arnoldi against the Krylov basis
        for (int pass = 0; pass < 2 && locked > 0; ++pass)
            W -= found.leftCols(locked) * (found.leftCols(locked).transpose() * (mass.asDiagonal() * W));
        MatrixXd H;
        const bool room = dim + block <= max_dim + block && dim < max_dim;
        MatrixXd R = orthonormalize(W, Q, dim, mass, rng, &H);
        T.block(0, j0, dim, block) = H;
        if (room) {
            Q.middleCols(dim, block) = W;
            T.block(dim, j0, block, block) = R;
        }

        const bool check = !room || dim - last_check >= std::max(block, std::min(60, dim / 4));
        if (check) {
            last_check = dim;
            const MatrixXd Tm = 0.5 * (T.topLeftCorner(dim, dim) + T.topLeftCorner(dim, dim).transpose());
            Eigen::SelfAdjointEigenSolver<MatrixXd> eig(Tm);
            std::vector<std::pair<double, int>> candidates;
            for (int i = 0; i < dim; ++i) {
                const double theta = eig.eigenvalues()[i];
                if (theta <= 0.0) continue;
                candidates.emplace_back(sigma + 1.0 / theta, i);
            }
            std::sort(candidates.begin(), candidates.end());
            std::vector<std::pair<double, int>> converged;
            for (const auto& [lambda, i] : candidates) {
                if (static_cast<int>(converged.size()) >= want) break;
                const double cheap = (R * eig.eigenvectors().col(i).tail(block)).norm();
                if (cheap > tolerance * eig.eigenvalues()[i]) break;
                converged.emplace_back(lambda, i);
            }
            if (static_cast<int>(converged.size()) >= want || !room) {
                if (converged.empty()) {
                    std::ostringstream msg;
                    msg << "eigensolver did not converge: Krylov dimension " << dim << " exhausted at shift " << sigma;
                    throw SpectralError(msg.str());
                }
                MatrixXd Y(dim, converged.size());
                for (std::size_t c = 0; c < converged.size(); ++c) Y.col(c) = eig.eigenvectors().col(converged[c].second);
                const MatrixXd U = Q.leftCols(dim) * Y;
                Window window;
                for (std::size_t c = 0; c < converged.size(); ++c) {
                    window.values.push_back(converged[c].first);
                    window.vectors.push_back(U.col(c) / mass_norm(mass, U.col(c)));
                }
                return window;
            }
        }
        dim += block;
    }
}

} // namespace

SpectralBasis compute_spectral_basis(const Dec& dec, int modes, const EigenOptions& options)
{
    const int n = dec.mesh().num_vertices();
    if (modes < 1 || modes > n) {
        throw SpectralError("mode count " + std::to_string(modes) + " outside [1, " + std::to_string(n) + "]");
    }
    const SparseMatrix& K = dec.stiffness();
    const VectorXd& mass = dec.star0();

    SpectralBasis out;
    if (n <= options.dense_limit) {
        out = dense_basis(K, mass, modes);
    } else {
        std::mt19937_64 rng(options.seed);
        const int total = std::min(n - 1, modes + 3 * options.block_size);
        MatrixXd found(n, total);
        std::vector<double> values;
        int locked = 0;
        int applications = 0;
        const int budget = std::max(options.max_iterations_per_mode * modes, 200);
        const double scale = mass.sum() > 0 ? 1.0 / mass.sum() : 1.0;
        // windows lock modes at a loose residual; subspace iteration below polishes them
        const double accept_tolerance = 1e-6;
        while (locked < total) {
            double sigma = -0.1 * scale;
            if (locked > 0) {
                // shift below the last locked value, away from every locked value
                const double top = values.back();
                double best = top, best_gap = -1.0;
                for (int j = 1; j <= 6; ++j) {
                    const double s = top * (1.0 - 0.015 * j);
                    double gap = 1e300;
                    for (double v : values) gap = std::min(gap, std::abs(v - s));
                    if (gap > best_gap) {
                        best_gap = gap;
                        best = s;
                    }
                }
                sigma = best;
            }
            const int remaining = total - locked;
            const int want = std::min(remaining, 120);
            const int extra = remaining > want ? options.block_size * 2 : options.block_size;
            const int max_dim = std::max(4 * (want + extra), 16 * options.block_size);
            Window w = lanczos_window(K, mass, found, locked, sigma, want + (remaining > want ? extra : 0),
                                      options.block_size, max_dim, accept_tolerance, rng, applications);
            int take = static_cast<int>(w.values.size());
            // drop the top accepted cluster unless the window reached the requested count,
            // so a partially found multiplet is retried from the next shift
            if (take > 0 && take < want) {
                const double top = w.values[take - 1];
                while (take > 1 && std::abs(w.values[take - 2] - top) <= 1e-6 * std::max(1.0, top)) --take;
                if (take > 1) --take;
            }
            take = std::min(take, remaining);
            if (take <= 0) throw SpectralError("eigensolver made no progress at shift " + std::to_string(sigma));
            for (int i = 0; i < take; ++i) {
                found.col(locked) = w.vectors[i];
                values.push_back(w.values[i]);
                ++locked;
            }
            if (applications > budget) {
                std::ostringstream msg;
                msg << "eigensolver exceeded " << budget << " block iterations with " << locked << " of " << total
                    << " modes converged";
                throw SpectralError(msg.str());
            }
        }
        // subspace iteration with a shift below zero, then Rayleigh-Ritz
        std::sort(values.begin(), values.end());
        const double polish_shift = values.size() > 1 && values[1] > 0 ? values[1] : scale;
        SparseMatrix shifted = K;
        for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += polish_shift * mass[i];
        Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
        MatrixXd X = found;
        out.mass = mass;
        out.eigenvalues.resize(total);
        // converged leading columns are locked; the rest keep iterating
        int fixed = 0;
        for (int step = 0; step < 12; ++step) {
            MatrixXd A = X.rightCols(total - fixed);
            if (step > 0) {
                const MatrixXd rhs = mass.asDiagonal() * A;
                A = solver.solve(rhs);
                for (int pass = 0; pass < 2 && fixed > 0; ++pass)
                    A -= X.leftCols(fixed) * (X.leftCols(fixed).transpose() * (mass.asDiagonal() * A));
            }
            cholesky_orthonormalize(A, mass);
            const MatrixXd G = A.transpose() * (K * A);
            Eigen::SelfAdjointEigenSolver<MatrixXd> rr(0.5 * (G + G.transpose()));
            out.eigenvalues.tail(total - fixed) = rr.eigenvalues().cwiseMax(0.0);
            X.rightCols(total - fixed) = A * rr.eigenvectors();
            while (fixed < modes
                   && true_residual(K, mass, X.col(fixed), out.eigenvalues[fixed]) / (1.0 + out.eigenvalues[fixed])
                          <= 0.5 * options.tolerance)
                ++fixed;
            if (fixed >= modes) break;
        }
        out.eigenvalues = out.eigenvalues.head(modes).eval();
        out.eigenvectors = X.leftCols(modes);
    }

    out.residuals.resize(modes);
    for (int k = 0; k < modes; ++k) {
        VectorXd u = out.eigenvectors.col(k);
        u /= mass_norm(mass, u);
        fix_sign(u);
        out.eigenvectors.col(k) = u;
    }
    // constant mode is exact; fix it to machine precision
    out.eigenvalues[0] = 0.0;
    out.eigenvectors.col(0).setConstant(1.0 / std::sqrt(mass.sum()));
    for (int k = 0; k < modes; ++k) out.residuals[k] = true_residual(K, mass, out.eigenvectors.col(k), out.eigenvalues[k]);
    const double worst = (out.residuals.array() / (1.0 + out.eigenvalues.array())).maxCoeff();
    if (worst > options.tolerance) {
        std::ostringstream msg;
        msg << "eigensolver relative residual " << worst << " exceeds tolerance " << options.tolerance;
        throw SpectralError(msg.str());
    }
    return out;
}

Cochain0 spectral_multiplier(const std::function<double(double)>& b, const SpectralBasis& basis, const Cochain0& f,
                             double* truncation_residual)
{
    const VectorXd c = basis.coefficients(f.values);
    if (truncation_residual) {
        const VectorXd rest = f.values - basis.synthesize(c);
        const double norm = mass_norm(basis.mass, f.values);
        *truncation_residual = norm > 0 ? mass_norm(basis.mass, rest) / norm : 0.0;
    }
    VectorXd scaled(c.size());
    for (int k = 0; k < c.size(); ++k) scaled[k] = b(basis.eigenvalues[k]) * c[k];
    return {basis.synthesize(scaled)};
}

namespace {

constexpr char basis_magic[8] = {'S', 'F', 'B', 'A', 'S', 'I', 'S', '1'};

void write_block(std::ofstream& out, const double* data, std::size_t n)
{
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_block(std::ifstream& in, double* data, std::size_t n)
{
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

} // namespace

void save_spectral_basis(const SpectralBasis& basis, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpectralError("cannot write basis file " + path.string());
    const std::int64_t dims[2] = {basis.num_vertices(), basis.size()};
    out.write(basis_magic, sizeof basis_magic);
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    write_block(out, basis.eigenvalues.data(), basis.eigenvalues.size());
    write_block(out, basis.residuals.data(), basis.residuals.size());
    write_block(out, basis.mass.data(), basis.mass.size());
    write_block(out, basis.eigenvectors.data(), basis.eigenvectors.size());
    if (!out) throw SpectralError("failed writing basis file " + path.string());
}

SpectralBasis load_spectral_basis(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpectralError("cannot read basis file " + path.string());
    char magic[8];
    std::int64_t dims[2];
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!in || std::memcmp(magic, basis_magic, sizeof magic) != 0 || dims[0] < 1 || dims[1] < 1 || dims[1] > dims[0])
        throw SpectralError("not a basis file: " + path.string());
    SpectralBasis basis;
    basis.eigenvalues.resize(dims[1]);
    basis.residuals.resize(dims[1]);
    basis.mass.resize(dims[0]);
    basis.eigenvectors.resize(dims[0], dims[1]);
    read_block(in, basis.eigenvalues.data(), basis.eigenvalues.size());
    read_block(in, basis.residuals.data(), basis.residuals.size());
    read_block(in, basis.mass.data(), basis.mass.size());
    read_block(in, basis.eigenvectors.data(), basis.eigenvectors.size());
    if (!in) throw SpectralError("truncated basis file " + path.string());
    return basis;
}

SpectralBasis cached_spectral_basis(const Dec& dec, int modes, const std::filesystem::path& path,
                                    const EigenOptions& options)
{
    if (std::filesystem::exists(path)) {
        try {
            SpectralBasis basis = load_spectral_basis(path);
            if (basis.size() == modes && basis.mass.size() == dec.star0().size() && basis.mass == dec.star0())
                return basis;
        } catch (const SpectralError&) {
        }
    }
    SpectralBasis basis = compute_spectral_basis(dec, modes, options);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    save_spectral_basis(basis, path);
    return basis;
}

} // namespace surfflow
