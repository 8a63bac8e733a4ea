// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#include "surfflow/harness.hpp"

#include "surfflow/fourier.hpp"
#include "surfflow/surface.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace surfflow {

namespace {

constexpr double pi = std::numbers::pi;

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

std::string fixed(double x, int digits = 3)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::uint64_t seed_of(const RunConfig& config)
{
    if (!config.seed) throw ConfigError("seed is required (config key 'seed' or --seed)");
    return *config.seed;
}

/// Opens config.out / name for writing and records it in the report.
std::ofstream open_output(const RunConfig& config, Report& report, const std::string& name)
{
    std::filesystem::create_directories(config.out);
    std::ofstream out(config.out / name);
    if (!out) throw ConfigError("cannot write " + (config.out / name).string());
    report.files.push_back(name);
    return out;
}

void finish(const RunConfig& config, Report& report, const std::string& name)
{
    std::ofstream out = open_output(config, report, name);
    write_certificate(out, report, config);
}

CohomologyClass configured_class(const HodgeSolver& hodge, const RunConfig& config)
{
    const int dim = hodge.cohomology_dimension();
    if (config.cohomology.empty()) return CohomologyClass::zero(dim);
    if (static_cast<int>(config.cohomology.size()) != dim) {
        std::ostringstream msg;
        msg << "class has " << config.cohomology.size() << " coefficients, the mesh has " << dim << " harmonic forms";
        throw ConfigError(msg.str());
    }
    return {Eigen::Map<const Eigen::VectorXd>(config.cohomology.data(), dim)};
}

EulerConfig euler_config(const RunConfig& config)
{
    EulerConfig ec;
    ec.dt = config.dt;
    ec.interpolation = config.interpolation;
    ec.snapshot_every = config.snapshot_every;
    return ec;
}

Paracalculus make_paracalculus(const SpectralBasis& basis, const RunConfig& config)
{
    ParaproductConfig pc;
    pc.N = config.N;
    pc.Q = config.Q;
    return Paracalculus(basis, pc);
}

double peak(const Diagnostics& d) { return std::max(std::abs(d.omega_min), std::abs(d.omega_max)); }

Eigen::Vector3d rotate_z(const Eigen::Vector3d& p, double a)
{
    return {std::cos(a) * p.x() - std::sin(a) * p.y(), std::sin(a) * p.x() + std::cos(a) * p.y(), p.z()};
}

double spectral_norm(const Eigen::MatrixXd& A) { return Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()[0]; }

/// Relative L2 error of the mesh Biot-Savart of sin(2 pi x) + cos(2 pi (x + 2y))
/// against the FFT solution at the vertices.
double fourier_oracle_error(const HodgeSolver& hodge)
{
    const Dec& dec = hodge.dec();
    const TriangleMesh& mesh = dec.mesh();
    const auto& chart = *mesh.chart();
    const int n = static_cast<int>(std::lround(std::sqrt(mesh.num_vertices())));
    Eigen::MatrixXd grid(n, n);
    Eigen::VectorXd omega(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const double x = chart(v, 0), y = chart(v, 1);
        omega[v] = std::sin(2 * pi * x) + std::cos(2 * pi * (x + 2 * y));
        grid(static_cast<int>(std::lround(x * n)) % n, static_cast<int>(std::lround(y * n)) % n) = omega[v];
    }
    const GridVelocity exact = fourier_biot_savart(grid);
    omega.array() -= dec.mean(Cochain0{omega});
    const DivFreeVelocity vel = hodge.biot_savart(Cochain0{omega}, CohomologyClass::zero(hodge.cohomology_dimension()));
    const Eigen::MatrixXd mesh_v = vertex_vectors(mesh, hodge.velocity(vel));
    double err = 0.0, ref = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const int i = static_cast<int>(std::lround(chart(v, 0) * n)) % n, j = static_cast<int>(std::lround(chart(v, 1) * n)) % n;
        const Eigen::Vector2d want(exact.u(i, j), exact.v(i, j));
        err += dec.star0()[v] * (mesh_v.row(v).head<2>().transpose() - want).squaredNorm();
        ref += dec.star0()[v] * want.squaredNorm();
    }
    return std::sqrt(err / ref);
}

} // namespace

void Report::add(std::string name, bool pass, std::string detail)
{
    checks.push_back({std::move(name), pass, std::move(detail)});
}

bool Report::ok() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void write_certificate(std::ostream& out, const Report& report, const RunConfig& config)
{
    out << "surfflow " << report.command << " certificate\n\n";
    RunConfig echo = config;
    echo.out.clear();
    std::string text = format_config(echo);
    text.erase(text.find("out = \n"), 7);
    out << "[config]\n" << text << "\n[checks]\n";
    int passed = 0;
    for (const Check& c : report.checks) {
        out << (c.pass ? "PASS  " : "FAIL  ") << c.name;
        if (!c.detail.empty()) out << "  (" << c.detail << ")";
        out << "\n";
        passed += c.pass;
    }
    if (!report.notes.empty()) {
        out << "\n[notes]\n";
        for (const std::string& n : report.notes) out << n << "\n";
    }
    out << "\n" << passed << "/" << report.checks.size() << " checks passed: " << (report.ok() ? "PASS" : "FAIL") << "\n";
}

Cochain0 configured_vorticity(const Dec& dec, const RunConfig& config, const SpectralBasis* basis)
{
    const TriangleMesh& mesh = dec.mesh();
    const int nv = mesh.num_vertices();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(nv);
    switch (config.field) {
    case FieldKind::zero:
        break;
    case FieldKind::shear:
        if (mesh.model() != SurfaceModel::flat_torus) throw ConfigError("field = shear needs a flat torus mesh");
        for (int v = 0; v < nv; ++v) w[v] = -2 * pi * config.amplitude * std::cos(2 * pi * vertex_coordinates(mesh, v).y());
        break;
    case FieldKind::rotation:
        if (mesh.model() != SurfaceModel::unit_sphere) throw ConfigError("field = rotation needs an icosphere mesh");
        for (int v = 0; v < nv; ++v) w[v] = 2 * config.amplitude * mesh.positions()(v, 2);
        break;
    case FieldKind::synthetic: {
        if (!basis) throw ConfigError("field = synthetic needs a spectral basis");
        w = synthetic_field(*basis, config.smoothness, 1, basis->size(), seed_of(config)).values;
        const double m = w.cwiseAbs().maxCoeff();
        if (m > 0.0) w *= config.amplitude / m;
        break;
    }
    }
    w.array() -= dec.mean(Cochain0{w});
    return {w};
}

std::vector<Cochain0> identity_corpus(const HodgeSolver& hodge, int count, std::uint64_t seed)
{
    const Dec& dec = hodge.dec();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<Cochain0> out;
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd f(dec.mesh().num_vertices());
        for (auto& x : f) x = normal(rng);
        for (int k = 0; k < i % 4; ++k) {
            f = hodge.solve_stiffness(dec.star0().cwiseProduct(f));
            f /= f.cwiseAbs().maxCoeff();
        }
        f.array() -= dec.mean(Cochain0{f});
        out.push_back({f});
    }
    return out;
}

SmoothingLedger smoothing_ledger(const Dec& dec, const Paracalculus& para, double s, std::uint64_t seed)
{
    const SpectralBasis& basis = para.basis();
    const int M = basis.size();
    const auto [first, last] = standard_slope_window(M);
    SmoothingLedger out;
    auto fit = [&](const std::string& name, const Cochain0& f) {
        out.rows.push_back({name, sobolev_slope(f, basis, first, last)});
        if (!name.starts_with("control") && !name.starts_with("info"))
            out.max_residual = std::max(out.max_residual, out.rows.back().fit.residual);
        return out.rows.back().fit.slope;
    };

    const Cochain0 f = synthetic_field(basis, s, 1, M, seed), h = synthetic_field(basis, s, 1, M, seed + 1);
    const double inputs = std::max(fit("f", f), fit("h", h));
    out.remainder_gap = fit("rest(f,h)", para.bony_remainder(f, h)) - inputs;
    out.product_control_gap = fit("control: paraproduct(h,f)", para.paraproduct(h, f)) - inputs;

    const TriangleMesh& mesh = dec.mesh();
    if (mesh.model() != SurfaceModel::flat_torus) return out;
    out.has_composition = true;
    const Cochain0 g = synthetic_field(basis, s, 1, 6, seed + 2);
    const Cochain0 dx = synthetic_field(basis, 2.2, 1, M, seed + 3), dy = synthetic_field(basis, 2.2, 1, M, seed + 4);
    const double scale = 0.5 * mesh.mean_edge_length()
                         / std::max(dx.values.cwiseAbs().maxCoeff(), dy.values.cwiseAbs().maxCoeff());
    const TriangleLocator faces = face_locator(mesh);
    FlowMap phi;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        Eigen::Vector3d p = vertex_coordinates(mesh, v);
        p.x() += scale * dx.values[v];
        p.y() += scale * dy.values[v];
        phi.image.push_back(locate_point(faces, p));
    }
    double map_slope = fit("displacement x", dx);
    map_slope = std::min(map_slope, fit("displacement y", dy));
    const Eigen::MatrixXd X = map_coordinates(mesh, phi);
    const Eigen::MatrixXd E = [&] {
        Eigen::MatrixXd e(mesh.num_vertices(), embedding_dimension(mesh));
        for (int v = 0; v < mesh.num_vertices(); ++v) e.row(v) = embed(mesh, X.row(v).transpose()).transpose();
        return e;
    }();
    for (int j = 0; j < E.cols(); ++j) {
        Eigen::VectorXd c = E.col(j);
        c.array() -= dec.mean(Cochain0{c});
        map_slope = std::min(map_slope, fit("info: phi^" + std::to_string(j + 1), Cochain0{c}));
    }
    const Paracomposition K = para.paracomposition(dec, phi, g);
    out.composition_gap = fit("paracomposition(phi,g)", K.result) - map_slope;
    out.gradient_control_gap = fit("control: gradient terms", K.gradient_terms) - map_slope;
    return out;
}

void write_ledger_csv(std::ostream& out, const SmoothingLedger& ledger)
{
    out << "quantity,slope,residual,first_mode,last_mode,bins\n";
    for (const LedgerRow& r : ledger.rows)
        out << r.name << ',' << fixed(r.fit.slope, 6) << ',' << fixed(r.fit.residual, 6) << ',' << r.fit.first_mode << ','
            << r.fit.last_mode << ',' << r.fit.bins << '\n';
}

Report run_command(const RunConfig& config)
{
    Report report;
    report.command = "run";
    seed_of(config);
    const TriangleMesh mesh = generate_mesh(config.mesh);
    const Dec dec(mesh);
    const HodgeSolver hodge(dec);
    std::optional<SpectralBasis> basis;
    if (config.field == FieldKind::synthetic) basis = compute_spectral_basis(dec, config.modes);
    const Cochain0 w0 = configured_vorticity(dec, config, basis ? &*basis : nullptr);
    const EulerRun run = run_euler(hodge, w0, configured_class(hodge, config), config.T, euler_config(config));

    {
        std::ofstream out = open_output(config, report, "trajectory.csv");
        write_diagnostics_csv(out, run.diagnostics);
    }
    for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
        const FlowState& s = run.trajectory[i];
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%04zu.vtk", i);
        std::ofstream out = open_output(config, report, name);
        write_vtk(out, mesh, s.omega.values, to_ambient(mesh, hodge.velocity(s.velocity)), "surfflow omega t=" + sci(s.time));
    }

    const Diagnostics& first = run.diagnostics.front();
    double mean = 0.0, drift = 0.0, growth = 0.0;
    for (const Diagnostics& d : run.diagnostics) {
        mean = std::max(mean, std::abs(d.mean_omega));
        if (first.energy > 0.0) drift = std::max(drift, std::abs(d.energy / first.energy - 1.0));
        growth = std::max(growth, peak(d) - peak(first));
    }
    report.add("mean vorticity stays zero", mean <= 1e-10 * std::max(1.0, peak(first)), "max |mean| " + sci(mean));
    if (first.energy > 0.0)
        report.add("energy drift <= 1%", drift <= 1e-2, "max relative drift " + sci(drift));
    else
        report.notes.push_back("zero initial energy: energy drift not checked");
    report.add("max |omega| increase <= 1%", growth <= 1e-2 * std::max(peak(first), 1e-300),
               "increase " + sci(growth) + " of " + sci(peak(first)));
    const std::vector<int> folded = folded_faces(mesh, run.final_state().forward);
    report.add("flow map has no fold-over", folded.empty(), std::to_string(folded.size()) + " folded faces");
    for (const std::string& w : run.warnings) report.notes.push_back(w);
    finish(config, report, "run_certificate.txt");
    return report;
}

Report exp_command(const RunConfig& config)
{
    Report report;
    report.command = "exp";
    seed_of(config);
    const TriangleMesh mesh = generate_mesh(config.mesh);
    const Dec dec(mesh);
    const HodgeSolver hodge(dec);
    std::optional<SpectralBasis> basis;
    if (config.field == FieldKind::synthetic) basis = compute_spectral_basis(dec, config.modes);
    const Cochain0 w = configured_vorticity(dec, config, basis ? &*basis : nullptr);
    const DivFreeVelocity v = hodge.biot_savart(w, configured_class(hodge, config));
    const FlowMap phi = exp_map(hodge, v, euler_config(config));

    {
        std::ofstream out = open_output(config, report, "flow_map.csv");
        out << "vertex,face,b0,b1,b2,x,y,z\n";
        const Eigen::MatrixXd X = map_coordinates(mesh, phi);
        for (int i = 0; i < phi.size(); ++i) {
            const SurfacePoint& p = phi.image[i];
            out << i << ',' << p.face << ',' << sci(p.bary[0]) << ',' << sci(p.bary[1]) << ',' << sci(p.bary[2]) << ','
                << sci(X(i, 0)) << ',' << sci(X(i, 1)) << ',' << sci(X(i, 2)) << '\n';
        }
    }
    const std::vector<int> folded = folded_faces(mesh, phi);
    report.add("Exp(v) has no fold-over", folded.empty(), std::to_string(folded.size()) + " folded faces");
    const double area = pushforward_area_error(mesh, phi);
    report.add("pushforward area error <= 2e-2", area <= 2e-2, "max relative " + sci(area));

    const bool zero_class = configured_class(hodge, config).coefficients.isZero();
    if (config.field == FieldKind::zero && zero_class) {
        const double err = max_vertex_error(mesh, phi, [](const Eigen::Vector3d& p) { return p; });
        report.add("Exp(0) is the identity", err == 0.0, "max vertex error " + sci(err));
    } else if (config.field == FieldKind::shear && zero_class) {
        const double a = config.amplitude;
        const double err = max_vertex_error(mesh, phi, [a](const Eigen::Vector3d& p) -> Eigen::Vector3d {
            const double x = p.x() + a * std::sin(2 * pi * p.y());
            return {x - std::floor(x), p.y(), 0.0};
        });
        report.add("Exp matches the explicit shear within 1e-2", err <= 1e-2, "max vertex error " + sci(err));
    } else if (config.field == FieldKind::rotation) {
        const double a = config.amplitude;
        const double err = max_vertex_error(mesh, phi, [a](const Eigen::Vector3d& p) { return rotate_z(p, a); });
        report.add("Exp matches the explicit rotation within 1e-2", err <= 1e-2, "max vertex error " + sci(err));
    } else {
        report.notes.push_back("no closed form for this field: map error not checked");
    }
    finish(config, report, "exp_certificate.txt");
    return report;
}

Report probe_command(const RunConfig& config)
{
    Report report;
    report.command = "probe";
    const std::uint64_t seed = seed_of(config);
    if (config.dexp_modes >= config.modes) throw ConfigError("dexp_modes must be below modes");
    const TriangleMesh mesh = generate_mesh(config.mesh);
    const Dec dec(mesh);
    const HodgeSolver hodge(dec);
    const SpectralBasis basis = compute_spectral_basis(dec, config.modes);
    const Paracalculus para = make_paracalculus(basis, config);
    const Cochain0 w = configured_vorticity(dec, config, &basis);
    const CohomologyClass zero = CohomologyClass::zero(hodge.cohomology_dimension());
    if (!configured_class(hodge, config).coefficients.isZero()) report.notes.push_back("probe uses the zero class; class ignored");
    const DivFreeVelocity v = hodge.biot_savart(w, zero);

    DexpConfig dc;
    dc.epsilon = config.epsilon;
    dc.thresholds = config.tau_rank;
    dc.euler = euler_config(config);
    const JacobianSpectrum J = dexp_jacobian(hodge, basis, v, config.dexp_modes, dc);
    DexpConfig half = dc;
    half.epsilon /= 2;
    const JacobianSpectrum Jh = dexp_jacobian(hodge, basis, v, config.dexp_modes, half);
    {
        std::ofstream out = open_output(config, report, "dexp_spectrum.csv");
        write_spectrum_csv(out, J);
    }
    if (config.field == FieldKind::zero) {
        const double gap = spectral_norm(J.matrix - Eigen::MatrixXd::Identity(J.size(), J.size()));
        report.add("dExp(0) is the identity within 1e-2", gap <= 1e-2, "operator norm " + sci(gap));
    }
    const double change = (J.singular_values - Jh.singular_values).cwiseAbs().maxCoeff();
    report.add("singular values stable under eps halving (1e-2)", change <= 1e-2, "max change " + sci(change));
    for (std::size_t i = 0; i < J.thresholds.size(); ++i)
        report.add("kernel = cokernel at tau_rank " + sci(J.thresholds[i]), J.kernel[i] == J.cokernel[i],
                   "rank " + std::to_string(J.rank[i]) + ", kernel " + std::to_string(J.kernel[i]) + ", cokernel "
                       + std::to_string(J.cokernel[i]));
    const double smin = J.singular_values[J.size() - 1];
    if (smin < 0.05) report.notes.push_back("conjugate point candidate: smallest singular value " + sci(smin));

    const FlowMap phi = exp_map(hodge, v, dc.euler);
    const EllipticityCertificate cert = ellipticity_certificate(mesh, phi, config.samples, seed);
    {
        std::ofstream out = open_output(config, report, "symbol_histogram.csv");
        write_symbol_histogram_csv(out, cert);
    }
    report.add("principal symbol positive on all samples", cert.pass,
               "min " + sci(cert.min_symbol) + " at face " + std::to_string(cert.min_face));
    report.add("symbol minimum above the conditioning bound", cert.min_symbol >= cert.conditioning_bound * (1 - 1e-12),
               "bound " + sci(cert.conditioning_bound));

    const int M = basis.size();
    if (M >= 40) {
        const std::vector<std::pair<int, int>> bands = {{M / 40, M / 20}, {M / 10, M / 5}, {2 * M / 5, std::min(4 * M / 5, M - 1)}};
        const BTildeOperator B(hodge, para, w, config.probe_time, dc.euler);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        std::ofstream out = open_output(config, report, "btilde_bands.csv");
        out << "first_mode,last_mode,ratio,output_mean\n";
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0, mean = 0.0;
        for (const auto& [a, b] : bands) {
            Eigen::VectorXd c(b - a + 1);
            for (auto& x : c) x = normal(rng);
            const Cochain0 in{basis.eigenvectors.middleCols(a, b - a + 1) * c};
            const Cochain0 result = B.apply(in);
            const double ratio = dec.norm(result) / dec.norm(in);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            mean = std::max(mean, std::abs(dec.mean(result)) / result.values.cwiseAbs().maxCoeff());
            out << a << ',' << b << ',' << sci(ratio) << ',' << sci(dec.mean(result)) << '\n';
        }
        report.add("B~ band ratios within a factor 3", hi <= 3.0 * lo, "min " + fixed(lo, 4) + ", max " + fixed(hi, 4));
        report.add("B~ output mean zero (1e-8)", mean <= 1e-8, "max relative mean " + sci(mean));
    } else {
        report.notes.push_back("modes < 40: B~ bands skipped");
    }
    finish(config, report, "probe_certificate.txt");
    return report;
}

Report verify_command(const RunConfig& config)
{
    Report report;
    report.command = "verify";
    const std::uint64_t seed = seed_of(config);
    const TriangleMesh mesh = generate_mesh(config.mesh);
    const Dec dec(mesh);
    const HodgeSolver hodge(dec);
    const int nv = mesh.num_vertices();
    const CohomologyClass zero = CohomologyClass::zero(hodge.cohomology_dimension());
    const std::vector<Cochain0> corpus = identity_corpus(hodge, 20, seed);

    double adj = 0.0, div = 0.0, curl = 0.0;
    std::mt19937_64 rng(seed + 1);
    std::normal_distribution<double> normal;
    for (const Cochain0& f : corpus) {
        const Cochain1 df = dec.d(f);
        Cochain1 a{Eigen::VectorXd(mesh.num_edges())};
        for (auto& x : a.values) x = normal(rng);
        adj = std::max(adj, std::abs(dec.inner(df, a) - dec.inner(f, dec.codifferential(a))) / (dec.norm(df) * dec.norm(a)));
        const DivFreeVelocity v = hodge.biot_savart(f, zero);
        div = std::max(div, dec.d(v.flux).values.cwiseAbs().maxCoeff() / v.flux.values.cwiseAbs().maxCoeff());
        curl = std::max(curl, dec.norm(Cochain0{hodge.curl(v).values - f.values}) / dec.norm(f));
    }
    const SparseMatrix dd = (dec.d1() * dec.d0()).pruned(0.0);
    report.add("d d = 0 exactly", dd.nonZeros() == 0, std::to_string(dd.nonZeros()) + " nonzero entries");
    report.add("d* is the adjoint of d (1e-12)", adj <= 1e-12, "max relative residual " + sci(adj));
    report.add("div S = 0 to rounding (1e-12)", div <= 1e-12, "max relative " + sci(div));
    report.add("curl S = id (1e-8)", curl <= 1e-8, "max relative L2 " + sci(curl));

    const HarmonicBasis& harmonic = hodge.harmonic();
    double hres = 0.0;
    for (const Cochain1& h : harmonic.forms) {
        hres = std::max(hres, dec.norm(dec.codifferential(h)));
        hres = std::max(hres, std::sqrt(dec.inner(dec.d(h), dec.d(h))));
    }
    report.add("harmonic dimension = 2 genus", harmonic.size() == 2 * mesh.genus(),
               std::to_string(harmonic.size()) + " forms, genus " + std::to_string(mesh.genus()));
    report.add("harmonic forms closed and coclosed (1e-9)", hres <= 1e-9, "max " + sci(hres));

    if (mesh.model() == SurfaceModel::flat_torus) {
        const int n = static_cast<int>(std::lround(std::sqrt(nv)));
        if (n >= 64) {
            const double tol = n == 64 ? 2e-2 : 6e-3 * (128.0 / n) * (128.0 / n);
            const double err = fourier_oracle_error(hodge);
            report.add("Biot-Savart matches the FFT oracle (" + sci(tol) + ")", err <= tol, "relative L2 " + sci(err));
        } else {
            report.notes.push_back("torus below 64: Fourier oracle skipped");
        }
    }

    const DivFreeVelocity still = hodge.biot_savart({Eigen::VectorXd::Zero(nv)}, zero);
    const FlowMap id = exp_map(hodge, still, euler_config(config));
    const double moved = max_vertex_error(mesh, id, [](const Eigen::Vector3d& p) { return p; });
    report.add("Exp(0) is the identity exactly", moved == 0.0, "max vertex error " + sci(moved));

    const EllipticityCertificate cert = ellipticity_certificate(mesh, FlowMap::identity(mesh), config.samples, seed);
    report.add("symbol of the main term is 1 at the identity (1e-12)", std::abs(cert.min_symbol - 1.0) <= 1e-12,
               "min " + sci(cert.min_symbol));
    double ortho = 0.0, magnitude = 0.0;
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    for (int i = 0; i < 1000; ++i) {
        const double t = angle(rng);
        const Eigen::Vector2d xi(std::cos(t), std::sin(t));
        const Eigen::Vector2cd s = symbol_biot_savart(xi);
        ortho = std::max(ortho, std::abs(xi[0] * s[0] + xi[1] * s[1]));
        magnitude = std::max(magnitude, std::abs(s.norm() - 1.0 / (2 * pi)));
    }
    report.add("Biot-Savart symbol orthogonal to xi (1e-12)", ortho <= 1e-12, "max " + sci(ortho));
    report.add("Biot-Savart symbol magnitude 1/(2 pi) (1e-12)", magnitude <= 1e-12, "max deviation " + sci(magnitude));

    const SpectralBasis basis = compute_spectral_basis(dec, config.modes);
    const Paracalculus para = make_paracalculus(basis, config);
    const Cochain0 f = synthetic_field(basis, 2.5, 1, basis.size() / 2, seed + 2);
    const Cochain0 one{Eigen::VectorXd::Ones(nv)};
    const double repro = dec.norm(Cochain0{para.paraproduct(one, f).values - f.values}) / dec.norm(f);
    report.add("paraproduct with h = 1 reproduces f (5%)", repro <= 5e-2, "relative L2 " + sci(repro));
    finish(config, report, "verify_report.txt");
    return report;
}

Report slopes_command(const RunConfig& config)
{
    Report report;
    report.command = "slopes";
    const std::uint64_t seed = seed_of(config);
    const TriangleMesh mesh = generate_mesh(config.mesh);
    const Dec dec(mesh);
    const SpectralBasis basis = compute_spectral_basis(dec, config.modes);
    const Paracalculus para = make_paracalculus(basis, config);
    const SmoothingLedger ledger = smoothing_ledger(dec, para, config.smoothness, seed);
    {
        std::ofstream out = open_output(config, report, "slopes.csv");
        write_ledger_csv(out, ledger);
    }
    report.add("remainder smoother than its inputs by 0.4", ledger.remainder_gap >= kSmoothingMargin,
               "gap " + fixed(ledger.remainder_gap));
    report.add("control paraproduct falls short of 0.4", ledger.product_control_gap < kSmoothingMargin,
               "gap " + fixed(ledger.product_control_gap));
    if (ledger.has_composition) {
        report.add("paracomposition smoother than the map by 0.4", ledger.composition_gap >= kSmoothingMargin,
                   "gap " + fixed(ledger.composition_gap));
        report.add("control gradient terms fall short of 0.4", ledger.gradient_control_gap < kSmoothingMargin,
                   "gap " + fixed(ledger.gradient_control_gap));
    } else {
        report.notes.push_back("paracomposition needs a flat torus: skipped");
    }
    report.add("fit residuals <= 0.2 outside the controls", ledger.max_residual <= kMaxFitResidual, "max " + fixed(ledger.max_residual));
    finish(config, report, "slopes_certificate.txt");
    return report;
}

} // namespace surfflow
