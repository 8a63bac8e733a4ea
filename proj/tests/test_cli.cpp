// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "surfflow/config.hpp"
#include "surfflow/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace surfflow;

namespace {

std::string error_of(const std::string& text)
{
    try {
        parse_config(text, "t.cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("surfflow_test_cli_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("config parsing")
{
    const RunConfig c = parse_config("# header\n"
                                     "mesh = icosphere:3\n"
                                     "\n"
                                     "dt = 1/64   # trailing\n"
                                     "field=synthetic\n"
                                     "tau_rank = 1e-2, 1e-4\n"
                                     "class = 0.5,-1\n"
                                     "seed = 42\n");
    CHECK(c.mesh.kind == MeshKind::icosphere);
    CHECK(c.mesh.parameter == 3);
    CHECK(c.dt == 1.0 / 64);
    CHECK(c.field == FieldKind::synthetic);
    CHECK(c.tau_rank == std::vector<double>{1e-2, 1e-4});
    CHECK(c.cohomology == std::vector<double>{0.5, -1.0});
    REQUIRE(c.seed.has_value());
    CHECK(*c.seed == 42);
    CHECK(c.modes == RunConfig{}.modes);

    CHECK_FALSE(parse_config("").seed.has_value());
    CHECK(parse_config("mesh = file:/a b/c.obj").mesh.path == "/a b/c.obj");
}

TEST_CASE("config errors name the line")
{
    CHECK(error_of("mesh = flat_torus:8\n\nbogus = 1\n") == "t.cfg:3: unknown key 'bogus'");
    CHECK(error_of("modes = 10\nmodes = 20\n") == "t.cfg:2: repeated key 'modes'");
    CHECK(error_of("# c\nmodes\n") == "t.cfg:2: expected key = value");
    CHECK(error_of("modes = 1\n") == "t.cfg:1: modes = 1 outside [2, 2000]");
    CHECK(error_of("modes = 1.5\n") == "t.cfg:1: not an integer: '1.5'");
    CHECK(error_of("dt = 1/0\n").starts_with("t.cfg:1: zero denominator"));
    CHECK(error_of("epsilon = 0.5\n").starts_with("t.cfg:1: epsilon"));
    CHECK(error_of("mesh = flat_torus:12\n").starts_with("t.cfg:1: flat_torus size"));
    CHECK(error_of("mesh = icosphere:8\n").starts_with("t.cfg:1: icosphere level"));
    CHECK(error_of("mesh = klein:4\n") == "t.cfg:1: unknown mesh kind 'klein'");
    CHECK(error_of("field = vortex\n").starts_with("t.cfg:1: field must be"));
    CHECK(error_of("tau_rank =\n").starts_with("t.cfg:1: tau_rank needs"));
    CHECK(error_of("seed = -3\n").starts_with("t.cfg:1: seed"));
    CHECK_THROWS_AS(load_config("/nonexistent/surfflow.cfg"), ConfigError);
}

TEST_CASE("format_config round trip")
{
    const RunConfig c = parse_config("mesh = flat_torus:32\nT = 1/3\ndt = 0.01\ninterpolation = linear\n"
                                     "field = rotation\namplitude = -0.7\nclass = 1,2\nprobe_time = 0.2\n"
                                     "out = x/y\nseed = 7\n");
    const std::string text = format_config(c);
    CHECK(format_config(parse_config(text)) == text);
    const RunConfig d = parse_config(text);
    CHECK(d.T == c.T);
    CHECK(d.interpolation == Interpolation::linear);
    CHECK(d.amplitude == -0.7);
    CHECK(text.find("probe_time = 0.2\n") != std::string::npos);
    CHECK(text.find("out = x/y\n") != std::string::npos);
}

TEST_CASE("generated meshes")
{
    MeshSource torus;
    torus.parameter = 4;
    const TriangleMesh t = generate_mesh(torus);
    CHECK(t.num_vertices() == 16);
    CHECK(t.num_edges() == 48);
    CHECK(t.num_faces() == 32);
    CHECK(t.euler_characteristic() == 0);

    const TriangleMesh s = generate_mesh(parse_config("mesh = icosphere:0").mesh);
    CHECK(s.num_vertices() == 12);
    CHECK(s.euler_characteristic() == 2);

    const TriangleMesh g = generate_mesh(parse_config("mesh = file:" SURFFLOW_TEST_DATA "/genus2.obj").mesh);
    CHECK(g.genus() == 2);
}

TEST_CASE("report and certificate")
{
    Report r;
    r.command = "demo";
    CHECK(r.ok());
    r.add("first", true, "");
    r.add("second", false, "detail");
    CHECK_FALSE(r.ok());

    RunConfig a = parse_config("seed = 1\nout = one\n");
    RunConfig b = a;
    b.out = "two";
    std::ostringstream sa, sb;
    write_certificate(sa, r, a);
    write_certificate(sb, r, b);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().find("PASS  first\n") != std::string::npos);
    CHECK(sa.str().find("FAIL  second  (detail)\n") != std::string::npos);
    CHECK(sa.str().find("out =") == std::string::npos);
}

TEST_CASE("commands require a seed")
{
    RunConfig c = parse_config("mesh = flat_torus:8\nmodes = 10\n");
    c.out = scratch("noseed");
    CHECK_THROWS(verify_command(c));
}

TEST_CASE("verify is reproducible")
{
    RunConfig c = parse_config("mesh = flat_torus:16\nmodes = 30\nseed = 5\n");
    c.out = scratch("verify_a");
    const Report first = verify_command(c);
    CHECK(first.ok());
    CHECK_FALSE(first.checks.empty());
    const std::string a = slurp(c.out / "verify_report.txt");
    c.out = scratch("verify_b");
    verify_command(c);
    CHECK(slurp(c.out / "verify_report.txt") == a);

    c.seed = 6;
    c.out = scratch("verify_c");
    verify_command(c);
    CHECK(slurp(c.out / "verify_report.txt") != a);
}

TEST_CASE("run writes a trajectory and snapshots")
{
    RunConfig c = parse_config("mesh = flat_torus:16\nmodes = 30\nT = 1/16\ndt = 1/64\nsnapshot_every = 2\nseed = 2\n");
    c.out = scratch("run");
    const Report r = run_command(c);
    CHECK(r.ok());
    CHECK(std::filesystem::exists(c.out / "trajectory.csv"));
    CHECK(std::filesystem::exists(c.out / "snapshot_0000.vtk"));
    CHECK(std::filesystem::exists(c.out / "snapshot_0002.vtk"));
    CHECK(slurp(c.out / "snapshot_0000.vtk").starts_with("# vtk DataFile Version"));
}

TEST_CASE("exp of the zero field")
{
    RunConfig c = parse_config("mesh = icosphere:2\nmodes = 20\nfield = zero\nseed = 1\n");
    c.out = scratch("exp");
    const Report r = exp_command(c);
    CHECK(r.ok());
    CHECK(std::filesystem::exists(c.out / "flow_map.csv"));
    CHECK(std::filesystem::exists(c.out / "exp_certificate.txt"));
}
