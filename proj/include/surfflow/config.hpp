// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/euler.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace surfflow {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class MeshKind { flat_torus, icosphere, file };

struct MeshSource {
    MeshKind kind = MeshKind::flat_torus;
    /// Grid size for flat_torus, subdivision level for icosphere.
    int parameter = 64;
    std::filesystem::path path;
};

/// Initial vorticity (run) or initial velocity S(omega) (exp, probe).
enum class FieldKind { zero, shear, rotation, synthetic };

struct RunConfig {
    MeshSource mesh;
    int modes = 100;
    double T = 1.0;
    double dt = 1.0 / 128;
    Interpolation interpolation = Interpolation::cubic;
    int snapshot_every = 0;
    FieldKind field = FieldKind::shear;
    double amplitude = 1.0;
    /// Decay exponent of the synthetic field.
    double smoothness = 2.5;
    /// Harmonic coefficients; empty means the zero class.
    std::vector<double> cohomology;
    int N = 8;
    int Q = 64;
    double epsilon = 1e-3;
    std::vector<double> tau_rank{1e-2, 1e-3};
    int dexp_modes = 50;
    int samples = 10000;
    double probe_time = 0.2;
    std::filesystem::path out = "out";
    std::optional<std::uint64_t> seed;
};

/// key = value lines; '#' starts a comment. Unknown or repeated keys and
/// out-of-range values raise ConfigError naming the line.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);

std::string to_string(const MeshSource& mesh);
TriangleMesh generate_mesh(const MeshSource& mesh);

} // namespace surfflow
