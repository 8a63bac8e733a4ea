// Copyright 2026 The surfflow Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "surfflow/config.hpp"
#include "surfflow/microglobal.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace surfflow {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Outcome of one subcommand: executed checks, notes on skipped parts and the
/// files written below the output directory.
struct Report {
    std::string command;
    std::vector<Check> checks;
    std::vector<std::string> notes;
    std::vector<std::string> files;

    void add(std::string name, bool pass, std::string detail);
    bool ok() const;
};

/// Plain-text certificate: configuration without the output directory, one
/// PASS/FAIL line per check, notes.
void write_certificate(std::ostream& out, const Report& report, const RunConfig& config);

/// Mean-zero vorticity of the configured field, scaled by the amplitude.
/// The synthetic field needs a basis.
Cochain0 configured_vorticity(const Dec& dec, const RunConfig& config, const SpectralBasis* basis = nullptr);

/// Smooth and rough mean-zero test fields for the identity checks: Gaussian
/// noise followed by k applications of the inverse stiffness, k = i mod 4.
std::vector<Cochain0> identity_corpus(const HodgeSolver& hodge, int count, std::uint64_t seed);

struct LedgerRow {
    std::string name;
    RegularitySlope fit;
};

/// Decay slopes of the paracalculus smoothing claims on synthetic inputs.
/// Gaps are measured against the rougher input; controls reuse the parts that
/// the smoothing removes and are expected to fall short.
struct SmoothingLedger {
    std::vector<LedgerRow> rows;
    double remainder_gap = 0.0;
    double product_control_gap = 0.0;
    bool has_composition = false;
    double composition_gap = 0.0;
    double gradient_control_gap = 0.0;
    /// Over the rows that are neither controls nor informational.
    double max_residual = 0.0;
};

inline constexpr double kSmoothingMargin = 0.4;
inline constexpr double kMaxFitResidual = 0.2;

/// Inputs have coefficient magnitudes lambda^{-s/2}. The paracomposition part
/// (flat torus only) composes a smooth field with a map whose displacement has
/// decay 2.2 and size half an edge; its gap is taken against the roughest of
/// the displacement components and the embedded map coordinates.
SmoothingLedger smoothing_ledger(const Dec& dec, const Paracalculus& para, double s, std::uint64_t seed);
void write_ledger_csv(std::ostream& out, const SmoothingLedger& ledger);

/// Subcommands. Each writes its files below config.out and returns the checks
/// it executed; config.seed must be set.
Report run_command(const RunConfig& config);
Report exp_command(const RunConfig& config);
Report probe_command(const RunConfig& config);
Report verify_command(const RunConfig& config);
Report slopes_command(const RunConfig& config);

} // namespace surfflow
