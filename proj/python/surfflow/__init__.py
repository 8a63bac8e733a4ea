# Copyright 2026 The surfflow Authors.
# SPDX-License-Identifier: Apache-2.0

"""Ideal fluid flow on triangulated surfaces."""

from ._core import (
    ConfigError,
    FlowError,
    HodgeError,
    MeshError,
    ParacalculusError,
    ProbeError,
    SpectralBasis,
    SpectralError,
    Surface,
    command,
    format_config,
    symbol_biot_savart,
    symbol_main,
)

__all__ = [
    "ConfigError",
    "FlowError",
    "HodgeError",
    "MeshError",
    "ParacalculusError",
    "ProbeError",
    "SpectralBasis",
    "SpectralError",
    "Surface",
    "command",
    "format_config",
    "symbol_biot_savart",
    "symbol_main",
]
