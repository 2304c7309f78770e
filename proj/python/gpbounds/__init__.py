"""Gross-Pitaevskii ground states, scattering lengths and energy bounds."""

import json

from ._core import (
    ConfigError,
    DomainError,
    Grid,
    InteractionPotential,
    TrapPotential,
    __version__,
    ground_state,
    sandwich,
    scattering,
    thomas_fermi,
)
from ._core import run as _run


def run(command, config_text, threads=1):
    """Run a batch command on INI text; returns the report as a dict."""
    return json.loads(_run(command, config_text, threads))


__all__ = [
    "ConfigError",
    "DomainError",
    "Grid",
    "InteractionPotential",
    "TrapPotential",
    "ground_state",
    "run",
    "sandwich",
    "scattering",
    "thomas_fermi",
]
