"""Electron scattering at a moving electromagnetic-potential step in 1+1D."""

from .boost import BoostZ, boost_spinor, comoving_amplitudes, verify_continuity
from .errors import (
    ConsistencyError,
    DegenerateChannels,
    DomainError,
    EvanescentStatic,
    InvalidGapCondition,
    NoRoot,
    NoScattering,
)
from .kinematics import (
    Branch,
    ChannelSolution,
    IncidentState,
    Region,
    Status,
    StepProblem,
    incident_from_energy,
    reflected_channel,
    transmitted_channels,
)
from .regimes import CriticalVelocities, Regime, RegimeLabel, classify, critical_velocities
from .scattering import ScatterResult, scatter
from .sweep import Axis, SweepSpec, run_sweep
from .thresholds import GapSpec, gap_edges, gap_width, min_threshold_over_energy

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "BoostZ",
    "Branch",
    "ChannelSolution",
    "ConsistencyError",
    "CriticalVelocities",
    "DegenerateChannels",
    "DomainError",
    "EvanescentStatic",
    "GapSpec",
    "IncidentState",
    "InvalidGapCondition",
    "NoRoot",
    "NoScattering",
    "Regime",
    "RegimeLabel",
    "Region",
    "ScatterResult",
    "Status",
    "StepProblem",
    "SweepSpec",
    "boost_spinor",
    "classify",
    "comoving_amplitudes",
    "critical_velocities",
    "gap_edges",
    "gap_width",
    "incident_from_energy",
    "min_threshold_over_energy",
    "reflected_channel",
    "run_sweep",
    "scatter",
    "transmitted_channels",
    "verify_continuity",
]
