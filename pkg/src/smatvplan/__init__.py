"""Planning and verification of SMATV/CATV signal distribution networks.

The package models an in-building distribution network (satellite IF and
terrestrial lines over multiswitch cascades, taps and wall outlets),
propagates signal levels and carrier-to-noise across a frequency grid,
checks the result against outlet-level design constraints, sweeps
headend levels and searches regulator settings.

Typical use::

    from smatvplan import build_case_study, full_report
    report = full_report(build_case_study())
    print(f"{report.compliant_count}/{report.total_outputs} outlets pass")
"""

from .catalog import (
    CableSpec,
    Catalog,
    ComponentClass,
    ComponentInstance,
    ComponentSpec,
    GainCurve,
    GainRegulator,
    builtin_catalog,
    cable_attenuation,
    instantiate,
)
from .compliance import (
    ComplianceReport,
    OutputVerdict,
    Violation,
    ViolationKind,
    check_isolation,
    check_outputs,
    check_overload,
    full_report,
)
from .engine import (
    DBM_TO_DBUV_75_OHM,
    CompiledNetwork,
    LineTrace,
    SimulationResult,
    cascade_cnr,
    combine_cnr,
    compile_network,
    kernel_backend,
    level_to_power,
    power_to_level,
    propagate,
    sum_channel_power_dbm,
)
from .errors import PlanError
from .model import (
    Band,
    Channel,
    ChannelPlan,
    ComponentNode,
    DesignConstraints,
    Edge,
    FrequencyGrid,
    Network,
    OutputKind,
    OutputNode,
    PortRef,
    Scenario,
    SignalLine,
    SourceNode,
    SourceSpectrum,
    apply_scenario,
    line_path,
    reachable_lines,
    validate_network,
)
from .netio import (
    build_case_study,
    export_report,
    parse_network,
    serialize_network,
)
from .optimize import (
    OptimizeResult,
    SweepResult,
    optimize_gains,
    sensitivity,
    sweep_input_level,
)

__version__ = "0.1.0"

__all__ = [
    "Band",
    "CableSpec",
    "Catalog",
    "Channel",
    "ChannelPlan",
    "ComplianceReport",
    "CompiledNetwork",
    "ComponentClass",
    "ComponentInstance",
    "ComponentNode",
    "ComponentSpec",
    "DBM_TO_DBUV_75_OHM",
    "DesignConstraints",
    "Edge",
    "FrequencyGrid",
    "GainCurve",
    "GainRegulator",
    "LineTrace",
    "Network",
    "OptimizeResult",
    "OutputKind",
    "OutputNode",
    "OutputVerdict",
    "PlanError",
    "PortRef",
    "Scenario",
    "SignalLine",
    "SimulationResult",
    "SourceNode",
    "SourceSpectrum",
    "SweepResult",
    "Violation",
    "ViolationKind",
    "apply_scenario",
    "build_case_study",
    "builtin_catalog",
    "cable_attenuation",
    "cascade_cnr",
    "check_isolation",
    "check_outputs",
    "check_overload",
    "combine_cnr",
    "compile_network",
    "export_report",
    "full_report",
    "instantiate",
    "kernel_backend",
    "level_to_power",
    "line_path",
    "optimize_gains",
    "parse_network",
    "power_to_level",
    "propagate",
    "reachable_lines",
    "sensitivity",
    "serialize_network",
    "sum_channel_power_dbm",
    "sweep_input_level",
    "validate_network",
    "__version__",
]
