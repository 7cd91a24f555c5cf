"""Time-1 vector fields for planar maps, Birkhoff stability and seasonal systems."""

from .birkhoff import (
    BirkhoffError,
    PerturbativeRegimeError,
    StabilityReport,
    birkhoff_b1,
    radial_drift_oracle,
    verdict_from_v1,
)
from .flow import ExpPoly, FlowJet, IntegrationError, flow_at, flow_expand, flow_numeric_oracle
from .inverse import (
    Family,
    Obstructed,
    ResonanceTable,
    RotationClaimVerdict,
    SolveOutcome,
    Unique,
    UsageError,
    check_pure_rotation_claim,
    closed_form_quadratic,
    invert_map,
    obstruction_family_demo,
    obstruction_map,
    resonance_table,
    solve_level,
)
from .jets import (
    JetError,
    MapJet,
    Series,
    VectorFieldJet,
    dumps_jet,
    jet_add,
    jet_compose,
    jet_conjugate,
    jet_eval,
    jet_from_dict,
    jet_mul,
    jet_to_dict,
    loads_jet,
)
from .params import ParamPoly
from .seasonal import (
    Classification,
    ParadoxReport,
    Season,
    SeasonSchedule,
    Trajectory,
    TrajectorySample,
    classify_origin,
    integrate_seasonal,
    paradox_demo,
    period_map_jet,
)

__version__ = "0.1.0"

__all__ = [
    "BirkhoffError",
    "Classification",
    "ExpPoly",
    "Family",
    "FlowJet",
    "IntegrationError",
    "JetError",
    "MapJet",
    "Obstructed",
    "ParadoxReport",
    "ParamPoly",
    "PerturbativeRegimeError",
    "ResonanceTable",
    "RotationClaimVerdict",
    "Season",
    "SeasonSchedule",
    "Series",
    "SolveOutcome",
    "StabilityReport",
    "Trajectory",
    "TrajectorySample",
    "Unique",
    "UsageError",
    "VectorFieldJet",
    "birkhoff_b1",
    "check_pure_rotation_claim",
    "classify_origin",
    "closed_form_quadratic",
    "dumps_jet",
    "flow_at",
    "flow_expand",
    "flow_numeric_oracle",
    "integrate_seasonal",
    "invert_map",
    "jet_add",
    "jet_compose",
    "jet_conjugate",
    "jet_eval",
    "jet_from_dict",
    "jet_mul",
    "jet_to_dict",
    "loads_jet",
    "obstruction_family_demo",
    "obstruction_map",
    "paradox_demo",
    "period_map_jet",
    "radial_drift_oracle",
    "resonance_table",
    "solve_level",
    "verdict_from_v1",
]
