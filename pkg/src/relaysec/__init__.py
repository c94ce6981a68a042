"""Outage bounds and Monte Carlo validation for two-hop cooperative-jamming relay networks."""

from .analytic import BoundPair, GeoConstants, TauWindow, geo_constants, union_outage
from .montecarlo import OutageEstimate, TrialOutcome, estimate, simulate, wilson_interval
from .scenario import (
    Point,
    Requirements,
    RunConfig,
    ScenarioEqual,
    ScenarioError,
    ScenarioGeo,
    load_config,
    parse_config,
    validate_equal,
    validate_geo,
)

__version__ = "0.1.0"
