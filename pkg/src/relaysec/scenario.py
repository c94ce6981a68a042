"""Network parameterization, requirement targets and the scenario config format.

All quantities are linear-scale power ratios. Scenarios are frozen dataclasses;
``validate_equal`` / ``validate_geo`` are the only gatekeepers and every other
module assumes it receives validated values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

SOURCE = (0.0, 0.5)
DESTINATION = (1.0, 0.5)


class ScenarioError(ValueError):
    """A parameter lies outside its domain, or a config file is malformed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise ScenarioError(f"point ({self.x}, {self.y}) outside the unit square")


@dataclass(frozen=True)
class ScenarioEqual:
    """Equal path-loss network: every pairwise distance is 1."""

    n: int
    m: int
    gamma_r: float
    gamma_e: float
    tau: float
    es: float = 1.0
    n0: float = 0.0


@dataclass(frozen=True)
class ScenarioGeo:
    """Unit-square network with distance-dependent path loss ``d**-alpha``."""

    base: ScenarioEqual
    alpha: float
    a: float
    b: float
    r0: float
    source: tuple = field(default=SOURCE, init=False)
    destination: tuple = field(default=DESTINATION, init=False)


@dataclass(frozen=True)
class Requirements:
    eps_t: float
    eps_s: float


Scenario = Union[ScenarioEqual, ScenarioGeo]


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _finite(name, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or math.isnan(v):
        raise ScenarioError(f"{name} must be a number")


def validate_equal(s: ScenarioEqual) -> ScenarioEqual:
    if not _is_int(s.n) or s.n < 2:
        raise ScenarioError("n must be ≥ 2")
    if not _is_int(s.m) or s.m < 0:
        raise ScenarioError("m must be ≥ 0")
    for name in ("gamma_r", "gamma_e", "tau", "es", "n0"):
        _finite(name, getattr(s, name))
    for name in ("gamma_r", "gamma_e", "es"):
        if not getattr(s, name) > 0:
            raise ScenarioError(f"{name} must be positive")
    for name in ("tau", "n0"):
        if getattr(s, name) < 0:
            raise ScenarioError(f"{name} must be ≥ 0")
    if math.isinf(s.es) or math.isinf(s.n0):
        raise ScenarioError("es and n0 must be finite")
    return s


def validate_geo(s: ScenarioGeo) -> ScenarioGeo:
    validate_equal(s.base)
    for name in ("alpha", "a", "b", "r0"):
        _finite(name, getattr(s, name))
    if not s.alpha >= 2:
        raise ScenarioError("alpha must be ≥ 2")
    if math.isinf(s.alpha):
        raise ScenarioError("alpha must be finite")
    if not 0.0 <= s.a <= 0.5:
        raise ScenarioError("a must be in [0, 0.5]")
    if not 0.0 <= s.b <= 0.5:
        raise ScenarioError("b must be in [0, 0.5]")
    if not 0.0 <= s.r0 <= 1.0:
        raise ScenarioError("r0 must be in [0, 1]")
    return s


def validate_requirements(r: Requirements) -> Requirements:
    for name in ("eps_t", "eps_s"):
        v = getattr(r, name)
        _finite(name, v)
        if not 0.0 <= v <= 1.0:
            raise ScenarioError(f"{name} must be in [0, 1]")
    return r


def base_of(s: Scenario) -> ScenarioEqual:
    return s.base if isinstance(s, ScenarioGeo) else s


# ---------------------------------------------------------------------------
# config file: ``key = value`` lines, ``#`` comments

EQUAL_KEYS = ("n", "m", "gamma_r", "gamma_e", "tau", "es", "n0")
GEO_KEYS = ("alpha", "a", "b", "r0")
REQ_KEYS = ("eps_t", "eps_s")
RUN_KEYS = ("trials", "seed")
ALL_KEYS = ("protocol",) + EQUAL_KEYS + GEO_KEYS + REQ_KEYS + RUN_KEYS
INT_KEYS = frozenset({"protocol", "n", "m", "trials", "seed"})

DEFAULT_TRIALS = 10_000
DEFAULT_SEED = 0


@dataclass(frozen=True)
class RunConfig:
    """Everything a config file can express."""

    protocol: int
    scenario: Scenario
    requirements: Optional[Requirements] = None
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED

    @property
    def base(self) -> ScenarioEqual:
        return base_of(self.scenario)

    def values(self) -> dict:
        """Flat ``key -> value`` view; geo keys are absent for protocols 1 and 2."""
        out = {"protocol": self.protocol}
        base = self.base
        for k in EQUAL_KEYS:
            out[k] = getattr(base, k)
        if isinstance(self.scenario, ScenarioGeo):
            for k in GEO_KEYS:
                out[k] = getattr(self.scenario, k)
        if self.requirements is not None:
            out["eps_t"] = self.requirements.eps_t
            out["eps_s"] = self.requirements.eps_s
        out["trials"] = self.trials
        out["seed"] = self.seed
        return out

    def with_value(self, key: str, value) -> "RunConfig":
        """Copy with one flat key replaced, revalidated."""
        vals = self.values()
        if key not in ALL_KEYS or key == "protocol":
            raise ScenarioError(f"cannot vary key {key!r}")
        if key in GEO_KEYS and self.protocol != 3:
            raise ScenarioError(f"key {key!r} only applies to protocol 3")
        if key in REQ_KEYS and self.requirements is None:
            vals.update(eps_t=0.0, eps_s=0.0)
        vals[key] = round(value) if key in INT_KEYS else float(value)
        return from_values(vals)


def _convert(key, raw, line):
    try:
        if key in INT_KEYS:
            v = int(raw, 10)
        else:
            v = float(raw)
    except ValueError:
        kind = "an integer" if key in INT_KEYS else "a number"
        raise ScenarioError(f"{key} must be {kind}, got {raw!r}", line) from None
    return v


def db_to_linear(x: float) -> float:
    return 10.0 ** (x / 10.0)


def from_values(vals: dict, db: bool = False) -> RunConfig:
    """Build and validate a RunConfig from a flat mapping (missing keys get defaults)."""
    unknown = set(vals) - set(ALL_KEYS)
    if unknown:
        raise ScenarioError(f"unknown key {sorted(unknown)[0]!r}")
    for k in ("protocol", "n", "m", "gamma_r", "gamma_e", "tau"):
        if k not in vals:
            raise ScenarioError(f"missing required key {k!r}")
    protocol = vals["protocol"]
    if protocol not in (1, 2, 3):
        raise ScenarioError("protocol must be 1, 2 or 3")
    gamma_r, gamma_e = vals["gamma_r"], vals["gamma_e"]
    if db:
        gamma_r, gamma_e = db_to_linear(gamma_r), db_to_linear(gamma_e)
    base = ScenarioEqual(
        n=vals["n"],
        m=vals["m"],
        gamma_r=gamma_r,
        gamma_e=gamma_e,
        tau=vals["tau"],
        es=vals.get("es", 1.0),
        n0=vals.get("n0", 0.0),
    )
    if protocol == 3:
        for k in GEO_KEYS:
            if k not in vals:
                raise ScenarioError(f"missing required key {k!r} for protocol 3")
        scenario = validate_geo(ScenarioGeo(base, vals["alpha"], vals["a"], vals["b"], vals["r0"]))
    else:
        scenario = validate_equal(base)
    reqs = None
    if "eps_t" in vals or "eps_s" in vals:
        if not ("eps_t" in vals and "eps_s" in vals):
            raise ScenarioError("eps_t and eps_s must be given together")
        reqs = validate_requirements(Requirements(vals["eps_t"], vals["eps_s"]))
    trials = vals.get("trials", DEFAULT_TRIALS)
    seed = vals.get("seed", DEFAULT_SEED)
    if trials < 1:
        raise ScenarioError("trials must be ≥ 1")
    if not 0 <= seed < 2**64:
        raise ScenarioError("seed must be in [0, 2**64)")
    return RunConfig(protocol, scenario, reqs, trials, seed)


def parse_config(text: str, db: bool = False) -> RunConfig:
    """Parse config text. Errors carry the offending line number when there is one."""
    vals = {}
    lines = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key or not raw:
            raise ScenarioError(f"expected 'key = value', got {line!r}", lineno)
        if key not in ALL_KEYS:
            raise ScenarioError(f"unknown key {key!r}", lineno)
        if key in vals:
            raise ScenarioError(f"duplicate key {key!r}", lineno)
        vals[key] = _convert(key, raw, lineno)
        lines[key] = lineno
    # geo keys are ignored for the equal path-loss protocols
    if vals.get("protocol") in (1, 2):
        for k in GEO_KEYS:
            vals.pop(k, None)
    try:
        return from_values(vals, db=db)
    except ScenarioError as exc:
        if exc.line is None:
            hit = next((k for k in ALL_KEYS if k in str(exc) and k in lines), None)
            if hit is not None:
                raise ScenarioError(str(exc), lines[hit]) from None
        raise


def load_config(path, db: bool = False) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), db=db)


def format_value(v) -> str:
    if isinstance(v, int) and not isinstance(v, bool):
        return str(v)
    return repr(float(v))


def serialize_config(cfg: RunConfig) -> str:
    """Inverse of ``parse_config`` (without ``db``): floats are written with repr."""
    return "".join(f"{k} = {format_value(v)}\n" for k, v in cfg.values().items())


def replace_base(s: Scenario, **changes) -> Scenario:
    if isinstance(s, ScenarioGeo):
        return replace(s, base=replace(s.base, **changes))
    return replace(s, **changes)


__all__ = [
    "DESTINATION",
    "SOURCE",
    "Point",
    "Requirements",
    "RunConfig",
    "ScenarioEqual",
    "ScenarioError",
    "ScenarioGeo",
    "base_of",
    "db_to_linear",
    "from_values",
    "load_config",
    "parse_config",
    "serialize_config",
    "validate_equal",
    "validate_geo",
    "validate_requirements",
]
