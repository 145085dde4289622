"""Analytic factory model: depths, rates, distance selection, qubit totals.

All rates are exact rationals in kHz; rounding happens only in the display
helpers (two significant digits). Times are microseconds as Fractions.
"""

from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

from .exceptions import ConfigError

THRESHOLD_ERROR = 0.01

PATCHES_PER_FACTORY = 15 * 8


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclasses.dataclass(frozen=True)
class PhysicalAssumptions:
    cycle_time_us: Fraction = Fraction(1)
    reaction_time_us: Fraction = Fraction(10)
    gate_error: float = 1e-3
    connectivity: str = "planar"

    def __post_init__(self) -> None:
        object.__setattr__(self, "cycle_time_us", _frac(self.cycle_time_us))
        object.__setattr__(self, "reaction_time_us",
                           _frac(self.reaction_time_us))
        if self.cycle_time_us <= 0 or self.reaction_time_us <= 0:
            raise ValueError("times must be positive")
        if self.connectivity != "planar":
            raise ValueError("only planar connectivity is modeled")
        if not 0 < self.gate_error:
            raise ValueError("gate_error must be positive")
        if self.gate_error >= THRESHOLD_ERROR:
            raise ValueError(
                "gate_error too close to threshold for tractable computation")


@dataclasses.dataclass(frozen=True)
class FactorySpec:
    """Two-level CCZ factory: six level-1 T factories feed one level-2
    unit that consumes 8 T states per CCZ state."""

    d1: int = 17
    d2: int = 27
    injection_style: str = "overlapped"
    t1_factory_count: int = 6
    t_states_per_ccz: int = 8
    footprint: tuple[int, int] = (15, 8)

    def __post_init__(self) -> None:
        for d in (self.d1, self.d2):
            if d < 3 or d % 2 == 0:
                raise ValueError(f"code distance must be odd and >= 3: {d}")
        if self.injection_style not in ("overlapped", "legacy"):
            raise ValueError(f"bad injection style {self.injection_style!r}")

    @property
    def ccz_depth_cycles(self) -> Fraction:
        # overlapping the final injection layer saves 0.5*d2 cycles
        mult = Fraction(5) if self.injection_style == "overlapped" \
            else Fraction(11, 2)
        return mult * self.d2

    @property
    def t1_depth_cycles(self) -> Fraction:
        return Fraction(23, 4) * self.d1


@dataclasses.dataclass(frozen=True)
class ThroughputReport:
    level2_rate_khz: Fraction
    level1_bound_khz: Fraction
    effective_rate_khz: Fraction
    limiting_factor: str
    factories_needed: int
    physical_qubits_total: int


def qubits_per_patch(d: int) -> int:
    """Physical qubits of one distance-d logical patch (data + measure,
    with boundary allowance): 2*(d+1)^2. A model choice, calibrated so 14
    factories at d2=27 land within 2% of 2.6 million."""
    return 2 * (d + 1) ** 2


def physical_qubits(spec: FactorySpec, n_factories: int) -> int:
    if n_factories < 1:
        raise ValueError("need at least one factory")
    w, h = spec.footprint
    return n_factories * w * h * qubits_per_patch(spec.d2)


def ccz_rate(spec: FactorySpec,
             assumptions: PhysicalAssumptions) -> ThroughputReport:
    """Output rate of one factory and the factory count needed to keep a
    reaction-limited computation fed."""
    cycle = assumptions.cycle_time_us
    level2 = 1000 / (spec.ccz_depth_cycles * cycle)
    level1 = 1000 / (spec.t1_depth_cycles * cycle
                     * spec.t_states_per_ccz / spec.t1_factory_count)
    effective = min(level2, level1)
    limiting = "level2" if level2 <= level1 else "level1"
    n = factories_for_reaction_limit(spec, assumptions)
    return ThroughputReport(
        level2_rate_khz=level2,
        level1_bound_khz=level1,
        effective_rate_khz=effective,
        limiting_factor=limiting,
        factories_needed=n,
        physical_qubits_total=physical_qubits(spec, n),
    )


def factories_for_reaction_limit(spec: FactorySpec,
                                 assumptions: PhysicalAssumptions) -> int:
    """One CCZ state per reaction time: ceil(reaction rate / factory
    rate)."""
    cycle = assumptions.cycle_time_us
    level2 = 1000 / (spec.ccz_depth_cycles * cycle)
    level1 = 1000 / (spec.t1_depth_cycles * cycle
                     * spec.t_states_per_ccz / spec.t1_factory_count)
    effective = min(level2, level1)
    reaction_rate = 1000 / assumptions.reaction_time_us
    return math.ceil(reaction_rate / effective)


def logical_error_rate(d: int, gate_error: float, *,
                       constant: float = 0.1,
                       threshold: float = THRESHOLD_ERROR) -> float:
    """Per-patch, per-d-cycles logical error: the standard exponential
    suppression fit constant * (p/p_th)^((d+1)/2)."""
    return constant * (gate_error / threshold) ** ((d + 1) // 2)


@dataclasses.dataclass(frozen=True)
class DistanceSelection:
    d1: int
    d2: int
    t_factory_fallback: bool


# Spacetime-volume weights of the two code levels, in patch*d-cycle units
# per delivered CCZ state. Calibrated so that gate error 1e-3 with volumes
# around 1e8 selects (17, 27) and 1e-4 selects (9, 13); see the module
# tests for the brute-force confirmation sweep.
LEVEL1_VOLUME_WEIGHT = 0.1
LEVEL2_VOLUME_WEIGHT = 2e4

_MAX_DISTANCE = 199


def select_code_distances(assumptions: PhysicalAssumptions,
                          target_volume: float, *,
                          budget: float = 0.01,
                          fallback_volume: float = 1e13
                          ) -> DistanceSelection:
    """Smallest odd distances keeping the modeled total logical error of
    target_volume CCZ states under the budget, split evenly between the
    two levels. Above fallback_volume the report advises switching the
    level-2 stage to T factories."""
    if target_volume < 1:
        raise ValueError("target volume must be at least 1")
    if assumptions.gate_error >= THRESHOLD_ERROR:
        raise ValueError(
            "gate_error too close to threshold for tractable computation")
    half = budget / 2

    def pick(weight: float) -> int:
        for d in range(3, _MAX_DISTANCE + 2, 2):
            err = target_volume * weight \
                * logical_error_rate(d, assumptions.gate_error)
            if err <= half:
                return d
        raise ValueError("no code distance meets the error budget")

    return DistanceSelection(
        d1=pick(LEVEL1_VOLUME_WEIGHT),
        d2=pick(LEVEL2_VOLUME_WEIGHT),
        t_factory_fallback=target_volume > fallback_volume,
    )


def format_khz(rate: Fraction) -> str:
    """Two significant digits, matching how rates are quoted."""
    v = float(rate)
    s = f"{v:.2g}"
    if "e" in s:
        s = str(int(round(v)))
    return s


def format_ms(ns: int) -> str:
    v = ns / 1e6
    s = f"{v:.2g}"
    if "e" in s:
        s = str(int(round(v)))
    return s + " ms"


_ASSUMPTION_KEYS = ("cycle_time_us", "reaction_time_us", "gate_error")
_OVERRIDE_KEYS = ("d1", "d2")


def parse_assumptions_file(text: str) -> tuple[PhysicalAssumptions, dict]:
    """Key/value config: `key = value`, '#' comments. Returns assumptions
    plus optional d1/d2 overrides. Unknown keys are rejected with their
    line number."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _ASSUMPTION_KEYS + _OVERRIDE_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = val
        try:
            if key in _OVERRIDE_KEYS:
                int(val)
            elif key == "gate_error":
                float(val)
            else:
                Fraction(val)
        except ValueError:
            raise ConfigError(
                f"line {lineno}: bad value {val!r} for {key}") from None
    kwargs = {}
    if "cycle_time_us" in values:
        kwargs["cycle_time_us"] = Fraction(values["cycle_time_us"])
    if "reaction_time_us" in values:
        kwargs["reaction_time_us"] = Fraction(values["reaction_time_us"])
    if "gate_error" in values:
        kwargs["gate_error"] = float(values["gate_error"])
    try:
        assumptions = PhysicalAssumptions(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    overrides = {k: int(values[k]) for k in _OVERRIDE_KEYS if k in values}
    return assumptions, overrides
