"""Mamdani fuzzy controller mapping pixel displacements to servo degrees.

X and Y displacements run through triangular-membership inference with
centroid defuzzification; Z bypasses inference and is smoothed with a short
moving average.  The defuzzified value lives on a 0..180 degree universe
with 90 as "hold": the per-frame angle delta is (centroid - 90), rate
limited, and accumulated into absolute servo angles.

Default rule base per axis (identical for X and Y):

    input px      NL(-100,-100,-50)  NS(-100,-50,-5)  ZE(-25,0,25)
                  PS(5,50,100)       PL(50,100,100)
    output deg    DNL@18  DNS@54  DZE@90  DPS@126  DPL@162  (half-width 36)
    rules         NL->DNL  NS->DNS  ZE->DZE  PS->DPS  PL->DPL

The +-5 px gap before NS/PS rise gives small hand tremor zero authority:
displacements inside it fire only ZE and defuzzify to exactly 90.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .vision import Displacement

# Displacement universe (px) and servo universe (deg).
DISPLACEMENT_RANGE = (-100.0, 100.0)
DEGREE_RANGE = (0.0, 180.0)

NEUTRAL_DEG = 90.0
RATE_LIMIT_DEG = 15.0  # max |angle change| per frame on X and Y

Z_WINDOW = 5
Z_GAIN = 0.2  # degrees per smoothed pixel

# Angle deltas below this are numeric dust from the float centroid sum;
# snap them to zero so a symmetric aggregate really holds its angle.
_DELTA_EPS = 1e-9


class ServoCommand(NamedTuple):
    """Absolute servo target, integer degrees in [0, 180] per axis."""

    x: int
    y: int
    z: int
    seq: int = 0


@dataclass(frozen=True)
class FuzzySet:
    """Triangular membership: 0 at a and c, 1 at b, linear between."""

    label: str
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a <= self.b <= self.c):
            raise ValueError(f"set {self.label}: need a <= b <= c, got {self!r}")

    def membership(self, v: float) -> float:
        if v < self.a or v > self.c:
            return 0.0
        if v == self.b:
            return 1.0
        if v < self.b:
            return (v - self.a) / (self.b - self.a)
        return (self.c - v) / (self.c - self.b)


def membership(fset: FuzzySet, v: float) -> float:
    """Degree of relevance of value ``v`` in ``fset``, in [0, 1]."""
    return fset.membership(v)


@dataclass
class RuleBase:
    """Five input sets, five output sets, and a one-to-one label mapping."""

    input_sets: list[FuzzySet]
    output_sets: list[FuzzySet]
    rules: dict[str, str]

    def __post_init__(self):
        if len(self.rules) != 5:
            raise ValueError(f"need exactly 5 rules, got {len(self.rules)}")
        by_in = {s.label: s for s in self.input_sets}
        by_out = {s.label: s for s in self.output_sets}
        try:
            self._pairs = [(by_in[i], by_out[o]) for i, o in self.rules.items()]
        except KeyError as exc:
            raise ValueError(f"rule references unknown set label {exc}") from None
        lo, hi = DISPLACEMENT_RANGE
        probes = np.linspace(lo, hi, 801)
        covered = np.zeros(probes.shape, dtype=bool)
        for s in self.input_sets:
            covered |= np.array([s.membership(v) > 0.0 for v in probes])
        if not covered.all():
            gap = probes[~covered][0]
            raise ValueError(f"input sets leave the universe uncovered near {gap:+.2f} px")
        # Sample grid spanning every output support at 1 degree steps,
        # with per-rule membership rows precomputed for fast inference.
        start = math.floor(min(s.a for s in self.output_sets))
        stop = math.ceil(max(s.c for s in self.output_sets))
        self._samples = np.arange(start, stop + 1, dtype=np.float64)
        self._out_rows = np.array(
            [[out.membership(v) for v in self._samples] for _, out in self._pairs]
        )


def _default_sets() -> tuple[list[FuzzySet], list[FuzzySet], dict[str, str]]:
    inputs = [
        FuzzySet("NL", -100.0, -100.0, -50.0),
        FuzzySet("NS", -100.0, -50.0, -5.0),
        FuzzySet("ZE", -25.0, 0.0, 25.0),
        FuzzySet("PS", 5.0, 50.0, 100.0),
        FuzzySet("PL", 50.0, 100.0, 100.0),
    ]
    outputs = [
        FuzzySet("DNL", -18.0, 18.0, 54.0),
        FuzzySet("DNS", 18.0, 54.0, 90.0),
        FuzzySet("DZE", 54.0, 90.0, 126.0),
        FuzzySet("DPS", 90.0, 126.0, 162.0),
        FuzzySet("DPL", 126.0, 162.0, 198.0),
    ]
    rules = {"NL": "DNL", "NS": "DNS", "ZE": "DZE", "PS": "DPS", "PL": "DPL"}
    return inputs, outputs, rules


def default_rule_base() -> RuleBase:
    """The stock rule base (used identically for the X and Y axes)."""
    return RuleBase(*_default_sets())


def load_rule_bases(text: str) -> dict[str, RuleBase]:
    """Parse the plain-text rule config into per-axis rule bases.

    Line grammar (whitespace separated, ``#`` comments):

        <axis> <label> <a> <b> <c>      declares a fuzzy set
        <axis> <input_label> <output_label>   declares a rule

    A set referenced as a rule's input belongs to the displacement
    universe; referenced as output, to the degree universe.
    """
    sets: dict[tuple[str, str], FuzzySet] = {}
    rules: dict[str, list[tuple[str, str]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) == 5:
            axis, label = parts[0], parts[1]
            try:
                a, b, c = (float(p) for p in parts[2:])
            except ValueError:
                raise ValueError(f"line {lineno}: bad vertex in {raw!r}") from None
            sets[(axis, label)] = FuzzySet(label, a, b, c)
        elif len(parts) == 3:
            axis, in_label, out_label = parts
            rules.setdefault(axis, []).append((in_label, out_label))
        else:
            raise ValueError(f"line {lineno}: expected 3 or 5 fields, got {len(parts)}")

    bases: dict[str, RuleBase] = {}
    for axis, pairs in rules.items():
        try:
            input_sets = [sets[(axis, i)] for i, _ in pairs]
            output_sets = [sets[(axis, o)] for _, o in pairs]
        except KeyError as exc:
            raise ValueError(f"axis {axis}: rule references undeclared set {exc}") from None
        bases[axis] = RuleBase(input_sets, output_sets, dict(pairs))
    return bases


def infer_axis(d: float, rb: Optional[RuleBase] = None) -> float:
    """Mamdani inference for one axis; returns a crisp degree value.

    The displacement is clamped to [-100, 100], each rule's output set is
    clipped at the rule's activation, the clipped sets are max-aggregated
    over the sampled degree grid, and the centroid of the aggregate is
    returned.  An all-zero aggregate (impossible with a covering rule base)
    falls back to 90.
    """
    if rb is None:
        rb = _stock_rule_base()
    lo, hi = DISPLACEMENT_RANGE
    d = min(hi, max(lo, float(d)))
    acts = np.array([inp.membership(d) for inp, _ in rb._pairs])
    agg = np.max(np.minimum(acts[:, None], rb._out_rows), axis=0)
    area = agg.sum()
    if area <= 0.0:
        return NEUTRAL_DEG
    return float(np.dot(rb._samples, agg) / area)


@dataclass
class ControllerState:
    """Absolute servo angles plus the Z smoothing window."""

    angle_x: float = NEUTRAL_DEG
    angle_y: float = NEUTRAL_DEG
    angle_z: float = NEUTRAL_DEG
    z_history: deque = field(default_factory=lambda: deque(maxlen=Z_WINDOW))

    def copy(self) -> "ControllerState":
        return ControllerState(
            self.angle_x,
            self.angle_y,
            self.angle_z,
            deque(self.z_history, maxlen=Z_WINDOW),
        )


def smooth_z(dz: float, state: ControllerState, k_z: float = Z_GAIN) -> int:
    """Push dz into the window and return the scaled mean, in whole degrees.

    The mean of the last few dz values suppresses one-frame depth spikes;
    the result is the signed Z angle delta for this frame.
    """
    state.z_history.append(float(dz))
    mean = sum(state.z_history) / len(state.z_history)
    return round(mean * k_z)


def step_controller(
    d: Displacement,
    state: ControllerState,
    rules: Optional[tuple[RuleBase, RuleBase]] = None,
    seq: int = 0,
) -> tuple[ServoCommand, ControllerState]:
    """Advance the controller one frame; returns (command, new state).

    X and Y deltas come from fuzzy inference (centroid minus 90), clamped to
    +-15 deg per frame; the Z delta comes from the smoothed mean.  Angles
    accumulate and clamp to [0, 180]; the command carries them rounded to
    integers.  The input state is not modified.
    """
    if rules is None:
        rb = _stock_rule_base()
        rb_x = rb_y = rb
    else:
        rb_x, rb_y = rules
    new = state.copy()

    delta_x = _snap(infer_axis(d.dx, rb_x) - NEUTRAL_DEG)
    delta_y = _snap(infer_axis(d.dy, rb_y) - NEUTRAL_DEG)
    delta_x = min(RATE_LIMIT_DEG, max(-RATE_LIMIT_DEG, delta_x))
    delta_y = min(RATE_LIMIT_DEG, max(-RATE_LIMIT_DEG, delta_y))
    delta_z = smooth_z(d.dz, new)

    new.angle_x = _clamp_deg(state.angle_x + delta_x)
    new.angle_y = _clamp_deg(state.angle_y + delta_y)
    new.angle_z = _clamp_deg(state.angle_z + delta_z)
    cmd = ServoCommand(round(new.angle_x), round(new.angle_y), round(new.angle_z), seq)
    return cmd, new


def _clamp_deg(v: float) -> float:
    lo, hi = DEGREE_RANGE
    return min(hi, max(lo, v))


def _snap(delta: float) -> float:
    return 0.0 if abs(delta) < _DELTA_EPS else delta


_STOCK: Optional[RuleBase] = None


def _stock_rule_base() -> RuleBase:
    global _STOCK
    if _STOCK is None:
        _STOCK = default_rule_base()
    return _STOCK


def axis_rules(bases: dict[str, RuleBase]) -> tuple[RuleBase, RuleBase]:
    """Pick the (x, y) rule-base pair out of a parsed config."""
    try:
        return bases["x"], bases["y"]
    except KeyError as exc:
        raise ValueError(f"rule config is missing axis {exc}") from None
