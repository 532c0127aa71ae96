"""Walk specifications: step distributions, model hypotheses, drift regimes, presets.

A walk is a homogeneous nearest-neighbor random walk on the quarter plane
``Z+^2``, specified by the eight transition probabilities ``p[(di, dj)]``
for ``(di, dj)`` in ``{-1,0,1}^2`` minus ``(0,0)``.  Everything downstream
(kernel algebra, gluing functions, integral representations, asymptotics)
is a function of this object.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .errors import ValidationError

#: All admissible steps, in a fixed canonical order.
STEPS = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)

#: The eight neighbors in cyclic (counterclockwise-adjacent) order, used by
#: the "no three consecutive zeros" non-degeneracy check.
CYCLE = ((1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1))

SUM_TOL = 1e-12
DRIFT_TOL = 1e-12


@dataclass(frozen=True)
class StepDistribution:
    """Immutable transition law of the walk.

    ``steps`` holds ``((di, dj), probability)`` pairs in canonical order;
    zero-probability steps may be omitted.  Instances are validated on
    construction: probabilities are nonnegative, sum to one within 1e-12,
    and there is no self-loop ``(0, 0)`` entry.
    """

    steps: tuple[tuple[tuple[int, int], float], ...]

    def __post_init__(self):
        seen = set()
        for (di, dj), prob in self.steps:
            if (di, dj) == (0, 0):
                raise ValidationError("self-loop step (0,0) is not allowed")
            if (di, dj) not in STEPS:
                raise ValidationError(f"step ({di},{dj}) is not a nearest-neighbor step")
            if (di, dj) in seen:
                raise ValidationError(f"duplicate step ({di},{dj})")
            if not math.isfinite(prob) or prob < 0.0:
                raise ValidationError(f"step ({di},{dj}) has invalid probability {prob!r}")
            seen.add((di, dj))
        total = math.fsum(prob for _, prob in self.steps)
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(f"step probabilities sum to {total!r}, expected 1")

    @classmethod
    def from_probs(cls, probs: Mapping[tuple[int, int], float]) -> "StepDistribution":
        ordered = tuple((s, float(probs[s])) for s in STEPS if s in probs)
        if len(ordered) != len(probs):
            extra = set(probs) - set(STEPS)
            raise ValidationError(f"invalid steps in distribution: {sorted(extra)}")
        return cls(ordered)

    @property
    def probs(self) -> dict[tuple[int, int], float]:
        return dict(self.steps)

    def prob(self, di: int, dj: int) -> float:
        for (si, sj), p in self.steps:
            if (si, sj) == (di, dj):
                return p
        return 0.0

    def as_array(self) -> np.ndarray:
        """3x3 array ``a[di+1, dj+1]`` of step probabilities; ``a[1,1]`` is 0."""
        arr = np.zeros((3, 3))
        for (di, dj), p in self.steps:
            arr[di + 1, dj + 1] = p
        return arr

    def support(self) -> frozenset[tuple[int, int]]:
        return frozenset(s for s, p in self.steps if p > 0.0)


@dataclass(frozen=True)
class DriftVector:
    """Mean step ``(mx, my)`` of the walk."""

    mx: float
    my: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.mx, self.my)


class Regime(Enum):
    """Drift regime of a validated walk."""

    ZERO_ZERO = "ZeroZero"      # both drifts zero
    NEG_NEG = "NegNeg"          # vertical drift negative, horizontal nonpositive
    NEG_ZERO = "NegZero"        # horizontal drift negative, vertical zero
    H2PRIME = "H2Prime"         # all mass on W/SW/S/SE/NW steps (degenerate family)
    UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of the model-hypothesis checks.

    ``h1``   eight-neighbor homogeneous walk (structural; true for any
             constructed :class:`StepDistribution`),
    ``h2``   no three consecutive zeros in the cyclic neighbor list,
    ``h3``   the four diagonal probabilities do not carry all the mass,
    ``h4``   both drifts nonpositive,
    ``h2prime``  all mass on the five steps W, NW, SW, S, SE with
             ``p(-1,1) != 0``, ``p(1,-1) != 0`` and ``p(-1,1)+p(1,-1) != 1``.
    """

    h1: bool
    h2: bool
    h3: bool
    h4: bool
    h2prime: bool
    messages: tuple[str, ...] = ()

    def all_standard(self) -> bool:
        return self.h1 and self.h2 and self.h3 and self.h4


@dataclass(frozen=True)
class WalkClass:
    tag: Regime
    report: AssumptionReport


def validate(p: StepDistribution) -> AssumptionReport:
    """Check the model hypotheses and return per-hypothesis flags.

    ``h2prime`` is evaluated independently of ``h2`` (a walk in the
    degenerate five-step family always fails ``h2``).
    """
    messages = []

    h1 = True  # construction enforces the structural hypothesis

    cyc = [p.prob(*s) for s in CYCLE]
    h2 = True
    for k in range(len(cyc)):
        if cyc[k] == 0.0 and cyc[(k + 1) % 8] == 0.0 and cyc[(k + 2) % 8] == 0.0:
            h2 = False
            messages.append(
                "three consecutive zero steps in the cyclic neighbor list "
                f"starting at {CYCLE[k]}"
            )
            break

    diag = p.prob(1, 1) + p.prob(-1, 1) + p.prob(-1, -1) + p.prob(1, -1)
    h3 = diag < 1.0 - SUM_TOL
    if not h3:
        messages.append(f"diagonal steps carry all the mass (sum {diag!r})")

    mx, my = _drift_tuple(p)
    h4 = mx <= DRIFT_TOL and my <= DRIFT_TOL
    if not h4:
        messages.append(f"positive drift: ({mx!r}, {my!r})")

    five = (p.prob(-1, 1) + p.prob(-1, 0) + p.prob(-1, -1)
            + p.prob(0, -1) + p.prob(1, -1))
    h2prime = (
        abs(five - 1.0) <= SUM_TOL
        and p.prob(-1, 1) != 0.0
        and p.prob(1, -1) != 0.0
        and abs(p.prob(-1, 1) + p.prob(1, -1) - 1.0) > SUM_TOL
    )

    return AssumptionReport(h1, h2, h3, h4, h2prime, tuple(messages))


def _drift_tuple(p: StepDistribution) -> tuple[float, float]:
    # fsum so that exactly mirrored weights cancel exactly
    mx = math.fsum(di * prob for (di, dj), prob in p.steps)
    my = math.fsum(dj * prob for (di, dj), prob in p.steps)
    return mx, my


def drift(p: StepDistribution) -> DriftVector:
    """Mean step vector ``(sum_i i*p, sum_j j*p)``."""
    return DriftVector(*_drift_tuple(p))


def classify(p: StepDistribution, tol: float = DRIFT_TOL) -> WalkClass:
    """Assign the drift regime used to dispatch asymptotic laws.

    Walks satisfying the standard hypotheses are tagged by their drift
    signs; walks that fail them but belong to the degenerate five-step
    family get ``H2PRIME``; everything else is ``UNSUPPORTED``.
    """
    report = validate(p)
    mx, my = _drift_tuple(p)
    zx, zy = abs(mx) <= tol, abs(my) <= tol

    if report.all_standard():
        if zx and zy:
            return WalkClass(Regime.ZERO_ZERO, report)
        if my < -tol and mx <= tol:
            return WalkClass(Regime.NEG_NEG, report)
        if mx < -tol and zy:
            return WalkClass(Regime.NEG_ZERO, report)
        return WalkClass(Regime.UNSUPPORTED, report)
    if report.h2prime:
        return WalkClass(Regime.H2PRIME, report)
    return WalkClass(Regime.UNSUPPORTED, report)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def preset(name: str, params: Iterable[float] = ()) -> StepDistribution:
    """Named walk families.

    ``voter``
        six equal steps of 1/6 (all neighbors except the two diagonals
        NE and SW); zero drift.
    ``simple``
        four axis steps of 1/4; zero drift.
    ``tandem(lam, nu)``
        ``p(1,0)=lam, p(0,-1)=nu, p(-1,1)=nu`` with ``lam + 2 nu = 1``;
        the two-station tandem queue walk.
    ``nucleosome(lam, nu)``
        three-particle gap walk: outer particles have weight ``lam``,
        the middle one ``nu``; normalized as
        ``p(+-1,0)=p(0,+-1)=lam/(2(2 lam+nu))``,
        ``p(1,-1)=p(-1,1)=nu/(2(2 lam+nu))``; zero drift.
    ``asym_simple(p, q, r, s)``
        axis steps ``p(1,0)=p, p(-1,0)=q, p(0,1)=r, p(0,-1)=s`` with
        ``p+q+r+s = 1``.
    """
    params = tuple(float(v) for v in params)

    if name == "voter":
        _expect_params(name, params, 0)
        sixth = 1.0 / 6.0
        return StepDistribution.from_probs({
            (1, 0): sixth, (1, -1): sixth, (0, -1): sixth,
            (-1, 0): sixth, (-1, 1): sixth, (0, 1): sixth,
        })

    if name == "simple":
        _expect_params(name, params, 0)
        return StepDistribution.from_probs({
            (1, 0): 0.25, (0, 1): 0.25, (-1, 0): 0.25, (0, -1): 0.25,
        })

    if name == "tandem":
        _expect_params(name, params, 2)
        lam, nu = params
        if lam <= 0 or nu <= 0:
            raise ValidationError("tandem requires lam > 0 and nu > 0")
        if abs(lam + 2 * nu - 1.0) > SUM_TOL:
            raise ValidationError(
                f"tandem requires lam + 2 nu = 1, got {lam + 2 * nu!r}")
        return StepDistribution.from_probs({(1, 0): lam, (0, -1): nu, (-1, 1): nu})

    if name == "nucleosome":
        _expect_params(name, params, 2)
        lam, nu = params
        if lam <= 0 or nu <= 0:
            raise ValidationError("nucleosome requires lam > 0 and nu > 0")
        axis = lam / (2.0 * (2.0 * lam + nu))
        diag = nu / (2.0 * (2.0 * lam + nu))
        return StepDistribution.from_probs({
            (1, 0): axis, (-1, 0): axis, (0, 1): axis, (0, -1): axis,
            (1, -1): diag, (-1, 1): diag,
        })

    if name == "asym_simple":
        _expect_params(name, params, 4)
        pe, pw, pn, ps = params
        if min(params) < 0:
            raise ValidationError("asym_simple requires nonnegative weights")
        if abs(sum(params) - 1.0) > SUM_TOL:
            raise ValidationError(
                f"asym_simple requires p+q+r+s = 1, got {sum(params)!r}")
        return StepDistribution.from_probs({
            (1, 0): pe, (-1, 0): pw, (0, 1): pn, (0, -1): ps,
        })

    raise ValidationError(f"unknown preset {name!r}")


PRESET_NAMES = ("voter", "simple", "tandem", "nucleosome", "asym_simple")


def _expect_params(name, params, n):
    if len(params) != n:
        raise ValidationError(f"preset {name!r} takes {n} parameters, got {len(params)}")


def random_zero_drift(rng: np.random.Generator) -> StepDistribution:
    """Random walk with exactly zero drift.

    Draws eight uniform weights, normalizes, then symmetrizes
    ``p <- (p + reversed(p)) / 2`` so mirrored steps carry identical
    weights and both drift sums cancel exactly in floating point.
    """
    w = rng.uniform(0.0, 1.0, size=8)
    w = w / w.sum()
    probs = {}
    for k, s in enumerate(STEPS):
        probs[s] = w[k]
    sym = {s: 0.5 * (probs[s] + probs[(-s[0], -s[1])]) for s in STEPS}
    total = math.fsum(sym.values())
    sym = {s: v / total for s, v in sym.items()}
    return StepDistribution.from_probs(sym)


# ---------------------------------------------------------------------------
# Walk-spec files
# ---------------------------------------------------------------------------

def loads_walk(text: str) -> StepDistribution:
    """Parse a walk-spec JSON document.

    Format: ``{"steps": [{"di": 1, "dj": 0, "p": 0.2}, ...]}``.
    Probabilities may be numbers or decimal strings.  Duplicate
    ``(di, dj)`` entries are an error.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "steps" not in doc:
        raise ValidationError('walk-spec document must be {"steps": [...]}')
    entries = doc["steps"]
    if not isinstance(entries, list):
        raise ValidationError('"steps" must be a list')
    probs: dict[tuple[int, int], float] = {}
    for k, entry in enumerate(entries):
        try:
            di, dj = int(entry["di"]), int(entry["dj"])
            prob = float(entry["p"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"steps[{k}] is malformed: {exc}") from exc
        if (di, dj) in probs:
            raise ValidationError(f"duplicate step ({di},{dj}) at steps[{k}]")
        probs[(di, dj)] = prob
    return StepDistribution.from_probs(probs)


def load_walk(path: str) -> StepDistribution:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_walk(fh.read())


def dumps_walk(p: StepDistribution) -> str:
    return json.dumps(
        {"steps": [{"di": di, "dj": dj, "p": prob} for (di, dj), prob in p.steps]},
        indent=2,
    )
