"""Born-rule probabilities, Hardy condition reports, scans and sampling."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .construct import HardyObservables, ObservableFamily, hardy_setup
from .errors import HardyError, IneligibleState
from .state import (
    ELIGIBLE,
    Bipartition,
    MultipartiteState,
    all_cuts,
    classify,
    default_cut,
    schmidt_decompose,
)

ZERO_TOL = 1e-10
CLAMP_TOL = 1e-12

# (observable name, outcome) clauses; the first five must vanish, the last must not
HARDY_EVENTS = (
    (("X1", 1.0), ("X2", 1.0)),
    (("Y1", 1.0), ("X2", -1.0)),
    (("X1", -1.0), ("Y2", 1.0)),
    (("Y1", 1.0), ("X2", 0.0)),
    (("X1", 0.0), ("Y2", 1.0)),
    (("Y1", 1.0), ("Y2", 1.0)),
)


def _fmt_outcome(value) -> str:
    v = float(value)
    if v.is_integer():
        return f"{int(v):+d}" if v else "0"
    return repr(v)


def event_label(clauses) -> str:
    return ", ".join(f"{name}={_fmt_outcome(v)}" for name, v in clauses)


def _apply(psi: np.ndarray, P: np.ndarray, parties: Sequence[int]) -> np.ndarray:
    k = len(parties)
    moved = np.moveaxis(psi, parties, range(k))
    shape = moved.shape
    out = (P @ moved.reshape(P.shape[0], -1)).reshape(shape)
    return np.moveaxis(out, range(k), parties)


def joint_probability(state: MultipartiteState, assignment) -> float:
    """``<psi| (x)_k P_k |psi>`` for ``assignment = [(observable, outcome), ...]``.

    Observables must act on disjoint party groups; unmeasured parties get the
    identity.
    """
    seen: set[int] = set()
    psi0 = state.tensor()
    psi = psi0
    for obs, value in assignment:
        if seen & set(obs.parties):
            raise HardyError(f"observable {obs.name} overlaps an earlier party group")
        seen.update(obs.parties)
        psi = _apply(psi, obs.projector(value), obs.parties)
    p = float(np.vdot(psi0, psi).real)
    if p < -CLAMP_TOL or p > 1 + CLAMP_TOL:
        raise HardyError(f"probability {p!r} outside [0, 1]: projectors are inconsistent")
    return min(max(p, 0.0), 1.0)


def event_probability(state: MultipartiteState, assignment) -> float:
    """Like :func:`joint_probability`, but an outcome outside an observable's
    spectrum has probability zero instead of raising."""
    if any(not obs.has_outcome(v) for obs, v in assignment):
        return 0.0
    return joint_probability(state, assignment)


def hardy_closed_form(p1, p2):
    """Probability of the Hardy event from two Schmidt weights.

    Exact for ``Fraction`` inputs; returns 0 when the weights coincide or one
    of them vanishes.
    """
    if np.any(np.asarray(p1) < 0) or np.any(np.asarray(p2) < 0):
        raise HardyError("Schmidt weights must be nonnegative")
    den = p1 * p1 + p2 * p2 - p1 * p2
    if np.any(np.asarray(den) == 0):
        raise HardyError("closed form undefined for p1 = p2 = 0")
    return (p1 * p2 * (p1 - p2)) ** 2 / den**2


@dataclass(frozen=True)
class Peel:
    party: int
    weight: float
    t1_probability: float


@dataclass(frozen=True)
class HardyReport:
    labels: tuple[str, ...]
    probabilities: tuple[float, ...]
    pass_flags: tuple[bool, ...]
    closed_form: float
    expected_nonzero: float
    chosen_pair: tuple[int, int]
    weights: tuple[float, float]
    tolerance: float
    cut: str
    peels: tuple[Peel, ...] = ()

    @property
    def passed(self) -> bool:
        return all(self.pass_flags)

    @property
    def hardy_probability(self) -> float:
        return self.probabilities[-1]

    def to_dict(self) -> dict:
        doc = {
            "format": "hardy-report/1",
            "cut": self.cut,
            "chosen_pair": list(self.chosen_pair),
            "weights": list(self.weights),
            "tolerance": self.tolerance,
            "conditions": [
                {"event": label, "expect": "nonzero" if k == len(self.labels) - 1 else "zero",
                 "probability": p, "pass": ok}
                for k, (label, p, ok) in enumerate(zip(self.labels, self.probabilities, self.pass_flags))
            ],
            "closed_form": self.closed_form,
            "expected_hardy_probability": self.expected_nonzero,
            "pass": self.passed,
        }
        if self.peels:
            doc["peels"] = [
                {"party": pl.party + 1, "selected_weight": pl.weight, "t1_probability": pl.t1_probability}
                for pl in self.peels
            ]
        return doc


def evaluate_conditions(state, observables: HardyObservables, extra=(), tol=ZERO_TOL):
    """Six Hardy probabilities, each joined with the ``extra`` clauses."""
    by_name = {o.name: o for o in observables.as_tuple()}
    probs, flags, labels = [], [], []
    last = len(HARDY_EVENTS) - 1
    for k, clauses in enumerate(HARDY_EVENTS):
        assignment = [(by_name[n], v) for n, v in clauses] + list(extra)
        p = event_probability(state, assignment)
        probs.append(p)
        flags.append(p > tol if k == last else p < tol)
        labels.append(event_label(list(clauses) + [(o.name, v) for o, v in extra]))
    return tuple(labels), tuple(probs), tuple(flags)


def hardy_report(state: MultipartiteState, cut: Bipartition | None = None, pair=None, tol: float = ZERO_TOL) -> HardyReport:
    if cut is None:
        cut = default_cut(state.dims)
    sd = schmidt_decompose(state, cut)
    if pair is None:
        cls = classify(sd)
        if cls.tag != ELIGIBLE:
            raise IneligibleState(cls)
        pair = cls.witness_pair
    bases, observables = hardy_setup(sd, pair)
    labels, probs, flags = evaluate_conditions(state, observables, tol=tol)
    p1, p2 = bases.unitaries.p1, bases.unitaries.p2
    cf = hardy_closed_form(p1, p2)
    return HardyReport(labels, probs, flags, cf, cf, tuple(bases.pair), (p1, p2), tol, cut.label())


def search_best_cut(state: MultipartiteState, tol: float = ZERO_TOL) -> HardyReport:
    """Report for the eligible bipartition with the largest Hardy probability."""
    best = None
    last_cls = None
    for cut in all_cuts(state.dims):
        cls = classify(schmidt_decompose(state, cut))
        last_cls = cls
        if cls.tag != ELIGIBLE:
            continue
        rep = hardy_report(state, cut, tol=tol)
        if best is None or rep.closed_form > best.closed_form:
            best = rep
    if best is None:
        raise IneligibleState(last_cls, "no bipartition has two distinct Schmidt weights")
    return best


@dataclass(frozen=True, eq=False)
class ScanResult:
    theta: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    probability: np.ndarray
    argmax_theta: float
    max_probability: float
    refined_theta: float
    refined_probability: float

    def to_csv(self) -> str:
        lines = ["theta,p1,p2,hardy_probability"]
        for row in zip(self.theta, self.p1, self.p2, self.probability):
            lines.append(",".join(repr(float(x)) for x in row))
        return "\n".join(lines) + "\n"


def _two_qubit_curve(theta):
    c, s = np.cos(theta), np.sin(theta)
    return hardy_closed_form(c, s)


def scan_hardy(resolution: int) -> ScanResult:
    """Closed-form Hardy probability over ``p1 = cos t, p2 = sin t`` on ``[0, pi/2]``."""
    if resolution < 3:
        raise HardyError("scan resolution must be at least 3")
    theta = np.linspace(0.0, math.pi / 2, resolution)
    p1, p2 = np.cos(theta), np.sin(theta)
    prob = _two_qubit_curve(theta)
    k = int(np.argmax(prob))
    lo = theta[max(k - 1, 0)]
    hi = theta[min(k + 1, resolution - 1)]
    res = minimize_scalar(lambda t: -_two_qubit_curve(t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return ScanResult(theta, p1, p2, prob, float(theta[k]), float(prob[k]), float(res.x), float(-res.fun))


GENERATOR = "numpy.random.PCG64"


@dataclass(frozen=True)
class OutcomeCounts:
    settings: tuple[str, ...]
    outcomes: tuple[tuple[float, ...], ...]
    counts: tuple[int, ...]
    probabilities: tuple[float, ...]
    n: int
    seed: int
    chunks: tuple[int, ...]

    def count(self, outcome) -> int:
        key = tuple(float(v) for v in outcome)
        for o, c in zip(self.outcomes, self.counts):
            if o == key:
                return c
        return 0

    def to_dict(self) -> dict:
        return {
            "format": "hardy-samples/1",
            "settings": list(self.settings),
            "n": self.n,
            "seed": self.seed,
            "generator": GENERATOR,
            "schedule": list(self.chunks),
            "outcomes": [
                {"outcome": list(o), "count": c, "probability": p}
                for o, c, p in zip(self.outcomes, self.counts, self.probabilities)
            ],
        }


def joint_distribution(state: MultipartiteState, settings: Sequence[ObservableFamily]):
    """All joint outcomes of ``settings`` with their exact probabilities."""
    outcomes = list(itertools.product(*(obs.eigenvalues for obs in settings)))
    probs = np.array([joint_probability(state, list(zip(settings, o))) for o in outcomes])
    return outcomes, probs


def _split(n: int, chunks: int) -> list[int]:
    base, extra = divmod(n, chunks)
    return [base + (1 if k < extra else 0) for k in range(chunks)]


def sample_outcomes(state: MultipartiteState, settings: Sequence[ObservableFamily], n: int, seed: int,
                    chunks: int = 1) -> OutcomeCounts:
    """Draw ``n`` joint outcomes by inverse-CDF sampling of the exact distribution.

    Each chunk gets its own child of ``SeedSequence(seed)``, so the counts
    depend only on ``(seed, n, chunks)``.
    """
    if n < 1:
        raise HardyError("number of draws must be at least 1")
    if chunks < 1 or chunks > n:
        raise HardyError("chunks must be between 1 and n")
    outcomes, probs = joint_distribution(state, settings)
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-8:
        raise HardyError(f"joint distribution sums to {total!r}, not 1")
    cdf = np.cumsum(probs) / total
    cdf[-1] = 1.0
    sizes = _split(n, chunks)
    counts = np.zeros(len(outcomes), dtype=np.int64)
    for size, child in zip(sizes, np.random.SeedSequence(seed).spawn(chunks)):
        rng = np.random.Generator(np.random.PCG64(child))
        idx = np.searchsorted(cdf, rng.random(size), side="right")
        counts += np.bincount(idx, minlength=len(outcomes))
    return OutcomeCounts(
        settings=tuple(obs.name for obs in settings),
        outcomes=tuple(tuple(float(v) for v in o) for o in outcomes),
        counts=tuple(int(c) for c in counts),
        probabilities=tuple(float(p) for p in probs),
        n=n,
        seed=seed,
        chunks=tuple(sizes),
    )
