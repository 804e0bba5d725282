"""Hardy measurement construction from a Schmidt decomposition.

Two 2x2 unitaries ``U`` and ``V`` built from a pair of distinct Schmidt
weights rotate the two selected Schmidt vectors on each side into the
``x`` basis (``U``) and the ``y`` basis (``V U``).  The resulting
observables take the values +1/-1 on those bases and 0 on everything
orthogonal to the two-dimensional span.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import HardyError, IneligibleState
from .state import (
    ELIGIBLE,
    ZERO_WEIGHT,
    MultipartiteState,
    SchmidtDecomposition,
    bipartite_matrix,
    classify,
)


@dataclass(frozen=True, eq=False)
class HardyUnitaries:
    p1: float
    p2: float
    U: np.ndarray
    V: np.ndarray


def build_unitaries(p1: float, p2: float) -> HardyUnitaries:
    if not (p1 > 0 and p2 > 0):
        raise HardyError(f"Schmidt weights must be positive, got p1={p1!r}, p2={p2!r}")
    a, b = math.sqrt(p1), math.sqrt(p2)
    U = np.array([[b, -1j * a], [-1j * a, b]]) / math.sqrt(p1 + p2)
    c = math.sqrt(p1 * p2)
    d = p2 - p1
    V = np.array([[-1j * d, c], [c, -1j * d]]) / math.sqrt(p1 * p1 + p2 * p2 - p1 * p2)
    return HardyUnitaries(float(p1), float(p2), U, V)


@dataclass(frozen=True, eq=False)
class HardyBases:
    """Rotated bases on both sides; every vector has full group length."""

    x_plus1: np.ndarray
    x_minus1: np.ndarray
    y_plus1: np.ndarray
    y_minus1: np.ndarray
    x_plus2: np.ndarray
    x_minus2: np.ndarray
    y_plus2: np.ndarray
    y_minus2: np.ndarray
    unitaries: HardyUnitaries
    pair: tuple[int, int]


def build_bases(sd: SchmidtDecomposition, pair: Sequence[int]) -> HardyBases:
    i, j = (int(k) for k in pair)
    if i == j or not (0 <= i < sd.rank and 0 <= j < sd.rank):
        raise HardyError(f"invalid Schmidt pair {tuple(pair)} for rank {sd.rank}")
    p1, p2 = float(sd.coefficients[i]), float(sd.coefficients[j])
    if p1 < ZERO_WEIGHT or p2 < ZERO_WEIGHT:
        raise HardyError(f"zero Schmidt weight in pair {(i, j)}")
    hu = build_unitaries(p1, p2)
    VU = hu.V @ hu.U
    alpha = np.stack([sd.left[i], sd.left[j]])
    beta = np.stack([sd.right[i], sd.right[j]])
    x1, y1 = hu.U @ alpha, VU @ alpha
    x2, y2 = hu.U @ beta, VU @ beta
    return HardyBases(x1[0], x1[1], y1[0], y1[1], x2[0], x2[1], y2[0], y2[1], hu, (i, j))


@dataclass(frozen=True, eq=False)
class Outcome:
    eigenvalue: float
    # None marks the complement of every explicit outcome (implicit projector)
    vectors: np.ndarray | None

    def rank(self, observable: "ObservableFamily") -> int:
        if self.vectors is not None:
            return len(self.vectors)
        explicit = sum(len(o.vectors) for o in observable.outcomes if o.vectors is not None)
        return observable.space_dim - explicit


@dataclass(frozen=True, eq=False)
class ObservableFamily:
    """Projective observable acting on a group of parties.

    ``parties`` are 0-based and ascending; the projectors act on the tensor
    product of those parties in that order.
    """

    name: str
    parties: tuple[int, ...]
    space_dim: int
    outcomes: tuple[Outcome, ...]

    @property
    def eigenvalues(self) -> tuple[float, ...]:
        return tuple(o.eigenvalue for o in self.outcomes)

    def has_outcome(self, value) -> bool:
        return any(o.eigenvalue == value for o in self.outcomes)

    def projector(self, value) -> np.ndarray:
        for o in self.outcomes:
            if o.eigenvalue == value:
                break
        else:
            raise HardyError(f"{self.name} has no eigenvalue {value!r}; spectrum is {self.eigenvalues}")
        if o.vectors is not None:
            return _span_projector(o.vectors, self.space_dim)
        P = np.eye(self.space_dim, dtype=complex)
        for other in self.outcomes:
            if other.vectors is not None:
                P -= _span_projector(other.vectors, self.space_dim)
        return P


def _span_projector(vectors: np.ndarray, dim: int) -> np.ndarray:
    if len(vectors) == 0:
        return np.zeros((dim, dim), dtype=complex)
    V = np.asarray(vectors, dtype=complex)
    return V.T @ V.conj()


def make_observable(name, parties, space_dim, explicit, complement_value=0.0) -> ObservableFamily:
    """Observable with explicit eigenvectors plus an implicit complement outcome.

    ``explicit`` is a list of ``(eigenvalue, vectors)``.  The complement
    outcome is added only when the explicit projectors leave room for it.
    """
    outcomes = [Outcome(float(v), np.atleast_2d(np.asarray(vecs, dtype=complex))) for v, vecs in explicit]
    used = sum(len(o.vectors) for o in outcomes)
    if used > space_dim:
        raise HardyError(f"{name}: {used} eigenvectors do not fit in dimension {space_dim}")
    if used < space_dim:
        outcomes.append(Outcome(float(complement_value), None))
    values = [o.eigenvalue for o in outcomes]
    if len(set(values)) != len(values):
        raise HardyError(f"{name}: eigenvalues must be distinct, got {values}")
    return ObservableFamily(name, tuple(parties), int(space_dim), tuple(outcomes))


@dataclass(frozen=True, eq=False)
class HardyObservables:
    X1: ObservableFamily
    Y1: ObservableFamily
    X2: ObservableFamily
    Y2: ObservableFamily

    def as_tuple(self):
        return (self.X1, self.Y1, self.X2, self.Y2)


def build_observables(bases: HardyBases, sd: SchmidtDecomposition) -> HardyObservables:
    g1, g2 = sd.cut.group1, sd.cut.group2
    dL, dR = sd.cut.dL, sd.cut.dR

    def obs(name, parties, dim, plus, minus):
        return make_observable(name, parties, dim, [(1.0, plus), (-1.0, minus)])

    return HardyObservables(
        X1=obs("X1", g1, dL, bases.x_plus1, bases.x_minus1),
        Y1=obs("Y1", g1, dL, bases.y_plus1, bases.y_minus1),
        X2=obs("X2", g2, dR, bases.x_plus2, bases.x_minus2),
        Y2=obs("Y2", g2, dR, bases.y_plus2, bases.y_minus2),
    )


def hardy_setup(sd: SchmidtDecomposition, pair: Sequence[int] | None = None):
    """Bases and observables for ``pair`` (default: the classifier's witness pair)."""
    if pair is None:
        cls = classify(sd)
        if cls.tag != ELIGIBLE:
            raise IneligibleState(cls)
        pair = cls.witness_pair
    bases = build_bases(sd, pair)
    return bases, build_observables(bases, sd)


def equivalent_forms_residual(state: MultipartiteState, sd: SchmidtDecomposition, bases: HardyBases) -> tuple[float, float, float]:
    """Distances between the state and its three rewritings in the x/y bases."""
    cls = classify(sd)
    if cls.tag != ELIGIBLE:
        raise IneligibleState(cls)
    p1, p2 = bases.unitaries.p1, bases.unitaries.p2
    i, j = bases.pair
    s = math.sqrt(p1 * p2)
    r = math.sqrt(p1 * p1 + p2 * p2 - p1 * p2)
    kron = np.kron
    rest = sum(
        (sd.coefficients[k] * kron(sd.left[k], sd.right[k]) for k in range(sd.rank) if k not in (i, j)),
        np.zeros(sd.cut.dL * sd.cut.dR, dtype=complex),
    )
    b = bases
    forms = [
        1j * s * (kron(b.x_plus1, b.x_minus2) + kron(b.x_minus1, b.x_plus2))
        + (p2 - p1) * kron(b.x_minus1, b.x_minus2),
        1j * r * kron(b.y_minus1, b.x_minus2) + 1j * s * kron(b.x_minus1, b.x_plus2),
        1j * s * kron(b.x_plus1, b.x_minus2) + 1j * r * kron(b.x_minus1, b.y_minus2),
    ]
    target = bipartite_matrix(state, sd.cut).reshape(-1)
    return tuple(float(np.linalg.norm(f + rest - target)) for f in forms)
