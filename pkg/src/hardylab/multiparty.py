"""Hardy conditions with single-particle observables via Schmidt peeling.

Peeling a party ``k`` off a state splits it across ``{rest} | {k}``:
``psi = sum_j q_j phi_j (x) tau_j``.  Conditioning party ``k`` on
``tau_selected`` (the two-outcome observable ``T_k``) leaves the component
``phi_selected``; repeating until two parties remain gives a bipartite core
on which the usual Hardy observables are built.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .born import ZERO_TOL, HardyReport, Peel, evaluate_conditions, hardy_closed_form, joint_probability
from .construct import ObservableFamily, hardy_setup, make_observable
from .errors import HardyError, IneligibleState, NoEligibleComponent
from .lhv import ContradictionCertificate, hardy_certificate
from .state import (
    ELIGIBLE,
    ZERO_WEIGHT,
    Bipartition,
    MultipartiteState,
    classify,
    schmidt_decompose,
)


@dataclass(frozen=True, eq=False)
class TripartiteDecomposition:
    q: np.ndarray
    pair_states: np.ndarray  # rows: phi_k over parties (1, 2), flattened
    tail_basis: np.ndarray  # rows: tau_k of party 3
    eligible_index: int
    dims: tuple[int, ...]

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ka,kb->ab", self.q, self.pair_states, self.tail_basis).reshape(-1)

    def eligible_state(self) -> MultipartiteState:
        return _as_state(self.pair_states[self.eligible_index], self.dims[:2])


def _as_state(vec, dims) -> MultipartiteState:
    v = np.asarray(vec, dtype=complex)
    return MultipartiteState.from_amplitudes(dims, v / np.linalg.norm(v))


def _pair_is_eligible(vec, dims) -> bool:
    st = _as_state(vec, dims)
    return classify(schmidt_decompose(st, Bipartition.from_groups(dims, [0]))).tag == ELIGIBLE


def _components(state: MultipartiteState, party: int):
    """Schmidt split ``{others} | {party}``: weights, rest-states, tail vectors."""
    cut = Bipartition.from_groups(state.dims, [p for p in range(state.n_parties) if p != party])
    sd = schmidt_decompose(state, cut)
    return sd.coefficients, sd.left, sd.right, tuple(state.dims[p] for p in cut.group1)


def tripartite_decompose(state: MultipartiteState, component: int | None = None) -> TripartiteDecomposition:
    """Split off party 3 and pick the first Hardy-eligible component by weight.

    ``component`` forces a particular component index instead.
    """
    if state.n_parties != 3:
        raise HardyError(f"tripartite decomposition needs 3 parties, got {state.n_parties}")
    q, phis, taus, rest_dims = _components(state, 2)
    if component is not None:
        if not 0 <= component < len(q):
            raise NoEligibleComponent(f"component {component} out of range (rank {len(q)})")
        if not _pair_is_eligible(phis[component], rest_dims):
            raise NoEligibleComponent(f"component {component} has no two distinct Schmidt weights")
        chosen = component
    else:
        chosen = next((k for k in range(len(q)) if q[k] >= ZERO_WEIGHT and _pair_is_eligible(phis[k], rest_dims)), None)
        if chosen is None:
            raise NoEligibleComponent("no nonzero-weight component has two distinct Schmidt weights")
    return TripartiteDecomposition(q, phis, taus, chosen, state.dims)


def build_T_observable(tau: np.ndarray, selected: int, party: int, name: str = "T3") -> ObservableFamily:
    """Two-outcome observable: 1 on ``tau[selected]``, 0 on its complement."""
    tau = np.atleast_2d(tau)
    if not 0 <= selected < len(tau):
        raise HardyError(f"selected index {selected} out of range for {len(tau)} tail vectors")
    return make_observable(name, (party,), tau.shape[1], [(1.0, tau[selected])])


def _relabel(obs: ObservableFamily, parties: Sequence[int]) -> ObservableFamily:
    """Move an observable from the core's local party indices to global ones."""
    return ObservableFamily(obs.name, tuple(parties[p] for p in obs.parties), obs.space_dim, obs.outcomes)


class _Observables:
    def __init__(self, X1, Y1, X2, Y2):
        self.X1, self.Y1, self.X2, self.Y2 = X1, Y1, X2, Y2

    def as_tuple(self):
        return (self.X1, self.Y1, self.X2, self.Y2)


def _core_setup(core: MultipartiteState, parties: Sequence[int], pair=None):
    sd = schmidt_decompose(core, Bipartition.from_groups(core.dims, [0]))
    if pair is None:
        cls = classify(sd)
        if cls.tag != ELIGIBLE:
            raise IneligibleState(cls)
        pair = cls.witness_pair
    bases, obs = hardy_setup(sd, pair)
    mapped = _Observables(*(_relabel(o, parties) for o in obs.as_tuple()))
    return bases, mapped


def tripartite_report(state: MultipartiteState, tol: float = ZERO_TOL, component: int | None = None) -> HardyReport:
    dec = tripartite_decompose(state, component)
    k = dec.eligible_index
    bases, obs = _core_setup(dec.eligible_state(), (0, 1))
    T3 = build_T_observable(dec.tail_basis, k, party=2)
    labels, probs, flags = evaluate_conditions(state, obs, extra=[(T3, 1.0)], tol=tol)
    p1, p2 = bases.unitaries.p1, bases.unitaries.p2
    cf = hardy_closed_form(p1, p2)
    qk = float(dec.q[k])
    return HardyReport(labels, probs, flags, cf, qk * qk * cf, tuple(bases.pair), (p1, p2), tol, "1|2",
                       peels=(Peel(2, qk, joint_probability(state, [(T3, 1.0)])),))


@dataclass(frozen=True)
class PeelingPlan:
    hardy_pair: tuple[int, int]
    peel_order: tuple[int, ...]
    selections: tuple[int, ...] | None = None

    @classmethod
    def default(cls, n: int) -> "PeelingPlan":
        return cls((0, 1), tuple(range(n - 1, 1, -1)))

    @classmethod
    def for_pair(cls, n: int, pair) -> "PeelingPlan":
        a, b = sorted(pair)
        return cls((a, b), tuple(p for p in range(n - 1, -1, -1) if p not in (a, b)))

    def validate(self, n: int) -> None:
        everyone = list(self.hardy_pair) + list(self.peel_order)
        if sorted(everyone) != list(range(n)):
            raise HardyError(f"plan must use every party exactly once, got {everyone}")
        if self.selections is not None and len(self.selections) != len(self.peel_order):
            raise HardyError("one selection per peeled party is required")


@dataclass(frozen=True, eq=False)
class _PeelStep:
    party: int
    weight: float
    tau: np.ndarray
    index: int


def _peel(state: MultipartiteState, parties: tuple[int, ...], order: Sequence[int], selections):
    """Depth-first search for a chain of nonzero components ending in an eligible core.

    Returns the core state, its global parties and the steps taken.
    """
    if not order:
        if _pair_is_eligible(state.amplitudes, state.dims):
            return state, parties, []
        return None
    party = order[0]
    local = parties.index(party)
    q, phis, taus, rest_dims = _components(state, local)
    rest = tuple(p for p in parties if p != party)
    candidates = range(len(q)) if selections is None else [selections[0]]
    for k in candidates:
        if not 0 <= k < len(q) or q[k] < ZERO_WEIGHT:
            continue
        sub = _as_state(phis[k], rest_dims)
        found = _peel(sub, rest, order[1:], None if selections is None else selections[1:])
        if found is not None:
            core, core_parties, steps = found
            return core, core_parties, [_PeelStep(party, float(q[k]), taus, k)] + steps
    return None


def npartite_report(state: MultipartiteState, plan: PeelingPlan | None = None, tol: float = ZERO_TOL) -> HardyReport:
    n = state.n_parties
    if n < 3:
        raise HardyError(f"peeling needs at least 3 parties, got {n}")
    plan = plan or PeelingPlan.default(n)
    plan.validate(n)
    found = _peel(state, tuple(range(n)), plan.peel_order, plan.selections)
    if found is None:
        raise NoEligibleComponent("no chain of nonzero components ends in a Hardy-eligible pair")
    core, core_parties, steps = found
    bases, obs = _core_setup(core, core_parties)
    extra = []
    peels = []
    for st in steps:
        T = build_T_observable(st.tau, st.index, party=st.party, name=f"T{st.party + 1}")
        extra.append((T, 1.0))
        peels.append(Peel(st.party, st.weight, joint_probability(state, [(T, 1.0)])))
    labels, probs, flags = evaluate_conditions(state, obs, extra=extra, tol=tol)
    p1, p2 = bases.unitaries.p1, bases.unitaries.p2
    cf = hardy_closed_form(p1, p2)
    scale = float(np.prod([st.weight ** 2 for st in steps]))
    cut = f"{core_parties[0] + 1}|{core_parties[1] + 1}"
    return HardyReport(labels, probs, flags, cf, scale * cf, tuple(bases.pair), (p1, p2), tol, cut, tuple(peels))


def search_best_plan(state: MultipartiteState, tol: float = ZERO_TOL) -> HardyReport:
    """Try every Hardy pair (peeling the rest in descending order); keep the largest Hardy probability."""
    n = state.n_parties
    best = None
    for a in range(n):
        for b in range(a + 1, n):
            try:
                rep = npartite_report(state, PeelingPlan.for_pair(n, (a, b)), tol)
            except (NoEligibleComponent, IneligibleState):
                continue
            if best is None or rep.hardy_probability > best.hardy_probability:
                best = rep
    if best is None:
        raise NoEligibleComponent("no Hardy pair and peeling order yields an eligible core")
    return best


def tripartite_contradiction() -> ContradictionCertificate:
    """Exhaustive check of the Hardy constraints with a ``T3 = t1`` clause appended."""
    return hardy_certificate(with_t=True)


def omega_split(cert: ContradictionCertificate) -> dict[str, list[int]]:
    """Strategies with ``T3 != t1`` (never reach the target) and with ``T3 = t1``."""
    sc = cert.scenario
    out: dict[str, list[int]] = {"t_not_t1": [], "t_is_t1": []}
    for k, v in enumerate(cert.verdicts):
        key = "t_is_t1" if v.strategy.outcome(sc, "T3") == 1 else "t_not_t1"
        out[key].append(k)
    return out
