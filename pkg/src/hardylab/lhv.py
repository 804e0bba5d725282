"""Local hidden-variable models over finite measurement scenarios.

A local stochastic model is replaced by a mixture of deterministic
strategies (one fixed outcome per party and setting), which loses nothing
for finite scenarios.  Two independent routes decide whether a set of
probabilities admits such a model:

* :func:`contradiction_certificate` walks every strategy and records why it
  cannot carry weight under a set of zero constraints and a target event;
* :func:`lhv_lp_feasibility` solves the membership LP over the local
  polytope and returns either mixture weights or a separating witness.

Both kinds of result serialize to JSON and are re-checked by
:func:`verify_certificate` with plain arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import EnumerationCapExceeded, HardyError, ScenarioError

DEFAULT_STRATEGY_CAP = 10**7
FEAS_SLACK = 1e-9
TABLE_TOL = 1e-8
WITNESS_SCALE = 2**30
CERT_FORMAT = "hardy-lhv-certificate/1"


@dataclass(frozen=True)
class Setting:
    label: str
    outcomes: tuple[int, ...]


@dataclass(frozen=True)
class Scenario:
    """Settings per party; ``parties[k]`` lists the settings of party ``k``."""

    parties: tuple[tuple[Setting, ...], ...]

    def __post_init__(self):
        parties = tuple(tuple(p) for p in self.parties)
        if not parties or any(not p for p in parties):
            raise ScenarioError("every party needs at least one setting")
        labels = [s.label for p in parties for s in p]
        if len(set(labels)) != len(labels):
            raise ScenarioError(f"setting labels must be unique, got {labels}")
        for s in (s for p in parties for s in p):
            if len(s.outcomes) < 2 or len(set(s.outcomes)) != len(s.outcomes):
                raise ScenarioError(f"setting {s.label} needs at least two distinct outcomes")
        object.__setattr__(self, "parties", parties)

    @property
    def n_parties(self) -> int:
        return len(self.parties)

    def locate(self, label: str) -> tuple[int, int]:
        for k, settings in enumerate(self.parties):
            for j, s in enumerate(settings):
                if s.label == label:
                    return k, j
        raise ScenarioError(f"unknown setting {label!r}")

    def setting(self, label: str) -> Setting:
        k, j = self.locate(label)
        return self.parties[k][j]

    def strategy_count(self) -> int:
        return math.prod(len(s.outcomes) for p in self.parties for s in p)

    def events(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """``(setting index per party, outcome per party)`` in table order.

        Blocks run over setting tuples (party 1 slowest); inside a block the
        outcome tuples follow each setting's outcome order.
        """
        out = []
        for sel in itertools.product(*(range(len(p)) for p in self.parties)):
            outs = [self.parties[k][j].outcomes for k, j in enumerate(sel)]
            for o in itertools.product(*outs):
                out.append((sel, o))
        return out

    def blocks(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(len(p)) for p in self.parties)))

    def to_dict(self) -> dict:
        return {
            "parties": [
                [{"label": s.label, "outcomes": list(s.outcomes)} for s in p] for p in self.parties
            ]
        }

    @classmethod
    def from_dict(cls, doc) -> "Scenario":
        try:
            return cls(tuple(
                tuple(Setting(str(s["label"]), tuple(int(o) for o in s["outcomes"])) for s in party)
                for party in doc["parties"]
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"malformed scenario: {exc}") from None


def hardy_scenario(with_t: bool = False) -> Scenario:
    """X/Y on two sides with outcomes {+1, -1, 0}; optionally a binary T3 on a third party."""
    xy = (1, -1, 0)
    parties = [
        (Setting("X1", xy), Setting("Y1", xy)),
        (Setting("X2", xy), Setting("Y2", xy)),
    ]
    if with_t:
        parties.append((Setting("T3", (1, 0)),))
    return Scenario(tuple(parties))


@dataclass(frozen=True)
class DeterministicStrategy:
    """One outcome for every (party, setting); ``choice[k][j]`` belongs to
    setting ``j`` of party ``k``."""

    choice: tuple[tuple[int, ...], ...]

    def outcome(self, scenario: Scenario, label: str) -> int:
        k, j = scenario.locate(label)
        return self.choice[k][j]

    def to_dict(self, scenario: Scenario) -> dict:
        return {s.label: self.choice[k][j] for k, p in enumerate(scenario.parties) for j, s in enumerate(p)}

    @classmethod
    def from_dict(cls, scenario: Scenario, doc: Mapping) -> "DeterministicStrategy":
        choice = []
        for p in scenario.parties:
            row = []
            for s in p:
                if s.label not in doc:
                    raise ScenarioError(f"strategy does not assign setting {s.label}")
                v = int(doc[s.label])
                if v not in s.outcomes:
                    raise ScenarioError(f"strategy assigns {v} to {s.label}, outside {s.outcomes}")
                row.append(v)
            choice.append(tuple(row))
        return cls(tuple(choice))


def enumerate_strategies(scenario: Scenario, cap: int = DEFAULT_STRATEGY_CAP) -> list[DeterministicStrategy]:
    """All deterministic strategies, ordered lexicographically by (party, setting, outcome index)."""
    count = scenario.strategy_count()
    if count > cap:
        raise EnumerationCapExceeded(f"{count} strategies exceed the cap of {cap}")
    flat = [s.outcomes for p in scenario.parties for s in p]
    sizes = [len(p) for p in scenario.parties]
    out = []
    for combo in itertools.product(*flat):
        choice, pos = [], 0
        for n in sizes:
            choice.append(tuple(combo[pos:pos + n]))
            pos += n
        out.append(DeterministicStrategy(tuple(choice)))
    return out


@dataclass(frozen=True)
class HiddenVariableModel:
    strategies: tuple[DeterministicStrategy, ...]
    weights: tuple

    def __post_init__(self):
        if len(self.strategies) != len(self.weights):
            raise HardyError("one weight per strategy is required")
        if any(w < 0 for w in self.weights):
            raise HardyError("mixture weights must be nonnegative")
        if abs(float(sum(self.weights)) - 1.0) > 1e-12:
            raise HardyError("mixture weights must sum to 1")


# -- contradiction certificates ---------------------------------------------

Event = tuple[tuple[str, int], ...]


def normalize_event(scenario: Scenario, event) -> Event:
    """Validate an event given as a mapping or pairs of ``label -> outcome``."""
    items = list(event.items()) if isinstance(event, Mapping) else [tuple(c) for c in event]
    parties = set()
    out = []
    for label, value in items:
        setting = scenario.setting(label)
        value = int(value)
        if value not in setting.outcomes:
            raise ScenarioError(f"outcome {value} not available for {label} {setting.outcomes}")
        k, _ = scenario.locate(label)
        if k in parties:
            raise ScenarioError(f"event measures party {k + 1} twice")
        parties.add(k)
        out.append((label, value))
    return tuple(out)


def realizes(scenario: Scenario, strategy: DeterministicStrategy, event: Event) -> bool:
    return all(strategy.outcome(scenario, label) == value for label, value in event)


@dataclass(frozen=True)
class StrategyVerdict:
    strategy: DeterministicStrategy
    realizes_target: bool
    violated: tuple[int, ...]

    @property
    def survives(self) -> bool:
        return self.realizes_target and not self.violated

    @property
    def reason(self) -> str:
        if not self.realizes_target:
            return "fails target"
        if self.violated:
            return "violates"
        return "survives"


@dataclass(frozen=True)
class ContradictionCertificate:
    scenario: Scenario
    zero_constraints: tuple[Event, ...]
    target: Event
    verdicts: tuple[StrategyVerdict, ...]

    @property
    def conclusion(self) -> bool:
        """True when no strategy meets every zero constraint and the target."""
        return not any(v.survives for v in self.verdicts)

    @property
    def survivors(self) -> list[DeterministicStrategy]:
        return [v.strategy for v in self.verdicts if v.survives]

    def to_dict(self) -> dict:
        def ev(e):
            return [{"setting": label, "outcome": value} for label, value in e]

        rows = []
        for v in self.verdicts:
            row = {"strategy": v.strategy.to_dict(self.scenario), "verdict": v.reason}
            if v.realizes_target and v.violated:
                row["constraint"] = v.violated[0]
                row["all_violated"] = list(v.violated)
            rows.append(row)
        return {
            "format": CERT_FORMAT,
            "kind": "contradiction",
            "scenario": self.scenario.to_dict(),
            "zero_constraints": [ev(e) for e in self.zero_constraints],
            "target": ev(self.target),
            "verdicts": rows,
            "surviving": sum(1 for v in self.verdicts if v.survives),
            "conclusion": self.conclusion,
        }

    @classmethod
    def from_dict(cls, doc) -> "ContradictionCertificate":
        scenario = Scenario.from_dict(doc["scenario"])

        def ev(items):
            return normalize_event(scenario, [(c["setting"], c["outcome"]) for c in items])

        zeros = tuple(ev(e) for e in doc["zero_constraints"])
        target = ev(doc["target"])
        verdicts = []
        for row in doc["verdicts"]:
            strat = DeterministicStrategy.from_dict(scenario, row["strategy"])
            reason = row["verdict"]
            if reason == "fails target":
                verdicts.append(StrategyVerdict(strat, False, ()))
            elif reason == "violates":
                cited = row.get("all_violated", [row["constraint"]])
                verdicts.append(StrategyVerdict(strat, True, tuple(int(c) for c in cited)))
            elif reason == "survives":
                verdicts.append(StrategyVerdict(strat, True, ()))
            else:
                raise ScenarioError(f"unknown verdict {reason!r}")
        return cls(scenario, zeros, target, tuple(verdicts))


def contradiction_certificate(scenario: Scenario, zero_constraints, target, cap: int = DEFAULT_STRATEGY_CAP) -> ContradictionCertificate:
    """Check every deterministic strategy against the zero constraints and target.

    A strategy can carry weight in a model reproducing the constraints only
    if it realizes none of the forbidden events; it contributes to the target
    only if it realizes the target.  ``conclusion`` is True when no strategy
    does both.
    """
    zeros = tuple(normalize_event(scenario, e) for e in zero_constraints)
    tgt = normalize_event(scenario, target)
    verdicts = []
    for strat in enumerate_strategies(scenario, cap):
        hit = realizes(scenario, strat, tgt)
        violated = tuple(k for k, e in enumerate(zeros) if realizes(scenario, strat, e)) if hit else ()
        verdicts.append(StrategyVerdict(strat, hit, violated))
    return ContradictionCertificate(scenario, zeros, tgt, tuple(verdicts))


def hardy_constraints(with_t: bool = False):
    """The five forbidden events and the target of the Hardy argument."""
    from .born import HARDY_EVENTS

    tail = (("T3", 1),) if with_t else ()
    events = [tuple((name, int(v)) for name, v in clauses) + tail for clauses in HARDY_EVENTS]
    return events[:-1], events[-1]


def hardy_certificate(with_t: bool = False) -> ContradictionCertificate:
    zeros, target = hardy_constraints(with_t)
    return contradiction_certificate(hardy_scenario(with_t), zeros, target)


def hardy_case_split(cert: ContradictionCertificate) -> dict[str, list[int]]:
    """Sort target-realizing strategies into the three cases of the set argument.

    ``x1_not_plus``: X1 != +1, so a (X1 = -1 or 0, Y2 = +1) constraint fires.
    ``x2_not_plus``: X1 = +1 but X2 != +1, so a (Y1 = +1, X2 = -1 or 0) constraint fires.
    ``both_plus``: X1 = X2 = +1, the first constraint fires.
    Raises if any strategy escapes the expected constraints.
    """
    zeros, _ = hardy_constraints()
    index = {tuple((l, v) for l, v in e if l != "T3"): k for k, e in enumerate(zeros)}
    x1_group = {index[(("X1", -1), ("Y2", 1))], index[(("X1", 0), ("Y2", 1))]}
    x2_group = {index[(("Y1", 1), ("X2", -1))], index[(("Y1", 1), ("X2", 0))]}
    both = {index[(("X1", 1), ("X2", 1))]}
    cases: dict[str, list[int]] = {"x1_not_plus": [], "x2_not_plus": [], "both_plus": []}
    sc = cert.scenario
    for k, v in enumerate(cert.verdicts):
        if not v.realizes_target:
            continue
        x1 = v.strategy.outcome(sc, "X1")
        x2 = v.strategy.outcome(sc, "X2")
        if x1 != 1:
            case, allowed = "x1_not_plus", x1_group
        elif x2 != 1:
            case, allowed = "x2_not_plus", x2_group
        else:
            case, allowed = "both_plus", both
        if not allowed & set(v.violated):
            raise HardyError(f"strategy {k} in case {case} escapes constraints {sorted(allowed)}")
        cases[case].append(k)
    return cases


# -- LP feasibility ---------------------------------------------------------


def _is_exact(table) -> bool:
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in table)


def check_table(scenario: Scenario, table) -> None:
    events = scenario.events()
    if len(table) != len(events):
        raise ScenarioError(f"table has {len(table)} entries, scenario needs {len(events)}")
    exact = _is_exact(table)
    pos = 0
    for sel in scenario.blocks():
        size = math.prod(len(scenario.parties[k][j].outcomes) for k, j in enumerate(sel))
        block = table[pos:pos + size]
        pos += size
        if exact:
            if any(x < 0 for x in block) or sum(block) != 1:
                raise ScenarioError(f"block {sel} is not a probability distribution")
        else:
            vals = np.asarray(block, dtype=float)
            if not np.all(np.isfinite(vals)) or np.any(vals < -TABLE_TOL) or abs(vals.sum() - 1) > TABLE_TOL:
                raise ScenarioError(f"block {sel} is not a probability distribution within {TABLE_TOL}")


def vertex_matrix(scenario: Scenario, strategies: Sequence[DeterministicStrategy]) -> np.ndarray:
    """0/1 matrix with one column per strategy and one row per table event."""
    events = scenario.events()
    row_of = {e: i for i, e in enumerate(events)}
    A = np.zeros((len(events), len(strategies)), dtype=np.int64)
    blocks = scenario.blocks()
    for col, strat in enumerate(strategies):
        for sel in blocks:
            outs = tuple(strat.choice[k][j] for k, j in enumerate(sel))
            A[row_of[(sel, outs)], col] = 1
    return A


@dataclass(frozen=True)
class LhvFeasibilityResult:
    scenario: Scenario
    table: tuple
    verdict: str  # "Feasible" | "Infeasible"
    method: str
    model: HiddenVariableModel | None = None
    witness: tuple | None = None

    @property
    def feasible(self) -> bool:
        return self.verdict == "Feasible"

    @property
    def margin(self):
        """``-<witness, table>``; positive for a valid infeasibility witness."""
        if self.witness is None:
            return None
        return -sum(Fraction(w) * Fraction(t) for w, t in zip(self.witness, self.table))

    def to_dict(self) -> dict:
        doc = {
            "format": CERT_FORMAT,
            "kind": "lp",
            "scenario": self.scenario.to_dict(),
            "events": [
                {"settings": [self.scenario.parties[k][j].label for k, j in enumerate(sel)], "outcomes": list(o)}
                for sel, o in self.scenario.events()
            ],
            "table": [format_number(x) for x in self.table],
            "verdict": self.verdict,
            "method": self.method,
        }
        if self.model is not None:
            doc["mixture"] = [
                {"strategy": s.to_dict(self.scenario), "weight": format_number(w)}
                for s, w in zip(self.model.strategies, self.model.weights)
            ]
        if self.witness is not None:
            doc["witness"] = [format_number(w) for w in self.witness]
            doc["margin"] = float(self.margin)
        return doc

    @classmethod
    def from_dict(cls, doc) -> "LhvFeasibilityResult":
        scenario = Scenario.from_dict(doc["scenario"])
        table = tuple(parse_number(x) for x in doc["table"])
        model = witness = None
        if "mixture" in doc:
            strategies = tuple(DeterministicStrategy.from_dict(scenario, m["strategy"]) for m in doc["mixture"])
            weights = tuple(parse_number(m["weight"]) for m in doc["mixture"])
            # bypass the constructor checks: the verifier decides validity
            model = object.__new__(HiddenVariableModel)
            object.__setattr__(model, "strategies", strategies)
            object.__setattr__(model, "weights", weights)
        if "witness" in doc:
            witness = tuple(parse_number(w) for w in doc["witness"])
        return cls(scenario, table, doc["verdict"], doc.get("method", ""), model, witness)


def format_number(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def parse_number(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, bool):
        raise ScenarioError("booleans are not numbers")
    if isinstance(x, int):
        return Fraction(x)
    return float(x)


def lhv_lp_feasibility(scenario: Scenario, table, exact: bool | None = None,
                       cap: int = DEFAULT_STRATEGY_CAP) -> LhvFeasibilityResult:
    """Decide whether a mixture of deterministic strategies reproduces ``table``.

    Rational tables (ints and Fractions) go through an exact simplex; float
    tables through HiGHS, after which the certificate is cleaned and checked
    exactly.  ``table`` follows :meth:`Scenario.events` order.
    """
    table = list(table)
    check_table(scenario, table)
    if exact is None:
        exact = _is_exact(table)
    strategies = enumerate_strategies(scenario, cap)
    A = vertex_matrix(scenario, strategies)
    if exact:
        return _exact_feasibility(scenario, [Fraction(x) for x in table], strategies, A)
    return _float_feasibility(scenario, np.asarray(table, dtype=float), strategies, A)


def _float_feasibility(scenario, t, strategies, A) -> LhvFeasibilityResult:
    n_ev, n_st = A.shape
    # separating functional: minimize <w, t> with <w, vertex> >= 0 and |w| <= 1
    res = linprog(t, A_ub=-A.T, b_ub=np.zeros(n_st), bounds=[(-1, 1)] * n_ev, method="highs")
    if res.status == 0 and res.fun < -FEAS_SLACK:
        w = _clean_witness(scenario, res.x, A)
        exact_t = [Fraction(float(x)) for x in t]
        if sum(Fraction(wi) * ti for wi, ti in zip(w, exact_t)) < 0:
            return LhvFeasibilityResult(scenario, tuple(float(x) for x in t), "Infeasible", "highs", witness=w)
    res = linprog(np.zeros(n_st), A_eq=A, b_eq=t, bounds=[(0, None)] * n_st, method="highs")
    if res.status == 0:
        keep, model = _clean_mixture(strategies, res.x)
        mix = A[:, keep] @ np.asarray(model.weights, dtype=float)
        if np.max(np.abs(mix - t)) <= TABLE_TOL:
            return LhvFeasibilityResult(scenario, tuple(float(x) for x in t), "Feasible", "highs", model=model)
    raise HardyError("table is within numerical slack of the local polytope boundary; undecided")


def _clean_witness(scenario, w, A) -> tuple[float, ...]:
    """Round to a dyadic grid and shift so every vertex value is exactly >= 0.

    Every vertex and every valid table put total mass 1 on each setting
    block, so adding a constant to the first block moves all of them by the
    same amount.
    """
    wi = np.rint(np.asarray(w) * WITNESS_SCALE).astype(np.int64)
    low = int((wi @ A).min())
    if low < 0:
        first = scenario.blocks()[0]
        size = math.prod(len(scenario.parties[k][j].outcomes) for k, j in enumerate(first))
        wi[:size] += -low
    return tuple(float(x) / WITNESS_SCALE for x in wi)


def _clean_mixture(strategies, x):
    x = np.clip(np.asarray(x, dtype=float), 0.0, None)
    keep = np.flatnonzero(x > 1e-15)
    weights = x[keep] / x[keep].sum()
    return keep, HiddenVariableModel(tuple(strategies[i] for i in keep), tuple(float(v) for v in weights))


def _exact_feasibility(scenario, t, strategies, A) -> LhvFeasibilityResult:
    cols = [[int(v) for v in A[:, j]] for j in range(A.shape[1])]
    status, sol = rational_phase_one(cols, t)
    if status == "feasible":
        keep = [j for j, v in enumerate(sol) if v != 0]
        model = HiddenVariableModel(tuple(strategies[j] for j in keep), tuple(sol[j] for j in keep))
        return LhvFeasibilityResult(scenario, tuple(t), "Feasible", "exact-simplex", model=model)
    return LhvFeasibilityResult(scenario, tuple(t), "Infeasible", "exact-simplex", witness=tuple(sol))


def rational_phase_one(columns: Sequence[Sequence[int]], b: Sequence[Fraction]):
    """Phase-one simplex in exact arithmetic for ``A x = b, x >= 0`` with ``b >= 0``.

    Returns ``("feasible", x)`` or ``("infeasible", w)`` where ``w`` satisfies
    ``w . A_j >= 0`` for every column and ``w . b < 0``.  Bland's rule rules
    out cycling.
    """
    m = len(b)
    n = len(columns)
    width = n + m
    T = [[Fraction(columns[j][i]) for j in range(n)] + [Fraction(int(i == k)) for k in range(m)] + [Fraction(b[i])]
         for i in range(m)]
    basis = [n + i for i in range(m)]
    # reduced costs of the artificial-sum objective
    cost = [Fraction(0)] * n + [Fraction(1)] * m

    def reduced(j):
        return cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(m))

    while True:
        entering = next((j for j in range(width) if reduced(j) < 0), None)
        if entering is None:
            break
        best = None
        for i in range(m):
            a = T[i][entering]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise HardyError("phase-one objective is bounded below; unbounded ray is impossible")
        r = best[1]
        piv = T[r][entering]
        T[r] = [v / piv for v in T[r]]
        for i in range(m):
            if i != r and T[i][entering] != 0:
                f = T[i][entering]
                T[i] = [a - f * c for a, c in zip(T[i], T[r])]
        basis[r] = entering
    infeas = sum(T[i][-1] for i in range(m) if basis[i] >= n)
    if infeas == 0:
        x = [Fraction(0)] * n
        for i in range(m):
            if basis[i] < n:
                x[basis[i]] = T[i][-1]
        return "feasible", x
    y = [sum(cost[basis[i]] * T[i][n + k] for i in range(m)) for k in range(m)]
    return "infeasible", [-v for v in y]


# -- tables and verification ------------------------------------------------


def quantum_table(state, scenario: Scenario, observables: Mapping[str, object]) -> np.ndarray:
    """Born-rule table over every setting combination of ``scenario``.

    Outcomes missing from an observable's spectrum (the 0 outcome when the
    complement is empty) get probability 0.
    """
    from .born import event_probability

    rows = []
    for sel, outs in scenario.events():
        assignment = []
        for k, j in enumerate(sel):
            label = scenario.parties[k][j].label
            assignment.append((observables[label], float(outs[k])))
        rows.append(event_probability(state, assignment))
    return np.array(rows)


def verify_certificate(cert) -> bool:
    """Re-check a certificate by direct arithmetic; False on any failure."""
    try:
        if isinstance(cert, Mapping):
            kind = cert.get("kind")
            if kind == "lp":
                cert = LhvFeasibilityResult.from_dict(cert)
            elif kind == "contradiction":
                cert = ContradictionCertificate.from_dict(cert)
            else:
                return False
        if isinstance(cert, ContradictionCertificate):
            return _verify_contradiction(cert)
        if isinstance(cert, LhvFeasibilityResult):
            return _verify_lp(cert)
    except (HardyError, KeyError, TypeError, ValueError, ZeroDivisionError):
        return False
    return False


def _verify_contradiction(cert: ContradictionCertificate) -> bool:
    sc = cert.scenario
    expected = sc.strategy_count()
    seen = {v.strategy.choice for v in cert.verdicts}
    if len(cert.verdicts) != expected or len(seen) != expected:
        return False

    def hits(strategy, event):
        for label, value in event:
            k, j = sc.locate(label)
            if strategy.choice[k][j] != value:
                return False
        return True

    for v in cert.verdicts:
        valid = all(
            len(row) == len(party) and all(o in s.outcomes for o, s in zip(row, party))
            for row, party in zip(v.strategy.choice, sc.parties)
        ) and len(v.strategy.choice) == sc.n_parties
        if not valid:
            return False
        if hits(v.strategy, cert.target) != v.realizes_target:
            return False
        for k in v.violated:
            if not 0 <= k < len(cert.zero_constraints) or not hits(v.strategy, cert.zero_constraints[k]):
                return False
        if v.realizes_target and not v.violated:
            # a survivor must really escape every constraint
            if any(hits(v.strategy, e) for e in cert.zero_constraints):
                return False
    return True


def _verify_lp(res: LhvFeasibilityResult) -> bool:
    sc = res.scenario
    events = sc.events()
    if len(res.table) != len(events):
        return False
    index = {e: i for i, e in enumerate(events)}
    blocks = sc.blocks()

    def column(choice):
        rows = []
        for sel in blocks:
            rows.append(index[(sel, tuple(choice[k][j] for k, j in enumerate(sel)))])
        return rows

    if res.verdict == "Feasible":
        if res.model is None:
            return False
        ws = res.model.weights
        if any(w < 0 for w in ws):
            return False
        total = sum(Fraction(w) for w in ws)
        if abs(total - 1) > Fraction(1, 10**12):
            return False
        mix = [Fraction(0)] * len(events)
        for strat, w in zip(res.model.strategies, ws):
            for r in column(strat.choice):
                mix[r] += Fraction(w)
        return all(abs(m - Fraction(t)) <= Fraction(TABLE_TOL) for m, t in zip(mix, res.table))
    if res.verdict == "Infeasible":
        w = res.witness
        if w is None or len(w) != len(events):
            return False
        wf = [Fraction(x) for x in w]
        outs = [s.outcomes for p in sc.parties for s in p]
        sizes = [len(p) for p in sc.parties]
        for combo in itertools.product(*outs):
            choice, pos = [], 0
            for n in sizes:
                choice.append(combo[pos:pos + n])
                pos += n
            if sum(wf[r] for r in column(choice)) < 0:
                return False
        return sum(a * Fraction(t) for a, t in zip(wf, res.table)) < 0
    return False
