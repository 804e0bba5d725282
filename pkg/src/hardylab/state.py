"""Pure-state representation, bipartitions and Schmidt decomposition.

Amplitudes are stored flat in row-major order with party 1 varying slowest,
so ``amplitudes.reshape(dims)`` gives the tensor with axis ``k`` belonging to
party ``k`` (0-based internally, 1-based on the command line).
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionCapExceeded, StateFormatError

STATE_FORMAT = "hardy-state/1"
DEFAULT_MAX_DIM = 4096

NORM_TOL = 1e-12
ZERO_WEIGHT = 1e-12
DISTINCT_RTOL = 1e-9

PRODUCT = "Product"
UNIFORM = "UniformSpectrum"
ELIGIBLE = "HardyEligible"


def max_total_dim() -> int:
    """Dimension cap, overridable through the ``HARDY_MAX_DIM`` variable."""
    raw = os.environ.get("HARDY_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise DimensionCapExceeded(f"HARDY_MAX_DIM is not an integer: {raw!r}") from None
    if value < 4:
        raise DimensionCapExceeded(f"HARDY_MAX_DIM must be at least 4, got {value}")
    return value


@dataclass(frozen=True, eq=False)
class MultipartiteState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise StateFormatError("a state needs at least one party")
        if any(d < 2 for d in dims):
            raise StateFormatError(f"every party dimension must be >= 2, got {list(dims)}")
        total = math.prod(dims)
        cap = max_total_dim()
        if total > cap:
            raise DimensionCapExceeded(f"total dimension {total} exceeds cap {cap}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != total:
            raise StateFormatError(
                f"amplitude-count mismatch: dims {list(dims)} need {total}, got {amps.size}"
            )
        if not np.all(np.isfinite(amps)):
            raise StateFormatError("amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise StateFormatError(
                f"state is not normalized (|psi|^2 = {norm2!r}); set normalize to rescale"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, dims: Sequence[int], amplitudes, normalize: bool = False):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if normalize:
            if not np.all(np.isfinite(amps)):
                raise StateFormatError("amplitudes must be finite")
            norm = np.linalg.norm(amps)
            if norm == 0.0:
                raise StateFormatError("zero vector cannot be normalized")
            amps = amps / norm
        elif amps.size and not np.any(amps):
            raise StateFormatError("zero vector is not a state")
        return cls(tuple(dims), amps)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)


@dataclass(frozen=True)
class Bipartition:
    """Split of the parties into two groups (0-based, sorted ascending)."""

    group1: tuple[int, ...]
    group2: tuple[int, ...]
    dL: int
    dR: int

    @classmethod
    def from_groups(cls, dims: Sequence[int], group1: Iterable[int], group2: Iterable[int] | None = None):
        n = len(dims)
        g1 = tuple(sorted(set(int(p) for p in group1)))
        if group2 is None:
            g2 = tuple(p for p in range(n) if p not in g1)
        else:
            g2 = tuple(sorted(set(int(p) for p in group2)))
        if not g1 or not g2:
            raise StateFormatError("both groups of a bipartition must be nonempty")
        if set(g1) & set(g2):
            raise StateFormatError(f"groups overlap: {g1} and {g2}")
        if set(g1) | set(g2) != set(range(n)):
            raise StateFormatError(f"groups {g1} | {g2} do not cover parties 0..{n - 1}")
        dL = math.prod(dims[p] for p in g1)
        dR = math.prod(dims[p] for p in g2)
        return cls(g1, g2, dL, dR)

    @classmethod
    def parse(cls, spec: str, dims: Sequence[int]):
        """Parse the 1-based ``"1,3|2,4"`` syntax; the right side may be omitted."""
        left, sep, right = spec.partition("|")

        def indices(text):
            out = []
            for tok in text.split(","):
                tok = tok.strip()
                if not tok:
                    continue
                try:
                    k = int(tok)
                except ValueError:
                    raise StateFormatError(f"bad party index {tok!r} in cut {spec!r}") from None
                if not 1 <= k <= len(dims):
                    raise StateFormatError(f"party {k} out of range 1..{len(dims)} in cut {spec!r}")
                out.append(k - 1)
            return out

        g1 = indices(left)
        g2 = indices(right) if sep and right.strip() else None
        return cls.from_groups(dims, g1, g2)

    def label(self) -> str:
        left = ",".join(str(p + 1) for p in self.group1)
        right = ",".join(str(p + 1) for p in self.group2)
        return f"{left}|{right}"


def default_cut(dims: Sequence[int]) -> Bipartition:
    """First party against the rest."""
    return Bipartition.from_groups(dims, [0])


def all_cuts(dims: Sequence[int]) -> list[Bipartition]:
    """Every bipartition once, with party 1 always in the first group."""
    n = len(dims)
    cuts = []
    rest = range(1, n)
    for r in range(0, n - 1):
        for extra in itertools.combinations(rest, r):
            cuts.append(Bipartition.from_groups(dims, (0,) + extra))
    return cuts


def bipartite_matrix(state: MultipartiteState, cut: Bipartition) -> np.ndarray:
    """Amplitude tensor reshaped to ``dL x dR`` with group-1 parties as rows."""
    perm = cut.group1 + cut.group2
    return state.tensor().transpose(perm).reshape(cut.dL, cut.dR)


def _from_bipartite_matrix(matrix: np.ndarray, dims, cut: Bipartition) -> np.ndarray:
    perm = cut.group1 + cut.group2
    shape = [dims[p] for p in perm]
    return matrix.reshape(shape).transpose(np.argsort(perm)).reshape(-1)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Singular values and vectors of the reshaped amplitude matrix.

    ``left[i]`` and ``right[i]`` are the full-length vectors paired with
    ``coefficients[i]``; only components above the zero-weight threshold are
    kept, so ``len(coefficients) == rank``.
    """

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray
    cut: Bipartition
    dims: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    def reconstruct(self) -> np.ndarray:
        """Flat amplitude vector of ``sum_i p_i left_i (x) right_i`` in party order."""
        matrix = np.einsum("i,ia,ib->ab", self.coefficients, self.left, self.right)
        return _from_bipartite_matrix(matrix, self.dims, self.cut)


def _fix_phase(u: np.ndarray, vh: np.ndarray):
    # largest-magnitude entry of each left vector made real positive
    idx = np.argmax(np.abs(u), axis=0)
    cols = np.arange(u.shape[1])
    lead = u[idx, cols]
    phase = np.where(np.abs(lead) > 0, lead / np.abs(lead), 1.0)
    return u / phase, vh * phase[:, None]


def schmidt_decompose(state: MultipartiteState, cut: Bipartition | None = None) -> SchmidtDecomposition:
    if cut is None:
        cut = default_cut(state.dims)
    matrix = bipartite_matrix(state, cut)
    u, s, vh = np.linalg.svd(matrix, full_matrices=False)
    u, vh = _fix_phase(u, vh)
    keep = s >= ZERO_WEIGHT
    return SchmidtDecomposition(
        coefficients=s[keep].copy(),
        left=u[:, keep].T.copy(),
        right=vh[keep, :].copy(),
        cut=cut,
        dims=state.dims,
    )


@dataclass(frozen=True)
class EligibilityClass:
    tag: str
    witness_pair: tuple[int, int] | None = None


def distinct(a: float, b: float, rtol: float = DISTINCT_RTOL) -> bool:
    return abs(a - b) > rtol * max(a, b)


def classify(sd: SchmidtDecomposition, tol: float = DISTINCT_RTOL) -> EligibilityClass:
    """Product / flat spectrum / Hardy-eligible, with the best witness pair.

    Among all pairs of distinct nonzero weights the pair with the largest
    closed-form Hardy probability wins; ties go to the lexicographically
    first pair.
    """
    from .born import hardy_closed_form

    p = [float(c) for c in sd.coefficients if c >= ZERO_WEIGHT]
    if len(p) <= 1:
        return EligibilityClass(PRODUCT)
    best, best_val = None, -1.0
    for i, j in itertools.combinations(range(len(p)), 2):
        if not distinct(p[i], p[j], tol):
            continue
        val = hardy_closed_form(p[i], p[j])
        if val > best_val:
            best, best_val = (i, j), val
    if best is None:
        return EligibilityClass(UNIFORM)
    return EligibilityClass(ELIGIBLE, best)


def random_state(dims: Sequence[int], rng: np.random.Generator) -> MultipartiteState:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    total = math.prod(dims)
    vec = rng.normal(size=total) + 1j * rng.normal(size=total)
    return MultipartiteState.from_amplitudes(dims, vec, normalize=True)


def schmidt_state(weights: Sequence[float], dL: int | None = None, dR: int | None = None) -> MultipartiteState:
    """Two-party state ``sum_i w_i |i>|i>`` in the computational basis."""
    k = len(weights)
    dL = dL or max(k, 2)
    dR = dR or max(k, 2)
    amps = np.zeros((dL, dR), dtype=complex)
    for i, w in enumerate(weights):
        amps[i, i] = w
    return MultipartiteState.from_amplitudes((dL, dR), amps, normalize=True)


# -- state documents ---------------------------------------------------------


def _parse_complex(value, where) -> complex:
    if isinstance(value, bool):
        raise StateFormatError(f"{where}: boolean is not an amplitude")
    if isinstance(value, (int, float)):
        z = complex(value)
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in (re, im)):
            raise StateFormatError(f"{where}: amplitude parts must be numbers, got {value!r}")
        z = complex(float(re), float(im))
    else:
        raise StateFormatError(f"{where}: expected [re, im], got {value!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise StateFormatError(f"{where}: non-finite amplitude {value!r}")
    return z


def _basis_index(key: str, dims) -> int:
    key = key.strip()
    if "," in key:
        digits = [int(t) for t in key.split(",")]
    else:
        if any(d > 10 for d in dims):
            raise StateFormatError(f"basis label {key!r}: use comma-separated indices when a dimension exceeds 10")
        digits = [int(c) for c in key]
    if len(digits) != len(dims) or any(not 0 <= k < d for k, d in zip(digits, dims)):
        raise StateFormatError(f"basis label {key!r} does not match dims {list(dims)}")
    return int(np.ravel_multi_index(digits, dims))


def state_from_document(doc: dict, normalize: bool | None = None) -> MultipartiteState:
    """Build a state from a decoded ``hardy-state/1`` document.

    ``amplitudes`` is either a dense row-major list of ``[re, im]`` pairs or
    an object mapping basis labels (``"01"`` or ``"0,1"``) to amplitudes.
    """
    if not isinstance(doc, dict):
        raise StateFormatError("state document must be a JSON object")
    fmt = doc.get("format", STATE_FORMAT)
    if fmt != STATE_FORMAT:
        raise StateFormatError(f"unsupported format {fmt!r}, expected {STATE_FORMAT!r}")
    dims = doc.get("dims")
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise StateFormatError("'dims' must be a nonempty array of integers")
    if any(d < 2 for d in dims):
        raise StateFormatError(f"every party dimension must be >= 2, got {dims}")
    total = math.prod(dims)
    if total > max_total_dim():
        raise DimensionCapExceeded(f"total dimension {total} exceeds cap {max_total_dim()}")
    raw = doc.get("amplitudes")
    if isinstance(raw, list):
        if len(raw) != total:
            raise StateFormatError(
                f"amplitude-count mismatch: dims {dims} need {total}, got {len(raw)}"
            )
        amps = np.array([_parse_complex(v, f"amplitudes[{i}]") for i, v in enumerate(raw)])
    elif isinstance(raw, dict):
        amps = np.zeros(total, dtype=complex)
        for key, v in raw.items():
            amps[_basis_index(key, dims)] += _parse_complex(v, f"amplitudes[{key!r}]")
    else:
        raise StateFormatError("'amplitudes' must be an array or an object")
    if not np.any(amps):
        raise StateFormatError("zero vector is not a state")
    if normalize is None:
        normalize = bool(doc.get("normalize", False))
    return MultipartiteState.from_amplitudes(dims, amps, normalize=normalize)


def parse_state(text: str, normalize: bool | None = None) -> MultipartiteState:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"state file is not valid JSON: {exc}") from None
    return state_from_document(doc, normalize=normalize)


def load_state(path, normalize: bool | None = None) -> MultipartiteState:
    with open(path, encoding="utf-8") as fh:
        return parse_state(fh.read(), normalize=normalize)


def complex_pairs(vec) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec, dtype=complex).reshape(-1)]


def state_to_document(state: MultipartiteState) -> dict:
    return {
        "format": STATE_FORMAT,
        "dims": list(state.dims),
        "amplitudes": complex_pairs(state.amplitudes),
    }
