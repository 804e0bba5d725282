import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from hardylab.errors import DimensionCapExceeded, StateFormatError
from hardylab.state import (
    ELIGIBLE,
    PRODUCT,
    UNIFORM,
    Bipartition,
    MultipartiteState,
    all_cuts,
    bipartite_matrix,
    classify,
    parse_state,
    random_state,
    schmidt_decompose,
    state_to_document,
)

from oracles import random_unitary, schmidt_weights_rdm

R = 1 / math.sqrt(2)


def doc(dims, amps, **extra):
    d = {"format": "hardy-state/1", "dims": dims, "amplitudes": amps}
    d.update(extra)
    return json.dumps(d)


class TestParseState:
    def test_bell_type_sparse(self):
        s = parse_state(doc([2, 2], {"01": [R, 0], "10": [R, 0]}))
        assert s.dims == (2, 2)
        assert_allclose(s.amplitudes, [0, R, R, 0])

    def test_dense_pairs(self):
        s = parse_state(doc([2, 2], [[0, 0], [R, 0], [R, 0], [0, 0]]))
        assert_allclose(s.amplitudes, [0, R, R, 0])

    def test_amplitude_count_mismatch(self):
        with pytest.raises(StateFormatError, match="amplitude-count mismatch"):
            parse_state(doc([2, 2], [[1, 0], [0, 0], [0, 0]]))

    def test_normalize_flag(self):
        s = parse_state(doc([2, 2], [[1, 0], [0, 0], [0, 0], [1, 0]], normalize=True))
        assert_allclose(s.amplitudes, [R, 0, 0, R])
        assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0, abs=1e-15)

    def test_unnormalized_without_flag(self):
        with pytest.raises(StateFormatError, match="not normalized"):
            parse_state(doc([2, 2], [[1, 0], [0, 0], [0, 0], [1, 0]]))

    def test_zero_vector(self):
        with pytest.raises(StateFormatError, match="zero vector"):
            parse_state(doc([2, 2], [[0, 0]] * 4, normalize=True))

    def test_small_dimension(self):
        with pytest.raises(StateFormatError, match=">= 2"):
            parse_state(doc([1, 2], [[1, 0], [0, 0]]))

    @pytest.mark.parametrize("bad", ["NaN", "Infinity"])
    def test_non_finite(self, bad):
        text = '{"dims": [2], "amplitudes": [[%s, 0], [0, 0]], "normalize": true}' % bad
        with pytest.raises(StateFormatError, match="non-finite"):
            parse_state(text)

    def test_wrong_format_tag(self):
        with pytest.raises(StateFormatError, match="unsupported format"):
            parse_state(json.dumps({"format": "other/2", "dims": [2], "amplitudes": [[1, 0], [0, 0]]}))

    def test_not_json(self):
        with pytest.raises(StateFormatError):
            parse_state("{dims: 2")

    def test_round_trip_document(self, rng):
        s = random_state((3, 2), rng)
        again = parse_state(json.dumps(state_to_document(s)))
        assert_allclose(again.amplitudes, s.amplitudes, atol=0)

    def test_dimension_cap_env(self, monkeypatch):
        monkeypatch.setenv("HARDY_MAX_DIM", "8")
        with pytest.raises(DimensionCapExceeded):
            MultipartiteState.from_amplitudes((3, 3), np.ones(9), normalize=True)
        MultipartiteState.from_amplitudes((2, 4), np.ones(8), normalize=True)

    def test_default_cap(self):
        with pytest.raises(DimensionCapExceeded):
            parse_state(doc([65, 65], {"0,0": [1, 0]}))


class TestBipartition:
    def test_parse_cut_syntax(self):
        cut = Bipartition.parse("1,3|2,4", (2, 3, 2, 5))
        assert cut.group1 == (0, 2) and cut.group2 == (1, 3)
        assert (cut.dL, cut.dR) == (4, 15)
        assert cut.label() == "1,3|2,4"

    def test_complement_implied(self):
        cut = Bipartition.parse("2", (2, 3, 2))
        assert cut.group2 == (0, 2)

    @pytest.mark.parametrize("spec", ["1,2|2,3", "|1,2,3", "1,2,3", "0|1", "1|2"])
    def test_invalid(self, spec):
        with pytest.raises(StateFormatError):
            Bipartition.parse(spec, (2, 2, 2))

    def test_all_cuts_count(self):
        assert len(all_cuts((2, 2, 2, 2))) == 7

    def test_reshape_convention(self):
        # party 1 slowest: amplitude index of |a b c> is 4a + 2b + c
        amps = np.arange(8, dtype=float)
        s = MultipartiteState.from_amplitudes((2, 2, 2), amps, normalize=True)
        m = bipartite_matrix(s, Bipartition.from_groups((2, 2, 2), [0, 2]))
        # rows (a, c), columns b
        assert m[0b11, 1] == pytest.approx(amps[0b111] / np.linalg.norm(amps))
        assert m[0b01, 0] == pytest.approx(amps[0b001] / np.linalg.norm(amps))


class TestSchmidt:
    def test_bell(self):
        s = MultipartiteState.from_amplitudes((2, 2), [0, R, R, 0])
        assert_allclose(schmidt_decompose(s).coefficients, [R, R], atol=1e-15)

    def test_product(self):
        s = MultipartiteState.from_amplitudes((2, 2), [R, R, 0, 0])
        sd = schmidt_decompose(s)
        assert sd.rank == 1
        assert_allclose(sd.coefficients, [1.0])

    def test_asym(self, asym):
        assert_allclose(schmidt_decompose(asym).coefficients, [0.8, 0.6], atol=1e-15)

    def test_phase_convention(self, rng):
        s = random_state((3, 4), rng)
        sd = schmidt_decompose(s)
        for v in sd.left:
            lead = v[np.argmax(np.abs(v))]
            assert lead.imag == pytest.approx(0, abs=1e-15) and lead.real > 0

    def test_reconstruction_all_cuts(self, rng):
        done = 0
        while done < 200:
            n = int(rng.integers(2, 5))
            dims = tuple(int(d) for d in rng.integers(2, 5, size=n))
            if math.prod(dims) > 256:
                continue
            s = random_state(dims, rng)
            for cut in all_cuts(dims):
                sd = schmidt_decompose(s, cut)
                assert np.linalg.norm(sd.reconstruct() - s.amplitudes) < 1e-10
                assert_allclose(sd.left.conj() @ sd.left.T, np.eye(sd.rank), atol=1e-10)
                assert_allclose(sd.right.conj() @ sd.right.T, np.eye(sd.rank), atol=1e-10)
                assert np.all(np.diff(sd.coefficients) <= 1e-15)
                assert abs(np.sum(sd.coefficients**2) - 1) < 1e-10
            done += 1

    def test_weights_match_reduced_density_matrix(self, rng):
        for _ in range(30):
            dims = (2, 3, 2)
            s = random_state(dims, rng)
            for cut in all_cuts(dims):
                ref = schmidt_weights_rdm(s.amplitudes, dims, cut.group1)
                got = np.zeros_like(ref)
                got[: schmidt_decompose(s, cut).rank] = schmidt_decompose(s, cut).coefficients
                assert_allclose(got, ref, atol=1e-7)  # eigvalsh sqrt loses precision near zero

    def test_local_unitary_invariance(self, rng):
        for _ in range(50):
            dims = (3, 4)
            s = random_state(dims, rng)
            ua, ub = random_unitary(3, rng), random_unitary(4, rng)
            moved = (ua @ s.amplitudes.reshape(3, 4) @ ub.T).reshape(-1)
            t = MultipartiteState.from_amplitudes(dims, moved, normalize=True)
            assert_allclose(schmidt_decompose(t).coefficients, schmidt_decompose(s).coefficients, atol=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(0.05, 1.0), min_size=2, max_size=2),
           st.lists(st.floats(0.05, 1.0), min_size=3, max_size=3))
    def test_rank_one_means_product(self, a, b):
        vec = np.kron(np.array(a), np.array(b))
        s = MultipartiteState.from_amplitudes((2, 3), vec, normalize=True)
        sd = schmidt_decompose(s)
        assert classify(sd).tag == PRODUCT
        rebuilt = np.kron(sd.left[0], sd.right[0]) * sd.coefficients[0]
        assert np.linalg.norm(rebuilt - s.amplitudes) < 1e-10


class TestClassify:
    def test_product(self):
        s = MultipartiteState.from_amplitudes((2, 2), [1, 0, 0, 0])
        assert classify(schmidt_decompose(s)).tag == PRODUCT

    def test_uniform(self):
        s = MultipartiteState.from_amplitudes((2, 2), [0, R, R, 0])
        assert classify(schmidt_decompose(s)).tag == UNIFORM

    def test_eligible_pair(self, asym):
        cls = classify(schmidt_decompose(asym))
        assert cls.tag == ELIGIBLE and cls.witness_pair == (0, 1)

    def test_uniform_qutrit(self):
        s = MultipartiteState.from_amplitudes((3, 3), np.eye(3).reshape(-1), normalize=True)
        assert classify(schmidt_decompose(s)).tag == UNIFORM

    def test_pair_maximizes_closed_form(self):
        # weights 0.7, 0.51, 0.5: (0.7, 0.5) beats (0.7, 0.51) and (0.51, 0.5)
        w = np.array([0.7, 0.5, math.sqrt(1 - 0.49 - 0.25)])
        s = MultipartiteState.from_amplitudes((3, 3), np.diag(w).reshape(-1))
        sd = schmidt_decompose(s)
        assert_allclose(sd.coefficients, sorted(w, reverse=True), atol=1e-15)
        assert classify(sd).witness_pair == (0, 2)

    def test_relative_tolerance(self):
        s = MultipartiteState.from_amplitudes((2, 2), [R * (1 + 1e-12), 0, 0, R], normalize=True)
        assert classify(schmidt_decompose(s)).tag == UNIFORM
