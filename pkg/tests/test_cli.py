import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from hardylab.cli import run
from hardylab.state import load_state


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv)
    return code, json.loads(out)


class TestExamples:
    def test_hardy_asym(self, data_dir):
        code, doc = call_json("hardy", "--in", str(data_dir / "bell_asym.json"))
        assert code == 0
        assert doc["pass"] is True
        assert doc["conditions"][-1]["probability"] == pytest.approx(0.0340828, abs=1e-7)

    def test_hardy_bell(self, data_dir):
        code, doc = call_json("hardy", "--in", str(data_dir / "bell.json"))
        assert code == 3
        assert doc["error"] == "IneligibleState"

    def test_scan(self):
        code, out, err = call("scan", "--resolution", "10000")
        assert code == 0
        rows = [line.split(",") for line in out.strip().split("\n")[1:]]
        assert len(rows) == 10000
        best = max(float(r[3]) for r in rows)
        assert abs(best - 0.090170) < 1e-4
        assert err.startswith("max ")


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ("hardy", "--in", "bell_asym.json"),
        ("sample", "--in", "bell_asym.json", "--n", "2000", "--seed", "5", "--chunks", "3"),
        ("lhv", "--in", "bell_asym.json"),
        ("tripartite", "--in", "w_general.json"),
    ])
    def test_byte_identical(self, data_dir, argv):
        argv = tuple(str(data_dir / a) if a.endswith(".json") else a for a in argv)
        assert call(*argv) == call(*argv)


class TestSchmidt:
    def test_round_trip(self, data_dir):
        for name in ("bell_asym.json", "qutrits.json", "w_general.json"):
            path = data_dir / name
            state = load_state(path)
            code, doc = call_json("schmidt", "--in", str(path))
            assert code == 0
            left = np.array([[complex(*z) for z in v] for v in doc["left"]])
            right = np.array([[complex(*z) for z in v] for v in doc["right"]])
            psi = np.einsum("k,ka,kb->ab", np.array(doc["coefficients"]), left, right).reshape(-1)
            assert np.linalg.norm(psi - state.amplitudes) < 1e-10

    def test_cut(self, data_dir):
        code, doc = call_json("schmidt", "--in", str(data_dir / "w_general.json"), "--cut", "1,2|3")
        assert code == 0 and doc["cut"] == "1,2|3"

    def test_bad_cut(self, data_dir):
        code, _, err = call("schmidt", "--in", str(data_dir / "w_general.json"), "--cut", "1|1")
        assert code == 1 and "error" in err


class TestExitCodes:
    def test_classify(self, data_dir):
        assert call("classify", "--in", str(data_dir / "bell_asym.json"))[0] == 0
        assert call("classify", "--in", str(data_dir / "bell.json"))[0] == 3
        assert call("classify", "--in", str(data_dir / "product.json"))[0] == 3

    def test_usage(self, data_dir, tmp_path):
        assert call("nonsense")[0] == 1
        assert call("hardy", "--in", str(tmp_path / "missing.json"))[0] == 1
        assert call("hardy", "--in", str(data_dir / "bell_asym.json"), "--bogus")[0] == 1
        bad = tmp_path / "bad.json"
        bad.write_text('{"dims": [2, 2], "amplitudes": [[1, 0]]}')
        assert call("hardy", "--in", str(bad))[0] == 1

    def test_failed_condition(self, data_dir):
        # a loose tolerance flags the nonzero event as "zero" and fails it
        code, doc = call_json("hardy", "--in", str(data_dir / "bell_asym.json"), "--tol", "0.5")
        assert code == 2 and doc["pass"] is False

    def test_tripartite(self, data_dir):
        code, doc = call_json("tripartite", "--in", str(data_dir / "w_general.json"), "--certificate")
        assert code == 0 and doc["pass"]
        assert doc["omega_split"] == {"t_not_t1": 81, "t_is_t1": 81}
        for name in ("ghz.json", "w.json"):
            code, doc = call_json("tripartite", "--in", str(data_dir / name))
            assert code == 3 and doc["error"] == "NoEligibleComponent"

    def test_npartite(self, tmp_path):
        phi = np.array([0.6, 0, 0, 0.8])
        chi = np.zeros((4, 2, 2))
        chi[:, 0, 0], chi[:, 1, 1] = 0.9 * phi, math.sqrt(0.19) * phi
        amps = [[float(x), 0.0] for x in chi.reshape(-1)]
        path = tmp_path / "four.json"
        path.write_text(json.dumps({"format": "hardy-state/1", "dims": [2, 2, 2, 2], "amplitudes": amps}))
        code, doc = call_json("npartite", "--in", str(path))
        assert code == 0
        assert doc["peel_order"] == [4, 3]
        assert doc["conditions"][-1]["probability"] == pytest.approx(0.81 * 144 / 4225, abs=1e-12)
        code, doc = call_json("npartite", "--in", str(path), "--search")
        assert code == 0

    def test_sample_forbidden(self, data_dir):
        code, doc = call_json("sample", "--in", str(data_dir / "bell_asym.json"), "--settings", "X1,X2",
                              "--n", "100000", "--seed", "1")
        assert code == 0
        assert doc["forbidden"] == [{"outcome": [1.0, 1.0], "count": 0}]

    def test_sample_bad_settings(self, data_dir):
        assert call("sample", "--in", str(data_dir / "bell_asym.json"), "--settings", "X1,Y1")[0] == 1


class TestCertificates:
    def test_lhv_then_verify(self, data_dir, tmp_path):
        out = tmp_path / "cert.json"
        code, text, _ = call("lhv", "--in", str(data_dir / "bell_asym.json"), "--out", str(out))
        assert code == 0 and text == ""
        doc = json.loads(out.read_text())
        assert doc["no_local_model"] is True
        assert doc["lp"]["verdict"] == "Infeasible"
        code, res = call_json("verify-cert", "--in", str(out))
        assert code == 0 and res["valid"]

    def test_tampered(self, data_dir, tmp_path):
        out = tmp_path / "cert.json"
        call("lhv", "--in", str(data_dir / "bell_asym.json"), "--out", str(out))
        doc = json.loads(out.read_text())
        doc["lp"]["witness"] = [0.0] * len(doc["lp"]["witness"])
        out.write_text(json.dumps(doc))
        code, res = call_json("verify-cert", "--in", str(out))
        assert code == 2 and res["checks"] == {"enumeration": True, "lp": False}

    def test_tripartite_certificate(self, data_dir, tmp_path):
        out = tmp_path / "tri.json"
        call("tripartite", "--in", str(data_dir / "w_general.json"), "--certificate", "--out", str(out))
        assert call("verify-cert", "--in", str(out))[0] == 0

    def test_exact_table(self, tmp_path):
        xy = [1, -1, 0]
        scenario = {"parties": [[{"label": "X1", "outcomes": xy}, {"label": "Y1", "outcomes": xy}],
                                [{"label": "X2", "outcomes": xy}, {"label": "Y2", "outcomes": xy}]]}
        path = tmp_path / "table.json"
        path.write_text(json.dumps({"scenario": scenario, "table": ["1/9"] * 36}))
        code, doc = call_json("lhv", "--table", str(path), "--exact")
        assert code == 0
        assert doc["verdict"] == "Feasible" and doc["method"] == "exact-simplex"
        cert = tmp_path / "lp.json"
        cert.write_text(json.dumps(doc))
        assert call("verify-cert", "--in", str(cert))[0] == 0


def test_module_entry_point(data_dir):
    proc = subprocess.run([sys.executable, "-m", "hardylab", "hardy", "--in", str(data_dir / "bell_asym.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pass"] is True
