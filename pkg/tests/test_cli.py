import json
import subprocess
import sys

import pytest

from hardylab import claims, cli
from hardylab.nonlinear import SolverFailure


def _run(tmp_path, *argv):
    return cli.main([*argv, "--out", str(tmp_path)])


def test_exponents_example(tmp_path, capsys):
    assert _run(tmp_path, "exponents", "--mu", "-2", "--dim", "3") == 0
    data = json.loads((tmp_path / "exponents.json").read_text())
    assert data["alpha_plus"] == 2.0
    assert data["alpha_minus"] == -1.0
    assert data["q_c"] == pytest.approx(5 / 3, abs=1e-15)
    assert data["q_star"] == 3.0
    assert json.loads(capsys.readouterr().out) == data
    meta = json.loads((tmp_path / "exponents.meta.json").read_text())
    assert "runtime_s" in meta


def test_kernel_lq_endpoint_is_divergent(tmp_path):
    assert _run(tmp_path, "kernel-lq", "--mu", "0", "--dim", "3", "--q", "2.0") == 0
    assert json.loads((tmp_path / "kernel_lq.json").read_text())["verdict"] == "divergent"


@pytest.mark.parametrize("argv", [
    ["exponents", "--mu", "0.3"],
    ["exponents", "--mu", "0", "--dim", "1"],
    ["trace", "--mu", "0"],
    ["solve", "--q", "2", "--domain", "cube:1"],
    ["no-such-command"],
])
def test_bad_flags_exit_with_usage(tmp_path, argv):
    assert _run(tmp_path, *argv) == cli.EXIT_USAGE


def test_trace_loss_has_its_own_exit_code(tmp_path):
    code = _run(tmp_path, "trace", "--mu", "-2", "--q", "3.5", "--n", "1024")
    assert code == cli.EXIT_TRACE_LOSS
    assert json.loads((tmp_path / "trace.json").read_text())["status"] == "trace_loss"
    assert (tmp_path / "trace_solution.csv").exists()


def test_refused_nonuniqueness_exit_code(tmp_path):
    code = _run(tmp_path, "nonunique", "--domain", "annulus:0.5,1", "--q", "2", "--n", "512")
    assert code == cli.EXIT_REFUSED
    assert json.loads((tmp_path / "nonunique.json").read_text())["status"] == "refused"


def test_solver_failure_writes_report(tmp_path, monkeypatch):
    def boom(cfg, out):
        raise SolverFailure("no convergence", [1.0, 0.5])

    monkeypatch.setitem(cli.DISPATCH, "maximal", boom)
    assert _run(tmp_path, "maximal", "--q", "2") == cli.EXIT_SOLVER
    report = json.loads((tmp_path / "maximal.json").read_text())
    assert report["status"] == "solver_failure"
    assert report["history"] == [1.0, 0.5]


def test_violated_claim_sets_exit_code(tmp_path, monkeypatch):
    fake = {
        "ok": lambda quick, seed: claims.ClaimReport("ok", "verified", {"x": 1}),
        "bad": lambda quick, seed: claims.ClaimReport("bad", "violated", {"x": 2}),
    }
    monkeypatch.setattr(claims, "CLAIMS", fake)
    assert _run(tmp_path, "verify-all", "--workers", "1") == cli.EXIT_VIOLATED
    matrix = json.loads((tmp_path / "verify_all.json").read_text())
    assert matrix["counts"]["violated"] == 1
    assert (tmp_path / "claims" / "bad.json").exists()


def test_verify_all_is_deterministic(tmp_path):
    subset = ["exponent-algebra", "halfspace-kernel", "comparison"]
    texts = []
    for i, workers in enumerate(("1", "2")):
        out = tmp_path / str(i)
        assert cli.main(["verify-all", "--quick", "--workers", workers, "--claims", *subset,
                         "--out", str(out)]) == 0
        texts.append([(out / "verify_all.json").read_bytes()]
                     + [(out / "claims" / f"{c}.json").read_bytes() for c in subset])
    assert texts[0] == texts[1]


def test_console_entry_point_uses_env_directory(tmp_path):
    env = {"HARDYLAB_OUT": str(tmp_path), "PATH": ""}
    proc = subprocess.run([sys.executable, "-m", "hardylab.cli", "exponents", "--mu", "0"],
                          env=env, capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "exponents.json").exists()
