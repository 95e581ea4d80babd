import json

import numpy as np
import pytest

from swdelay import cli
from swdelay.sysfile import (load_system_file, parse_system_file,
                             system_file_doc)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.strip() else None
    return code, payload, captured.err


def test_certify_example1(capsys, ex1_path):
    code, payload, _ = run_cli(capsys, "certify", str(ex1_path))
    assert code == 0
    assert payload["status"] == "certified"
    assert payload["margin"] > 0.44
    assert payload["verified"] is True
    assert payload["display"]["margin"] == round(payload["margin"], 4)


def test_certify_trivial_system(capsys, tmp_path):
    doc = {"n": 1, "h": 0.0, "subsystems": [{"A0": [[-1.0]]}]}
    path = tmp_path / "one.json"
    path.write_text(json.dumps(doc))
    code, payload, _ = run_cli(capsys, "certify", str(path))
    assert code == 0
    assert payload["xi"] == [1.0]
    assert payload["margin"] == pytest.approx(1.0, abs=1e-9)


def test_certify_infeasible_exit_code(capsys, infeasible_path):
    code, payload, _ = run_cli(capsys, "certify", str(infeasible_path))
    assert code == 2
    assert payload["status"] == "infeasible"


def test_certify_malformed_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "h": 1.0}')
    code, _, err = run_cli(capsys, "certify", str(bad))
    assert code == 1
    assert "subsystems" in err


def test_radius_theorem2_example1(capsys, ex1_path):
    code, payload, _ = run_cli(capsys, "radius", str(ex1_path), "--theorem2")
    assert code == 0
    assert payload["lower"] >= 0.4439 - 1e-9
    assert payload["upper"] == pytest.approx(2.0323, abs=1e-3)
    assert payload["lower_method"] == "Theorem2-LP"


def test_radius_corollary5_example2(capsys, ex2_path):
    code, payload, _ = run_cli(capsys, "radius", str(ex2_path), "--corollary5")
    assert code == 0
    assert payload["lower"] == pytest.approx(0.6008, abs=1e-3)
    assert payload["display"]["lower"] == 0.6008


def test_radius_missing_bound_section(capsys, ex1_path):
    code, _, err = run_cli(capsys, "radius", str(ex1_path), "--corollary5")
    assert code == 1
    assert "bound" in err


def test_radius_theorem3_needs_sections(capsys, ex2_path, tmp_path):
    code, _, err = run_cli(capsys, "radius", str(ex2_path), "--theorem3")
    assert code == 1          # ex2 carries no perturbation section
    assert "perturbation" in err
    doc = json.load(open(ex2_path))
    eye = np.eye(3).tolist()
    doc["perturbation"] = [{"D0": eye, "E0": eye, "D1": eye, "E1": eye}] * 2
    path = tmp_path / "ex2p.json"
    path.write_text(json.dumps(doc))
    code, payload, _ = run_cli(capsys, "radius", str(path), "--theorem3")
    assert code == 0
    assert payload["lower"] == pytest.approx(0.6008, abs=1e-3)
    assert payload["lower_method"] == "Theorem3-Domination"
    assert payload["upper"] is None


def test_subsystem_radius(capsys, ex1_path):
    code, payload, _ = run_cli(capsys, "subsystem-radius", str(ex1_path),
                            "--k", "2")
    assert code == 0
    assert payload["exact"] is True
    assert payload["lower"] == pytest.approx(2.0323, abs=1e-3)
    code, payload, _ = run_cli(capsys, "subsystem-radius", str(ex1_path),
                            "--k", "1")
    assert code == 0
    assert payload["lower"] == pytest.approx(2.4894, abs=1e-3)


def test_subsystem_radius_non_positive(capsys, tmp_path):
    doc = {"n": 2, "h": 0.0,
           "subsystems": [{"A0": [[-1.0, -0.5], [0.0, -1.0]]}]}
    path = tmp_path / "np.json"
    path.write_text(json.dumps(doc))
    code, _, err = run_cli(capsys, "subsystem-radius", str(path), "--k", "1")
    assert code == 2
    assert "NotPositive" in err


def test_simulate_decay_run(capsys, ex1_path, tmp_path):
    out_csv = tmp_path / "traj.csv"
    code, payload, _ = run_cli(
        capsys, "simulate", str(ex1_path),
        "--signal", "periodic:1:2,2:1", "--horizon", "20", "--dt", "0.005",
        "--history", "const:1,1", "--out", str(out_csv))
    assert code == 0
    assert payload["diverged"] is False
    assert payload["final_norm"] < 1e-6
    assert payload["envelope_ok"] is True
    lines = out_csv.read_text().strip().splitlines()
    assert lines[0] == "t,x1,x2,sigma"
    assert len(lines) == 4002
    assert lines[1].split(",")[-1] == "1"


def test_simulate_instability_disturbance(capsys, ex1_path, ex1_big_path):
    code, payload, _ = run_cli(
        capsys, "simulate", str(ex1_path),
        "--signal", "periodic:1:2,2:1", "--horizon", "30", "--dt", "0.005",
        "--history", "const:1,1", "--disturb", f"file:{ex1_big_path}")
    assert code == 0
    assert payload["diverged"] or payload["final_norm"] > 1.0
    assert payload["disturbance_norm"] == pytest.approx(9.916, abs=1e-12)


def test_simulate_sampled_disturbance_deterministic(capsys, ex1_path):
    args = ("simulate", str(ex1_path), "--signal", "random:0.2,1,9",
            "--horizon", "5", "--dt", "0.01", "--disturb", "sample:0.3,4")
    code_a, payload_a, _ = run_cli(capsys, *args)
    code_b, payload_b, _ = run_cli(capsys, *args)
    assert code_a == code_b == 0
    assert payload_a == payload_b


def test_simulate_step_mismatch(capsys, ex1_path):
    code, _, err = run_cli(capsys, "simulate", str(ex1_path),
                            "--signal", "constant:1", "--horizon", "1",
                            "--dt", "0.003")
    assert code == 1
    assert "StepMismatch" in err


def test_simulate_bad_signal_grammar(capsys, ex1_path):
    code, _, err = run_cli(capsys, "simulate", str(ex1_path),
                            "--signal", "sometimes:1", "--horizon", "1",
                            "--dt", "0.01")
    assert code == 1


def test_round_trip_all_fixtures(ex1_path, ex2_path, infeasible_path):
    for path in (ex1_path, ex2_path, infeasible_path):
        sf = load_system_file(path)
        doc = system_file_doc(sf)
        sf2 = parse_system_file(doc)
        assert sf2.system.n == sf.system.n
        assert sf2.system.h == sf.system.h
        for a, b in zip(sf2.system.subsystems, sf.system.subsystems):
            assert np.array_equal(a.a0, b.a0)
            assert len(a.discrete) == len(b.discrete)
            for (da, ma), (db, mb) in zip(a.discrete, b.discrete):
                assert da == db and np.array_equal(ma, mb)
            if b.kernel is not None:
                assert a.kernel.grid == b.kernel.grid
                for va, vb in zip(a.kernel.values, b.kernel.values):
                    assert np.array_equal(va, vb)
        if sf.perturbation is not None:
            for qa, qb in zip(sf2.perturbation.quads, sf.perturbation.quads):
                assert np.array_equal(qa.d0, qb.d0)
                assert np.array_equal(qa.e1, qb.e1)
        if sf.bound is not None:
            assert np.array_equal(sf2.bound.a0, sf.bound.a0)


def test_unknown_command_is_input_error():
    assert cli.main(["no-such-command"]) == 1
