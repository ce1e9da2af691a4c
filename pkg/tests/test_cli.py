import json
import subprocess
import sys

import pytest

from parabolic_weingarten.cli import EXIT_INTEGRATION, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_trace_blowup_reports_cos(capsys):
    code, out, _ = run(capsys, "trace", "--meangauss", "-a", "2", "-b", "-3", "-c", "0", "--z0", "1")
    assert code == EXIT_OK
    data = json.loads(out)
    for end in ("forward", "backward"):
        assert data["terminal"][end]["kind"] == "SlopeBlowup"
        assert data["terminal"][end]["measuredCos"] == pytest.approx(1 / 3, abs=1e-4)


def test_trace_line(capsys):
    code, out, _ = run(capsys, "trace", "--principal", "-m", "-2", "-n", "3", "--theta0", "0")
    data = json.loads(out)
    assert code == EXIT_OK and data["degenerate"] and data["shapeClass"] == "Horosphere"


def test_trace_writes_csv_and_svg(tmp_path, capsys):
    csv, svg = tmp_path / "p.csv", tmp_path / "p.svg"
    code, _, _ = run(capsys, "trace", "--principal", "-m", "1", "-n", "2", "--csv", str(csv), "--svg", str(svg),
                     "--svg-window", "10")
    assert code == EXIT_OK
    assert csv.read_text().startswith("s,x,z,theta,kappa1,kappa2,H,K\n")
    first = svg.read_text()
    assert first.startswith("<svg") and "<polyline" in first
    run(capsys, "trace", "--principal", "-m", "1", "-n", "2", "--svg", str(svg), "--svg-window", "10")
    assert svg.read_text() == first


def test_json_is_stable(capsys):
    argv = ("trace", "--principal", "-m", "-2", "-n", "1")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--principal", "-m", "2", "-n", "0")
    assert code == EXIT_OK
    assert json.loads(out)["verdict"]["shapeClass"] == "ConvexGraph"
    code, out, _ = run(capsys, "classify", "--principal", "-m", "0", "-n", "1")
    assert json.loads(out)["relation"] is None


def test_verify_pass_and_fail(capsys):
    code, out, _ = run(capsys, "verify", "--principal", "-m", "-2", "-n", "1")
    data = json.loads(out)
    assert code == EXIT_OK and data["passed"]
    # a window too short to close one period cannot confirm periodicity
    code, out, _ = run(capsys, "verify", "--principal", "-m", "1", "-n", "2", "--max-arclength", "1")
    assert code == EXIT_VERIFY and not json.loads(out)["passed"]


def test_usage_errors(capsys):
    assert run(capsys, "trace", "--principal", "-m", "1")[0] == EXIT_USAGE
    assert run(capsys, "trace", "--principal", "-m", "1", "-n", "2", "-a", "1")[0] == EXIT_USAGE
    assert run(capsys, "trace", "--meangauss", "-a", "0", "-b", "0", "-c", "1")[0] == EXIT_USAGE
    assert run(capsys, "trace", "--principal", "-m", "1", "-n", "2", "--rel-tol", "-1")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["trace", "--principal", "--meangauss"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == EXIT_USAGE


def test_singular_start_is_integration_failure(capsys):
    code, _, err = run(capsys, "trace", "--meangauss", "-a", "2", "-b", "-1", "-c", "0")
    assert code == EXIT_INTEGRATION and "singular" in err


def test_mesh(tmp_path, capsys):
    obj = tmp_path / "m.obj"
    code, out, _ = run(capsys, "mesh", "--principal", "-m", "-2", "-n", "1", "--obj", str(obj), "--t-count", "3")
    data = json.loads(out)
    assert code == EXIT_OK and data["columns"] == 3
    assert data["audit"]["maxResidual"] < 1e-6
    assert obj.read_text().startswith("#")
    assert run(capsys, "mesh", "--principal", "-m", "-2", "-n", "1", "--obj", str(obj),
               "--t-count", "1")[0] == EXIT_USAGE


def test_sweep(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"kind": "PrincipalLinear", "axes": [["m", -3, 3, 4], ["n", 0, 3, 3]],
                                "workers": 1}))
    code, out, _ = run(capsys, "sweep", str(spec), "--out", str(tmp_path / "out"))
    assert code == EXIT_OK and json.loads(out)["cells"] == 12
    assert (tmp_path / "out" / "diagram.csv").exists() and (tmp_path / "out" / "manifest.json").exists()
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "sweep", str(bad))[0] == EXIT_USAGE
    bad.write_text(json.dumps({"axes": [["q", 0, 1, 2]]}))
    assert run(capsys, "sweep", str(bad))[0] == EXIT_USAGE


def test_figures(tmp_path, capsys):
    code, out, _ = run(capsys, "figures", "--out", str(tmp_path / "g"))
    assert code == EXIT_OK
    data = json.loads(out)
    assert len(list((tmp_path / "g").glob("*.svg"))) == len(data["files"]) == 18
    assert data["seconds"] < 60
    index = json.loads((tmp_path / "g" / "index.json").read_text())
    assert {e["key"] for e in index} >= {"principal-periodic", "unit-periodic"}


def test_module_entry_point_help():
    res = subprocess.run([sys.executable, "-m", "parabolic_weingarten", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for flag in ("trace", "classify", "verify", "mesh", "sweep", "figures"):
        assert flag in res.stdout
    res = subprocess.run([sys.executable, "-m", "parabolic_weingarten", "trace", "--help"],
                         capture_output=True, text=True)
    for flag in ("--principal", "--meangauss", "--z0", "--theta0", "--rel-tol", "--abs-tol", "--max-arclength",
                 "--csv", "--svg"):
        assert flag in res.stdout


def test_subprocess_exit_code():
    res = subprocess.run([sys.executable, "-m", "parabolic_weingarten", "verify", "--principal", "-m", "1",
                          "-n", "2", "--max-arclength", "1"], capture_output=True, text=True)
    assert res.returncode == EXIT_VERIFY
