import csv
import io
import json
import subprocess
import sys

import pytest

from warpfinsler.campaign import CampaignSpec, build_family, cmd_verify
from warpfinsler.cli import main
from warpfinsler.errors import DomainError


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _json(text):
    data = json.loads(text)
    data.pop("runtime_ms", None)
    return data


def test_verify_douglas_family_passes(capsys):
    code, out, err = _run(capsys, "verify", "--family", "g-family", "--h", "1+r^2",
                          "--G", "sqrt(t^2+0.5)+0.3*t", "--samples", "40")
    report = _json(out)
    assert code == 0
    (check,) = report["checks"]
    assert check["name"] == "douglas" and check["pass"] and check["sup_norm"] < 1e-9
    assert "douglas: pass" in err
    assert report["spec"]["family"]["h"] == "1+r^2"


def test_verify_randers_separates_classes(capsys):
    code, out, _ = _run(capsys, "verify", "--preset", "randers", "--samples", "30",
                        "--checks", "douglas,berwald,landsberg")
    checks = {c["name"]: c for c in _json(out)["checks"]}
    assert code == 1
    assert checks["douglas"]["pass"]
    assert not checks["berwald"]["pass"] and not checks["landsberg"]["pass"]
    worst = checks["berwald"]["worst_point"]
    assert len(worst["x"]) == 4 and worst["value"] == checks["berwald"]["sup_norm"]


def test_verify_is_deterministic(capsys, tmp_path):
    args = ["verify", "--preset", "perturbed", "--samples", "25", "--seed", "4",
            "--checks", "douglas,ricci,convexity"]
    _, a, _ = _run(capsys, *args)
    _, b, _ = _run(capsys, *args, "--workers", "3")
    assert _json(a) == _json(b)
    spec = CampaignSpec(family={"preset": "perturbed"}, samples=25, seed=4, checks=("douglas",))
    assert cmd_verify(spec).to_json(timing=False) == cmd_verify(spec).to_json(timing=False)


def test_csv_and_per_point_outputs(capsys, tmp_path):
    out, per = tmp_path / "report.csv", tmp_path / "points.csv"
    code, _, _ = _run(capsys, "verify", "--preset", "randers", "--samples", "12",
                      "--checks", "douglas,landsberg", "--format", "csv",
                      "--out", str(out), "--per-point", str(per))
    assert code == 1
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [r["name"] for r in rows] == ["douglas", "landsberg"]
    points = list(csv.DictReader(io.StringIO(per.read_text())))
    assert len(points) == 12 and set(points[0]) == {"index", "x", "y", "douglas", "landsberg"}


def test_tolerance_flags(capsys):
    _, out, _ = _run(capsys, "verify", "--preset", "randers", "--samples", "5",
                     "--checks", "berwald", "--tol-berwald", "1e6")
    (check,) = _json(out)["checks"]
    assert check["tolerance"] == 1e6 and check["pass"]


def test_scan_convexity_reports_first_failing_radius(capsys):
    code, out, _ = _run(capsys, "scan-convexity", "--family", "randers", "--f", "1", "--g", "1",
                        "--b", "2*r", "--r-count", "40")
    (check,) = _json(out)["checks"]
    assert code == 1 and not check["pass"]
    assert 0.5 <= check["scan"]["first_failing_r"] < 0.55
    assert check["worst_point"]["omega"] <= 0 or check["worst_point"]["lambda"] <= 0


def test_scan_convexity_on_preset_passes(capsys):
    code, _, _ = _run(capsys, "scan-convexity", "--preset", "example-5", "--r-count", "5")
    assert code == 0


def test_point_on_flat_family(capsys):
    code, out, _ = _run(capsys, "point", "--family", "flat", "--G", "sqrt(t^2+1)+0.3*t",
                        "--x", "0,0.5,0", "--y", "1,1,0")
    data = json.loads(out)
    assert code == 0
    assert data["point"]["z"] == 1.0 and data["point"]["r"] == 0.5
    assert data["spray"] == [0.0, 0.0, 0.0]
    assert data["norms"] == {"douglas": 0.0, "berwald": 0.0, "landsberg": 0.0}
    assert data["residuals"]["phi_r"] == 0.0
    assert data["det"] == pytest.approx(data["det_formula"], rel=1e-12)


def test_oracle_command(capsys):
    code, out, _ = _run(capsys, "oracle", "--preset", "perturbed", "--samples", "4", "--n", "2")
    names = [c["name"] for c in _json(out)["checks"]]
    assert code == 0
    assert names == ["oracle-hessian", "oracle-spray", "oracle-divergence",
                     "oracle-douglas", "oracle-berwald"]


@pytest.mark.parametrize("argv", [
    ["verify", "--family", "g-family", "--h", "1+r^2"],
    ["verify", "--preset", "example-1", "--c", "2"],
    ["verify", "--family", "g-family", "--h", "1+", "--G", "t"],
    ["verify", "--preset", "randers", "--checks", "nonsense"],
    ["verify", "--preset", "randers", "--r-range", "0.5,2"],
    ["point", "--preset", "randers", "--x", "0,0.5", "--y", "1,1"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify"])
    assert info.value.code == 2


def test_strict_mode_aborts(capsys):
    code, _, _ = _run(capsys, "verify", "--family", "randers", "--f", "1", "--g", "1",
                      "--b", "2*r", "--samples", "50", "--strict")
    assert code == 2


def test_build_family_errors():
    with pytest.raises(DomainError):
        build_family({"preset": "nope"})
    with pytest.raises(DomainError):
        build_family({"kind": "nope"})
    with pytest.raises(DomainError):
        build_family({"kind": "randers", "f": "1"})
    assert build_family({"preset": "example-3", "c": 2.0, "rho": 2.0}).rho == 2.0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "warpfinsler", "--version"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "warpfinsler" in proc.stdout
