import json
import subprocess
import sys

import pytest

from heightentropy import cli
from heightentropy.adelic import EntropyTrace
from heightentropy.heights import GlobalHeightReport
from heightentropy.julia import JuliaHeight
from heightentropy.morphic import MorphicHeightReport
from heightentropy.solenoid import SolenoidReport


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solenoid(capsys):
    code, out, _ = run(["solenoid", "--a", "3", "--b", "2", "--n", "3"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["counts"] == [1, 5, 19]
    assert SolenoidReport.from_dict(d).counts == [1, 5, 19]


def test_height(capsys):
    code, out, _ = run(["height", "--curve", "0,0,1,-1,0", "--point", "0;0", "--depth", "10"], capsys)
    d = json.loads(out)
    assert code == 0
    assert d["hhat"] == pytest.approx(0.0255557, abs=1e-7)
    assert abs(d["residual"]) < 1e-4
    assert GlobalHeightReport.from_dict(d).hhat == d["hhat"]


def test_height_with_tate(capsys):
    code, out, _ = run(["height", "--curve", "0,-1,1,-6,2", "--point", "0;1", "--depth", "8",
                        "--psi-n", "100", "--tate", "3:2:1"], capsys)
    assert code == 0
    loc = {r["place"]: r for r in json.loads(out)["locals"]}
    assert loc["3"]["method"] == "tate-formula"


def test_entropy_primorial(capsys):
    code, out, _ = run(["entropy", "--action", "primorial", "--rate", "nlogn",
                        "--horizon", "2000", "--stride", "100"], capsys)
    d = json.loads(out)
    assert code == 0 and d["target"] == 1.0
    assert EntropyTrace.from_dict(d).horizon == 2000


def test_entropy_from_file(tmp_path, capsys):
    f = tmp_path / "thetas.txt"
    f.write_text("1/2 1/4\n3 1/8\n")
    code, out, _ = run(["entropy", "--action", f"@{f}", "--rate", "n", "--place-filter", "2"],
                       capsys)
    d = json.loads(out)
    assert code == 0
    assert d["finite_exponents"] == {"2": 3}


@pytest.mark.parametrize("action,pf", [("elliptic-b", "all"), ("elliptic-theta", "all"),
                                       ("eds-u-inverse", "S"), ("flip-local", "inf")])
def test_entropy_elliptic(action, pf, capsys):
    code, out, err = run(["entropy", "--action", action, "--curve", "0,0,1,-1,0",
                          "--point", "0;0", "--place-filter", pf, "--horizon", "6"], capsys)
    assert code == 0, err
    assert json.loads(out)["target"] is not None


def test_morphic_and_julia(capsys):
    code, out, _ = run(["morphic", "--poly", "1,0,0", "--q", "2/3", "--depth", "8"], capsys)
    d = json.loads(out)
    assert code == 0 and d["global_height"] == pytest.approx(1.09861228867)
    assert MorphicHeightReport.from_dict(d).q == "2/3"
    code, out, _ = run(["julia", "--poly", "2,0,-1", "--q", "2", "--level", "8"], capsys)
    d = json.loads(out)
    assert code == 0 and d["closed_form"] == pytest.approx(1.31695789692)
    assert JuliaHeight.from_dict({k: d[k] for k in
                                  ("level", "root_sum", "direct", "residual_max",
                                   "principal_value", "excluded", "notes")}).level == 8


def test_csv(capsys):
    code, out, _ = run(["entropy", "--action", "identity-index", "--horizon", "5",
                        "--format", "csv"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "n,quantity,value"
    assert "5,quotient,1.0" in lines


@pytest.mark.parametrize("argv", [
    ["height", "--curve", "0,0", "--point", "0;0"],
    ["height", "--curve", "0,0,1,-1,0", "--point", "1;1"],
    ["solenoid", "--a", "3"],
    ["entropy", "--action", "nonesuch"],
    ["morphic", "--poly", "1,2", "--q", "1"],
    ["julia", "--poly", "1,0,0", "--q", "2", "--level", "0"],
    ["bogus"],
])
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and "error" in err


@pytest.mark.parametrize("argv", [
    ["solenoid", "--a", "2", "--b", "2"],
    ["entropy", "--action", "elliptic-b", "--curve", "0,0,0,0,1", "--point", "2;3"],
    ["entropy", "--action", "eds-u-inverse", "--curve", "0,0,0,0,1", "--point", "2;3"],
])
def test_computational_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and "error" in err


def test_julia_guard_keeps_direct_estimate(capsys):
    code, out, _ = run(["julia", "--poly", "1,0,0", "--q", "2", "--level", "15"], capsys)
    d = json.loads(out)
    assert code == 0 and d["root_sum"] is None
    assert d["direct"] == pytest.approx(0.69314718056)


def test_deterministic_bytes():
    argv = [sys.executable, "-m", "heightentropy", "julia", "--poly", "2,0,-1", "--q", "2",
            "--level", "8"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a


def test_twelve_significant_digits():
    assert cli.dumps({"x": 1 / 3}) == '{\n  "x": 0.333333333333\n}\n'


def test_huge_exact_denominator_serializes():
    # fresh interpreter, so the default int-to-str digit limit is in force
    argv = [sys.executable, "-m", "heightentropy", "entropy", "--action", "eds-u-inverse",
            "--curve", "0,-1,1,-6,2", "--point", "0;1", "--horizon", "8", "--place-filter", "S"]
    proc = subprocess.run(argv, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    d = json.loads(proc.stdout)
    assert len(d["finite_denominator"]) > 4300
    assert EntropyTrace.from_dict(d).estimate == d["estimate"]
