import json
import subprocess
import sys

import numpy as np
import pytest

from dliouville import cli, lattice


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv_rows(text):
    return [ln.split(",") for ln in text.splitlines() if ln and not ln.startswith("#")][1:]


def test_evolve_random(capsys):
    code, out, _ = run(capsys, "evolve", "-N", "2", "--steps", "50", "--seed", "3")
    assert code == 0
    rows = _csv_rows(out)
    per_site = {}
    for n, m, _ in rows:
        per_site.setdefault(m, []).append(int(n))
    assert sorted(per_site) == ["0", "1", "2", "3"]
    assert all(len(v) == 51 for v in per_site.values())
    # recompute residuals from the file
    prev = [float(x) for x in out.split("# prev_row=")[1].splitlines()[0].split()]
    chi = np.array([float(c) for _, _, c in rows]).reshape(51, 4)
    assert lattice.equation_residuals(np.vstack([prev, chi])).max() < 1e-10
    assert "# max_residual=" in out


def test_evolve_zero_steps_echo(capsys):
    code, out, _ = run(capsys, "evolve", "-N", "2", "--steps", "0", "--seed", "5")
    assert code == 0
    assert len(_csv_rows(out)) == 4


def test_evolve_volkov_and_bad_epsilon(capsys):
    code, out, _ = run(capsys, "evolve", "-N", "3", "--steps", "5", "--init", "volkov:exp:0.3333333333333333")
    assert code == 0
    code, _, err = run(capsys, "evolve", "-N", "2", "--steps", "3", "--init", "volkov:exp:0.3")
    assert code == 1 and "not L*M/N" in err


def test_evolve_usage_errors(capsys):
    assert run(capsys, "evolve", "-N", "0")[0] == 2
    assert run(capsys, "evolve", "--steps", "-1")[0] == 2


def test_converge(capsys, tmp_path):
    script = tmp_path / "plot.py"
    code, out, _ = run(capsys, "converge", "--pair", "exp", "--epsilon", "0.1", "0.05", "0.025",
                       "--plot-script", str(script))
    assert code == 0
    slope = float(out.strip().splitlines()[-1].split("=")[-1])
    assert abs(slope - 2) < 0.2
    assert script.exists() and "matplotlib" in script.read_text()
    compile(script.read_text(), str(script), "exec")


def test_converge_errors(capsys):
    assert run(capsys, "converge", "--epsilon", "0.1")[0] == 1
    with pytest.raises(SystemExit) as e:
        cli.main(["converge", "--epsilon"])
    assert e.value.code == 2


def test_groupoid_dehn_n1(capsys):
    code, out, _ = run(capsys, "groupoid", "dehn", "-N", "1", "--format", "json")
    assert code == 0
    res = json.loads(out)["results"][0]
    assert res["ok"] and res["sample_out"] == [4.0, 1.0]


@pytest.mark.parametrize("check,N", [("theorem", 3), ("props", 2), ("pentagon", 1),
                                     ("inversion", 1), ("relations", 1)])
def test_groupoid_checks(capsys, check, N):
    code, out, _ = run(capsys, "groupoid", check, "-N", str(N), "--samples", "20",
                       "--format", "json")
    assert code == 0
    assert all(r["ok"] for r in json.loads(out)["results"])


def test_identities_fast_b1(capsys):
    code, out, _ = run(capsys, "identities", "--suite", "fast", "-b", "1", "--points", "2")
    assert code == 0
    lines = [json.loads(ln) for ln in out.splitlines()]
    assert lines[0]["schema"].startswith("dliouville.identity-report")
    assert len(lines) > 1 and all(e["pass"] for e in lines[1:])


def test_identities_injected_point(capsys):
    code, _, err = run(capsys, "identities", "--point", '{"id": "fourier_plus", "w": [0.1, 0.3]}')
    assert code == 1 and "violated" in err and "Im w < 0" in err


def test_reports_reproducible(capsys, tmp_path):
    files = []
    for k in range(2):
        f = tmp_path / f"r{k}.jsonl"
        assert run(capsys, "identities", "-b", "phase:30", "--points", "2", "--seed", "9",
                   "--out", str(f))[0] == 0
        files.append(f.read_bytes())
    assert files[0] == files[1]
    a = run(capsys, "evolve", "-N", "2", "--steps", "4", "--seed", "1")[1]
    b = run(capsys, "evolve", "-N", "2", "--steps", "4", "--seed", "1")[1]
    assert a == b


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "dliouville.cli", "groupoid", "pentagon"],
                         capture_output=True, text=True)
    assert res.returncode == 0


def test_identities_full_b08(capsys):
    code, out, _ = run(capsys, "identities", "--suite", "full", "-b", "0.8", "--points", "1")
    assert code == 0
    assert all(json.loads(ln)["pass"] for ln in out.splitlines()[1:])
