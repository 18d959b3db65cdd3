import json
import subprocess
import sys

import pytest

from resonances import cli
from resonances.potentials import gaussian_well
from resonances.problem import Problem

SOLVE = """
[potential]
builtin = gaussian

[problem]
bc = {bc}

[task]
lambda_guesses = {guesses}
"""


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_solve_csv(tmp_path, capsys):
    cfg = write(tmp_path, SOLVE.format(bc="dirichlet", guesses="-0.53, -1.24-3.48j"))
    assert cli.main(["solve", "--config", cfg]) == 0
    rows = cli.read_results(capsys.readouterr().out)
    assert [r["status"] for r in rows] == ["ok", "ok"]
    assert rows[0]["method"] == "one/D"
    assert rows[0]["re_lambda"] == pytest.approx(-0.5300, abs=5e-4)


def test_json_mirrors_csv(tmp_path):
    cfg = cli.load_config("solve", text=SOLVE.format(bc="neumann", guesses="-1.24-3.48j"))
    _, csv_text = cli.run(cfg, "csv")
    _, json_text = cli.run(cfg, "json")
    assert cli.read_results(csv_text) == cli.read_results(json_text)
    assert isinstance(json.loads(json_text), list)


def test_output_is_byte_stable(tmp_path):
    cfg = write(tmp_path, SOLVE.format(bc="dirichlet", guesses="-0.53"))
    outs = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for o in outs:
        assert cli.main(["solve", "--config", cfg, "--out", str(o)]) == 0
    assert outs[0].read_bytes() == outs[1].read_bytes()


def test_revalidate_round_trip(tmp_path):
    cfg = write(tmp_path, SOLVE.format(bc="dirichlet", guesses="-0.53, -1.24-3.48j"))
    out = tmp_path / "r.csv"
    assert cli.main(["solve", "--config", cfg, "--out", str(out)]) == 0
    checks = cli.revalidate(cli.read_results(str(out)), Problem(gaussian_well()))
    assert len(checks) == 2 and all(ok for _, _, ok in checks)


def test_config_errors(tmp_path, capsys):
    cfg = write(tmp_path, "[potential]\nexpression =\n\n[task]\nlambda_guesses = -1\n")
    assert cli.main(["solve", "--config", cfg]) == 3
    assert "potential expression is empty" in capsys.readouterr().err
    cfg = write(tmp_path, "[potential]\nbuiltin = gaussian\n")
    assert cli.main(["solve", "--config", cfg]) == 3
    cfg = write(tmp_path, "[potential]\nbuiltin = gaussian\n[problem]\ndomain = halfline\n")
    assert cli.main(["phi-scan", "--config", cfg]) == 3


def test_nonconvergence_exit(tmp_path, capsys):
    cfg = write(tmp_path, SOLVE.format(bc="dirichlet", guesses="100"))
    assert cli.main(["solve", "--config", cfg]) == 2


def test_console_entry_point(tmp_path):
    cfg = write(tmp_path, "[potential]\nbuiltin = gaussian\n[problem]\ndomain = wholeline\n[task]\nlambdas = -0.5\n")
    proc = subprocess.run([sys.executable, "-m", "resonances", "bounds", "--config", cfg],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.splitlines()[0] == ",".join(cli.BOUNDS_COLUMNS)
