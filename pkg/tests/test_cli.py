import subprocess
import sys

import pytest

from shocklab.cli import build_parser, main
from shocklab.study import ErrorTable


def test_study_csv(capsys):
    assert main(["study", "--preset", "tables", "--cells", "32,64,128"]) == 0
    table = ErrorTable.from_csv(capsys.readouterr().out)
    assert [r.n for r in table.rows] == [32, 64, 128]
    assert table.rows[2].w1 == pytest.approx(2.063e-4, rel=0.01)


def test_study_markdown_to_file(tmp_path):
    out = tmp_path / "table.md"
    assert main(["study", "--flux", "eo", "--cells", "32,64", "--format", "markdown", "--out", str(out)]) == 0
    assert out.read_text().startswith("**eo first-order")


def test_study_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("flux_name = burgers\nscheme = lxf\ncells = 32\n")
    assert main(["study", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.count("\n") == 2


def test_study_errors_return_nonzero(tmp_path, capsys):
    assert main(["study", "--cells", "64,32"]) == 1
    assert "strictly increasing" in capsys.readouterr().err
    assert main(["study", "--cells", "32", "--out", str(tmp_path / "no" / "x.csv")]) == 1


def test_profile(tmp_path):
    out = tmp_path / "p.txt"
    assert main(["profile", "--flux", "lxf", "--left", "1", "--right", "-1", "--lam", "0.25", "--out", str(out)]) == 0
    text = out.read_text().splitlines()
    assert text[0].startswith("# lxf shock 1 -> -1") and "alpha=" in text[0]
    assert main(["profile", "--flux", "godunov", "--out", str(out)]) == 0
    assert "alpha=inf" in out.read_text().splitlines()[0]
    assert main(["profile", "--left", "-1", "--right", "1"]) == 1


def test_verify(tmp_path, capsys):
    steps = tmp_path / "steps.csv"
    assert main(["verify", "--flux", "eo", "--trials", "2", "--cells", "80", "--steps", "30", "--steps-csv", str(steps)]) == 0
    out = capsys.readouterr().out
    assert "W1 bound holds" in out and "conditions hold on all" in out
    assert steps.read_text().startswith("step,time,lhs,rhs,slack")
    assert main(["verify", "--flux", "lxf", "--trials", "1", "--cells", "80", "--steps", "20", "--sources"]) == 0
    assert "inhomogeneous" in capsys.readouterr().out


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_console_script():
    out = subprocess.run(
        [sys.executable, "-m", "shocklab.cli", "study", "--cells", "32,64"], capture_output=True, text=True, check=True
    )
    assert out.stdout.splitlines()[0] == "n,l1,l1_ooc,w1,w1_ooc"
