import numpy as np
import pytest

from shocklab.errors import DegenerateError, EmptyTable, NotDecreasing, WindowTooSmall
from shocklab.study import (
    CSV_HEADER,
    ErrorTable,
    RunConfig,
    apply_preset,
    config_from_mapping,
    emit,
    load_config,
    observed_order,
    parse_config_text,
    ratio_band,
    run_study,
    study_grid,
)

GODUNOV_N = [32, 64, 128, 256, 512, 1024, 2048, 4096]
GODUNOV_L1 = [4.078e-2, 2.735e-2, 1.604e-2, 8.478e-3, 4.419e-3, 2.121e-3, 1.060e-3, 5.341e-4]
GODUNOV_W1 = [1.775e-3, 6.523e-4, 2.063e-4, 5.699e-5, 1.452e-5, 3.632e-6, 9.081e-7, 2.270e-7]


@pytest.mark.parametrize(
    "coarse,fine,ratio,expected",
    [(1.775e-3, 6.523e-4, 2, 1.445), (0.3, 0.3, 2, 0.0), (1.0, 0.25, 2, 2.0)],
)
def test_observed_order(coarse, fine, ratio, expected):
    # the table rounds errors to four digits, which moves the order by up to ~1.5e-3
    assert observed_order(coarse, fine, ratio) == pytest.approx(expected, abs=2e-3)


def test_observed_order_errors():
    with pytest.raises(DegenerateError):
        observed_order(0.0, 1.0, 2)
    with pytest.raises(ValueError):
        observed_order(1.0, 0.5, 1.0)


def test_table_csv_rows_and_roundtrip(tmp_path):
    table = ErrorTable.from_errors(GODUNOV_N, GODUNOV_L1, GODUNOV_W1)
    path = tmp_path / "t.csv"
    text = emit(table, "csv", path)
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER) and len(lines) == 9
    assert lines[1].endswith(",,1.78e-03,")
    back = ErrorTable.from_csv(path.read_text())
    np.testing.assert_allclose(back.column("w1"), GODUNOV_W1, rtol=5e-3)
    assert back.rows[0].w1_ooc is None
    assert back.rows[1].w1_ooc == pytest.approx(1.445, abs=2e-3)
    assert ErrorTable.from_csv(back.to_csv()).to_csv() == back.to_csv()


def test_markdown_and_empty_table(tmp_path):
    md = emit(ErrorTable.from_errors([8, 16], [1.0, 0.5], [1.0, 0.25], title="demo"), "markdown")
    assert "| 16 | 5.00e-01 | 1.000 | 2.50e-01 | 2.000 |" in md
    with pytest.raises(EmptyTable):
        emit(ErrorTable(), "csv")
    with pytest.raises(OSError, match="cannot write"):
        emit(ErrorTable.from_errors([8], [1.0], [1.0]), "csv", tmp_path / "missing" / "x.csv")


def test_single_cell_count_table():
    table = run_study(RunConfig(cells=(64,)))
    assert len(table) == 1 and table.rows[0].w1_ooc is None
    assert emit(table).splitlines()[1].startswith("64,")


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(scheme="roe")
    with pytest.raises(ValueError):
        RunConfig(cells=(64, 32))
    with pytest.raises(NotDecreasing):
        RunConfig(values=(0.0, 1.0, 2.0))
    with pytest.raises(ValueError):
        apply_preset(RunConfig(), "nope")


def test_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# refinement study\nscheme = eo\nt = 0.3  # after interaction\ncells = 32, 64\npreset = tables\n")
    cfg = load_config(path)
    assert cfg.scheme == "eo" and cfg.t_final == 0.3 and cfg.cells == (32, 64)
    assert (cfg.integrator, cfg.reference, cfg.normalize) == ("ssprk3", "projected", "mass")
    with pytest.raises(ValueError):
        parse_config_text("no equals sign")
    with pytest.raises(ValueError):
        config_from_mapping({"bogus": "1"})


def test_window_widening():
    cfg = RunConfig(t_final=0.6, cells=(32,))
    g = study_grid(cfg, 32)
    assert g.x_right > 1.0 and g.dx == pytest.approx(1 / 32)
    with pytest.raises(WindowTooSmall):
        run_study(RunConfig(t_final=0.6, cells=(32,), auto_widen=False))


def test_tables_preset_small_grids():
    table = run_study(apply_preset(RunConfig(cells=tuple(GODUNOV_N[:4])), "tables"))
    np.testing.assert_allclose(table.column("w1"), GODUNOV_W1[:4], rtol=0.01)
    np.testing.assert_allclose(table.column("l1"), GODUNOV_L1[:4], rtol=0.01)


def test_ratio_band():
    assert ratio_band([1.0, 2.0, 1.5]) == 2.0
