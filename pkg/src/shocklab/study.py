"""Grid-refinement studies: run a scheme on a sequence of grids and tabulate
L1 and W1 errors against the exact front-tracked solution."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import DegenerateError, EmptyTable, NotDecreasing, WindowTooSmall
from .fluxes import PHYSICAL_FLUXES, SCHEMES, NumericalFlux
from .fronts import StepFunction, evolve, track
from .grid import Grid, project
from .metrics import l1_distance, w1
from .solver import SchemeConfig, run

CSV_HEADER = ["n", "l1", "l1_ooc", "w1", "w1_ooc"]
REFERENCES = ("exact", "projected")
NORMALIZATIONS = ("none", "mass")
FORMATS = ("csv", "markdown")


@dataclass(frozen=True)
class RunConfig:
    """Parameters of a refinement study.

    ``reference="projected"`` compares against the cell averages of the exact
    solution; ``normalize="mass"`` divides W1 by the exact solution's integral
    over ``domain``.  The ``tables`` preset combines both with SSP-RK3.
    """

    scheme: str = "godunov"
    order: int = 1
    flux: str = "burgers"
    cfl: float = 0.3
    t_final: float = 0.15
    cells: tuple = (32, 64, 128, 256, 512, 1024, 2048, 4096)
    domain: tuple = (0.0, 1.0)
    breakpoints: tuple = (0.25, 0.5)
    values: tuple = (2.0, 1.0, 0.0)
    integrator: str = "euler"
    reference: str = "exact"
    normalize: str = "none"
    margin: int = 15
    auto_widen: bool = True
    format: str = "csv"
    out: str | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.flux not in PHYSICAL_FLUXES:
            raise ValueError(f"unknown physical flux {self.flux!r}")
        if self.reference not in REFERENCES:
            raise ValueError(f"reference must be one of {REFERENCES}")
        if self.normalize not in NORMALIZATIONS:
            raise ValueError(f"normalize must be one of {NORMALIZATIONS}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        cells = tuple(int(n) for n in self.cells)
        if not cells:
            raise ValueError("at least one cell count is required")
        if any(b <= a for a, b in zip(cells[:-1], cells[1:])):
            raise ValueError("cell counts must be strictly increasing")
        object.__setattr__(self, "cells", cells)
        if self.t_final < 0:
            raise ValueError("t_final must be non-negative")
        if self.domain[1] <= self.domain[0]:
            raise ValueError("domain must have positive length")
        u0 = self.initial_data()
        if not u0.is_decreasing():
            raise NotDecreasing("initial data must be strictly decreasing")

    def initial_data(self) -> StepFunction:
        return StepFunction(self.breakpoints, self.values)

    def physical_flux(self):
        return PHYSICAL_FLUXES[self.flux]()

    def scheme_config(self) -> SchemeConfig:
        nf = NumericalFlux(self.scheme, self.physical_flux())
        return SchemeConfig(nf, self.order, self.cfl, integrator=self.integrator)


PRESETS = {
    "tables": {"integrator": "ssprk3", "reference": "projected", "normalize": "mass"},
}


def apply_preset(cfg: RunConfig, name: str) -> RunConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return replace(cfg, **PRESETS[name])


def _parse_tuple(text: str, cast=float) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(cast(x) for x in text.replace(";", ",").split(","))


_KEY_ALIASES = {"t": "t_final", "flux_name": "flux", "n": "cells"}


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[_KEY_ALIASES.get(key, key)] = value
    return out


def config_from_mapping(items: dict, base: RunConfig | None = None) -> RunConfig:
    """Build a config from string values (config file or CLI overrides)."""
    cfg = base or RunConfig()
    items = dict(items)
    preset = items.pop("preset", None)
    if preset:
        cfg = apply_preset(cfg, preset)
    known = {f.name: f for f in fields(RunConfig)}
    kwargs = {}
    for key, value in items.items():
        key = _KEY_ALIASES.get(key, key)
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        if value is None:
            continue
        if key in ("cells",):
            kwargs[key] = _parse_tuple(value, int) if isinstance(value, str) else tuple(value)
        elif key in ("domain", "breakpoints", "values"):
            kwargs[key] = _parse_tuple(value) if isinstance(value, str) else tuple(value)
        elif key in ("order", "margin"):
            kwargs[key] = int(value)
        elif key in ("cfl", "t_final"):
            kwargs[key] = float(value)
        elif key == "auto_widen":
            kwargs[key] = str(value).lower() in ("1", "true", "yes", "on")
        else:
            kwargs[key] = value
    return replace(cfg, **kwargs)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return config_from_mapping(parse_config_text(fh.read()))


@dataclass
class ErrorRow:
    n: int
    l1: float
    l1_ooc: float | None
    w1: float
    w1_ooc: float | None


@dataclass
class ErrorTable:
    rows: list = field(default_factory=list)
    title: str = ""

    def __len__(self):
        return len(self.rows)

    @classmethod
    def from_errors(cls, ns, l1s, w1s, title: str = "") -> "ErrorTable":
        rows = []
        for k, (n, a, b) in enumerate(zip(ns, l1s, w1s)):
            if k == 0:
                rows.append(ErrorRow(int(n), a, None, b, None))
            else:
                r = n / ns[k - 1]
                rows.append(ErrorRow(int(n), a, observed_order(l1s[k - 1], a, r), b, observed_order(w1s[k - 1], b, r)))
        return cls(rows, title)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]

    def to_csv(self) -> str:
        if not self.rows:
            raise EmptyTable("nothing to emit")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.n, _fmt_err(r.l1), _fmt_ooc(r.l1_ooc), _fmt_err(r.w1), _fmt_ooc(r.w1_ooc)])
        return buf.getvalue()

    def to_markdown(self) -> str:
        if not self.rows:
            raise EmptyTable("nothing to emit")
        lines = []
        if self.title:
            lines += [f"**{self.title}**", ""]
        lines.append("| n | L1 error | L1 OOC | W1 error | W1 OOC |")
        lines.append("|---:|---:|---:|---:|---:|")
        for r in self.rows:
            lines.append(
                f"| {r.n} | {_fmt_err(r.l1)} | {_fmt_ooc(r.l1_ooc)} | {_fmt_err(r.w1)} | {_fmt_ooc(r.w1_ooc)} |"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "ErrorTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header {header}")
        rows = []
        for rec in reader:
            if not rec:
                continue
            n, l1, l1o, w, wo = rec
            rows.append(ErrorRow(int(n), float(l1), _opt(l1o), float(w), _opt(wo)))
        return cls(rows)


def _fmt_err(x: float) -> str:
    return f"{x:.2e}"


def _fmt_ooc(x: float | None) -> str:
    return "" if x is None else f"{x:.3f}"


def _opt(s: str) -> float | None:
    return float(s) if s.strip() else None


def observed_order(err_coarse: float, err_fine: float, ratio: float) -> float:
    """``log(err_coarse / err_fine) / log(ratio)``."""
    if not (err_coarse > 0 and err_fine > 0):
        raise DegenerateError(f"errors must be positive (got {err_coarse}, {err_fine})")
    if not ratio > 1:
        raise ValueError("refinement ratio must exceed 1")
    return math.log(err_coarse / err_fine) / math.log(ratio)


def emit(table: ErrorTable, fmt: str = "csv", path=None) -> str:
    """Render ``table`` and write it to ``path`` when given; returns the text."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    text = table.to_csv() if fmt == "csv" else table.to_markdown()
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write table to {path}: {exc}") from exc
    return text


def shock_extent(cfg: RunConfig) -> tuple[float, float]:
    """Leftmost and rightmost shock positions over ``[0, t_final]``."""
    u0 = cfg.initial_data()
    states = track(u0, cfg.physical_flux(), cfg.t_final)
    lo = min(float(s.positions.min()) for s in states if s.positions.size)
    hi = max(float(s.positions.max()) for s in states if s.positions.size)
    return lo, hi


def study_grid(cfg: RunConfig, n: int) -> Grid:
    """Grid with ``n`` cells on the domain, widened to keep ``margin`` cells
    between the window edges and every shock."""
    base = Grid.uniform(cfg.domain[0], cfg.domain[1], n)
    lo, hi = shock_extent(cfg)
    need_left = cfg.margin * base.dx - (lo - base.x_left)
    need_right = cfg.margin * base.dx - (base.x_right - hi)
    extra_left = max(0, math.ceil(need_left / base.dx - 1e-9))
    extra_right = max(0, math.ceil(need_right / base.dx - 1e-9))
    if (extra_left or extra_right) and not cfg.auto_widen:
        raise WindowTooSmall(
            f"n={n}: shocks span [{lo:.4g}, {hi:.4g}] but the window needs "
            f"{cfg.margin} cells of margin"
        )
    return base.widened(extra_left, extra_right)


EDGE_RTOL = 1e-13
MAX_WIDENINGS = 6


def _edges_settled(u, scale: float) -> bool:
    # mass crosses the window boundary unless the edge cells hold the far states
    return max(abs(u.values[0] - u.far_left), abs(u.values[-1] - u.far_right)) <= EDGE_RTOL * scale


def _diffusive_margin(cfg: RunConfig, n: int) -> int:
    """Cells a Lax-Friedrichs run needs beyond the shocks.

    Its viscosity spreads data like a random walk with variance at most 1/2
    cell^2 per step, so after ``N`` steps the tails fall below ``EDGE_RTOL``
    within ``sqrt(2 N ln(1/EDGE_RTOL))`` cells.
    """
    lo, hi = min(cfg.values), max(cfg.values)
    speed = cfg.physical_flux().max_speed(lo, hi)
    if speed == 0:
        return cfg.margin
    dx = (cfg.domain[1] - cfg.domain[0]) / n
    steps = cfg.t_final * speed / (cfg.cfl * dx)
    return math.ceil(math.sqrt(2.0 * steps * math.log(1.0 / EDGE_RTOL)))


def run_single(cfg: RunConfig, n: int):
    """Numerical solution, exact solution and the grid for one cell count.

    With ``auto_widen`` the margin is doubled until the edge cells still hold
    the far states at ``t_final`` (diffusive schemes smear far beyond the
    shocks), so no mass leaks through the window boundary.
    """
    u0 = cfg.initial_data()
    flux = cfg.physical_flux()
    scale = max(u0.tv(), 1.0)
    margin = cfg.margin
    if cfg.scheme == "lxf":
        margin = max(margin, _diffusive_margin(cfg, n))
    for _ in range(MAX_WIDENINGS + 1):
        grid = study_grid(replace(cfg, margin=margin), n)
        u, _ = run(project(u0, grid), cfg.scheme_config(), cfg.t_final)
        if not cfg.auto_widen or _edges_settled(u, scale):
            break
        margin *= 2
    exact = evolve(u0, flux, cfg.t_final)
    return u, exact, grid


def errors_for(cfg: RunConfig, n: int) -> tuple[float, float]:
    u, exact, grid = run_single(cfg, n)
    ref = project(exact, grid) if cfg.reference == "projected" else exact
    l1 = l1_distance(u, ref)
    w = w1(u, ref)
    if cfg.normalize == "mass":
        w /= exact.integral(*cfg.domain)
    return l1, w


def run_study(cfg: RunConfig) -> ErrorTable:
    # validate every window before spending time on any run
    for n in cfg.cells:
        study_grid(cfg, n)
    l1s, w1s = [], []
    for n in cfg.cells:
        a, b = errors_for(cfg, n)
        l1s.append(a)
        w1s.append(b)
    order = {1: "first-order", 2: "ENO2", 3: "ENO3"}[cfg.order]
    title = f"{cfg.scheme} {order}, t = {cfg.t_final:g}"
    return ErrorTable.from_errors(list(cfg.cells), l1s, w1s, title)


def ratio_band(values) -> float:
    """max/min of a positive sequence."""
    v = np.asarray(values, dtype=float)
    return float(v.max() / v.min())
