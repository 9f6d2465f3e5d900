"""Parameter sweeps behind the certification, occurrence and rate figures.

Rows carry values straight from :mod:`heraldmux.model`; nothing is recomputed
here. Optional Monte Carlo columns come from :mod:`heraldmux.simulator`.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import model
from .errors import DomainError
from .model import MultiplexConfig
from .simulator import DEFAULT_TRIALS, SimulationSpec, run_delay_multiplexed
from .statistics import Kind, check_efficiency, check_mean

__all__ = [
    "Target",
    "SweepSpec",
    "SweepRow",
    "CSV_HEADER",
    "FIG4_ETAS",
    "FIG4_NBARS",
    "FIG5_NBARS",
    "sweep_fig3a",
    "sweep_fig3b",
    "sweep_fig4",
    "sweep_fig5",
    "sweep_custom",
    "run_sweep",
    "sort_rows",
    "emit_table",
    "read_csv",
    "emit_plot",
]

CSV_HEADER = ("nbar", "eta", "nd", "delay", "quantity", "analytic", "mc_estimate", "mc_stderr")
OVERLAYS = ("single_photon_prob", "poisson_limit", "single_photon_prob_given_trigger")
FIG4_ETAS = (0.5, 0.75, 1.0)
FIG4_NBARS = (2.0, 1.0, 0.5, 0.25)
FIG5_NBARS = tuple(round(0.05 * k, 2) for k in range(1, 81))


class Target(str, enum.Enum):
    FIG3A = "fig3a"
    FIG3B = "fig3b"
    FIG4 = "fig4"
    FIG5 = "fig5"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SweepRow:
    nbar: float
    eta: float
    nd: int
    delay: int
    quantity: str
    analytic: float
    mc_estimate: float | None = None
    mc_stderr: float | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in CSV_HEADER}


@dataclass(frozen=True)
class SweepSpec:
    target: Target = Target.FIG3A
    nbars: tuple[float, ...] = (1.0,)
    etas: tuple[float, ...] = (1.0,)
    nds: tuple[int, ...] = tuple(range(1, 9))
    kind: Kind = Kind.BOSE_EINSTEIN
    include_monte_carlo: bool = False
    trials: int = DEFAULT_TRIALS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "target", Target(self.target))
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        for name in ("nbars", "etas", "nds"):
            values = tuple(getattr(self, name))
            if not values:
                raise DomainError(f"sweep grid {name} is empty")
            object.__setattr__(self, name, values)
        for x in self.nbars:
            check_mean(x, "nbar")
        for x in self.etas:
            check_efficiency(x)
        for x in self.nds:
            if int(x) != x or x < 1:
                raise DomainError(f"nd values must be positive integers, got {x!r}")


def sort_rows(rows: Iterable[SweepRow]) -> list[SweepRow]:
    """Order by (nbar, eta, nd, delay); ties keep emission order."""
    return sorted(rows, key=lambda r: (r.nbar, r.eta, r.nd, r.delay))


def _fan(nbar: float, eta: float, nds: Iterable[int], kind: Kind) -> list[SweepRow]:
    rows = []
    for nd in nds:
        cfg = MultiplexConfig(nbar, eta, nd, kind)
        rows += [SweepRow(nbar, eta, nd, i, "certification", model.certification(cfg, i))
                 for i in range(1, nd + 1)]
    return rows


def _overlays(nbar: float, eta: float, nds: Iterable[int], kind: Kind) -> list[SweepRow]:
    rows = []
    for nd in nds:
        cfg = MultiplexConfig(nbar, eta, nd, kind)
        rows += [
            SweepRow(nbar, eta, nd, 0, "single_photon_prob", model.single_photon_prob(cfg)),
            SweepRow(nbar, eta, nd, 0, "poisson_limit", model.poisson_limit(nbar)),
            SweepRow(nbar, eta, nd, 0, "single_photon_prob_given_trigger",
                     model.single_photon_prob_given_trigger(cfg)),
        ]
    return rows


def sweep_fig3a(eta: float = 1.0, nbar: float = 1.0, nds: Sequence[int] = range(1, 9),
                kind: Kind | str = Kind.BOSE_EINSTEIN) -> list[SweepRow]:
    """Certification fan for each N_D, plus the three aggregate curves against N_D."""
    kind = Kind.parse(kind)
    return sort_rows(_fan(nbar, eta, nds, kind) + _overlays(nbar, eta, nds, kind))


def sweep_fig3b(eta: float = 1.0, nbar: float = 1.0, nds: Sequence[int] = range(1, 9),
                kind: Kind | str = Kind.BOSE_EINSTEIN) -> list[SweepRow]:
    """Occurrence probability of each trigger outcome; delay 0 is 'no trigger'."""
    kind = Kind.parse(kind)
    rows = []
    for nd in nds:
        cfg = MultiplexConfig(nbar, eta, nd, kind)
        rows.append(SweepRow(nbar, eta, nd, 0, "no_trigger_prob", model.no_trigger_prob(cfg)))
        rows += [SweepRow(nbar, eta, nd, i, "delay_fire_prob", model.delay_fire_prob(cfg, i))
                 for i in range(1, nd + 1)]
    return sort_rows(rows)


def sweep_fig4(nds: Sequence[int] = range(1, 9), kind: Kind | str = Kind.BOSE_EINSTEIN) -> list[SweepRow]:
    """The fig3a data on the 3 x 4 grid eta in {0.5, 0.75, 1} by nbar in {2, 1, 0.5, 0.25}."""
    rows = []
    for nbar in FIG4_NBARS:
        for eta in FIG4_ETAS:
            rows += sweep_fig3a(eta, nbar, nds, kind)
    return sort_rows(rows)


def sweep_fig5(nds: Sequence[int] = range(1, 9), nbars: Sequence[float] = FIG5_NBARS,
               eta: float = 1.0, kind: Kind | str = Kind.BOSE_EINSTEIN) -> list[SweepRow]:
    """Unconditional single-photon probability against nbar, one curve per N_D."""
    kind = Kind.parse(kind)
    rows = [
        SweepRow(nbar, eta, nd, 0, "single_photon_prob",
                 model.single_photon_prob(MultiplexConfig(nbar, eta, nd, kind)))
        for nd in nds
        for nbar in nbars
    ]
    return sort_rows(rows)


def sweep_custom(nbars: Sequence[float], etas: Sequence[float], nds: Sequence[int],
                 kind: Kind | str = Kind.BOSE_EINSTEIN) -> list[SweepRow]:
    """Every model quantity on the full nbar x eta x N_D grid."""
    kind = Kind.parse(kind)
    rows = []
    for nbar in nbars:
        for eta in etas:
            rows += _fan(nbar, eta, nds, kind) + _overlays(nbar, eta, nds, kind)
            rows += sweep_fig3b(eta, nbar, nds, kind)
    return sort_rows(rows)


# row quantities that the delay simulator estimates under the same name
_MC_QUANTITIES = frozenset({
    "certification", "delay_fire_prob", "no_trigger_prob",
    "single_photon_prob", "single_photon_prob_given_trigger",
})


def attach_monte_carlo(rows: Sequence[SweepRow], kind: Kind | str, trials: int, seed: int,
                       workers: int | None = None) -> list[SweepRow]:
    """Fill MC columns by simulating each distinct (nbar, eta, nd) once.

    ``poisson_limit`` rows are estimated from a Poisson-kind run of the same cell.
    Estimates with a zero denominator stay empty.
    """
    kind = Kind.parse(kind)
    cache: dict = {}

    def result(nbar, eta, nd, k):
        key = (nbar, eta, nd, k)
        if key not in cache:
            spec = SimulationSpec(MultiplexConfig(nbar, eta, nd, k), trials, seed)
            cache[key] = run_delay_multiplexed(spec, workers)
        return cache[key]

    out = []
    for row in rows:
        if row.quantity == "poisson_limit":
            est = result(row.nbar, row.eta, row.nd, Kind.POISSON).get("single_photon_prob")
        elif row.quantity in _MC_QUANTITIES:
            est = result(row.nbar, row.eta, row.nd, kind).get(row.quantity, row.delay)
        else:
            out.append(row)
            continue
        if est.defined:
            row = replace(row, mc_estimate=est.estimate, mc_stderr=est.standard_error)
        out.append(row)
    return out


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[SweepRow]:
    if spec.target is Target.FIG3A:
        rows = sweep_fig3a(spec.etas[0], spec.nbars[0], spec.nds, spec.kind)
    elif spec.target is Target.FIG3B:
        rows = sweep_fig3b(spec.etas[0], spec.nbars[0], spec.nds, spec.kind)
    elif spec.target is Target.FIG4:
        rows = sweep_fig4(spec.nds, spec.kind)
    elif spec.target is Target.FIG5:
        rows = sweep_fig5(spec.nds, spec.nbars, spec.etas[0], spec.kind)
    else:
        rows = sweep_custom(spec.nbars, spec.etas, spec.nds, spec.kind)
    if spec.include_monte_carlo:
        rows = attach_monte_carlo(rows, spec.kind, spec.trials, spec.seed, workers)
    return rows


def _fmt17(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def _fmt6(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".6g")


def emit_table(rows: Iterable[SweepRow], format: str = "csv") -> bytes:
    """Serialize rows as CSV (17 significant digits) or an aligned text table (6 digits)."""
    rows = list(rows)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow([_fmt17(r.nbar), _fmt17(r.eta), str(r.nd), str(r.delay), r.quantity,
                             _fmt17(r.analytic), _fmt17(r.mc_estimate), _fmt17(r.mc_stderr)])
        return buf.getvalue().encode("utf-8")
    if format == "pretty":
        cells = [list(CSV_HEADER)] + [
            [_fmt6(r.nbar), _fmt6(r.eta), str(r.nd), str(r.delay), r.quantity,
             _fmt6(r.analytic), _fmt6(r.mc_estimate), _fmt6(r.mc_stderr)]
            for r in rows
        ]
        if all(r.mc_estimate is None for r in rows):
            cells = [c[:6] for c in cells]
        return render_text_table(cells).encode("utf-8")
    raise DomainError(f"unknown table format {format!r}")


def render_text_table(cells: list[list[str]]) -> str:
    widths = [max(len(row[j]) for row in cells) for j in range(len(cells[0]))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def read_csv(data: bytes | str) -> list[SweepRow]:
    """Parse the output of ``emit_table(rows, "csv")`` back into rows."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    reader = csv.DictReader(io.StringIO(data))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise DomainError(f"unexpected CSV header {reader.fieldnames!r}")

    def opt(s):
        return float(s) if s != "" else None

    return [
        SweepRow(float(r["nbar"]), float(r["eta"]), int(r["nd"]), int(r["delay"]), r["quantity"],
                 float(r["analytic"]), opt(r["mc_estimate"]), opt(r["mc_stderr"]))
        for r in reader
    ]


# (group label, x) for a row, or None to leave the row out of the plot
Grouping = Callable[[SweepRow], "tuple[str, float] | None"]


def group_by_nd(x_field: str = "delay") -> Grouping:
    def key(row: SweepRow):
        return f"N_D={row.nd}", float(getattr(row, x_field))
    return key


def fan_with_overlays(row: SweepRow):
    """Certification fan against delay, the aggregate curves against N_D."""
    tag = "" if (row.nbar, row.eta) == (1.0, 1.0) else f" nbar={row.nbar:g} eta={row.eta:g}"
    if row.quantity in OVERLAYS:
        return row.quantity + tag, float(row.nd)
    if row.quantity == "certification":
        return f"N_D={row.nd}" + tag, float(row.delay)
    return None


def default_grouping(target: Target | str) -> Grouping:
    target = Target(target)
    if target in (Target.FIG3A, Target.FIG4):
        return fan_with_overlays
    if target is Target.FIG5:
        return group_by_nd("nbar")
    if target is Target.FIG3B:
        return group_by_nd("delay")
    return lambda r: (f"{r.quantity} N_D={r.nd} nbar={r.nbar:g} eta={r.eta:g}", float(r.delay))


def emit_plot(rows: Iterable[SweepRow], grouping: Grouping | Target | str = group_by_nd(),
              title: str = "", xlabel: str = "", ylabel: str = "probability",
              width: int = 640, height: int = 420) -> bytes:
    """Minimal SVG line chart: one polyline per group, linear axes."""
    if not callable(grouping):
        grouping = default_grouping(grouping)
    groups: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        key = grouping(row)
        if key is not None:
            groups.setdefault(key[0], []).append((key[1], row.analytic))
    left, right, top, bottom = 60, 170, 30, 50
    pw, ph = width - left - right, height - top - bottom
    xs = [x for pts in groups.values() for x, _ in pts] or [0.0, 1.0]
    ys = [y for pts in groups.values() for _, y in pts] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(0.0, min(ys)), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for k in range(6):
        xv, yv = x0 + (x1 - x0) * k / 5, y0 + (y1 - y0) * k / 5
        out.append(f'<text x="{sx(xv):.2f}" y="{top + ph + 15}" text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{left - 5}" y="{sy(yv) + 4:.2f}" text-anchor="end">{yv:.3g}</text>')
    if title:
        out.append(f'<text x="{left + pw / 2}" y="{top - 10}" text-anchor="middle">{_esc(title)}</text>')
    if xlabel:
        out.append(f'<text x="{left + pw / 2}" y="{height - 12}" text-anchor="middle">{_esc(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="15" y="{top + ph / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 15 {top + ph / 2})">{_esc(ylabel)}</text>')
    for n, (label, pts) in enumerate(groups.items()):
        colour = _PALETTE[n % len(_PALETTE)]
        pts = sorted(pts)
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{coords}">'
                   f'<title>{_esc(label)}</title></polyline>')
        ly = top + 12 + 14 * n
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" '
                   f'stroke="{colour}" stroke-width="1.5"/>')
        out.append(f'<text x="{left + pw + 34}" y="{ly}">{_esc(label)}</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
