import re

import numpy as np
import pytest

from heraldmux import model
from heraldmux.errors import DomainError
from heraldmux.model import MultiplexConfig as Cfg
from heraldmux.sweep import (
    CSV_HEADER,
    FIG4_ETAS,
    FIG4_NBARS,
    SweepRow,
    SweepSpec,
    emit_plot,
    emit_table,
    read_csv,
    run_sweep,
    sweep_custom,
    sweep_fig3a,
    sweep_fig3b,
    sweep_fig4,
    sweep_fig5,
)


def pick(rows, **match):
    return [r for r in rows if all(getattr(r, k) == v for k, v in match.items())]


def test_fig3a_rows():
    rows = sweep_fig3a()
    fan = pick(rows, quantity="certification")
    assert len(fan) == sum(range(1, 9))
    assert pick(fan, nd=8, delay=8)[0].analytic == pytest.approx(0.8889, abs=5e-5)
    assert pick(rows, nd=1, quantity="single_photon_prob")[0].analytic == 0.25
    limits = [r.analytic for r in pick(rows, quantity="poisson_limit")]
    assert len(limits) == 8 and max(limits) == min(limits) == pytest.approx(0.3679, abs=5e-5)
    assert pick(rows, nd=8, quantity="single_photon_prob_given_trigger")[0].analytic == pytest.approx(0.5677, abs=1e-4)


def test_rows_equal_model_bit_for_bit():
    for r in sweep_custom((0.5, 2.0), (0.75, 1.0), (1, 3, 8)):
        cfg = Cfg(r.nbar, r.eta, r.nd)
        expected = {
            "certification": lambda: model.certification(cfg, r.delay),
            "delay_fire_prob": lambda: model.delay_fire_prob(cfg, r.delay),
            "no_trigger_prob": lambda: model.no_trigger_prob(cfg),
            "single_photon_prob": lambda: model.single_photon_prob(cfg),
            "single_photon_prob_given_trigger": lambda: model.single_photon_prob_given_trigger(cfg),
            "poisson_limit": lambda: model.poisson_limit(r.nbar),
        }[r.quantity]()
        assert r.analytic == expected


def test_fig3b_rows():
    rows = sweep_fig3b()
    assert pick(rows, nd=8, delay=0)[0].analytic == pytest.approx(0.38974, abs=5e-6)
    assert pick(rows, nd=8, delay=1)[0].analytic == pytest.approx(0.1111, abs=5e-5)
    ratio = pick(rows, nd=8, delay=1)[0].analytic / pick(rows, nd=8, delay=8)[0].analytic
    assert ratio == pytest.approx(2.28, abs=5e-3)
    for nd in range(1, 9):
        assert sum(r.analytic for r in pick(rows, nd=nd)) == pytest.approx(1.0, abs=1e-12)


def test_fig4_grid():
    rows = sweep_fig4()
    cells = {(r.eta, r.nbar) for r in rows}
    assert cells == {(e, n) for e in FIG4_ETAS for n in FIG4_NBARS}
    assert pick(rows, eta=1.0, nbar=1.0) == sweep_fig3a()
    assert pick(rows, eta=1.0, nbar=0.25, nd=8, delay=8)[0].analytic == pytest.approx(8 / 8.25, abs=1e-12)
    for eta in FIG4_ETAS:
        tops = [max(r.analytic for r in pick(rows, eta=eta, nbar=n, quantity="certification"))
                for n in sorted(FIG4_NBARS)]
        assert np.all(np.diff(tops) < 0)


def test_fig5_peaks():
    rows = sweep_fig5()
    for nd in range(1, 9):
        curve = pick(rows, nd=nd)
        assert len(curve) == 80
        best = max(curve, key=lambda r: r.analytic)
        assert best.nbar == 1.0
    assert max(r.analytic for r in pick(rows, nd=1)) == 0.25
    assert max(r.analytic for r in pick(rows, nd=8)) == pytest.approx(0.3464, abs=5e-5)


def test_rows_sorted():
    rows = sweep_custom((2.0, 0.5), (1.0, 0.5), (4, 2))
    keys = [(r.nbar, r.eta, r.nd, r.delay) for r in rows]
    assert keys == sorted(keys)


def test_spec_validation():
    with pytest.raises(DomainError):
        SweepSpec("custom", nbars=())
    with pytest.raises(DomainError):
        SweepSpec("custom", etas=(1.5,))
    with pytest.raises(ValueError):
        SweepSpec("fig9")


def test_csv_format_and_roundtrip():
    rows = sweep_fig3a(0.75, 0.5)
    rows[0] = SweepRow(rows[0].nbar, rows[0].eta, rows[0].nd, rows[0].delay, rows[0].quantity,
                       rows[0].analytic, 0.123456789012345678, 1e-4 / 3)
    data = emit_table(rows, "csv")
    text = data.decode("utf-8")
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert "\r" not in text and text.endswith("\n")
    assert read_csv(data) == rows
    assert text.splitlines()[2].endswith(",,")  # missing MC fields stay empty


def test_empty_rows_header_only():
    assert emit_table([], "csv") == (",".join(CSV_HEADER) + "\n").encode()
    assert read_csv(emit_table([], "csv")) == []


def test_pretty_table_six_digits():
    text = emit_table(sweep_fig3a(), "pretty").decode()
    assert "0.888889" in text
    assert "0.88888888" not in text
    with pytest.raises(DomainError):
        emit_table([], "xml")


def polylines(svg: bytes) -> int:
    return len(re.findall(rb"<polyline", svg))


def test_plots():
    assert polylines(emit_plot(sweep_fig5(), "fig5")) == 8
    assert polylines(emit_plot(sweep_fig3a(), "fig3a")) == 8 + 3
    assert polylines(emit_plot(sweep_fig3b(), "fig3b")) == 8
    assert polylines(emit_plot(sweep_fig4(), "fig4")) == 12 * (8 + 3)
    svg = emit_plot([], "fig5")
    assert svg.startswith(b"<svg") and polylines(svg) == 0


def test_monte_carlo_columns():
    spec = SweepSpec("fig3a", nds=(1, 4), include_monte_carlo=True, trials=300_000, seed=7)
    rows = run_sweep(spec)
    assert rows == run_sweep(spec)
    for r in rows:
        assert r.mc_estimate is not None
        assert abs(r.mc_estimate - r.analytic) <= 3 * r.mc_stderr, r
