import math

import pytest

from bb84_eavesdrop import (
    CLASS_BOTH,
    CLASS_DEGENERATE,
    CLASS_PB,
    CLASS_PM,
    CurvePoint,
    ParameterError,
    SweepAxis,
    SweepSpec,
    SystemParams,
    classify_feasibility,
    full_report,
    parse_csv,
    run_sweep,
    write_csv,
)

CANONICAL_FIXED = {"alpha": 0.01, "eta": 0.5, "r_c": 0.01}


def figure_spec(points=20, mode="both"):
    return SweepSpec(
        axes=(SweepAxis("mu", 0.01, 1.0, points, "log"),),
        fixed=CANONICAL_FIXED,
        mode=mode,
    )


# ---------------------------------------------------------------------------
# axes and specs


def test_axis_values_log_spacing():
    axis = SweepAxis("mu", 0.01, 1.0, 5, "log")
    values = axis.values()
    assert len(values) == 5
    assert values[0] == pytest.approx(0.01)
    assert values[-1] == pytest.approx(1.0)
    ratios = [b / a for a, b in zip(values, values[1:])]
    assert all(r == pytest.approx(ratios[0], rel=1e-9) for r in ratios)


def test_axis_values_single_point():
    assert SweepAxis("alpha", 0.3, 0.9, 1).values() == (0.3,)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(name="bogus", start=0.1, stop=1.0, points=3),
        dict(name="mu", start=1.0, stop=0.1, points=3),
        dict(name="mu", start=0.1, stop=1.0, points=0),
        dict(name="mu", start=0.1, stop=1.0, points=3, spacing="cubic"),
        dict(name="mu", start=0.0, stop=1.0, points=3, spacing="log"),
    ],
)
def test_axis_rejects_bad_definitions(kwargs):
    with pytest.raises(ParameterError):
        SweepAxis(**kwargs)


def test_spec_requires_complete_disjoint_coverage():
    axis = SweepAxis("mu", 0.1, 1.0, 3)
    with pytest.raises(ParameterError):
        SweepSpec(axes=(axis,), fixed={"alpha": 0.01, "eta": 0.5})  # r_c missing
    with pytest.raises(ParameterError):
        SweepSpec(axes=(axis,), fixed={"mu": 0.2, "alpha": 0.01, "eta": 0.5, "r_c": 0.01})
    with pytest.raises(ParameterError):
        SweepSpec(axes=(axis, SweepAxis("mu", 0.1, 1.0, 2)), fixed={"alpha": 0.01, "eta": 0.5, "r_c": 0.01})
    with pytest.raises(ParameterError):
        SweepSpec(axes=(axis,), fixed=CANONICAL_FIXED, mode="sideways")


# ---------------------------------------------------------------------------
# run_sweep


def test_sweep_emits_one_row_per_point_per_mode():
    points = run_sweep(figure_spec(points=20))
    assert len(points) == 40
    assert [pt.mode for pt in points[:2]] == ["matched", "error-only"]


def test_sweep_threads_do_not_change_rows():
    assert run_sweep(figure_spec(points=10), threads=4) == run_sweep(figure_spec(points=10))


def test_matched_yield_never_exceeds_error_only_where_feasible():
    points = run_sweep(figure_spec(points=50))
    matched = {pt.values: pt for pt in points if pt.mode == "matched"}
    error_only = {pt.values: pt for pt in points if pt.mode == "error-only"}
    compared = 0
    for key, m_pt in matched.items():
        e_pt = error_only[key]
        if m_pt.feasible and e_pt.feasible:
            compared += 1
            assert m_pt.eve_info <= e_pt.eve_info
    assert compared > 0


def test_noise_free_sweep_never_measures():
    spec = SweepSpec(
        axes=(SweepAxis("mu", 0.05, 0.5, 6, "log"),),
        fixed={"alpha": 0.01, "eta": 0.5, "r_c": 0.0},
        mode="both",
    )
    assert all(pt.p_measure == 0.0 for pt in run_sweep(spec))


def test_single_point_sweep_equals_direct_report():
    spec = SweepSpec(
        axes=(SweepAxis("mu", 0.1, 0.1, 1),),
        fixed=CANONICAL_FIXED,
        mode="matched",
    )
    (point,) = run_sweep(spec)
    params = SystemParams(mu=0.1, m=spec.m, **CANONICAL_FIXED)
    report = full_report(params, spec.load_table(), match_count_rate=True)
    assert point.eve_info == report.eve_info
    assert point.p_block == report.plan.p_block
    assert point.p_measure == report.plan.p_measure
    assert point.sifted == report.sifted
    assert point.errors == report.errors
    assert point.feasible_block == report.plan.feasible_block


def test_degenerate_grid_points_become_flagged_rows():
    spec = SweepSpec(
        axes=(SweepAxis("mu", 700.0, 800.0, 3, "linear"),),
        fixed=CANONICAL_FIXED,
        mode="matched",
    )
    points = run_sweep(spec)
    flags = [pt.degenerate for pt in points]
    assert flags == [False, True, True]
    assert all(math.isnan(pt.eve_info) for pt in points if pt.degenerate)


# ---------------------------------------------------------------------------
# feasibility classes


def _point(feasible_block, feasible_measure, degenerate=False):
    return CurvePoint(
        values=(0.1,),
        mode="matched",
        eve_info=1.0,
        p_block=0.5,
        p_measure=0.5,
        feasible_block=feasible_block,
        feasible_measure=feasible_measure,
        sifted=1.0,
        errors=0.1,
        degenerate=degenerate,
    )


def test_classification_covers_every_case():
    assert classify_feasibility(_point(True, True)) == CLASS_BOTH
    assert classify_feasibility(_point(False, True)) == CLASS_PB
    assert classify_feasibility(_point(True, False)) == CLASS_PM
    assert classify_feasibility(_point(False, False)) == CLASS_PB  # blocking wins
    assert classify_feasibility(_point(True, True, degenerate=True)) == CLASS_DEGENERATE


# ---------------------------------------------------------------------------
# CSV round trip


def test_csv_header_contract():
    spec = figure_spec(points=3)
    text = write_csv(spec, run_sweep(spec))
    header = text.splitlines()[0]
    assert header == "mu,mode,s_partial,p_b,p_m,feasible_pb,feasible_pm,n,e_T,degenerate"


def test_csv_round_trip_is_exact():
    spec = figure_spec(points=12)
    points = run_sweep(spec)
    rows = parse_csv(write_csv(spec, points))
    assert len(rows) == len(points)
    for row, point in zip(rows, points):
        assert row["mu"] == point.values[0]
        assert row["mode"] == point.mode
        assert row["s_partial"] == point.eve_info
        assert row["p_b"] == point.p_block
        assert row["p_m"] == point.p_measure
        assert row["feasible_pb"] == point.feasible_block
        assert row["feasible_pm"] == point.feasible_measure
        assert row["n"] == point.sifted
        assert row["e_T"] == point.errors
        assert row["degenerate"] == point.degenerate


def test_csv_round_trip_keeps_nan_rows():
    spec = SweepSpec(
        axes=(SweepAxis("mu", 750.0, 800.0, 2, "linear"),),
        fixed=CANONICAL_FIXED,
        mode="matched",
    )
    rows = parse_csv(write_csv(spec, run_sweep(spec)))
    assert all(row["degenerate"] for row in rows)
    assert all(math.isnan(row["s_partial"]) for row in rows)


def test_two_axis_csv_carries_class_column():
    spec = SweepSpec(
        axes=(SweepAxis("mu", 0.1, 2.0, 4, "log"), SweepAxis("alpha", 0.005, 0.5, 3, "log")),
        fixed={"eta": 0.5, "r_c": 0.01},
        mode="matched",
    )
    points = run_sweep(spec)
    assert len(points) == 12
    text = write_csv(spec, points, with_class=True)
    header = text.splitlines()[0].split(",")
    assert header[:2] == ["mu", "alpha"]
    assert header[-1] == "class"
    rows = parse_csv(text)
    assert {row["class"] for row in rows} <= {CLASS_BOTH, CLASS_PB, CLASS_PM, CLASS_DEGENERATE}
