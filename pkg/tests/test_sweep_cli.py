import csv
import io
import json
import math

import pytest

from stklein import cli
from stklein.sweep import (
    Axis,
    SweepSpec,
    SweepSpecError,
    plot_script,
    preset,
    render,
    run_sweep,
    thread_count,
)


def _small_spec(**kw):
    return SweepSpec(
        axis1=Axis("vm", 0.0, 0.99, 7),
        axis2=Axis("dqv", 0.0, 6.0, 9),
        fixed={"ei": 4.0, "rav": -1.0},
        **kw,
    )


def test_row_count_and_order():
    spec = _small_spec()
    rows = run_sweep(spec, threads=1)
    assert len(rows) == 63
    vms = [r["v_m"] for r in rows]
    assert vms == sorted(vms)
    assert [r["qV2"] for r in rows[:9]] == pytest.approx(Axis("dqv", 0.0, 6.0, 9).samples())


def test_parallel_output_identical():
    spec = _small_spec()
    a = render(run_sweep(spec, threads=1), spec.columns)
    b = render(run_sweep(spec, threads=3), spec.columns)
    assert a == b


def test_csv_dialect():
    spec = _small_spec()
    text = render(run_sweep(spec, threads=1), spec.columns)
    assert "\r" not in text
    rows = list(csv.DictReader(io.StringIO(text)))
    assert "nan" not in text.lower()
    no_catch = [r for r in rows if r["regime"] == "no_catch_up"]
    assert no_catch and all(r["T"] == "" for r in no_catch)
    gap = [r for r in rows if r["regime"] == "klein_gap"]
    assert gap and all(float(r["T"]) == 0.0 for r in gap)
    for r in rows:
        if r["R"]:
            assert float(r["R"]) == float(repr(float(r["R"])))


def test_json_nan_as_null():
    spec = _small_spec(output_format="json")
    data = json.loads(render(run_sweep(spec, threads=1), spec.columns, "json"))
    assert any(r["T"] is None for r in data)


def test_cell_errors_do_not_abort():
    spec = SweepSpec(axis1=Axis("ei", 0.5, 4.0, 4), fixed={"vm": 0.0, "dqv": 2.0})
    rows = run_sweep(spec, threads=1)
    assert len(rows) == 4
    assert rows[0]["error"].startswith("DomainError")
    assert rows[-1]["error"] == ""


@pytest.mark.parametrize(
    "axis",
    [
        Axis("vm", 0.5, 0.5, 3),
        Axis("vm", 0.0, 1.0, 1),
        Axis("dqv", 0.0, 1.0, 3, "one-minus-log"),
        Axis("bogus", 0.0, 1.0, 3),
        Axis("ei", 0.0, 1.0, 3, "log"),
    ],
)
def test_invalid_axes(axis):
    with pytest.raises(SweepSpecError):
        SweepSpec(axis1=axis, fixed={"ei": 4.0, "vm": 0.1}).validate()


def test_conflicting_parameters():
    with pytest.raises(SweepSpecError):
        SweepSpec(axis1=Axis("dqv", 0, 1, 2), fixed={"ei": 4.0, "vm": 0.0, "qv2": 1.0}).validate()


def test_one_minus_log_samples():
    ax = Axis("vm", scale="one-minus-log", values=(2, 4))
    assert ax.samples() == pytest.approx([0.99, 0.9999], abs=1e-15)


def test_axis_parse():
    assert Axis.parse("vm:0:0.9:10") == Axis("vm", 0.0, 0.9, 10)
    assert Axis.parse("vm=2,7:one-minus-log").samples()[1] == pytest.approx(1 - 1e-7)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("ST_KLEIN_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("ST_KLEIN_THREADS", "0")
    with pytest.raises(SweepSpecError):
        thread_count()


def test_presets_encode_stated_parameters():
    spec = preset("3a")
    assert spec.fixed == {"ei": 4.0, "rav": -1.0}
    assert (spec.axis1.count, spec.axis2.count) == (601, 601)
    spec = preset("3b")
    assert spec.axis1.samples() == pytest.approx([1 - 1e-2, 1 - 1e-4, 1 - 1e-7, 1 - 1e-10], rel=1e-15)
    assert spec.fixed == {"rav": -1.0}
    spec = preset("1b")
    assert spec.fixed["ei"] == 4.0 and spec.fixed["vm"] == 0.0
    assert spec.axis1.count == 801


def test_figure_1b_regions():
    rows = run_sweep(preset("1b"), threads=1)
    for r in rows:
        dv = r["qV2"]
        if 3.0 < dv < 5.0:
            assert r["regime"] == "klein_gap" and r["T"] == 0.0
        elif dv < 3.0 - 1e-9 or dv > 5.0 + 1e-9:
            assert r["T"] > 0.0


def test_figure_3a_wedge_matches_gap_edges():
    from stklein.kinematics import Region, incident_from_energy
    from stklein.thresholds import gap_edges

    spec = SweepSpec(
        axis1=Axis("vm", 0.0, 0.999, 61),
        axis2=Axis("dqv", 0.0, 6.0, 61),
        fixed={"ei": 4.0, "rav": -1.0},
    )
    rows = run_sweep(spec, threads=1)
    inc = incident_from_energy(4.0, Region())
    step = 6.0 / 60
    for r in rows:
        if r["regime"] == "no_catch_up":
            continue
        gap = gap_edges(inc, r["v_m"], -1.0)
        dv = r["qV2"]
        in_gap = r["regime"] == "klein_gap"
        if gap.qdV_plus + step < dv < gap.qdV_minus - step:
            assert in_gap
        if dv < gap.qdV_plus - step or dv > gap.qdV_minus + step:
            assert not in_gap


def test_plot_script_compiles():
    for which in ("1b", "3a", "3b"):
        compile(plot_script(preset(which), "out.csv"), "plot", "exec")


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_scatter(capsys):
    code, out, _ = _run(capsys, "scatter", "--ei", "4", "--qv2", "2", "--vm", "0")
    data = json.loads(out)
    assert code == 0
    assert data["regime"] == "subcritical_plus"
    assert data["R"] + data["T"] == pytest.approx(1.0, abs=1e-12)


def test_cli_thresholds(capsys):
    code, out, _ = _run(capsys, "thresholds", "--vm", "0", "--rav", "-1", "--ei", "4")
    data = json.loads(out)
    assert code == 0
    assert data["qdV_minus"] == pytest.approx(5.0, abs=1e-12)
    assert data["qdV_plus"] == pytest.approx(3.0, abs=1e-12)
    code, out, _ = _run(capsys, "thresholds", "--vm", "0.99", "--min-over-ei")
    assert json.loads(out)["qdV_th_min"] == pytest.approx(0.14, rel=0.05)


def test_cli_classify_and_gap(capsys):
    code, out, _ = _run(capsys, "classify", "--ei", "4", "--qv2", "6")
    assert code == 0 and json.loads(out)["regime"] == "minus_only"
    code, out, _ = _run(capsys, "gap", "--rav", "0.6", "--count", "5")
    data = json.loads(out)
    assert data["max_width"] == pytest.approx(2.5)
    assert len(data["rows"]) == 5


def test_cli_usage_errors(capsys):
    code, _, err = _run(capsys, "scatter", "--ei", "4", "--nope")
    assert code == 1
    assert json.loads(err)["error"] == "usage"
    code, _, err = _run(capsys, "scatter", "--ei", "0.5")
    assert code == 1
    assert json.loads(err)["error"] == "DomainError"
    code, _, err = _run(capsys, "sweep", "--axis1", "vm:0:1")
    assert code == 1 and json.loads(err)["error"] == "bad_sweep_spec"


def test_cli_figure_3b(capsys):
    code, out, _ = _run(capsys, "figure", "--which", "3b")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4 * 601
    assert sorted({float(r["v_m"]) for r in rows}) == pytest.approx([1 - 1e-2, 1 - 1e-4, 1 - 1e-7, 1 - 1e-10])
    finite = [r for r in rows if r["qdV_minus"]]
    assert finite and all(float(r["qdV_minus"]) > 0 for r in finite)


def test_cli_sweep_spec_file(tmp_path, capsys):
    spec = {
        "kind": "scatter",
        "axis1": {"name": "dqv", "min": 0, "max": 8, "count": 5},
        "fixed": {"ei": 4, "vm": 0},
        "output": {"path": str(tmp_path / "out.csv"), "format": "csv"},
    }
    (tmp_path / "spec.json").write_text(json.dumps(spec))
    code, out, _ = _run(capsys, "sweep", "--spec", str(tmp_path / "spec.json"), "--emit-plot-script")
    assert code == 0 and out == ""
    text = (tmp_path / "out.csv").read_text()
    assert text.count("\n") == 6
    assert (tmp_path / "out.plot.py").exists()


def test_cli_inline_sweep(capsys):
    code, out, _ = _run(
        capsys, "sweep", "--kind", "thresholds", "--axis1", "ei:1.5:10:4:log", "--fixed", "vm=0.9", "--fixed", "rav=-1"
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    assert rows[0]["regime"] == "no_catch_up"
    assert not math.isnan(float(rows[-1]["width"]))


def test_cli_verify(capsys):
    code, out, _ = _run(capsys, "verify", "--all", "--samples", "200")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert data["oracle"]["max_flux_error"] < 1e-10


def test_cli_verify_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "verify_continuity", lambda problem, result: 1.0)
    code, out, _ = _run(capsys, "verify", "--continuity", "--samples", "20")
    assert code == 2
    assert not json.loads(out)["passed"]
