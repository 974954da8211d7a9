import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from udcoherence import formats
from udcoherence.qfield import ConstantVelocity, Rest, UniformAcceleration
from udcoherence.sweep import (
    DecoherenceCurve,
    GridSpec,
    SweepGrid,
    decoherence_curve,
    diff_grid,
    swelling_regions,
    sweep_grid,
)


def _sig12_equal(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return np.all(np.abs(a - b) <= 5e-12 * np.maximum(np.abs(a), np.abs(b)))


def test_format_number():
    assert formats.format_number(0.0) == "0.000000000000"
    assert formats.format_number(4.865120857030077) == "4.86512085703"
    assert formats.format_number(1.8e-5) == "0.0000180000000000"
    assert "e" not in formats.format_number(1.234e-30)
    assert float(formats.format_number(-0.0123456789012345)) == -0.0123456789012


def test_zero_grid_csv():
    spec = GridSpec(0.1, 1.0, 0.1, 1.0, 2, 2)
    g = SweepGrid(spec, Rest(), np.zeros((2, 2)), np.zeros((2, 2)))
    text = formats.serialize(g, "csv").decode()
    lines = text.split("\n")
    assert lines[0] == "e_over_omega,omega_t,c_over_g,err"
    assert len(lines) == 6 and lines[-1] == ""   # 4 rows, LF-terminated
    assert all(line.split(",")[2] == "0.000000000000" for line in lines[1:5])
    assert "\r" not in text


def test_csv_row_major_order():
    spec = GridSpec(0.5, 1.0, 1.0, 3.0, 2, 3)
    g = SweepGrid(spec, Rest(), np.arange(6.0).reshape(2, 3), np.zeros((2, 3)))
    rows = [r.split(",") for r in formats.serialize(g).decode().split("\n")[1:-1]]
    assert [float(r[2]) for r in rows] == [0, 1, 2, 3, 4, 5]
    assert [float(r[0]) for r in rows] == [0.5] * 3 + [1.0] * 3
    assert [float(r[1]) for r in rows] == [1, 2, 3, 1, 2, 3]


@settings(max_examples=25, deadline=None)
@given(arrays(float, (4, 3), elements=st.floats(1e-8, 1e3)),
       arrays(float, (4, 3), elements=st.floats(0, 1)),
       st.sampled_from(["linear", "log"]))
def test_grid_round_trip(values, errors, spacing):
    spec = GridSpec(0.1, 5.0, 0.2, 4.0, 4, 3, spacing)
    g = SweepGrid(spec, UniformAcceleration(2.0), values, errors)
    back = formats.parse(formats.serialize(g, "csv"), "csv")
    assert back.spec.shape == spec.shape and back.spec.spacing == spec.spacing
    assert _sig12_equal(back.values, values) and _sig12_equal(back.errors, errors)
    assert _sig12_equal(back.spec.e_axis, spec.e_axis)

    back = formats.parse(formats.serialize(g, "json"), "json")
    assert back.spec == spec and back.trajectory == g.trajectory
    np.testing.assert_array_equal(back.values, values)
    np.testing.assert_array_equal(back.errors, errors)


def test_json_grid_layout():
    spec = GridSpec(0.2, 2.0, 0.3, 3.0, 3, 2)
    g = sweep_grid(ConstantVelocity(0.8), spec)
    doc = json.loads(formats.serialize(g, "json"))
    assert {"spec", "trajectory", "axes", "values", "errors", "meta"} <= set(doc)
    assert doc["trajectory"] == "v=0.8"
    assert len(doc["values"]) == 3 and len(doc["values"][0]) == 2
    assert doc["axes"]["e_over_omega"] == spec.e_axis.tolist()
    # timings are not part of the file
    assert "seconds" not in doc["meta"] and "workers" not in doc["meta"]


def test_diff_and_regions_round_trip():
    spec = GridSpec(0.1, 5.0, 0.1, 5.0, 12, 12)
    d = diff_grid(sweep_grid(ConstantVelocity(0.8), spec), sweep_grid(Rest(), spec))
    text = formats.serialize(d, "csv").decode()
    assert text.startswith("e_over_omega,omega_t,dc_over_g,err\n")
    back = formats.parse(formats.serialize(d, "json"), "json")
    np.testing.assert_array_equal(back.values, d.values)
    assert (back.minuend, back.subtrahend) == ("v=0.8", "rest")
    assert _sig12_equal(formats.parse(text.encode(), "csv").values, d.values)

    rep = swelling_regions(d, 0.0)
    assert rep.components
    back = formats.parse(formats.serialize(rep, "json"), "json")
    assert back.cells == rep.cells
    assert back.components == rep.components
    lines = formats.serialize(rep, "csv").decode().split("\n")
    assert lines[0] == "i,j,e_over_omega,omega_t,dc_over_g,component"
    assert len(lines) == len(rep.cells) + 2


def test_curve_file_shape():
    trajs = [Rest(), ConstantVelocity(0.8), UniformAcceleration(2.0)]
    c = decoherence_curve(trajs, 0.25, (0.05, 5.0), 7)
    lines = formats.serialize(c, "csv").decode().split("\n")[:-1]
    assert lines[0] == "omega_t,rest,v=0.8,a=2"
    assert len(lines) == 1 + 7
    assert all(len(line.split(",")) == 4 for line in lines)
    back = formats.parse(formats.serialize(c, "csv"), "csv")
    assert _sig12_equal(back.values, c.values)
    assert back.tags == c.tags
    back = formats.parse(formats.serialize(c, "json"), "json")
    assert isinstance(back, DecoherenceCurve)
    np.testing.assert_array_equal(back.values, c.values)


def test_serialize_is_deterministic():
    spec = GridSpec(0.2, 2.0, 0.3, 3.0, 4, 4)
    a = formats.serialize(sweep_grid(UniformAcceleration(1.0), spec, workers=1), "json")
    b = formats.serialize(sweep_grid(UniformAcceleration(1.0), spec, workers=2), "json")
    assert a == b


def test_unknown_inputs():
    with pytest.raises(TypeError):
        formats.serialize(object())
    with pytest.raises(ValueError):
        formats.detect_format("grid.txt")
    with pytest.raises(ValueError):
        formats.parse(b"foo,bar\n1,2\n", "csv")


def test_io_errors_carry_path(tmp_path):
    missing = tmp_path / "nope" / "grid.json"
    with pytest.raises(OSError, match="nope"):
        formats.read(missing)
    spec = GridSpec(0.1, 1.0, 0.1, 1.0, 2, 2)
    g = SweepGrid(spec, Rest(), np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(OSError, match="nope"):
        formats.write(g, missing)
