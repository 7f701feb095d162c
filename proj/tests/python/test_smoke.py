"""Smoke test for the python module: imports, suite run, series, bracket."""

import json
import math
import sys

import qpl


def test_suite_names():
    names = qpl.suite_names()
    assert len(names) == 7, names
    assert "qp-core" in names and "moduli" in names


def test_run_suite():
    rep = qpl.run_suite("qp-core", group="torus2", seed=3, points=4)
    assert rep["suite"] == "qp-core"
    assert rep["group"] == "torus2"
    assert rep["all_pass"], [c for c in rep["checks"] if not c["pass"]]
    assert rep["max_residual"] < 1e-8
    assert all(c["residual"] <= c["tolerance"] for c in rep["checks"])


def test_tol_override_fails_controlled():
    rep = qpl.run_suite("qp-core", group="su2", seed=1, points=3,
                        tol={"closed_form": 1e-30})
    assert not rep["all_pass"]


def test_series():
    rows = qpl.cotangent_table(0.25, 4096)
    errors = [e for (_, _, e) in rows]
    assert all(a > b for a, b in zip(errors, errors[1:])), errors
    assert abs(qpl.cotangent_limit(0.25) - 0.5) < 1e-15
    rate = qpl.fitted_decay_rate(rows)
    assert abs(rate + 1.0) < 0.05, rate


def test_bracket():
    out = qpl.bracket(w1="a1", w2="a1", group="su2", seed=2)
    assert abs(out["bracket"]) < 1e-15  # {F,F} = 0 up to rounding
    assert out["level_distance"] < 1e-9
    assert out["invariance_w1"] < 1e-9
    try:
        qpl.bracket(w1="a1", w2="zz", group="su2")
    except qpl.WordParseError as err:
        assert "offset" in str(err)
    else:
        raise AssertionError("bad word accepted")


def test_descriptor_roundtrip():
    text = qpl.model_descriptor("su3")
    doc = json.loads(text)
    assert doc["name"] == "su3"
    assert qpl.descriptor_name(text) == "su3"


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
