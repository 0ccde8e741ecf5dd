import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linkburst._expint import log_expint


def test_against_frozen_values(oracles):
    for e in oracles["log_expint"]:
        got = log_expint(e["a"], e["r"])
        assert got == pytest.approx(e["value"], rel=1e-12, abs=1e-12), e


def test_broadcasting():
    a = np.array([[0.5], [1.0], [2.0]])
    r = np.array([1e-3, 1.0, 5.0])
    out = log_expint(a, r)
    assert out.shape == (3, 3)
    assert out[1, 2] == pytest.approx(log_expint(1.0, 5.0))


def test_integer_orders_match_scipy():
    from scipy.special import expn
    r = np.array([1e-4, 0.5, 0.999, 1.0, 2.0, 30.0])
    for n in (0, 1, 2, 5):
        assert np.allclose(log_expint(float(n), r), np.log(expn(n, r)), rtol=1e-12, atol=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.floats(-3, 6), st.floats(1e-9, 60))
def test_matches_incomplete_gamma(a, r):
    mp.mp.dps = 30
    ref = float(mp.log(mp.gammainc(1 - a, r) * mp.mpf(r) ** (a - 1)))
    assert log_expint(a, r) == pytest.approx(ref, rel=1e-11, abs=1e-11)
