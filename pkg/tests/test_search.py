import numpy as np
import pytest

from bjlab.search import bisect_increasing, section_search, ternary_search


def test_ternary_kinked_minimum():
    x, fx = ternary_search(lambda t: abs(t - 0.3) + 1.0, -5.0, 5.0, xtol=1e-12)
    assert x == pytest.approx(0.3, abs=1e-10)
    assert fx == pytest.approx(1.0, abs=1e-11)


def test_section_rows_independent():
    centers = np.array([-1.0, 0.25, 3.0])
    res = section_search(lambda g: np.abs(g - centers[:, None]), [-4] * 3, [4] * 3, probes=8, xtol=1e-13)
    np.testing.assert_allclose(res.x, centers, atol=1e-12)


def test_section_kink_at_endpoint():
    res = section_search(lambda g: np.abs(g), [0.0], [2.0], probes=4, xtol=1e-14)
    assert res.x[0] == pytest.approx(0.0, abs=1e-13)


def test_section_rejects_bad_bracket():
    with pytest.raises(ValueError):
        section_search(lambda g: g, [1.0], [0.0])
    with pytest.raises(ValueError):
        section_search(lambda g: g, [0.0], [1.0], probes=1)


def test_bisect_root_and_endpoints():
    assert bisect_increasing(lambda t: t**3 - 2.0, 0.0, 2.0) == pytest.approx(2 ** (1 / 3), abs=1e-14)
    assert bisect_increasing(lambda t: t + 10, 0.0, 1.0) == 0.0
    assert bisect_increasing(lambda t: t - 10, 0.0, 1.0) == 1.0
