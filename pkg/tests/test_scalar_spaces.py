import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bjlab.errors import DimensionError, DomainError, UnsupportedError
from bjlab.fuzz import oracle_tolerance
from bjlab.sampling import rng_for
from bjlab.scalar_spaces import (
    ScalarSpace,
    Vector,
    bj_oracle_vectors,
    bj_oracle_vectors_many,
    bj_smooth,
    find_orthogonalizing_scalar,
    frechet_residual,
    p_norm,
    support_functional,
)

R2 = ScalarSpace(2, 2.0)
L3 = ScalarSpace(2, 3.0)

# Frozen from a 50-digit mpmath evaluation.
CBRT2 = 1.2599210498948731647672106
ALPHA_L3 = 0.67541743733683649131645693  # root of sum |y_i + a x_i| (y_i + a x_i) x_i, y=(1,-4), x=(2,1)
FRECHET_T4 = 4.9999999875000000625e-05


def test_space_validation():
    with pytest.raises(DimensionError):
        ScalarSpace(0, 2.0)
    with pytest.raises(UnsupportedError):
        ScalarSpace(2, 0.5)
    with pytest.raises(UnsupportedError):
        ScalarSpace(2, math.inf)
    with pytest.raises(DomainError):
        ScalarSpace(2, 2.0, "quaternion")
    assert ScalarSpace(3, 2.0, "complex").is_hilbert
    assert not ScalarSpace(3, 1.0).is_smooth


def test_vector_basics():
    v = R2.vector([3, 4])
    assert isinstance(v, Vector)
    assert v + v == R2.vector([6, 8])
    assert R2.basis(1) == Vector([0.0, 1.0])
    with pytest.raises(DimensionError):
        R2.vector([1, 2, 3])
    with pytest.raises(DimensionError):
        R2.vector([1j, 0])


def test_p_norm_examples():
    assert p_norm([3, 4], R2) == 5.0
    assert p_norm([1, 1], L3) == pytest.approx(CBRT2, rel=1e-15)
    assert p_norm([0, 0], L3) == 0.0
    assert p_norm([1, -2], ScalarSpace(2, 1.0)) == 3.0
    with pytest.raises(DimensionError):
        p_norm([1, 2, 3], R2)


def test_support_functional_examples():
    e1, e2 = np.eye(2)
    assert support_functional(e1, e1 + e2, R2) == pytest.approx(1.0, abs=1e-15)
    assert support_functional(e1 + e2, e1, R2) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert support_functional([2, 1], [1, -4], L3) == 0.0
    with pytest.raises(DomainError, match="support functional undefined at zero"):
        support_functional([0, 0], [1, 0], R2)
    with pytest.raises(UnsupportedError):
        support_functional([1, 0], [1, 0], ScalarSpace(2, 1.0))


def test_support_functional_complex_hilbert():
    C2 = ScalarSpace(2, 2.0, "complex")
    x = np.array([1 + 1j, 2.0])
    y = np.array([0.5j, -1.0])
    assert support_functional(x, y, C2) == pytest.approx(np.vdot(x, y) / np.linalg.norm(x), abs=1e-14)


def test_frechet_examples():
    assert frechet_residual([1, 0], [0, 1e-4], R2) == pytest.approx(FRECHET_T4, rel=1e-9)
    x = np.array([1.5, -0.25])
    for eps in (-0.9, -0.3, 0.5, 4.0):
        assert frechet_residual(x, eps * x, L3) <= 1e-15
    r = [frechet_residual([1, 1], [d, -d], L3) for d in (1e-2, 1e-3, 1e-4)]
    assert r[1] <= 1e-2
    assert r[1] / r[0] == pytest.approx(0.1, rel=1e-2)
    assert r[2] / r[1] == pytest.approx(0.1, rel=1e-2)
    with pytest.raises(DomainError):
        frechet_residual([0, 0], [1, 0], R2)
    with pytest.raises(DomainError):
        frechet_residual([1, 0], [0, 0], R2)


def test_oracle_examples():
    assert bj_oracle_vectors([1, 0], [0, 1], R2).orthogonal
    assert bj_oracle_vectors([2, 1], [1, -4], L3).orthogonal
    swapped = bj_oracle_vectors([1, -4], [2, 1], L3)
    assert not swapped.orthogonal
    x = np.array([0.3, -2.0])
    same = bj_oracle_vectors(x, x, L3)
    assert not same.orthogonal
    assert same.argmin == pytest.approx(-1.0, abs=1e-6)
    assert same.lhs == pytest.approx(p_norm(x, L3), rel=1e-9)


def test_oracle_degenerate_inputs():
    v = bj_oracle_vectors([1, 2], [0, 0], L3)
    assert v.orthogonal and v.degenerate
    v = bj_oracle_vectors([0, 0], [1, 2], L3)
    assert v.orthogonal and v.degenerate
    with pytest.raises(DomainError):
        bj_oracle_vectors([1, 0], [0, 1], R2, tol=0.0)


def test_oracle_p1_vectors():
    L1 = ScalarSpace(2, 1.0)
    # ||(1,0) + t(1,1)|| = |1+t| + |t| >= 1
    assert bj_oracle_vectors([1, 0], [1, 1], L1).orthogonal
    assert not bj_oracle_vectors([1, 1], [1, 0], L1).orthogonal
    assert bj_oracle_vectors([1, 0], [0, 1], L1).orthogonal


def test_oracle_complex():
    C2 = ScalarSpace(2, 2.0, "complex")
    x = np.array([1.0, 1j])
    assert bj_oracle_vectors(x, np.array([1j, 1.0]), C2, tol=1e-9).orthogonal
    assert not bj_oracle_vectors(x, np.array([1j, 0.0]), C2, tol=1e-9).orthogonal
    C3 = ScalarSpace(2, 3.0, "complex")
    v = bj_oracle_vectors(x, x * (0.5 - 2j), C3)
    assert not v.orthogonal
    assert complex(v.argmin) == pytest.approx(1 / (0.5 - 2j) * -1, abs=1e-5)


def test_orthogonalizing_examples():
    assert find_orthogonalizing_scalar([1, 1], [1, 0], R2) == pytest.approx(-1.0, abs=1e-12)
    assert find_orthogonalizing_scalar([0, 1], [1, 0], L3) == pytest.approx(0.0, abs=1e-12)
    a = find_orthogonalizing_scalar([1, -4], [2, 1], L3)
    assert a == pytest.approx(ALPHA_L3, abs=1e-9)
    assert bj_oracle_vectors(a * np.array([2, 1]) + np.array([1, -4]), [2, 1], L3).orthogonal
    with pytest.raises(DomainError):
        find_orthogonalizing_scalar([1, 1], [0, 0], R2)


def test_orthogonalizing_complex_hilbert():
    C2 = ScalarSpace(2, 2.0, "complex")
    x = np.array([1 + 1j, -0.5])
    y = np.array([2.0, 1j])
    a = find_orthogonalizing_scalar(y, x, C2)
    assert a == pytest.approx(-np.vdot(x, y) / np.vdot(x, x), abs=1e-9)


def test_bj_smooth():
    assert bj_smooth([2, 1], [1, -4], L3).orthogonal
    assert not bj_smooth([1, -4], [2, 1], L3).orthogonal
    with pytest.raises(UnsupportedError):
        bj_smooth([1, 0], [0, 1], ScalarSpace(2, 1.0))


exponents = st.sampled_from([1.25, 1.5, 2.0, 3.0, 4.5])
coords = st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=5)
tiny_coords = st.lists(
    st.one_of(st.floats(-10, 10), st.floats(-1e-200, 1e-200), st.just(0.0)), min_size=1, max_size=4
)


def _pair(draw_coords, p, complex_field=False):
    return ScalarSpace(len(draw_coords), p, "complex" if complex_field else "real")


@given(coords, exponents)
def test_norming(c, p):
    space = _pair(c, p)
    x = np.array(c)
    if not np.any(x):
        return
    nx = p_norm(x, space)
    assert abs(support_functional(x, x, space) - nx) <= 1e-12 * nx


def test_norming_sup_over_unit_vectors():
    rng = rng_for(11)
    for p in (1.25, 1.5, 3.0, 6.0):
        space = ScalarSpace(4, p)
        x = rng.standard_normal(4)
        Y = rng.standard_normal((1000, 4))
        Y /= (np.abs(Y) ** p).sum(axis=1, keepdims=True) ** (1 / p)
        vals = [abs(support_functional(x, y, space)) for y in Y]
        assert max(vals) <= 1 + 1e-9


@given(coords, coords, exponents, st.floats(-5, 5).filter(lambda a: abs(a) > 1e-3))
def test_homogeneity(c, d, p, alpha):
    n = min(len(c), len(d))
    space = ScalarSpace(n, p)
    x, y = np.array(c[:n]), np.array(d[:n])
    if not np.any(x):
        return
    lhs = support_functional(alpha * x, y, space)
    rhs = math.copysign(1.0, alpha) * support_functional(x, y, space)
    assert abs(lhs - rhs) <= 1e-12 * max(p_norm(y, space), 1e-300)


def test_frechet_decay():
    rng = rng_for(12)
    for p in (1.5, 2.0, 3.0, 5.0):
        space = ScalarSpace(3, p)
        x = rng.choice([-1.0, 1.0], 3) * (0.5 + np.abs(rng.standard_normal(3)))
        for _ in range(20):
            u = rng.standard_normal(3)
            r = [frechet_residual(x, d * u, space) for d in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)]
            for a, b in zip(r, r[1:]):
                assert b <= 0.15 * a + 1e-10


def test_smooth_characterization_equivalence():
    """Oracle and ``|F_x(y)| <= tol`` agree on 10^4 pairs outside a 1e-6 band."""
    rng = rng_for(13)
    band = 1e-6
    total = 0
    for p in (1.5, 2.0, 3.0, 4.0):
        space = ScalarSpace(3, p)
        pairs = []
        for k in range(2500):
            x = rng.standard_normal(3)
            x[rng.random(3) < 0.2] = 0
            if not np.any(x):
                x[0] = 1.0
            y = rng.standard_normal(3)
            if k % 2:
                y = y - (support_functional(x, y, space) / p_norm(x, space)) * x
                if k % 4 == 1:
                    y = y + 10 ** rng.uniform(-9, -1) * rng.standard_normal(3)
            pairs.append((x, y))
        oracle = bj_oracle_vectors_many(pairs, space, oracle_tolerance(p, band))
        for (x, y), v in zip(pairs, oracle):
            char = bj_smooth(x, y, space, 1e-12)
            if char.orthogonal != v.orthogonal:
                assert abs(char.margin) <= band
            total += 1
    assert total >= 10_000


def test_batched_oracle_matches_single():
    rng = rng_for(14)
    pairs = [(rng.standard_normal(3), rng.standard_normal(3)) for _ in range(40)]
    batch = bj_oracle_vectors_many(pairs, L3.__class__(3, 3.0), 1e-12)
    for (x, y), v in zip(pairs, batch):
        single = bj_oracle_vectors(x, y, ScalarSpace(3, 3.0), 1e-12)
        assert single.lhs == v.lhs
        assert single.orthogonal == v.orthogonal


@given(tiny_coords, tiny_coords, st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_bracket_soundness(c, d, p):
    n = min(len(c), len(d))
    space = ScalarSpace(n, p)
    x, y = np.array(c[:n]), np.array(d[:n])
    if not np.any(y):
        return
    v = bj_oracle_vectors(x, y, space)
    ny = p_norm(y, space)
    assert ny > 0
    assert not math.isnan(abs(v.argmin))
    if math.isinf(abs(v.argmin)):
        # only allowed when the minimizer itself is beyond float range
        assert math.isinf(2 * p_norm(x, space) / ny)
        return
    # compare in units of ||y|| so that extreme ratios cannot overflow
    assert abs(v.argmin) * ny <= 2 * p_norm(x, space) * (1 + 1e-9)


def test_norm_of_tiny_vectors():
    for p in (1.5, 2.0, 3.0):
        assert p_norm([3e-237, 4e-237], ScalarSpace(2, p)) > 0
    assert p_norm([3e-237, 4e-237], R2) == pytest.approx(5e-237, rel=1e-15)
