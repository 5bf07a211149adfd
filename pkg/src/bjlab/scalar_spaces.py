"""Finite-dimensional l^p spaces over the reals or the complex numbers.

For ``1 < p < infinity`` the norm is Frechet differentiable away from zero and
every nonzero ``x`` has the unique support functional

    F_x(y) = sum_i |x_i|^(p-1) conj(sign x_i) y_i / ||x||^(p-1).

``p = 1`` is accepted by the definition oracle only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._oracle import minimize_norm_change, minimize_norm_change_many
from .errors import BJLabError, DimensionError, DomainError, UnsupportedError
from .search import bisect_increasing

DEFAULT_TOL = 1e-9
REAL = "real"
COMPLEX = "complex"


@dataclass(frozen=True)
class ScalarSpace:
    dim: int
    p: float
    field: str = REAL

    def __post_init__(self):
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise DimensionError(f"dim must be a positive integer, got {self.dim!r}")
        if not (math.isfinite(self.p) and self.p >= 1):
            raise UnsupportedError(f"exponent must satisfy 1 <= p < inf, got {self.p!r}")
        if self.field not in (REAL, COMPLEX):
            raise DomainError(f"field must be 'real' or 'complex', got {self.field!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "p", float(self.p))

    @property
    def is_complex(self):
        return self.field == COMPLEX

    @property
    def is_smooth(self):
        return self.p > 1

    @property
    def is_hilbert(self):
        return self.p == 2

    @property
    def dtype(self):
        return np.complex128 if self.is_complex else np.float64

    def vector(self, coords) -> Vector:
        v = coords if isinstance(coords, Vector) else Vector(coords)
        _check(v.coords, self)
        return v

    def basis(self, i: int) -> Vector:
        """Standard basis vector ``e_(i+1)`` (zero-based index)."""
        c = np.zeros(self.dim, dtype=self.dtype)
        c[i] = 1
        return Vector(c)

    def zero(self) -> Vector:
        return Vector(np.zeros(self.dim, dtype=self.dtype))


@dataclass(frozen=True, eq=False)
class Vector:
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords)
        if c.ndim != 1:
            raise DimensionError("vector coordinates must be one-dimensional")
        c = c.astype(np.complex128 if np.iscomplexobj(c) else np.float64)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def __len__(self):
        return self.coords.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    def __add__(self, other):
        return Vector(self.coords + _raw(other))

    def __sub__(self, other):
        return Vector(self.coords - _raw(other))

    def __neg__(self):
        return Vector(-self.coords)

    def __mul__(self, alpha):
        return Vector(alpha * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, alpha):
        return Vector(self.coords / alpha)

    def __eq__(self, other):
        return isinstance(other, Vector) and np.array_equal(self.coords, other.coords)

    def __repr__(self):
        return f"Vector({self.coords.tolist()!r})"


class Rule(str, Enum):
    DEFINITION_ORACLE = "definition_oracle"
    L1_CHARACTERIZATION = "l1_characterization"
    LP_CHARACTERIZATION = "lp_characterization"
    SMOOTH_FUNCTIONAL = "smooth_functional"


@dataclass(frozen=True)
class OrthoVerdict:
    """Outcome of one orthogonality test: ``orthogonal == (lhs <= rhs + tolerance)``.

    ``tolerance`` is the absolute threshold actually applied, i.e. the relative
    tolerance times ``scale``. ``margin`` is the dimensionless slack
    ``(rhs - lhs) / scale``; it is negative exactly on the non-orthogonal side
    (up to the tolerance).
    """

    orthogonal: bool
    lhs: float
    rhs: float
    rule: Rule
    tolerance: float
    scale: float = 1.0
    degenerate: bool = False
    argmin: complex | float | None = field(default=None, compare=False)

    @property
    def margin(self) -> float:
        return (self.rhs - self.lhs) / self.scale

    @property
    def relative_tolerance(self) -> float:
        return self.tolerance / self.scale

    def to_dict(self) -> dict:
        d = {
            "orthogonal": bool(self.orthogonal),
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "rule": self.rule.value,
            "tolerance": float(self.tolerance),
            "scale": float(self.scale),
            "margin": float(self.margin),
            "degenerate": bool(self.degenerate),
        }
        if self.argmin is not None:
            a = complex(self.argmin)
            d["argmin"] = [a.real, a.imag] if a.imag else a.real
        return d


def make_verdict(lhs, rhs, rule, tol, scale=1.0, *, degenerate=False, argmin=None):
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    scale = float(scale) if scale > 0 else 1.0
    tolerance = tol * scale
    lhs = float(lhs)
    rhs = float(rhs)
    return OrthoVerdict(lhs <= rhs + tolerance, lhs, rhs, Rule(rule), tolerance, scale, degenerate, argmin)


def _raw(x):
    return x.coords if isinstance(x, Vector) else np.asarray(x)


def _check(c, space):
    if c.ndim != 1 or c.shape[0] != space.dim:
        raise DimensionError(f"expected {space.dim} coordinates, got shape {c.shape}")
    if not space.is_complex and np.iscomplexobj(c) and np.any(c.imag != 0):
        raise DimensionError("complex coordinates supplied to a real space")
    return c.astype(space.dtype)


def coords_of(x, space) -> np.ndarray:
    """Coordinates of ``x`` (a Vector or array-like) validated against ``space``."""
    return _check(np.asarray(_raw(x)), space)


def norm_rows(X, p) -> np.ndarray:
    """Row-wise l^p norms of a 2-D array, scaled to avoid overflow."""
    A = np.abs(np.asarray(X))
    if p == 1:
        return A.sum(axis=-1)
    m = A.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    if p == 2:
        return m[..., 0] * np.linalg.norm(A / safe, axis=-1)
    return m[..., 0] * ((A / safe) ** p).sum(axis=-1) ** (1.0 / p)


def pointwise_support(X, Y, p) -> np.ndarray:
    """Row-wise ``F_{X_s}(Y_s)`` for ``1 < p < inf``; zero rows of ``X`` give 0."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    n = norm_rows(X, p)
    safe_n = np.where(n > 0, n, 1.0)
    U = X / safe_n[..., None]
    A = np.abs(U)
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.where(A > 0, A ** (p - 2) * np.conj(U), 0.0)
    out = (K * Y).sum(axis=-1)
    out = np.where(n > 0, out, 0.0)
    return out if np.iscomplexobj(out) else out.real


def p_norm(x, space: ScalarSpace) -> float:
    c = coords_of(x, space)
    return float(norm_rows(c[None], space.p)[0])


def _require_smooth(space, what):
    if not space.is_smooth:
        raise UnsupportedError(f"{what} needs 1 < p < inf; p = 1 is non-smooth, use the definition oracle")


def _scalar(value, space):
    return complex(value) if space.is_complex else float(np.real(value))


def support_functional(x, y, space: ScalarSpace):
    """``F_x(y)``: the unique norm-one functional with ``F_x(x) = ||x||``."""
    _require_smooth(space, "support functional")
    cx = coords_of(x, space)
    cy = coords_of(y, space)
    if not np.any(cx):
        raise DomainError("support functional undefined at zero")
    return _scalar(pointwise_support(cx[None], cy[None], space.p)[0], space)


def frechet_residual(x, h, space: ScalarSpace) -> float:
    """``| ||x+h|| - ||x|| - Re F_x(h) | / ||h||``."""
    _require_smooth(space, "Frechet residual")
    cx = coords_of(x, space)
    ch = coords_of(h, space)
    if not np.any(cx):
        raise DomainError("Frechet residual undefined at x = 0")
    if not np.any(ch):
        raise DomainError("Frechet residual undefined for h = 0")
    nh = p_norm(ch, space)
    lin = np.real(pointwise_support(cx[None], ch[None], space.p)[0])
    return abs(p_norm(cx + ch, space) - p_norm(cx, space) - lin) / nh


def bj_oracle_vectors(x, y, space: ScalarSpace, tol: float = DEFAULT_TOL) -> OrthoVerdict:
    """Decide ``x ⊥_BJ y`` from the definition by minimizing ``||x + lam y||``."""
    cx = coords_of(x, space)
    cy = coords_of(y, space)
    res = minimize_norm_change(cx[None], cy[None], [1.0], space.p, space.p, space.is_complex, tol)
    degenerate = not (np.any(cx) and np.any(cy))
    return make_verdict(
        res.drop, 0.0, Rule.DEFINITION_ORACLE, tol, max(1.0, res.f_norm),
        degenerate=degenerate, argmin=res.argmin,
    )


def bj_oracle_vectors_many(pairs, space: ScalarSpace, tol: float = DEFAULT_TOL) -> list:
    """``bj_oracle_vectors`` for many ``(x, y)`` in one space, searched as a batch."""
    coords = [(coords_of(x, space), coords_of(y, space)) for x, y in pairs]
    results = minimize_norm_change_many(
        [(cx[None], cy[None], [1.0]) for cx, cy in coords], space.p, space.p, tol, space.is_complex
    )
    return [
        make_verdict(
            r.drop, 0.0, Rule.DEFINITION_ORACLE, tol, max(1.0, r.f_norm),
            degenerate=not (np.any(cx) and np.any(cy)), argmin=r.argmin,
        )
        for r, (cx, cy) in zip(results, coords)
    ]


def bj_smooth(x, y, space: ScalarSpace, tol: float = DEFAULT_TOL) -> OrthoVerdict:
    """Decide ``x ⊥_BJ y`` through ``F_x(y) = 0`` (smooth spaces only)."""
    _require_smooth(space, "support-functional test")
    cx = coords_of(x, space)
    cy = coords_of(y, space)
    if not np.any(cx) or not np.any(cy):
        return make_verdict(0.0, 0.0, Rule.SMOOTH_FUNCTIONAL, tol, degenerate=True)
    value = abs(pointwise_support(cx[None], cy[None], space.p)[0])
    return make_verdict(value, 0.0, Rule.SMOOTH_FUNCTIONAL, tol, p_norm(cy, space))


def find_orthogonalizing_scalar(y, x, space: ScalarSpace, tol: float = DEFAULT_TOL):
    """Scalar ``alpha`` with ``alpha x + y ⊥_BJ x``.

    ``alpha`` minimizes the convex map ``alpha -> ||y + alpha x||``, found by
    bisection on its derivative ``Re F_(y + alpha x)(x)``.
    """
    _require_smooth(space, "orthogonalizing scalar")
    cy = coords_of(y, space)
    cx = coords_of(x, space)
    if not np.any(cx):
        raise DomainError("cannot orthogonalize against x = 0")
    nx = p_norm(cx, space)
    p = space.p
    if not np.any(cy):
        return _scalar(0.0, space)
    bound = 2.0 * p_norm(cy, space) / nx

    def slope(h, direction):
        if not np.any(h):
            return nx
        return float(np.real(pointwise_support(h[None], direction[None], p)[0]))

    if not space.is_complex:
        alpha = bisect_increasing(lambda a: slope(cy + a * cx, cx), -bound, bound)
    else:
        ix = 1j * cx
        a = b = 0.0
        for _ in range(200):
            a_new = bisect_increasing(lambda t: slope(cy + (t + 1j * b) * cx, cx), -bound, bound)
            b_new = bisect_increasing(lambda t: slope(cy + (a_new + 1j * t) * cx, ix), -bound, bound)
            moved = abs(a_new - a) + abs(b_new - b)
            a, b = a_new, b_new
            if moved <= tol * max(1.0, bound) * 1e-3:
                break
        alpha = complex(a, b)
    h = cy + alpha * cx
    if np.any(h):
        resid = abs(pointwise_support(h[None], cx[None], p)[0])
        if resid > tol * nx:
            raise BJLabError(f"orthogonalizing scalar did not converge: |F(x)| = {resid:.3e}")
    return _scalar(alpha, space)
