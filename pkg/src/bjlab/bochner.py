"""Simple functions in L^p(mu, X) and their Birkhoff-James orthogonality.

Three independent deciders are provided:

* ``bj_l1``: for ``p = 1``, ``f ⊥ g`` iff ``|c| <= r`` with
  ``c = sum_{Z(f)^c} mu F_{f(s)}(g(s))`` and ``r = sum_{Z(f)} mu ||g(s)||``.
  Over the complex field the condition "for every scalar alpha" collapses
  to the same inequality because ``sup_{|alpha|=1} |Re(alpha c)| = |c|``.
* ``bj_lp``: for ``1 < p < inf``, ``f ⊥ g`` iff
  ``sum_{Z(f)^c} mu ||f(s)||^(p-1) F_{f(s)}(g(s)) = 0``.
* ``bj_oracle``: the definition, minimizing ``||f + lam g||_p`` directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._oracle import minimize_norm_change, minimize_norm_change_many
from .errors import DimensionError, DomainError, UnsupportedError
from .measure import MeasureSpace, SetOfPoints, measure_of
from .scalar_spaces import (
    DEFAULT_TOL,
    Rule,
    ScalarSpace,
    Vector,
    coords_of,
    make_verdict,
    norm_rows,
    pointwise_support,
)
from .search import bisect_increasing

# relative threshold below which entries of a constructed function count as rounding residue
FUZZ_ZERO_TAU = 1e-12


@dataclass(frozen=True, eq=False)
class SimpleFunction:
    """An X-valued function on a finite point space, one value per point."""

    space: MeasureSpace
    codomain: ScalarSpace
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values)
        if v.ndim == 1 and self.codomain.dim == 1:
            v = v[:, None]
        if v.shape != (len(self.space), self.codomain.dim):
            raise DimensionError(
                f"values must have shape ({len(self.space)}, {self.codomain.dim}), got {v.shape}"
            )
        if not self.codomain.is_complex and np.iscomplexobj(v) and np.any(v.imag != 0):
            raise DimensionError("complex values supplied to a real codomain")
        v = v.astype(self.codomain.dtype)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_vectors(cls, space, codomain, vectors):
        rows = [coords_of(x, codomain) for x in vectors]
        return cls(space, codomain, np.array(rows).reshape(len(rows), codomain.dim))

    @classmethod
    def zero(cls, space, codomain):
        return cls(space, codomain, np.zeros((len(space), codomain.dim), dtype=codomain.dtype))

    @classmethod
    def indicator(cls, space, codomain, x, s: SetOfPoints):
        """``x chi_s``."""
        space.check(s)
        v = np.zeros((len(space), codomain.dim), dtype=codomain.dtype)
        for i in s:
            v[i] = coords_of(x, codomain)
        return cls(space, codomain, v)

    def value(self, i) -> Vector:
        return Vector(self.values[i])

    def norms(self) -> np.ndarray:
        """Pointwise norms ``||f(s)||``."""
        return norm_rows(self.values, self.codomain.p)

    def restrict(self, s: SetOfPoints) -> SimpleFunction:
        """``f chi_s``."""
        self.space.check(s)
        mask = np.zeros(len(self.space), dtype=bool)
        mask[list(s.indices)] = True
        return self._new(np.where(mask[:, None], self.values, 0))

    def with_value(self, i, x) -> SimpleFunction:
        v = self.values.copy()
        v[i] = coords_of(x, self.codomain)
        return self._new(v)

    def _new(self, values):
        return SimpleFunction(self.space, self.codomain, values)

    def _other(self, g):
        if not isinstance(g, SimpleFunction):
            raise DimensionError("expected a SimpleFunction")
        if g.space != self.space or g.codomain != self.codomain:
            raise DimensionError("functions live on different spaces")
        return g.values

    def __add__(self, g):
        return self._new(self.values + self._other(g))

    def __sub__(self, g):
        return self._new(self.values - self._other(g))

    def __neg__(self):
        return self._new(-self.values)

    def __mul__(self, alpha):
        return self._new(alpha * self.values)

    __rmul__ = __mul__

    def to_rows(self):
        if self.codomain.is_complex:
            return [[[z.real, z.imag] for z in row] for row in self.values.tolist()]
        return self.values.tolist()

    def __repr__(self):
        return f"SimpleFunction(weights={self.space.weights.tolist()}, values={self.values.tolist()})"


def _same(f, g):
    f._other(g)


def _outer_p(p):
    p = float(p)
    if not (np.isfinite(p) and p >= 1):
        raise UnsupportedError(f"Bochner exponent must satisfy 1 <= p < inf, got {p!r}")
    return p


def lp_norm(f: SimpleFunction, p: float) -> float:
    p = _outer_p(p)
    n = f.norms()
    mu = f.space.weights
    m = float(n[mu > 0].max()) if np.any(mu > 0) else 0.0
    if m == 0.0:
        return 0.0
    return m * float(np.dot(mu, (n / m) ** p)) ** (1.0 / p)


def zero_set(f: SimpleFunction, tau: float = 0.0) -> SetOfPoints:
    """``{s : ||f(s)|| <= tau * max ||f||}``; ``tau = 0`` is the exact zero set."""
    n = f.norms()
    cut = tau * float(n.max()) if tau > 0 else 0.0
    return SetOfPoints(np.flatnonzero(n <= cut))


def cozero_set(f: SimpleFunction, tau: float = 0.0) -> SetOfPoints:
    return f.space.full() - zero_set(f, tau)


def _mask(s, n):
    m = np.zeros(n, dtype=bool)
    m[list(s.indices)] = True
    return m


def _require_smooth_codomain(f):
    if not f.codomain.is_smooth:
        raise UnsupportedError("the characterizations need a smooth codomain (inner 1 < p < inf)")


def l1_terms(f: SimpleFunction, g: SimpleFunction, tau: float = 0.0):
    """``(c, r)`` of the L^1 criterion."""
    _require_smooth_codomain(f)
    _same(f, g)
    mu = f.space.weights
    z = _mask(zero_set(f, tau), len(f.space))
    F = pointwise_support(f.values, g.values, f.codomain.p)
    c = np.dot(np.where(z, 0, mu), F)
    r = float(np.dot(np.where(z, mu, 0), g.norms()))
    c = complex(c) if f.codomain.is_complex else float(np.real(c))
    return c, r


def l1_terms_many(f: SimpleFunction, G, tau: float = 0.0):
    """``l1_terms(f, g)`` for a stack ``G`` of partner values, shape ``(k, points, dim)``."""
    _require_smooth_codomain(f)
    G = np.asarray(G)
    if G.ndim != 3 or G.shape[1:] != f.values.shape:
        raise DimensionError(f"expected partner values of shape (k, {len(f.space)}, {f.codomain.dim})")
    mu = f.space.weights
    z = _mask(zero_set(f, tau), len(f.space))
    c = pointwise_support(f.values, G, f.codomain.p) @ np.where(z, 0, mu)
    r = norm_rows(G, f.codomain.p) @ np.where(z, mu, 0)
    return (c if f.codomain.is_complex else np.real(c)), r


def lp_functional(f: SimpleFunction, g: SimpleFunction, p: float, tau: float = 0.0):
    """``sum_{Z(f)^c} mu ||f(s)||^(p-1) F_{f(s)}(g(s))``."""
    _require_smooth_codomain(f)
    _same(f, g)
    z = _mask(zero_set(f, tau), len(f.space))
    w = np.where(z, 0, f.space.weights * f.norms() ** (p - 1))
    e = np.dot(w, pointwise_support(f.values, g.values, f.codomain.p))
    return complex(e) if f.codomain.is_complex else float(np.real(e))


def bj_l1(f: SimpleFunction, g: SimpleFunction, tol: float = DEFAULT_TOL, tau: float = 0.0):
    """``f ⊥_BJ g`` in ``L^1(mu, X)`` through ``|c| <= r``.

    The threshold is relative to ``||g||_1``, which bounds both sides.
    """
    _require_smooth_codomain(f)
    _same(f, g)
    if lp_norm(f, 1.0) == 0.0:
        return make_verdict(0.0, 0.0, Rule.L1_CHARACTERIZATION, tol, degenerate=True)
    c, r = l1_terms(f, g, tau)
    gn = lp_norm(g, 1.0)
    return make_verdict(abs(c), r, Rule.L1_CHARACTERIZATION, tol, gn, degenerate=gn == 0.0)


def _lp_exponent(p):
    p = float(p)
    if not (np.isfinite(p) and p > 1):
        raise UnsupportedError(f"the L^p criterion needs 1 < p < inf, got p = {p!r}")
    return p


def bj_lp(f: SimpleFunction, g: SimpleFunction, p: float, tol: float = DEFAULT_TOL, tau: float = 0.0):
    """``f ⊥_BJ g`` in ``L^p(mu, X)``, ``1 < p < inf``, through the vanishing functional.

    The threshold is relative to ``||f||_p^(p-1) ||g||_p``.
    """
    p = _lp_exponent(p)
    _require_smooth_codomain(f)
    _same(f, g)
    fn = lp_norm(f, p)
    if fn == 0.0:
        return make_verdict(0.0, 0.0, Rule.LP_CHARACTERIZATION, tol, degenerate=True)
    e = lp_functional(f, g, p, tau)
    gn = lp_norm(g, p)
    return make_verdict(abs(e), 0.0, Rule.LP_CHARACTERIZATION, tol, fn ** (p - 1) * gn, degenerate=gn == 0.0)


def bj_characterization(f, g, p, tol=DEFAULT_TOL, tau=0.0):
    """``bj_l1`` for ``p = 1`` and ``bj_lp`` otherwise."""
    return bj_l1(f, g, tol, tau) if float(p) == 1.0 else bj_lp(f, g, p, tol, tau)


def oracle_tolerance(p: float, margin: float = 1e-6) -> float:
    """Oracle tolerance fine enough to see the norm dip of a pair at characterization margin ``margin``.

    The dip of a pair with functional value ``m`` shrinks like
    ``m^(p/(p-1))`` for ``1 < p < 2`` and like ``m^2`` otherwise (including
    ``p = 1``, where the cozero part of the norm is smooth). The tolerance
    follows that power with a safety factor of ``1e-6``, capped at
    ``DEFAULT_TOL``. For ``p = 1`` the objective can be flat along a segment,
    where rounding noise grows with ``|lam|``, so the tolerance never drops
    below ``1e-15``.
    """
    k = 2.0 if p == 1.0 else max(2.0, p / (p - 1.0))
    t = min(DEFAULT_TOL, 1e-6 * margin**k)
    return max(t, 1e-15) if p == 1.0 else t


def bj_oracle(f: SimpleFunction, g: SimpleFunction, p: float, tol: float = DEFAULT_TOL):
    """``f ⊥_BJ g`` in ``L^p(mu, X)`` straight from the definition; any ``p >= 1``."""
    p = _outer_p(p)
    _same(f, g)
    res = minimize_norm_change(
        f.values, g.values, f.space.weights, f.codomain.p, p, f.codomain.is_complex, tol
    )
    return _oracle_verdict(res, g, p, tol)


def bj_oracle_many(pairs, p: float, tol: float = DEFAULT_TOL):
    """``bj_oracle`` over a list of ``(f, g)`` pairs, searched in batches.

    ``tol`` is a scalar or one tolerance per pair.
    """
    p = _outer_p(p)
    out = [None] * len(pairs)
    tols = [float(t) for t in np.broadcast_to(np.asarray(tol, dtype=float), (len(pairs),))]
    groups = {}
    for i, (f, g) in enumerate(pairs):
        _same(f, g)
        groups.setdefault((f.codomain.p, f.codomain.is_complex), []).append(i)
    for (inner_p, is_complex), idx in groups.items():
        probs = [(pairs[i][0].values, pairs[i][1].values, pairs[i][0].space.weights) for i in idx]
        got = minimize_norm_change_many(probs, inner_p, p, [tols[i] for i in idx], is_complex)
        for i, res in zip(idx, got):
            out[i] = _oracle_verdict(res, pairs[i][1], p, tols[i])
    return out


def _oracle_verdict(res, g, p, tol):
    degenerate = res.f_norm == 0.0 or lp_norm(g, p) == 0.0
    return make_verdict(
        res.drop, 0.0, Rule.DEFINITION_ORACLE, tol, max(1.0, res.f_norm),
        degenerate=degenerate, argmin=res.argmin,
    )


def orthogonal_correction(f: SimpleFunction, g: SimpleFunction, p: float) -> SimpleFunction:
    """Shift ``g`` along ``f`` so that the orthogonality functional of ``f`` vanishes.

    ``p = 1``: ``g - (c / ||f||_1) f``; ``p > 1``: ``g - (e / ||f||_p^p) f``.
    Both use that the functional evaluated at ``f`` itself is ``||f||_1`` or
    ``||f||_p^p``.
    """
    p = _outer_p(p)
    if p == 1.0:
        c, _ = l1_terms(f, g)
        return g - (c / lp_norm(f, 1.0)) * f
    e = lp_functional(f, g, p)
    return g - (e / lp_norm(f, p) ** p) * f


def _slope(h, direction, mu, q, p):
    """Right derivative sign of ``t -> ||h + t direction||_q`` (up to a positive factor)."""
    F = np.real(pointwise_support(h.values, direction, p))
    if q == 1.0:
        zero = h.norms() == 0
        terms = np.where(zero, norm_rows(direction, p), F)
        return float(np.dot(mu, terms))
    return float(np.dot(mu * h.norms() ** (q - 1), F))


def orthogonalizing_scalar(g: SimpleFunction, f: SimpleFunction, p: float, tol: float = DEFAULT_TOL):
    """``alpha`` minimizing ``||g + alpha f||_p``, so that ``g + alpha f ⊥_BJ f``."""
    p = _outer_p(p)
    _require_smooth_codomain(f)
    _same(f, g)
    fn = lp_norm(f, p)
    if fn == 0.0:
        raise DomainError("cannot orthogonalize against f = 0")
    gn = lp_norm(g, p)
    if gn == 0.0:
        return complex(0.0) if f.codomain.is_complex else 0.0
    bound = 2.0 * gn / fn
    mu = f.space.weights
    ip = f.codomain.p
    if not f.codomain.is_complex:
        return bisect_increasing(lambda a: _slope(g + a * f, f.values, mu, p, ip), -bound, bound)
    a = b = 0.0
    i_f = 1j * f.values
    for _ in range(200):
        a_new = bisect_increasing(lambda t: _slope(g + complex(t, b) * f, f.values, mu, p, ip), -bound, bound)
        b_new = bisect_increasing(lambda t: _slope(g + complex(a_new, t) * f, i_f, mu, p, ip), -bound, bound)
        moved = abs(a_new - a) + abs(b_new - b)
        a, b = a_new, b_new
        if moved <= 1e-3 * tol * max(1.0, bound):
            break
    return complex(a, b)


class Kernel(str, Enum):
    F_AT_POINT = "F at f(s)"
    F_AT_S0 = "F at f(s0)"
    MINUS_F_AT_S0 = "-F at f(s0)"
    ZERO = "zero"


@dataclass(frozen=True)
class SupportMapWitness:
    """An element of ``L^inf(mu, X*)`` built pointwise from support functionals of ``f``.

    It acts on ``L^1(mu, X)`` by ``T(h) = sum_s mu(s) k_s(h(s))``.
    """

    base: SimpleFunction
    kernel: tuple
    s0: int

    def __call__(self, h: SimpleFunction):
        f = self.base
        _same(f, h)
        ip = f.codomain.p
        at_point = pointwise_support(f.values, h.values, ip)
        x0 = np.broadcast_to(f.values[self.s0], f.values.shape)
        at_s0 = pointwise_support(x0, h.values, ip)
        terms = np.zeros(len(f.space), dtype=np.result_type(at_point, at_s0))
        for s, k in enumerate(self.kernel):
            if k is Kernel.F_AT_POINT:
                terms[s] = at_point[s]
            elif k is Kernel.F_AT_S0:
                terms[s] = at_s0[s]
            elif k is Kernel.MINUS_F_AT_S0:
                terms[s] = -at_s0[s]
        t = np.dot(f.space.weights, terms)
        return complex(t) if f.codomain.is_complex else float(np.real(t))

    def norm(self) -> float:
        """``ess sup_s ||k_s||``: 1 for a support functional, 0 for the zero kernel."""
        mu = self.base.space.weights
        return max((0.0 if k is Kernel.ZERO else 1.0) for k, w in zip(self.kernel, mu) if w > 0)


def _zero_set_witness_data(f, tau):
    if lp_norm(f, 1.0) == 0.0:
        raise DomainError("f = 0 almost everywhere; smoothness is defined for nonzero f")
    space = f.space
    Z = zero_set(f, tau)
    coz = space.positive(space.full() - Z)
    s0 = min(coz.indices)
    Zpos = space.positive(Z)
    if not Zpos:
        return Z, s0, None
    w = space.weights
    A = SetOfPoints([max(Zpos.indices, key=lambda i: (w[i], -i))])
    return Z, s0, A


@dataclass(frozen=True)
class SmoothnessResult:
    smooth: bool
    zero_set: SetOfPoints
    zero_measure: float
    s0: int
    witnesses: tuple | None = None
    separator: SimpleFunction | None = None
    separator_values: tuple | None = None
    atom: SetOfPoints | None = None

    @property
    def status(self):
        return "smooth" if self.smooth else "not_smooth"


def _kernels(Z, n, on_zero):
    return tuple(on_zero if s in Z else Kernel.F_AT_POINT for s in range(n))


def smooth_l1(f: SimpleFunction, tau: float = 0.0) -> SmoothnessResult:
    """Smoothness of ``f`` in ``L^1(mu, X)``: smooth iff ``mu(Z(f)) = 0``.

    Otherwise two distinct support maps at ``f`` are returned: ``h1`` is zero on
    ``Z(f)`` and ``h2`` is ``F_{f(s0)}`` there. They disagree on
    ``p = f(s0) chi_A`` for an atom ``A`` inside ``Z(f)``.
    """
    _require_smooth_codomain(f)
    Z, s0, A = _zero_set_witness_data(f, tau)
    zm = measure_of(Z, f.space)
    if A is None:
        return SmoothnessResult(True, Z, zm, s0)
    n = len(f.space)
    h1 = SupportMapWitness(f, _kernels(Z, n, Kernel.ZERO), s0)
    h2 = SupportMapWitness(f, _kernels(Z, n, Kernel.F_AT_S0), s0)
    sep = SimpleFunction.indicator(f.space, f.codomain, f.values[s0], A)
    return SmoothnessResult(False, Z, zm, s0, (h1, h2), sep, (h1(sep), h2(sep)), A)


@dataclass(frozen=True)
class ApproxSmoothnessResult:
    approx_smooth: bool
    zero_measure: float
    s0: int
    witnesses: tuple | None = None
    test_function: SimpleFunction | None = None
    diameter_bound: float | None = None

    @property
    def status(self):
        return "approx_smooth" if self.approx_smooth else "not_approx_smooth"


def approx_smooth_l1(f: SimpleFunction, tau: float = 0.0) -> ApproxSmoothnessResult:
    """Approximate smoothness in ``L^1(mu, X)``; coincides with smoothness.

    When ``mu(Z(f)) > 0`` the support maps ``g1 = +F_{f(s0)}`` and
    ``g2 = -F_{f(s0)}`` on ``Z(f)`` satisfy ``|T1(h) - T2(h)| / ||h|| = 2`` for
    ``h = f(s0) chi_A``, so the support set has diameter 2.
    """
    _require_smooth_codomain(f)
    Z, s0, A = _zero_set_witness_data(f, tau)
    zm = measure_of(Z, f.space)
    if A is None:
        return ApproxSmoothnessResult(True, zm, s0)
    n = len(f.space)
    g1 = SupportMapWitness(f, _kernels(Z, n, Kernel.F_AT_S0), s0)
    g2 = SupportMapWitness(f, _kernels(Z, n, Kernel.MINUS_F_AT_S0), s0)
    h = SimpleFunction.indicator(f.space, f.codomain, f.values[s0], A)
    ratio = abs(g1(h) - g2(h)) / lp_norm(h, 1.0)
    return ApproxSmoothnessResult(False, zm, s0, (g1, g2), h, ratio)


def right_additive_at(f, g1, g2, tol=DEFAULT_TOL, tau=0.0):
    """``f ⊥ g1`` and ``f ⊥ g2`` imply ``f ⊥ g1 + g2`` (L^1 criterion)."""
    if bj_l1(f, g1, tol, tau).orthogonal and bj_l1(f, g2, tol, tau).orthogonal:
        return bj_l1(f, g1 + g2, tol, tau).orthogonal
    return True


def right_additive_many(f: SimpleFunction, G1, G2, tol: float = DEFAULT_TOL, tau: float = 0.0):
    """``right_additive_at`` over stacks of partner values; one bool per pair."""
    G1 = np.asarray(G1)
    G2 = np.asarray(G2)
    if lp_norm(f, 1.0) == 0.0:
        return np.ones(len(G1), dtype=bool)

    def orth(G):
        c, r = l1_terms_many(f, G, tau)
        gn = norm_rows(G, f.codomain.p) @ f.space.weights
        return np.abs(c) <= r + tol * np.where(gn > 0, gn, 1.0)

    return ~(orth(G1) & orth(G2)) | orth(G1 + G2)
