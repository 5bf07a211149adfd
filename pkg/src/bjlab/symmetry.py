"""Left and right symmetry of points of L^p(mu, X) with respect to B-J orthogonality.

The functions here either build explicit witnesses that a point is not
left (or right) symmetric, or check the partial converses on randomly
sampled partners. Witness constructions:

``zero-set-bump``        L^1, ``mu(Z(f)) > 0``: ``h = f chi_{Z(f)^c} + (||f||/mu(A)) x0 chi_A``.
``three-piece-balance``  L^1, three atoms in ``Z(f)^c``: ``g = b1 f chi_Q - b2 f chi_{Q^c}``.
``cozero-split``         L^1, two atoms in ``Z(f)^c``: ``g = f chi_B``.
``lp-balance-left``      L^p, three atoms: ``g = b1 f chi_Q - b2 f chi_{Q^c}``, p-th power masses.
``lp-balance-right``     L^p, three atoms: exponents ``1/(p-1)`` on ``b1``, ``b2``.
``two-slot-rescale``     l^p(X), two unequal slots.
``two-slot-rotation``    l^p(H), two equal slots, rotate one slot by an orthogonal ``x0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bochner import (
    FUZZ_ZERO_TAU,
    SimpleFunction,
    bj_characterization,
    bj_l1,
    bj_lp,
    bj_oracle,
    cozero_set,
    lp_functional,
    lp_norm,
    oracle_tolerance,
    orthogonal_correction,
    orthogonalizing_scalar,
    zero_set,
)
from .errors import DomainError, UnsupportedError
from .measure import CozeroStructure, MeasureSpace, SetOfPoints, cozero_structure, measure_of
from .scalar_spaces import (
    DEFAULT_TOL,
    OrthoVerdict,
    ScalarSpace,
    bj_oracle_vectors_many,
    coords_of,
    find_orthogonalizing_scalar,
    p_norm,
    support_functional,
)

WITNESS_MARGIN_FACTOR = 10.0


class Claim(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class Outcome(str, Enum):
    WITNESS_FOUND = "witness_found"
    NO_WITNESS_FOUND = "no_witness_found"
    HYPOTHESIS_VIOLATED = "hypothesis_violated"


@dataclass(frozen=True)
class SymmetryReport:
    """Result of a symmetry probe.

    For a witness, ``pair = (a, b)`` is ordered so that ``a ⊥ b`` holds and
    ``b ⊥ a`` fails; ``verdicts`` are those two tests in that order. For a
    left claim ``a`` is the subject, for a right claim ``b`` is.
    """

    subject: SimpleFunction
    claim: Claim
    verdict: Outcome
    construction: str
    p: float
    witness: SimpleFunction | None = None
    pair: tuple | None = None
    verdicts: tuple | None = None
    residual: float | complex | None = None
    tolerance: float = DEFAULT_TOL
    detail: dict = field(default_factory=dict)

    @property
    def found(self):
        return self.verdict is Outcome.WITNESS_FOUND

    def replay_tolerance(self):
        """Oracle tolerance matched to the recorded backward margin.

        A witness with a small but genuine margin has a norm dip far below
        ``self.tolerance``, so the default replay tightens the oracle the same
        way the fuzzing harness does.
        """
        m = abs(self.verdicts[1].margin) if self.verdicts else 1e-6
        return min(self.tolerance, oracle_tolerance(self.p, m))

    def replay(self, tol=None):
        """Re-decide both orderings of the witness pair with the definition oracle."""
        if self.pair is None:
            raise DomainError("report carries no witness pair")
        tol = self.replay_tolerance() if tol is None else tol
        a, b = self.pair
        return bj_oracle(a, b, self.p, tol), bj_oracle(b, a, self.p, tol)

    def replay_agrees(self, tol=None):
        forward, backward = self.replay(tol)
        return forward.orthogonal and not backward.orthogonal

    def to_dict(self):
        d = {
            "claim": self.claim.value,
            "verdict": self.verdict.value,
            "construction": self.construction,
            "p": self.p,
            "tolerance": self.tolerance,
        }
        if self.witness is not None:
            d["witness"] = self.witness.to_rows()
        if self.verdicts is not None:
            d["verdicts"] = [v.to_dict() for v in self.verdicts]
        if self.residual is not None:
            r = self.residual
            d["residual"] = [r.real, r.imag] if isinstance(r, complex) else float(r)
        if self.detail:
            d["detail"] = _jsonable(self.detail)
        return d


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, SetOfPoints):
        return sorted(obj.indices)
    return obj


def _nonzero(f):
    if lp_norm(f, 1.0) == 0.0:
        raise DomainError("the symmetry constructions need f != 0")


def _witness(subject, claim, construction, p, a, b, forward, backward, residual, tol, detail):
    """Package a verified pair; a failed verification is reported, never hidden."""
    ok = (
        forward.orthogonal
        and not backward.orthogonal
        and -backward.margin >= WITNESS_MARGIN_FACTOR * tol
    )
    witness = b if claim is Claim.LEFT else a
    detail = dict(detail)
    if not ok:
        detail["verification"] = "failed"
    return SymmetryReport(
        subject,
        claim,
        Outcome.WITNESS_FOUND if ok else Outcome.NO_WITNESS_FOUND,
        construction,
        p,
        witness,
        (a, b),
        (forward, backward),
        residual,
        tol,
        detail,
    )


def _none(subject, claim, p, tol, **detail):
    return SymmetryReport(subject, claim, Outcome.NO_WITNESS_FOUND, "none", p, tolerance=tol, detail=detail)


def _ordered_masses(f, pieces, power):
    """Positive-weight points of ``pieces`` sorted by ``mu(s) ||f(s)||^power``."""
    mu = f.space.weights
    n = f.norms()
    masses = {i: mu[i] * n[i] ** power for i in pieces.indices}
    return sorted(masses, key=lambda i: (masses[i], i)), masses


def left_witness_l1(f: SimpleFunction, tol: float = DEFAULT_TOL, tau: float = 0.0) -> SymmetryReport:
    """Try to show that ``f`` is not left symmetric in ``L^1(mu, X)``."""
    _nonzero(f)
    space = f.space
    Z = zero_set(f, tau)
    coz = cozero_set(f, tau)
    zpos = space.positive(Z)
    cpos = space.positive(coz)
    detail = {"cozero_structure": cozero_structure(coz, space), "zero_measure": measure_of(Z, space)}
    if zpos:
        w = space.weights
        a = max(zpos.indices, key=lambda i: (w[i], -i))
        A = SetOfPoints([a])
        norm1 = lp_norm(f, 1.0)
        x0 = f.codomain.basis(0)
        h = f.restrict(coz) + SimpleFunction.indicator(space, f.codomain, x0 * (norm1 / w[a]), A)
        forward = bj_l1(f, h, tol, tau)
        backward = bj_l1(h, f, tol, tau)
        detail["atom"] = a
        return _witness(f, Claim.LEFT, "zero-set-bump", 1.0, f, h, forward, backward, norm1, tol, detail)
    if len(cpos) >= 3:
        order, masses = _ordered_masses(f, cpos, 1.0)
        q = order[0]
        b2 = masses[q]
        b1 = math.fsum(masses[i] for i in order[1:])
        Q = SetOfPoints([q])
        g = b1 * f.restrict(Q) - b2 * f.restrict(space.full() - Q)
        forward = bj_l1(f, g, tol, tau)
        backward = bj_l1(g, f, tol, tau)
        detail.update(Q=q, beta1=b1, beta2=b2)
        return _witness(f, Claim.LEFT, "three-piece-balance", 1.0, f, g, forward, backward, b1 - b2, tol, detail)
    return _none(f, Claim.LEFT, 1.0, tol, **detail)


def right_witness_l1(f: SimpleFunction, tol: float = DEFAULT_TOL, tau: float = 0.0, B=None) -> SymmetryReport:
    """Try to show that ``f`` is not right symmetric in ``L^1(mu, X)``.

    ``B`` defaults to the cozero atom of least ``mu ||f||``.
    """
    _nonzero(f)
    space = f.space
    coz = cozero_set(f, tau)
    cpos = space.positive(coz)
    detail = {"cozero_structure": cozero_structure(coz, space)}
    if len(cpos) < 2:
        return _none(f, Claim.RIGHT, 1.0, tol, **detail)
    order, masses = _ordered_masses(f, cpos, 1.0)
    B = SetOfPoints([order[0]]) if B is None else space.check(SetOfPoints(B))
    rest = coz - B
    if not space.positive(B) or not space.positive(rest):
        raise DomainError("B must split the cozero set into two pieces of positive measure")
    on_b = math.fsum(masses.get(i, 0.0) for i in B.indices)
    on_rest = math.fsum(masses.get(i, 0.0) for i in rest.indices)
    support, mass = (B, on_b) if on_b <= on_rest else (rest, on_rest)
    g = f.restrict(support)
    forward = bj_l1(g, f, tol, tau)
    backward = bj_l1(f, g, tol, tau)
    detail.update(B=B, mass_B=on_b, mass_rest=on_rest)
    return _witness(f, Claim.RIGHT, "cozero-split", 1.0, g, f, forward, backward, mass, tol, detail)


def _bochner_exponent_not_two(p):
    p = float(p)
    if p == 2.0:
        raise UnsupportedError("p = 2 is excluded: L^2(mu, H) is a Hilbert space where orthogonality is symmetric")
    if not (math.isfinite(p) and p > 1):
        raise UnsupportedError(f"needs 1 < p < inf, got {p!r}")
    return p


def lp_witnesses(f: SimpleFunction, p: float, tol: float = DEFAULT_TOL, tau: float = 0.0):
    """``(left, right)`` reports for ``f`` in ``L^p(mu, X)``, ``p != 2``."""
    p = _bochner_exponent_not_two(p)
    _nonzero(f)
    space = f.space
    coz = cozero_set(f, tau)
    cpos = space.positive(coz)
    detail = {"cozero_structure": cozero_structure(coz, space)}
    if len(cpos) < 3:
        return _none(f, Claim.LEFT, p, tol, **detail), _none(f, Claim.RIGHT, p, tol, **detail)
    order, masses = _ordered_masses(f, cpos, p)
    q = order[0]
    b2 = masses[q]
    b1 = math.fsum(masses[i] for i in order[1:])
    Q = SetOfPoints([q])
    fQ = f.restrict(Q)
    fQc = f.restrict(space.full() - Q)
    detail.update(Q=q, beta1=b1, beta2=b2)

    g = b1 * fQ - b2 * fQc
    expected = b1 ** (p - 1) * b2 - b2 ** (p - 1) * b1
    left = _witness(
        f, Claim.LEFT, "lp-balance-left", p, f, g,
        bj_lp(f, g, p, tol, tau), bj_lp(g, f, p, tol, tau),
        lp_functional(g, f, p, tau), tol, dict(detail, expected_residual=expected),
    )

    e = 1.0 / (p - 1)
    g = b1**e * fQ - b2**e * fQc
    expected = b1**e * b2 - b2**e * b1
    right = _witness(
        f, Claim.RIGHT, "lp-balance-right", p, g, f,
        bj_lp(g, f, p, tol, tau), bj_lp(f, g, p, tol, tau),
        lp_functional(f, g, p, tau), tol, dict(detail, expected_residual=expected),
    )
    return left, right


def _hypotheses(f, p, claim):
    """Reasons the partial converse does not apply (empty list if it does)."""
    reasons = []
    if not f.codomain.is_hilbert:
        reasons.append("codomain is not a Hilbert space, so pointwise symmetry is not certified")
    coz = cozero_set(f)
    structure = cozero_structure(coz, f.space)
    if structure is not CozeroStructure.ONE_ATOM:
        reasons.append(f"cozero set is {structure.value}, not one atom")
    if p == 1.0 and claim is Claim.LEFT and measure_of(zero_set(f), f.space) > 0:
        reasons.append("f vanishes on a set of positive measure, so it is not smooth")
    return reasons


def _random_values(rng, f, zero_prob=0.2):
    n, d = f.values.shape
    v = rng.standard_normal((n, d))
    if f.codomain.is_complex:
        v = v + 1j * rng.standard_normal((n, d))
    v[rng.random(n) < zero_prob] = 0
    return SimpleFunction(f.space, f.codomain, v)


def partial_converse_check(
    f: SimpleFunction,
    p: float,
    trials: int,
    claim: Claim | str = Claim.LEFT,
    *,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    diagnostic: bool = False,
    tau: float = FUZZ_ZERO_TAU,
) -> SymmetryReport:
    """Sample partners ``g`` and check that symmetry of ``f`` is never violated.

    Left: draw ``g`` with ``f ⊥ g`` by exact correction along ``f``, then demand
    ``g ⊥ f``. Right: draw ``g``, move it to the minimizer of
    ``||g + alpha f||`` (so ``g ⊥ f``), then demand ``f ⊥ g``. Both directions
    are decided by the characterization and by the definition oracle. A draw
    whose constructed relation fails numerically is skipped; ``detail["checked"]``
    counts the draws that were actually tested, and draws whose partner
    cancels to rounding level are skipped as degenerate. Entries of a constructed
    partner below ``tau`` times its largest entry are treated as zero, since
    for ``p < 2`` the factor ``||g||^(p-1)`` magnifies rounding residue.
    """
    claim = Claim(claim)
    p = float(p)
    _nonzero(f)
    reasons = _hypotheses(f, p, claim)
    hard = [r for r in reasons if "Hilbert" not in r] if diagnostic else reasons
    if hard:
        return SymmetryReport(
            f, claim, Outcome.HYPOTHESIS_VIOLATED, "random-partner", p, tolerance=tol, detail={"reasons": reasons}
        )
    rng = np.random.default_rng(seed)
    checked = 0
    for t in range(int(trials)):
        g = _random_values(rng, f)
        if claim is Claim.LEFT:
            a, b = f, orthogonal_correction(f, g, p)
            partner = b
        else:
            a, b = g + orthogonalizing_scalar(g, f, p, tol) * f, f
            partner = a
        if lp_norm(partner, p) <= tau * lp_norm(g, p):
            # g was numerically parallel to f; the partner is 0 up to rounding
            continue
        # a ⊥ b holds by construction; the claim is b ⊥ a
        given = bj_characterization(a, b, p, tol, tau)
        if not given.orthogonal:
            continue
        checked += 1
        char = bj_characterization(b, a, p, tol, tau)
        orc = bj_oracle(b, a, p, tol)
        if not (char.orthogonal and orc.orthogonal):
            witness = b if claim is Claim.LEFT else a
            return SymmetryReport(
                f, claim, Outcome.WITNESS_FOUND, "random-partner", p, witness, (a, b),
                (given, char), char.lhs, tol,
                {"trial": t, "oracle": orc.to_dict(), "diagnostic": diagnostic, "reasons": reasons},
            )
    return SymmetryReport(
        f, claim, Outcome.NO_WITNESS_FOUND, "random-partner", p, tolerance=tol,
        detail={"trials": int(trials), "checked": checked, "diagnostic": diagnostic, "reasons": reasons},
    )


def _orthogonal_direction(x, space):
    """A nonzero vector orthogonal to ``x`` in a Hilbert space, with ``||x0|| = ||x||``."""
    c = coords_of(x, space)
    k = int(np.argmin(np.abs(c)))
    e = np.zeros(space.dim, dtype=space.dtype)
    e[k] = 1
    v = e - (np.vdot(c, e) / np.vdot(c, c)) * c
    return v * (np.linalg.norm(c) / np.linalg.norm(v))


def sequence_space_classify(x, p: float, codomain: ScalarSpace, tol: float = DEFAULT_TOL) -> SymmetryReport:
    """Classify a finitely supported ``x`` in ``l^p(X)`` and build a left-symmetry witness if one exists."""
    p = _bochner_exponent_not_two(p)
    space = MeasureSpace(np.ones(len(x)))
    f = SimpleFunction.from_vectors(space, codomain, x)
    if not np.any(f.values):
        raise DomainError("x = 0 has no symmetry classification here")
    support = sorted(cozero_set(f).indices)
    if len(support) >= 3:
        return lp_witnesses(f, p, tol)[0]
    if len(support) == 1:
        return _none(f, Claim.LEFT, p, tol, support=support)
    n, m = support
    xn, xm = f.values[n], f.values[m]
    a = p_norm(xn, codomain)
    b = p_norm(xm, codomain)
    y = np.zeros_like(f.values)
    if not math.isclose(a, b, rel_tol=1e-12):
        y[n] = (b ** (p - 1) / a) * xn
        y[m] = -(a ** (p - 1) / b) * xm
        expected = b ** ((p - 1) ** 2) * a - a ** ((p - 1) ** 2) * b
        construction = "two-slot-rescale"
    elif codomain.is_hilbert and codomain.dim >= 2:
        x0 = _orthogonal_direction(xn, codomain)
        y[n] = -xn + x0
        y[m] = xm
        yn = p_norm(y[n], codomain)
        ym = p_norm(y[m], codomain)
        expected = -(a**2) * (yn ** (p - 2) - ym ** (p - 2))
        construction = "two-slot-rotation"
    else:
        return _none(f, Claim.LEFT, p, tol, support=support, reason="equal norms outside a Hilbert space")
    g = SimpleFunction(space, codomain, y)
    return _witness(
        f, Claim.LEFT, construction, p, f, g,
        bj_lp(f, g, p, tol), bj_lp(g, f, p, tol),
        lp_functional(g, f, p), tol, {"support": support, "expected_residual": expected},
    )


@dataclass(frozen=True)
class RsilResult:
    passed: bool
    trials: int
    max_abs_alpha: float
    alphas: np.ndarray
    diagnostic: bool = False
    witness: np.ndarray | None = None
    reason: str = ""

    @property
    def status(self):
        return "pass" if self.passed else "fail"


def rsil_check(
    x,
    space: ScalarSpace,
    trials: int,
    *,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    alpha_tol: float = 1e-8,
    diagnostic: bool = False,
) -> RsilResult:
    """Right symmetric + smooth implies left symmetric, checked on random ``y`` with ``x ⊥ y``.

    For each ``y`` the scalar ``alpha`` with ``alpha x + y ⊥ x`` must vanish and
    ``y ⊥ x`` must hold. Right symmetry of ``x`` is only certified in Hilbert
    spaces; elsewhere pass ``diagnostic=True`` to record the ``alpha`` values
    without asserting.
    """
    if not space.is_smooth:
        raise UnsupportedError("needs a smooth space, 1 < p < inf")
    cx = coords_of(x, space)
    if not np.any(cx):
        raise DomainError("x must be nonzero")
    if not space.is_hilbert and not diagnostic:
        raise DomainError("right symmetry of x is only certified in Hilbert spaces; use diagnostic=True")
    rng = np.random.default_rng(seed)
    nx = p_norm(cx, space)
    ys = []
    alphas = []
    for _ in range(int(trials)):
        y = rng.standard_normal(space.dim)
        if space.is_complex:
            y = y + 1j * rng.standard_normal(space.dim)
        y = y - (support_functional(cx, y, space) / nx) * cx
        ys.append(y)
        alphas.append(find_orthogonalizing_scalar(y, cx, space, tol))
    alphas = np.array(alphas)
    amax = float(np.max(np.abs(alphas))) if alphas.size else 0.0
    if diagnostic:
        return RsilResult(True, len(alphas), amax, alphas, True)
    bad_alpha = np.flatnonzero(np.abs(alphas) > alpha_tol)
    first = int(bad_alpha[0]) if bad_alpha.size else len(ys)
    verdicts = bj_oracle_vectors_many([(y, cx) for y in ys[:first]], space, tol)
    bad_orth = [k for k, v in enumerate(verdicts) if not v.orthogonal]
    if bad_orth:
        k = bad_orth[0]
        return RsilResult(False, k + 1, float(np.max(np.abs(alphas[:k + 1]))), alphas[:k + 1], False, ys[k], "y not ⊥ x")
    if bad_alpha.size:
        k = first
        return RsilResult(False, k + 1, float(np.max(np.abs(alphas[:k + 1]))), alphas[:k + 1], False, ys[k], "alpha != 0")
    return RsilResult(True, len(alphas), amax, alphas, False)
