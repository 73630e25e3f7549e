"""Polynomial invariants: expressions that vanish on every model image.

For three nodes the model variety is cut out by the four 3x3 minors of a
4x3 Hankel-type matrix, given here both in probability and in moment
coordinates (the two are related by row operations).  For four or more
nodes two further generators are evaluated, the shortest quadric and cubic

    g21 = m23*m13 - m2*m134 - m13*m12 + m1*m124
    g31 = m12^3 - 2*m1*m12*m123 + m0*m123^2 + m1^2*m1234 - m0*m12*m1234

which vanish on every contiguous 4-node window of a model image but are
not consequences of the Hankel minors.  Vanishing on these invariants is
necessary, not sufficient, for membership: nonnegative non-model points
killing all of them exist.

The model map is homogeneous for the weights deg(b) = 0,
deg(a) = deg(c) = deg(u) = 1, deg(v) = 2, with each output coordinate m_v
of weight popcount(v); ``check_homogeneous`` verifies the scaling identity
at sample scale factors, which suffices for polynomial maps of bounded
degree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coords import MOMENT, PROBABILITY, Distribution, convert, window
from .params import BirationalParams
from .scalars import DEFAULT_TOL, to_float

WEIGHTS = {"a": 1, "b": 0, "c": 1, "u": 1, "v": 2}


def _det3_terms(M):
    """The six signed products of a 3x3 determinant."""
    return (
        M[0][0] * M[1][1] * M[2][2],
        M[0][1] * M[1][2] * M[2][0],
        M[0][2] * M[1][0] * M[2][1],
        -(M[0][2] * M[1][1] * M[2][0]),
        -(M[0][0] * M[1][2] * M[2][1]),
        -(M[0][1] * M[1][0] * M[2][2]),
    )


def _sum_with_scale(terms):
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    scale = max(abs(to_float(t)) for t in terms)
    return total, scale


def _hankel_rows_prob(p: Distribution):
    v = p.values
    return (
        (v[0b000] + v[0b001], v[0b000], v[0b100]),
        (v[0b010] + v[0b011], v[0b001], v[0b101]),
        (v[0b100] + v[0b101], v[0b010], v[0b110]),
        (v[0b110] + v[0b111], v[0b011], v[0b111]),
    )


def _hankel_rows_moment(m: Distribution):
    v = m.values
    return (
        (v[0b000], v[0b000], v[0b100]),
        (v[0b010], v[0b001], v[0b101]),
        (v[0b100], v[0b010], v[0b110]),
        (v[0b110], v[0b011], v[0b111]),
    )


def _four_minors(rows):
    values, scales = [], []
    for skip in (3, 2, 1, 0):
        sub = [rows[i] for i in range(4) if i != skip]
        value, scale = _sum_with_scale(_det3_terms(sub))
        values.append(value)
        scales.append(scale)
    return tuple(values), tuple(scales)


def hankel_minors_prob(p: Distribution):
    """The four 3x3 minors of the probability-coordinate Hankel matrix (n=3)."""
    p.require(PROBABILITY)
    if p.n != 3:
        raise ValueError("Hankel minors are defined for n = 3")
    return _four_minors(_hankel_rows_prob(p))[0]


def hankel_minors_moment(m: Distribution):
    """The four 3x3 minors of the moment-coordinate Hankel matrix (n=3)."""
    m.require(MOMENT)
    if m.n != 3:
        raise ValueError("Hankel minors are defined for n = 3")
    return _four_minors(_hankel_rows_moment(m))[0]


def _g21_terms(w: Distribution):
    return (
        w[(2, 3)] * w[(1, 3)],
        -(w[(2,)] * w[(1, 3, 4)]),
        -(w[(1, 3)] * w[(1, 2)]),
        w[(1,)] * w[(1, 2, 4)],
    )


def _g31_terms(w: Distribution):
    m0 = w.values[0]
    return (
        w[(1, 2)] ** 3,
        -(2 * w[(1,)] * w[(1, 2)] * w[(1, 2, 3)]),
        m0 * w[(1, 2, 3)] ** 2,
        w[(1,)] ** 2 * w[(1, 2, 3, 4)],
        -(m0 * w[(1, 2)] * w[(1, 2, 3, 4)]),
    )


def g21(m: Distribution, offset: int = 0):
    """The quadric four-node invariant on the window at ``offset``."""
    w = window(m, offset, 4)
    return _sum_with_scale(_g21_terms(w))[0]


def g31(m: Distribution, offset: int = 0):
    """The cubic four-node invariant on the window at ``offset``."""
    w = window(m, offset, 4)
    return _sum_with_scale(_g31_terms(w))[0]


def ebhmm_ideal_check(m: Distribution):
    """Generators of the equilibrium submodel ideal: (m1-m2, m2-m3, m12-m23).

    An equilibrium chain is shift-invariant, so the single-node moments
    agree and the two adjacent-pair moments agree.  The distance-two moment
    m13 is *not* tied to m12 (pair correlation decays with distance): on
    the equilibrium stratum m12 - m13 = b*(1-b)*(v - a^2), generically
    nonzero.
    """
    m.require(MOMENT)
    if m.n < 3:
        raise ValueError("need at least three nodes")
    return (
        m[(1,)] - m[(2,)],
        m[(2,)] - m[(3,)],
        m[(1, 2)] - m[(2, 3)],
    )


def weighted_degree(monomial: dict) -> int:
    """Weighted degree of a monomial given as exponents over a, b, c, u, v."""
    degree = 0
    for name, exponent in monomial.items():
        if name not in WEIGHTS:
            raise KeyError(f"unknown parameter {name!r}")
        if exponent < 0:
            raise ValueError("exponents must be nonnegative")
        degree += WEIGHTS[name] * exponent
    return degree


def scale_params(eta: BirationalParams, lam) -> BirationalParams:
    """Apply the weighted scaling (a, b, c, u, v) -> (la, b, lc, lu, l^2 v)."""
    return BirationalParams(
        lam * eta.a, eta.b, lam * eta.c, lam * eta.u, lam * lam * eta.v
    )


def check_homogeneous(map_eval, eta: BirationalParams, lambdas=(2, 3)) -> bool:
    """Verify the weighted-scaling identity for a moment-valued map.

    ``map_eval(eta)`` must return a moment Distribution; the check compares
    the image of the scaled parameters with the coordinate-wise scaled
    image, exactly, at each scale factor.
    """
    base = map_eval(eta)
    for lam in lambdas:
        scaled = map_eval(scale_params(eta, lam))
        for i, (lhs, rhs) in enumerate(zip(scaled.values, base.values)):
            if lhs != rhs * lam ** bin(i).count("1"):
                return False
    return True


@dataclass(frozen=True)
class InvariantReport:
    """Evaluations of a family of invariants on one distribution."""

    entries: tuple  # of (name, offset, value, vanished)
    all_vanished: bool
    max_abs: float


def _entry(name, offset, value, scale, tol, exact):
    if exact:
        vanished = value == 0
    else:
        vanished = abs(to_float(value)) <= tol * max(1.0, scale)
    return (name, offset, value, vanished)


def evaluate_invariants(
    d: Distribution,
    family: str = "all",
    offsets=None,
    tol: float = DEFAULT_TOL,
) -> InvariantReport:
    """Evaluate a named family of invariants, window by window.

    ``family`` is one of ``hankel3`` (needs n = 3, either coordinate
    system), ``bhmm4`` (g21 and g31 on each requested 4-window), ``ebhmm3``,
    or ``all``.  Float-mode vanishing is relative to the largest monomial
    term of each invariant.
    """
    entries = []
    exact = d.exact
    m = d if d.system == MOMENT else convert(d, MOMENT, tol=tol)
    wants = ("hankel3", "bhmm4", "ebhmm3") if family == "all" else (family,)
    for name in wants:
        if name == "hankel3":
            if d.n != 3:
                if family != "all":
                    raise ValueError("hankel3 requires n = 3")
                continue
            if d.system == PROBABILITY:
                rows = _hankel_rows_prob(d)
            else:
                rows = _hankel_rows_moment(m)
            values, scales = _four_minors(rows)
            for i, (value, scale) in enumerate(zip(values, scales)):
                entries.append(_entry(f"hankel3[{i}]", 0, value, scale, tol, exact))
        elif name == "bhmm4":
            if m.n < 4:
                if family != "all":
                    raise ValueError("bhmm4 requires n >= 4")
                continue
            use = offsets if offsets is not None else range(m.n - 3)
            for offset in use:
                w = window(m, offset, 4)
                for label, terms in (("g21", _g21_terms(w)), ("g31", _g31_terms(w))):
                    value, scale = _sum_with_scale(terms)
                    entries.append(_entry(label, offset, value, scale, tol, exact))
        elif name == "ebhmm3":
            for label, lhs, rhs in (
                ("m1-m2", m[(1,)], m[(2,)]),
                ("m2-m3", m[(2,)], m[(3,)]),
                ("m12-m13", m[(1, 2)], m[(1, 3)]),
            ):
                scale = max(abs(to_float(lhs)), abs(to_float(rhs)))
                entries.append(_entry(f"ebhmm3:{label}", 0, lhs - rhs, scale, tol, exact))
        else:
            raise ValueError(f"unknown invariant family {name!r}")
    return InvariantReport(
        entries=tuple(entries),
        all_vanished=all(e[3] for e in entries),
        max_abs=max((abs(to_float(e[2])) for e in entries), default=0.0),
    )
