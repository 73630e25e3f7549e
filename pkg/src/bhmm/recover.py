"""Parameter recovery from observed moments.

The generic inverse is triangular: each of b, u, a, c, v is a rational
expression in the six moments on the first three nodes, so recovery from
any n >= 3 distribution only reads that window.  Each denominator is a
"guard"; a vanishing guard means the point sits over one of the degenerate
strata, which carry their own everywhere-defined inverses:

* equilibrium chains (initial distribution fixed by T): four parameters
  (a, b, u, v) with c implied by c = a*(1-b);
* BINID (b = 0, first flip then iid flips): (alpha, beta) = (m1, m2);
* BIID (iid coin flips, v = 0): u = m1.

``classify`` chains these attempts most-generic-first and verifies every
candidate by forward comparison, so for inputs off the model it returns
``Undetermined`` instead of trusting guard logic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .coords import MOMENT, Distribution
from .params import BirationalParams, NoRealLift, NotInImage
from .scalars import DEFAULT_GUARD_TOL, DEFAULT_TOL, guard_ok, scalar_eq

GENERIC = "Generic"
EQUILIBRIUM = "Equilibrium"
BINID = "BINID"
BIID = "BIID"
UNDETERMINED = "Undetermined"


class GuardVanished(ArithmeticError):
    """A recovery denominator vanished (or fell below the float threshold)."""

    def __init__(self, guard: str, numerator, denominator):
        super().__init__(f"guard {guard} vanished: {denominator}")
        self.guard = guard
        self.numerator = numerator
        self.denominator = denominator


class EquilibriumParams(NamedTuple):
    """Parameters of an equilibrium chain; c is determined as a*(1-b)."""

    a: object
    b: object
    u: object
    v: object

    def to_birational(self) -> BirationalParams:
        return BirationalParams(self.a, self.b, self.a * (1 - self.b), self.u, self.v)


class BinidParams(NamedTuple):
    alpha: object
    beta: object


@dataclass(frozen=True)
class RecoveryOutcome:
    """Result of stratified recovery: stratum tag, parameters, guard trail."""

    stratum: str
    params: object = None
    guards: tuple = ()
    notes: tuple = ()


def _window3(m: Distribution):
    m.require(MOMENT)
    if m.n < 3:
        raise ValueError("recovery needs at least three nodes")
    return (
        m[(1,)],
        m[(2,)],
        m[(3,)],
        m[(1, 2)],
        m[(1, 3)],
        m[(2, 3)],
    )


def recover_generic(
    m: Distribution, tol_guard: float = DEFAULT_GUARD_TOL
) -> BirationalParams:
    """Triangular recovery of (a, b, c, u, v) from three-node moments.

    b = (m3-m2)/(m2-m1); u = (m1*m3 - m2**2 + m23 - m12)/(2*(m3-m2));
    a = m1 - u; c = a - b*a + m2 - m1; v = a**2 - (m1*m2 - m12)/b.
    Raises :class:`GuardVanished` when any denominator fails its guard.
    """
    m1, m2, m3, m12, _m13, m23 = _window3(m)
    d1 = m2 - m1
    if not guard_ok(m3 - m2, d1, tol_guard):
        raise GuardVanished("m2-m1", m3 - m2, d1)
    b = (m3 - m2) / d1
    d2 = m3 - m2
    u_num = m1 * m3 - m2 * m2 + m23 - m12
    if not guard_ok(u_num, 2 * d2, tol_guard):
        raise GuardVanished("m3-m2", u_num, d2)
    u = u_num / (2 * d2)
    a = m1 - u
    c = a - b * a + m2 - m1
    v_num = m1 * m2 - m12
    if not guard_ok(v_num, b, tol_guard):
        raise GuardVanished("b", v_num, b)
    v = a * a - v_num / b
    return BirationalParams(a, b, c, u, v)


def recover_equilibrium(
    m: Distribution, tol_guard: float = DEFAULT_GUARD_TOL
) -> EquilibriumParams:
    """Recovery on the equilibrium stratum.

    b = (m1**2 - m13)/(m1**2 - m12);
    u = (2*m1*m12 - m1*m13 - m123)/(2*(m1**2 - m13));
    a = m1 - u; v = (a**2*b - m1**2 + m12)/b.
    The guards vanish only over BINID points.
    """
    m.require(MOMENT)
    if m.n < 3:
        raise ValueError("recovery needs at least three nodes")
    m1 = m[(1,)]
    m12 = m[(1, 2)]
    m13 = m[(1, 3)]
    m123 = m[(1, 2, 3)]
    den_b = m1 * m1 - m12
    num_b = m1 * m1 - m13
    if not guard_ok(num_b, den_b, tol_guard):
        raise GuardVanished("m1^2-m12", num_b, den_b)
    b = num_b / den_b
    u_num = 2 * m1 * m12 - m1 * m13 - m123
    if not guard_ok(u_num, 2 * num_b, tol_guard):
        raise GuardVanished("m1^2-m13", u_num, num_b)
    u = u_num / (2 * num_b)
    a = m1 - u
    v_num = a * a * b - m1 * m1 + m12
    if not guard_ok(v_num, b, tol_guard):
        raise GuardVanished("b", v_num, b)
    v = v_num / b
    return EquilibriumParams(a, b, u, v)


def recover_binid(m: Distribution) -> BinidParams:
    """Everywhere-defined inverse on the b = 0 stratum: alpha = m1, beta = m2."""
    m.require(MOMENT)
    if m.n < 2:
        raise ValueError("BINID recovery needs at least two nodes")
    return BinidParams(m[(1,)], m[(2,)])


def recover_biid(m: Distribution):
    """Everywhere-defined inverse on the iid stratum: u = m1."""
    m.require(MOMENT)
    return m[(1,)]


def verify_binid(m: Distribution, params: BinidParams, tol: float = DEFAULT_TOL) -> bool:
    """Check the product structure m_I = alpha^[1 in I] * beta^|I - {1}|."""
    alpha, beta = params
    n = m.n
    top = 1 << (n - 1)
    for i, value in enumerate(m.values):
        expected = alpha if i & top else 1 + 0 * alpha
        rest = bin(i & ~top).count("1")
        expected = expected * beta**rest
        if not scalar_eq(value, expected, tol):
            return False
    return True


def verify_biid(m: Distribution, u, tol: float = DEFAULT_TOL) -> bool:
    """Check m_I = u^|I| for every subset."""
    for i, value in enumerate(m.values):
        if not scalar_eq(value, u ** bin(i).count("1"), tol):
            return False
    return True


def _verify_birational(m: Distribution, eta: BirationalParams, tol: float) -> bool:
    from .forward import psi_n

    try:
        image = psi_n(eta, m.n, tol=tol)
    except (NoRealLift, NotInImage):
        return False
    return all(scalar_eq(x, y, tol) for x, y in zip(image.values, m.values))


def classify(
    m: Distribution,
    tol: float = DEFAULT_TOL,
    tol_guard: float = DEFAULT_GUARD_TOL,
) -> RecoveryOutcome:
    """Stratified recovery with forward verification of every candidate.

    Attempts, in order of stratum dimension: generic, equilibrium, BINID,
    BIID.  The BINID stage defers to BIID when alpha = beta, since such
    points are iid.  Candidates only count when the full forward image
    reproduces the input, so non-model inputs end in ``Undetermined``
    together with the recorded guard failures.
    """
    m.require(MOMENT)
    if m.n < 3:
        raise ValueError("classification needs at least three nodes")
    guards = []
    notes = []

    try:
        eta = recover_generic(m, tol_guard)
        if _verify_birational(m, eta, tol):
            return RecoveryOutcome(GENERIC, eta, tuple(guards), tuple(notes))
        notes.append("generic recovery did not reproduce the input")
        if eta.v < 0:
            notes.append("recovered v < 0: no real parameters")
    except GuardVanished as g:
        guards.append((GENERIC, g.guard, g.denominator))

    try:
        eq = recover_equilibrium(m, tol_guard)
        if _verify_birational(m, eq.to_birational(), tol):
            return RecoveryOutcome(EQUILIBRIUM, eq, tuple(guards), tuple(notes))
        notes.append("equilibrium recovery did not reproduce the input")
    except GuardVanished as g:
        guards.append((EQUILIBRIUM, g.guard, g.denominator))

    binid = recover_binid(m)
    if scalar_eq(binid.alpha, binid.beta, tol):
        notes.append("alpha = beta: BINID candidate deferred to BIID")
    elif verify_binid(m, binid, tol):
        return RecoveryOutcome(BINID, binid, tuple(guards), tuple(notes))
    else:
        notes.append("BINID product structure failed")

    u = recover_biid(m)
    if verify_biid(m, u, tol):
        return RecoveryOutcome(BIID, u, tuple(guards), tuple(notes))
    notes.append("BIID structure failed")

    return RecoveryOutcome(UNDETERMINED, None, tuple(guards), tuple(notes))
