"""Forward modeling maps: parameters to observed distributions.

``phi_bruteforce`` is the reference oracle, a literal sum over the 2**n
hidden strings.  ``phi_baum`` evaluates the same map through 2x2 matrix
products (one row-vector product per prefix, shared across extensions), in
probability coordinates via the matrices P_i and in moment coordinates via
M0 = T, M1 = P1, M2 = ones*pi.

``psi_n`` is the induced map on the swap-invariant coordinates
(a, b, c, u, v); its n = 3 instance ``psi3`` is hard-coded as eight
polynomials and doubles as an oracle for the general evaluation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product

from .coords import CUMULANT, MOMENT, PROBABILITY, Distribution, moment_to_cumulant
from .params import (
    BirationalParams,
    LinearParams,
    ParameterError,
    StochasticParams,
    from_linear,
    lift,
)
from .scalars import DEFAULT_TOL, scalar_eq, to_float


@dataclass(frozen=True)
class BaumMatrices:
    """The 2x2 matrices behind the matrix-product form of the model map.

    (P_i)[j][k] = E[j][i] * T[j][k] is the probability of emitting i and
    moving j -> k.  M0 = P0 + P1 equals T when E has unit row sums; M1 = P1;
    M2 = ones * pi has both rows equal to pi, so trace(M2 X) = pi X ones.
    """

    P0: tuple
    P1: tuple
    M0: tuple
    M1: tuple
    M2: tuple

    @classmethod
    def from_params(cls, theta: StochasticParams) -> "BaumMatrices":
        T, E, pi = theta.T, theta.E, theta.pi
        P = [
            tuple(tuple(E[j][i] * T[j][k] for k in (0, 1)) for j in (0, 1))
            for i in (0, 1)
        ]
        M0 = tuple(
            tuple(P[0][j][k] + P[1][j][k] for k in (0, 1)) for j in (0, 1)
        )
        M2 = (tuple(pi), tuple(pi))
        return cls(P[0], P[1], M0, P[1], M2)


def _prefix_row_products(row, mats, n: int):
    """All dot(row * A_{v1} ... A_{vn}, ones) in binary-string index order."""
    rows = [tuple(row)]
    for _ in range(n):
        nxt = []
        for r in rows:
            r0, r1 = r
            for m in mats:
                nxt.append(
                    (r0 * m[0][0] + r1 * m[1][0], r0 * m[0][1] + r1 * m[1][1])
                )
        rows = nxt
    return [r0 + r1 for r0, r1 in rows]


def phi_bruteforce(theta: StochasticParams, n: int, tol: float = DEFAULT_TOL) -> Distribution:
    """Observed distribution by marginalizing over all hidden strings.

    p_v = sum over h of pi[h1] E[h1,v1] * prod_i T[h(i-1),hi] E[hi,vi].
    O(4**n) reference implementation, kept independent of the matrix-product
    path: for each hidden string the emission factors are expanded over all
    v by iterated outer products.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pi, T, E = theta.pi, theta.T, theta.E
    values = [0] * (1 << n)
    for h in product((0, 1), repeat=n):
        w = pi[h[0]]
        for i in range(1, n):
            w = w * T[h[i - 1]][h[i]]
        emit = [w]
        for hi in h:
            e0, e1 = E[hi]
            emit = [x * e for x in emit for e in (e0, e1)]
        values = [acc + x for acc, x in zip(values, emit)]
    return Distribution(n, PROBABILITY, values, tol=tol)


def phi_baum(
    theta: StochasticParams,
    n: int,
    system: str = PROBABILITY,
    tol: float = DEFAULT_TOL,
) -> Distribution:
    """Model map via shared prefix products of the Baum matrices.

    Probability coordinates use p_v = pi P_{v1} ... P_{vn} ones; moment
    coordinates use m_v = trace(M2 M_{v1} ... M_{vn}) = pi M_{v1} ... M_{vn}
    ones.  Cumulants are converted from moments.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    mats = BaumMatrices.from_params(theta)
    if system == PROBABILITY:
        vals = _prefix_row_products(theta.pi, (mats.P0, mats.P1), n)
        return Distribution(n, PROBABILITY, vals, tol=tol)
    vals = _prefix_row_products(theta.pi, (mats.M0, mats.M1), n)
    moments = Distribution(n, MOMENT, vals, tol=tol)
    if system == MOMENT:
        return moments
    if system == CUMULANT:
        return moment_to_cumulant(moments, tol=tol)
    raise ValueError(f"unknown coordinate system {system!r}")


def psi3(eta: BirationalParams, tol: float = DEFAULT_TOL) -> Distribution:
    """Three-node moments as explicit polynomials in (a, b, c, u, v).

    Total on all of parameter space (no sign or positivity conditions).
    """
    a, b, c, u, v = eta.astuple()
    m = [0] * 8
    m[0b000] = 1 + 0 * u
    m[0b100] = a + u
    m[0b010] = a * b + c + u
    m[0b001] = a * b * b + b * c + c + u
    m[0b110] = a * b * u + a * c + a * u + c * u + u * u + b * v
    m[0b101] = (
        a * b * b * u + a * b * c + b * c * u + b * b * v
        + a * c + a * u + c * u + u * u
    )
    m[0b011] = (
        a * b * b * u + a * b * c + a * b * u + b * c * u
        + c * c + 2 * c * u + u * u + b * v
    )
    m[0b111] = (
        a * b * b * u * u + 2 * a * b * c * u + a * b * u * u + b * c * u * u
        + b * b * u * v + a * c * c + 2 * a * c * u + c * c * u + a * u * u
        + 2 * c * u * u + u * u * u + a * b * v + b * c * v + 2 * b * u * v
    )
    return Distribution(3, MOMENT, m, tol=tol)


def psi_n(eta: BirationalParams, n: int, tol: float = DEFAULT_TOL) -> Distribution:
    """Moments of the n-node model at swap-invariant coordinates.

    Evaluated through a real lift (sign +1); the output is sign-independent
    because every moment is a polynomial in (a, b, c, u, v).  Requires
    v >= 0, with v = 0 admissible only when a = c = 0; non-square rational v
    is handled exactly through surd arithmetic and the results collapse back
    to rationals.
    """
    eta0 = lift(eta, 1)
    out = phi_baum(from_linear(eta0, tol=tol), n, MOMENT, tol=tol)
    return out


TRACE_WORDS = (
    "M0", "M1", "M2", "M0^2", "M1^2", "M2^2", "M0*M1", "M0*M2", "M1*M2", "M0*M1*M2",
)


def _mat_mul(A, B):
    return tuple(
        tuple(A[i][0] * B[0][j] + A[i][1] * B[1][j] for j in (0, 1)) for i in (0, 1)
    )


def _trace(A):
    return A[0][0] + A[1][1]


def trace_generators(eta0: LinearParams, tol: float = DEFAULT_TOL):
    """The ten generating traces of words in (M0, M1, M2).

    Computed twice -- by literal matrix arithmetic and by the closed forms
    in (a, b, c, u, v) -- and cross-checked before returning.  The closed
    forms witness that every observable moment lies in the swap-invariant
    subring: three of the traces are identically 1, and trace(M1 M2) is the
    first moment a + u.
    """
    theta = from_linear(eta0, tol=tol)
    mats = BaumMatrices.from_params(theta)
    M0, M1, M2 = mats.M0, mats.M1, mats.M2
    matrix_path = (
        _trace(M0),
        _trace(M1),
        _trace(M2),
        _trace(_mat_mul(M0, M0)),
        _trace(_mat_mul(M1, M1)),
        _trace(_mat_mul(M2, M2)),
        _trace(_mat_mul(M0, M1)),
        _trace(_mat_mul(M0, M2)),
        _trace(_mat_mul(M1, M2)),
        _trace(_mat_mul(_mat_mul(M0, M1), M2)),
    )
    a0, b, c0, u, v0 = eta0.astuple()
    a, c, v = a0 * v0, c0 * v0, v0 * v0
    one = 1 + 0 * b
    closed_form = (
        b + 1,
        b * u + c + u,
        one,
        b * b + 1,
        b * b * u * u + 2 * b * c * u + c * c + 2 * c * u + u * u + 2 * b * v,
        one,
        b * b * u + b * c + c + u,
        one,
        a + u,
        a * b + c + u,
    )
    for word, lhs, rhs in zip(TRACE_WORDS, matrix_path, closed_form):
        if not scalar_eq(lhs, rhs, tol):
            raise ArithmeticError(
                f"trace({word}) disagrees between matrix and closed form: {lhs} vs {rhs}"
            )
    return closed_form


def sample_sequences(
    theta: StochasticParams, n: int, count: int, seed: int
) -> list[str]:
    """Draw ``count`` iid visible strings of length n; seeded, reproducible."""
    if not theta.stochastic:
        raise ParameterError("sampling requires stochastic parameters")
    if n < 1 or count < 0:
        raise ValueError("need n >= 1 and count >= 0")
    rng = random.Random(seed)
    pi1 = to_float(theta.pi[1])
    t1 = [to_float(theta.T[0][1]), to_float(theta.T[1][1])]
    e1 = [to_float(theta.E[0][1]), to_float(theta.E[1][1])]
    out = []
    for _ in range(count):
        h = 1 if rng.random() < pi1 else 0
        bits = []
        for t in range(n):
            if t > 0:
                h = 1 if rng.random() < t1[h] else 0
            bits.append("1" if rng.random() < e1[h] else "0")
        out.append("".join(bits))
    return out
