"""Parameter spaces of the binary hidden Markov process.

Three coordinate systems on the same five-dimensional parameter space:

* ``StochasticParams``: the matrix triple (pi, T, E) with unit row sums.
  Rows need not be nonnegative; a ``stochastic`` flag records whether every
  entry lies in [0, 1].
* ``LinearParams``: (a0, b, c0, u, v0), an invertible linear change of
  coordinates in which relabeling the hidden alphabet simply negates the
  subscripted variables.
* ``BirationalParams``: (a, b, c, u, v) = (a0*v0, b, c0*v0, u, v0**2), the
  swap-invariant combinations.  The quotient map ``q_map`` is generically
  two-to-one; ``lift`` inverts it up to the sign choice of v0.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field

from .scalars import (
    DEFAULT_TOL,
    exact_sqrt,
    in_unit_interval,
    scalar_eq,
    unify_scalars,
)


class ParameterError(ValueError):
    """Malformed parameters: wrong shape or row sums away from one."""


class NoRealLift(ValueError):
    """v < 0: no real square root, hence no real parameters."""


class NotInImage(ValueError):
    """v = 0 with (a, c) != (0, 0): outside the image of the quotient map."""


def _row(values, length, what):
    row = tuple(values)
    if len(row) != length:
        raise ParameterError(f"{what} must have {length} entries")
    return row


@dataclass(frozen=True)
class StochasticParams:
    """Process parameters (pi, T, E); rows must sum to one.

    ``stochastic`` is computed, not enforced: points with entries outside
    [0, 1] are legal parameter-space points and are needed as recovery
    outputs and rejection witnesses.
    """

    pi: tuple
    T: tuple
    E: tuple
    tol: InitVar[float] = DEFAULT_TOL
    stochastic: bool = field(init=False, compare=False)

    def __post_init__(self, tol):
        pi = _row(self.pi, 2, "pi")
        T = tuple(_row(r, 2, "T row") for r in _row(self.T, 2, "T"))
        E = tuple(_row(r, 2, "E row") for r in _row(self.E, 2, "E"))
        flat = unify_scalars(pi + T[0] + T[1] + E[0] + E[1])
        pi, t0, t1, e0, e1 = flat[0:2], flat[2:4], flat[4:6], flat[6:8], flat[8:10]
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "T", (t0, t1))
        object.__setattr__(self, "E", (e0, e1))
        for name, row in (("pi", pi), ("T[0]", t0), ("T[1]", t1), ("E[0]", e0), ("E[1]", e1)):
            if not scalar_eq(row[0] + row[1], 1, tol):
                raise ParameterError(f"row sum of {name} is {row[0] + row[1]}, expected 1")
        object.__setattr__(
            self, "stochastic", all(in_unit_interval(x, tol) for x in flat)
        )

    def rows(self):
        return (self.pi, self.T[0], self.T[1], self.E[0], self.E[1])


@dataclass(frozen=True)
class LinearParams:
    """Linear coordinates (a0, b, c0, u, v0) on parameter space."""

    a0: object
    b: object
    c0: object
    u: object
    v0: object

    def __post_init__(self):
        a0, b, c0, u, v0 = unify_scalars((self.a0, self.b, self.c0, self.u, self.v0))
        for name, value in (("a0", a0), ("b", b), ("c0", c0), ("u", u), ("v0", v0)):
            object.__setattr__(self, name, value)

    def astuple(self):
        return (self.a0, self.b, self.c0, self.u, self.v0)


@dataclass(frozen=True)
class BirationalParams:
    """Swap-invariant coordinates (a, b, c, u, v)."""

    a: object
    b: object
    c: object
    u: object
    v: object

    def __post_init__(self):
        a, b, c, u, v = unify_scalars((self.a, self.b, self.c, self.u, self.v))
        for name, value in (("a", a), ("b", b), ("c", c), ("u", u), ("v", v)):
            object.__setattr__(self, name, value)

    def astuple(self):
        return (self.a, self.b, self.c, self.u, self.v)


def to_linear(theta: StochasticParams) -> LinearParams:
    """Solve the linear reparametrization for (a0, b, c0, u, v0).

    a0 = pi1 - pi0, b = T00 + T11 - 1, c0 = T11 - T00,
    u = (E01 + E11)/2, v0 = (E11 - E01)/2.
    """
    pi, T, E = theta.pi, theta.T, theta.E
    return LinearParams(
        pi[1] - pi[0],
        T[0][0] + T[1][1] - 1,
        T[1][1] - T[0][0],
        (E[0][1] + E[1][1]) / 2,
        (E[1][1] - E[0][1]) / 2,
    )


def from_linear(eta0: LinearParams, tol: float = DEFAULT_TOL) -> StochasticParams:
    """Build (pi, T, E) from linear coordinates; row sums are one by design."""
    a0, b, c0, u, v0 = eta0.astuple()
    pi = ((1 - a0) / 2, (1 + a0) / 2)
    T = (
        ((1 + b - c0) / 2, (1 - b + c0) / 2),
        ((1 - b - c0) / 2, (1 + b + c0) / 2),
    )
    E = (
        (1 - u + v0, u - v0),
        (1 - u - v0, u + v0),
    )
    return StochasticParams(pi, T, E, tol=tol)


def swap(theta: StochasticParams, tol: float = DEFAULT_TOL) -> StochasticParams:
    """Relabel the hidden alphabet: permute pi, conjugate T, swap rows of E.

    An involution that leaves the observed distribution unchanged; in linear
    coordinates it negates a0, c0, v0 and fixes b, u.
    """
    pi, T, E = theta.pi, theta.T, theta.E
    return StochasticParams(
        (pi[1], pi[0]),
        ((T[1][1], T[1][0]), (T[0][1], T[0][0])),
        (E[1], E[0]),
        tol=tol,
    )


def swap_linear(eta0: LinearParams) -> LinearParams:
    """The hidden-label swap in linear coordinates: negate a0, c0, v0."""
    return LinearParams(-eta0.a0, eta0.b, -eta0.c0, eta0.u, -eta0.v0)


def q_map(eta0: LinearParams) -> BirationalParams:
    """Quotient to swap-invariant coordinates: (a0*v0, b, c0*v0, u, v0^2)."""
    a0, b, c0, u, v0 = eta0.astuple()
    return BirationalParams(a0 * v0, b, c0 * v0, u, v0 * v0)


def lift(eta: BirationalParams, sign: int = 1) -> LinearParams:
    """Invert ``q_map`` with the given square-root sign for v0.

    Requires v >= 0.  At v = 0 a real lift exists only when a = c = 0, and
    then a0 = c0 = 0 is returned (the canonical representative of the IID
    stratum).  When v is rational but not a perfect square the result
    carries exact surd entries.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a, b, c, u, v = eta.astuple()
    if v < 0:
        raise NoRealLift(f"v = {v} < 0 has no real square root")
    root = v**0.5 if isinstance(v, float) else exact_sqrt(v)
    if root == 0:
        if a != 0 or c != 0:
            raise NotInImage("v = 0 requires a = c = 0 for a real lift")
        zero = 0 * u
        return LinearParams(zero, b, zero, u, zero)
    v0 = root if sign == 1 else -root
    return LinearParams(a / v0, b, c / v0, u, v0)
