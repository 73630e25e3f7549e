"""Distributions on binary strings and their three coordinate systems.

A :class:`Distribution` holds 2**n values indexed by binary strings
``v = v1...vn`` with v1 the most significant bit, so ``index("101") == 5``.
A string is also the indicator of a subset I of {1, ..., n}; both views are
used below.

Coordinate systems:

* probability: the raw p_v, summing to one;
* moment: m_I = P(V_i = 1 for all i in I), the superset sums of p
  (upward zeta transform on the subset lattice), with m_empty = 1;
* cumulant: coefficients of log of the moment generating function in the
  square-free ring (x_i**2 = 0), with k_empty = 0.

Moment and cumulant coordinates of a shared subset do not depend on the
ambient n, which is why marginalization is a coordinate projection there.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field

from .scalars import DEFAULT_TOL, rational, scalar_eq, unify_scalars

PROBABILITY = "probability"
MOMENT = "moment"
CUMULANT = "cumulant"
SYSTEMS = (PROBABILITY, MOMENT, CUMULANT)


class DistributionError(ValueError):
    """Malformed distribution: bad length, system tag, or normalization."""


def index_of_string(bits: str) -> int:
    """Index of a binary string, first character most significant."""
    return int(bits, 2)


def string_of_index(index: int, n: int) -> str:
    return format(index, f"0{n}b")


def subset_index(positions, n: int) -> int:
    """Index of the subset I of {1..n}: position t contributes 2**(n-t)."""
    idx = 0
    for t in positions:
        if not 1 <= t <= n:
            raise IndexError(f"position {t} outside 1..{n}")
        idx |= 1 << (n - t)
    return idx


@dataclass(frozen=True)
class Distribution:
    """A length-2**n vector tagged with its coordinate system."""

    n: int
    system: str
    values: tuple
    tol: InitVar[float] = DEFAULT_TOL
    exact: bool = field(init=False, compare=False)

    def __post_init__(self, tol):
        if self.n < 1:
            raise DistributionError("n must be >= 1")
        if self.system not in SYSTEMS:
            raise DistributionError(f"unknown coordinate system {self.system!r}")
        values = unify_scalars(self.values)
        if len(values) != 2**self.n:
            raise DistributionError(
                f"expected {2 ** self.n} values for n={self.n}, got {len(values)}"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "exact", not isinstance(values[0], float))
        if self.system == PROBABILITY:
            total = sum(values)
            if not scalar_eq(total, 1, tol):
                raise DistributionError(f"probabilities sum to {total}, expected 1")
        elif self.system == MOMENT:
            if not scalar_eq(values[0], 1, tol):
                raise DistributionError("moment of the empty set must be 1")
        else:
            if not scalar_eq(values[0], 0, tol):
                raise DistributionError("cumulant of the empty set must be 0")

    def __getitem__(self, key):
        """Value at an index, binary string, or iterable of positions."""
        if isinstance(key, str):
            if len(key) != self.n:
                raise IndexError(f"string {key!r} has length != {self.n}")
            return self.values[index_of_string(key)]
        if isinstance(key, int):
            return self.values[key]
        return self.values[subset_index(key, self.n)]

    def require(self, system: str):
        if self.system != system:
            raise DistributionError(
                f"expected a {system}-system distribution, got {self.system}"
            )
        return self


def _one_like(values):
    return 1.0 if isinstance(values[0], float) else rational(1)


def _zeta_superset(values, n: int):
    """In-place butterfly: out[i] = sum of in[j] over bit-supersets j of i."""
    vals = list(values)
    for b in range(n):
        bit = 1 << b
        for i in range(len(vals)):
            if not i & bit:
                vals[i] = vals[i] + vals[i | bit]
    return vals

def _moebius_superset(values, n: int):
    """Inverse of :func:`_zeta_superset`."""
    vals = list(values)
    for b in range(n):
        bit = 1 << b
        for i in range(len(vals)):
            if not i & bit:
                vals[i] = vals[i] - vals[i | bit]
    return vals


def squarefree_multiply(f, g):
    """Product in the square-free ring: (f*g)_I = sum over J of f_J * g_{I-J}."""
    size = len(f)
    out = [0 * f[0]] * size
    for j in range(size):
        fj = f[j]
        if fj == 0:
            continue
        free = (size - 1) ^ j
        # enumerate supersets I of j as I = j | k with k a submask of ~j
        k = free
        while True:
            out[j | k] = out[j | k] + fj * g[k]
            if k == 0:
                break
            k = (k - 1) & free
    return out


def prob_to_moment(d: Distribution, tol: float = DEFAULT_TOL) -> Distribution:
    """Moments from probabilities: m_v sums p_w over all w >= v pointwise."""
    d.require(PROBABILITY)
    return Distribution(d.n, MOMENT, _zeta_superset(d.values, d.n), tol=tol)


def moment_to_prob(d: Distribution, tol: float = DEFAULT_TOL) -> Distribution:
    d.require(MOMENT)
    return Distribution(d.n, PROBABILITY, _moebius_superset(d.values, d.n), tol=tol)


def moment_to_cumulant(d: Distribution, tol: float = DEFAULT_TOL) -> Distribution:
    """Truncated log of the moment generating function.

    k = sum_{r=1..n} (-1)**(r+1) (f_m - 1)**r / r in the square-free ring;
    the series stops at n because (f_m - 1) has no constant term.
    """
    d.require(MOMENT)
    one = _one_like(d.values)
    f = list(d.values)
    f[0] = f[0] - one
    out = [0 * one] * len(f)
    power = f
    sign = 1
    for r in range(1, d.n + 1):
        if r > 1:
            power = squarefree_multiply(power, f)
        for i, coeff in enumerate(power):
            out[i] = out[i] + sign * coeff / r
        sign = -sign
    return Distribution(d.n, CUMULANT, out, tol=tol)


def cumulant_to_moment(d: Distribution, tol: float = DEFAULT_TOL) -> Distribution:
    """Truncated exp of the cumulant generating function (inverse of the log)."""
    d.require(CUMULANT)
    one = _one_like(d.values)
    f = list(d.values)
    out = [0 * one] * len(f)
    out[0] = one
    power = None
    factorial = 1
    for r in range(1, d.n + 1):
        power = f if r == 1 else squarefree_multiply(power, f)
        factorial *= r
        for i, coeff in enumerate(power):
            out[i] = out[i] + coeff / factorial
    return Distribution(d.n, MOMENT, out, tol=tol)


def convert(d: Distribution, system: str, tol: float = DEFAULT_TOL) -> Distribution:
    """Convert between any two coordinate systems (via moments if needed)."""
    if system not in SYSTEMS:
        raise DistributionError(f"unknown coordinate system {system!r}")
    if d.system == system:
        return d
    if d.system == PROBABILITY:
        m = prob_to_moment(d, tol=tol)
        return m if system == MOMENT else moment_to_cumulant(m, tol=tol)
    if d.system == MOMENT:
        return (
            moment_to_prob(d, tol=tol)
            if system == PROBABILITY
            else moment_to_cumulant(d, tol=tol)
        )
    m = cumulant_to_moment(d, tol=tol)
    return m if system == MOMENT else moment_to_prob(m, tol=tol)


def marginalize(d: Distribution, n_target: int, tol: float = DEFAULT_TOL) -> Distribution:
    """Restrict to the first ``n_target`` nodes.

    Probabilities sum over the forgotten suffix; moments are a literal
    coordinate projection; cumulants convert to moments, project, and
    convert back.
    """
    if not 1 <= n_target <= d.n:
        raise DistributionError(f"n_target {n_target} outside 1..{d.n}")
    if n_target == d.n:
        return d
    shift = d.n - n_target
    if d.system == PROBABILITY:
        vals = [
            sum(d.values[(i << shift) + t] for t in range(1 << shift))
            for i in range(1 << n_target)
        ]
        return Distribution(n_target, PROBABILITY, vals, tol=tol)
    if d.system == MOMENT:
        vals = [d.values[i << shift] for i in range(1 << n_target)]
        return Distribution(n_target, MOMENT, vals, tol=tol)
    m = marginalize(cumulant_to_moment(d, tol=tol), n_target, tol=tol)
    return moment_to_cumulant(m, tol=tol)


def window(d: Distribution, offset: int, width: int, tol: float = DEFAULT_TOL) -> Distribution:
    """Moments of a contiguous block of nodes, reindexed to 1..width.

    Keeps m_I for I inside {offset+1, ..., offset+width}.  Because the chain
    and emission matrices are stationary, a window of a model image is again
    a model image (with initial distribution advanced by ``offset`` steps).
    """
    d.require(MOMENT)
    if offset < 0 or width < 1:
        raise DistributionError("window needs offset >= 0 and width >= 1")
    if offset + width > d.n:
        raise DistributionError(
            f"window [{offset + 1}, {offset + width}] exceeds n={d.n}"
        )
    shift = d.n - offset - width
    vals = [d.values[i << shift] for i in range(1 << width)]
    return Distribution(width, MOMENT, vals, tol=tol)
