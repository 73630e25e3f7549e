"""Two hidden states, k visible symbols, via binary reductions.

Watching only the indicator of one symbol turns an HMM(2, k, n) process
into a binary one with emission column (1 - E[.,l], E[.,l]).  The k
reductions share the hidden chain, so running the generic binary recovery
on each reduction identifies every emission entry as u(l) +/- v0(l) and the
chain parameters (a0, b, c0) from any column with v0(l) != 0; the square
roots' signs are aligned across columns by requiring a0 (or c0) to agree,
which pins the parameters modulo one global hidden-label swap.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from itertools import product

from .coords import PROBABILITY, Distribution, prob_to_moment
from .params import ParameterError, StochasticParams
from .recover import GuardVanished, recover_biid, recover_generic, verify_biid
from .scalars import (
    DEFAULT_GUARD_TOL,
    DEFAULT_TOL,
    QuadExt,
    exact_sqrt,
    in_unit_interval,
    scalar_eq,
    unify_scalars,
)


class IdentificationFailed(ValueError):
    """Every reduction is degenerate; the chain leaves no usable signal."""


class NotAModelDistribution(ValueError):
    """The reductions are mutually inconsistent: no single process fits."""


@dataclass(frozen=True)
class MultistateParams:
    """Process parameters with a 2 x k emission matrix."""

    pi: tuple
    T: tuple
    E: tuple
    tol: InitVar[float] = DEFAULT_TOL
    k: int = field(init=False, compare=False)
    stochastic: bool = field(init=False, compare=False)

    def __post_init__(self, tol):
        pi = tuple(self.pi)
        T = tuple(tuple(r) for r in self.T)
        E = tuple(tuple(r) for r in self.E)
        if len(pi) != 2 or len(T) != 2 or any(len(r) != 2 for r in T) or len(E) != 2:
            raise ParameterError("pi must be length 2 and T must be 2x2")
        k = len(E[0])
        if k < 2 or len(E[1]) != k:
            raise ParameterError("E must be 2 x k with k >= 2")
        flat = unify_scalars(pi + T[0] + T[1] + E[0] + E[1])
        pi = flat[0:2]
        T = (flat[2:4], flat[4:6])
        E = (flat[6 : 6 + k], flat[6 + k : 6 + 2 * k])
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "k", k)
        for name, row in (("pi", pi), ("T[0]", T[0]), ("T[1]", T[1]), ("E[0]", E[0]), ("E[1]", E[1])):
            total = sum(row)
            if not scalar_eq(total, 1, tol):
                raise ParameterError(f"row sum of {name} is {total}, expected 1")
        object.__setattr__(
            self, "stochastic", all(in_unit_interval(x, tol) for x in flat)
        )


@dataclass(frozen=True)
class MultistateDistribution:
    """Length-k**n vector over symbol strings (digits 0..k-1, MSB first)."""

    n: int
    k: int
    values: tuple
    tol: InitVar[float] = DEFAULT_TOL

    def __post_init__(self, tol):
        if self.n < 1 or self.k < 2:
            raise ValueError("need n >= 1 and k >= 2")
        values = unify_scalars(self.values)
        if len(values) != self.k**self.n:
            raise ValueError(
                f"expected {self.k ** self.n} values, got {len(values)}"
            )
        object.__setattr__(self, "values", values)
        total = sum(values)
        if not scalar_eq(total, 1, tol):
            raise ValueError(f"probabilities sum to {total}, expected 1")


def swap_multistate(params: MultistateParams, tol: float = DEFAULT_TOL) -> MultistateParams:
    """Relabel the hidden alphabet; fixes the observed distribution."""
    pi, T, E = params.pi, params.T, params.E
    return MultistateParams(
        (pi[1], pi[0]),
        ((T[1][1], T[1][0]), (T[0][1], T[0][0])),
        (E[1], E[0]),
        tol=tol,
    )


def reduce(params: MultistateParams, ell: int, tol: float = DEFAULT_TOL) -> StochasticParams:
    """Binary reduction watching symbol ``ell`` (1-based)."""
    if not 1 <= ell <= params.k:
        raise IndexError(f"symbol index {ell} outside 1..{params.k}")
    e0, e1 = params.E[0][ell - 1], params.E[1][ell - 1]
    return StochasticParams(
        params.pi, params.T, ((1 - e0, e0), (1 - e1, e1)), tol=tol
    )


def reduce_distribution(
    d: MultistateDistribution, ell: int, tol: float = DEFAULT_TOL
) -> Distribution:
    """Pushforward of the observed distribution along the symbol indicator."""
    if not 1 <= ell <= d.k:
        raise IndexError(f"symbol index {ell} outside 1..{d.k}")
    digit = ell - 1
    out = [0] * (1 << d.n)
    for index, value in enumerate(d.values):
        rest, bits = index, 0
        for _ in range(d.n):
            rest, s = divmod(rest, d.k)
            bits = (bits >> 1) | ((1 << (d.n - 1)) if s == digit else 0)
        out[bits] = out[bits] + value
    return Distribution(d.n, PROBABILITY, out, tol=tol)


def phi_multistate(
    params: MultistateParams, n: int, tol: float = DEFAULT_TOL
) -> MultistateDistribution:
    """Observed distribution by direct marginalization over hidden strings."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pi, T, E = params.pi, params.T, params.E
    values = [0] * (params.k**n)
    for h in product((0, 1), repeat=n):
        w = pi[h[0]]
        for i in range(1, n):
            w = w * T[h[i - 1]][h[i]]
        emit = [w]
        for hi in h:
            row = E[hi]
            emit = [x * e for x in emit for e in row]
        values = [acc + x for acc, x in zip(values, emit)]
    return MultistateDistribution(n, params.k, values, tol=tol)


@dataclass(frozen=True)
class IdentifyResult:
    params: MultistateParams
    diagnostics: dict


def _column_sqrt(v, exact: bool):
    if not exact:
        if v <= 0:
            raise NotAModelDistribution(f"recovered v = {v} is not positive")
        return v**0.5
    if v <= 0:
        raise NotAModelDistribution(f"recovered v = {v} is not positive")
    root = exact_sqrt(v)
    if isinstance(root, QuadExt):
        raise NotAModelDistribution(
            "recovered v is not a rational square; irrational emission "
            "parameters are outside exact-mode identification"
        )
    return root


def identify(
    d: MultistateDistribution,
    tol: float = DEFAULT_TOL,
    tol_guard: float = DEFAULT_GUARD_TOL,
) -> IdentifyResult:
    """Recover (pi, T, E) from an observed distribution, modulo the swap.

    Each symbol reduction is recovered independently; columns whose
    reduction is iid contribute only their emission probability, while the
    rest determine the chain.  The canonical representative takes v0 > 0 at
    the first non-degenerate column.  Row-sum defects of the reassembled E
    are reported in the diagnostics, not normalized away.
    """
    if d.n < 3:
        raise ValueError("identification needs at least three nodes")
    recovered = {}
    degenerate = {}
    exact = not isinstance(d.values[0], float)
    for ell in range(1, d.k + 1):
        moments = prob_to_moment(reduce_distribution(d, ell, tol=tol), tol=tol)
        try:
            recovered[ell] = recover_generic(moments, tol_guard)
        except GuardVanished:
            u = recover_biid(moments)
            if not verify_biid(moments, u, tol):
                raise NotAModelDistribution(
                    f"reduction {ell} is degenerate but not iid"
                ) from None
            degenerate[ell] = u
    if not recovered:
        raise IdentificationFailed(
            "all symbol reductions are degenerate; the hidden chain is invisible"
        )

    first = min(recovered)
    base = recovered[first]
    for ell, eta in recovered.items():
        if not scalar_eq(eta.b, base.b, tol):
            raise NotAModelDistribution(
                f"transition parameter disagrees between reductions "
                f"{first} and {ell}: {base.b} vs {eta.b}"
            )

    v0_first = _column_sqrt(base.v, exact)
    a0 = base.a / v0_first
    c0 = base.c / v0_first
    sign_ambiguous = a0 == 0 and c0 == 0 if exact else (
        scalar_eq(a0, 0, tol) and scalar_eq(c0, 0, tol)
    )

    e_cols = {}
    for ell in range(1, d.k + 1):
        if ell in degenerate:
            u = degenerate[ell]
            e_cols[ell] = (u, u)
            continue
        eta = recovered[ell]
        v0 = _column_sqrt(eta.v, exact)
        if ell != first and not sign_ambiguous:
            plus_ok = scalar_eq(eta.a / v0, a0, tol) and scalar_eq(eta.c / v0, c0, tol)
            minus_ok = scalar_eq(-eta.a / v0, a0, tol) and scalar_eq(-eta.c / v0, c0, tol)
            if plus_ok:
                pass
            elif minus_ok:
                v0 = -v0
            else:
                raise NotAModelDistribution(
                    f"chain parameters from reduction {ell} match neither "
                    f"square-root sign"
                )
        e_cols[ell] = (eta.u - v0, eta.u + v0)

    pi = ((1 - a0) / 2, (1 + a0) / 2)
    b = base.b
    T = (
        ((1 + b - c0) / 2, (1 - b + c0) / 2),
        ((1 - b - c0) / 2, (1 + b + c0) / 2),
    )
    E = (
        tuple(e_cols[ell][0] for ell in range(1, d.k + 1)),
        tuple(e_cols[ell][1] for ell in range(1, d.k + 1)),
    )
    defects = tuple(sum(row) - 1 for row in E)
    for i, defect in enumerate(defects):
        if not scalar_eq(defect, 0, tol):
            raise NotAModelDistribution(
                f"reassembled emission row {i} has row-sum defect {defect}"
            )
    params = MultistateParams(pi, T, E, tol=tol)
    diagnostics = {
        "columns": {
            ell: ("degenerate" if ell in degenerate else "generic")
            for ell in range(1, d.k + 1)
        },
        "row_sum_defects": defects,
        "sign_ambiguous": bool(sign_ambiguous),
        "anchor_column": first,
    }
    return IdentifyResult(params, diagnostics)
