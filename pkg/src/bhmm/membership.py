"""Semialgebraic membership test with machine-checkable certificates.

Being a nonnegative point of the model variety is necessary but not
sufficient for arising from an actual process: some variety points only
have parameter preimages with entries outside [0, 1].  The test below
decides true membership by recovering candidate parameters from the first
three nodes, checking stochasticity exactly, and re-running the forward map
on all n nodes.  Every verdict carries a witness that can be re-checked
independently: the recovered parameters for acceptance, or the violated
necessary condition (negative v, an offending matrix entry, a mismatched
coordinate, or an exhaustion record over the degenerate strata) for
rejection.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coords import (
    MOMENT,
    PROBABILITY,
    Distribution,
    marginalize,
    prob_to_moment,
    string_of_index,
)
from .forward import phi_baum
from .params import (
    LinearParams,
    NoRealLift,
    NotInImage,
    StochasticParams,
    from_linear,
    lift,
)
from .recover import (
    BIID,
    BINID,
    EQUILIBRIUM,
    GuardVanished,
    recover_binid,
    recover_biid,
    recover_equilibrium,
    recover_generic,
)
from .scalars import DEFAULT_GUARD_TOL, DEFAULT_TOL, format_scalar, scalar_eq

IN_MODEL = "InModel"
NOT_IN_MODEL = "NotInModel"
IN_SUBMODEL = "InSubmodel"


class InputError(ValueError):
    """The input is not a probability distribution; no verdict applies."""


class NotInModelError(ValueError):
    """Raised by :func:`fiber` when the input has no parameter preimage."""


@dataclass(frozen=True)
class MembershipCertificate:
    verdict: str
    theta: StochasticParams | None = None
    stratum: str | None = None
    params: object = None
    witness: dict | None = None
    notes: tuple = ()


def _check_input(p: Distribution, tol: float) -> None:
    p.require(PROBABILITY)
    if p.n < 3:
        raise InputError("membership testing needs at least three nodes")
    floor = -tol if not p.exact else 0
    for i, x in enumerate(p.values):
        if x < floor:
            raise InputError(
                f"negative probability {format_scalar(x)} at {string_of_index(i, p.n)}"
            )
    total = sum(p.values)
    if not scalar_eq(total, 1, tol):
        raise InputError(f"probabilities sum to {format_scalar(total)}")


def _nonstochastic_witness(theta: StochasticParams) -> dict:
    offenders = []
    for name, row in zip(("pi", "T[0]", "T[1]", "E[0]", "E[1]"), theta.rows()):
        for j, x in enumerate(row):
            if x < 0 or x > 1:
                offenders.append({"entry": f"{name}[{j}]", "value": format_scalar(x)})
    return {"reason": "nonstochastic-parameters", "entries": offenders}


def _forward_matches(p: Distribution, theta: StochasticParams, tol: float):
    """Index of the first mismatched coordinate of phi_n(theta), or None."""
    image = phi_baum(theta, p.n, PROBABILITY, tol=tol)
    for i, (expected, actual) in enumerate(zip(p.values, image.values)):
        if not scalar_eq(expected, actual, tol):
            return i, actual
    return None


def _half_like(x):
    return (1 + 0 * x) / 2


def binid_representative(alpha, beta, tol: float = DEFAULT_TOL) -> StochasticParams:
    """A process realizing the b = 0 stratum point (alpha, beta).

    First hidden draw (1-alpha, alpha), one-step mixing to (1-beta, beta),
    and the identity emission matrix.
    """
    half = _half_like(alpha)
    zero = 0 * alpha
    return from_linear(
        LinearParams(2 * alpha - 1, zero, 2 * beta - 1, half, half), tol=tol
    )


def biid_representative(u, tol: float = DEFAULT_TOL) -> StochasticParams:
    """The canonical iid process with success probability u."""
    zero = 0 * u
    return from_linear(LinearParams(zero, zero, zero, u, zero), tol=tol)


def _submodel_branch(
    p: Distribution,
    m: Distribution,
    guard_trail: list,
    relaxed: bool,
    tol: float,
    tol_guard: float,
) -> MembershipCertificate:
    failures = list(guard_trail)

    try:
        eq = recover_equilibrium(m, tol_guard)
        try:
            theta = from_linear(lift(eq.to_birational(), 1), tol=tol)
            if theta.stochastic or relaxed:
                mismatch = _forward_matches(p, theta, tol)
                if mismatch is None:
                    return MembershipCertificate(
                        IN_SUBMODEL, theta, EQUILIBRIUM, eq,
                        notes=("relaxed",) if relaxed else (),
                    )
                failures.append({"stratum": EQUILIBRIUM, "reason": "forward-mismatch"})
            else:
                failures.append(
                    {"stratum": EQUILIBRIUM, **_nonstochastic_witness(theta)}
                )
        except (NoRealLift, NotInImage) as err:
            failures.append({"stratum": EQUILIBRIUM, "reason": str(err)})
    except GuardVanished as g:
        failures.append(
            {"stratum": EQUILIBRIUM, "guard": g.guard, "value": format_scalar(g.denominator)}
        )

    alpha, beta = recover_binid(m)
    if scalar_eq(alpha, beta, tol):
        failures.append({"stratum": BINID, "reason": "alpha = beta, deferred to BIID"})
    else:
        theta = binid_representative(alpha, beta, tol=tol)
        if theta.stochastic or relaxed:
            mismatch = _forward_matches(p, theta, tol)
            if mismatch is None:
                return MembershipCertificate(
                    IN_SUBMODEL, theta, BINID, (alpha, beta),
                    notes=("relaxed",) if relaxed else (),
                )
            failures.append({"stratum": BINID, "reason": "forward-mismatch"})
        else:
            failures.append({"stratum": BINID, **_nonstochastic_witness(theta)})

    u = recover_biid(m)
    theta = biid_representative(u, tol=tol)
    if theta.stochastic or relaxed:
        mismatch = _forward_matches(p, theta, tol)
        if mismatch is None:
            return MembershipCertificate(
                IN_SUBMODEL, theta, BIID, u,
                notes=("relaxed",) if relaxed else (),
            )
        failures.append({"stratum": BIID, "reason": "forward-mismatch"})
    else:
        failures.append({"stratum": BIID, **_nonstochastic_witness(theta)})

    return MembershipCertificate(
        NOT_IN_MODEL,
        witness={"reason": "submodel-exhaustion", "attempts": failures},
        notes=(
            "guards vanish on model points only over the degenerate strata; "
            "all stratum recoveries failed verification",
        ),
    )


def membership_test(
    p: Distribution,
    relaxed: bool = False,
    tol: float = DEFAULT_TOL,
    tol_guard: float = DEFAULT_GUARD_TOL,
) -> MembershipCertificate:
    """Decide whether a probability distribution arises from some process.

    Marginalizes to the first three nodes, recovers (a, b, c, u, v), lifts
    with the positive square root of v (the other lift is the hidden-label
    swap of this one, so both are stochastic or neither is), and accepts
    only if the candidate parameters are stochastic and reproduce the input
    on all n nodes.  Vanished guards route to the degenerate strata.  With
    ``relaxed=True`` the stochasticity gate is skipped, which tests for a
    real-parameter preimage instead of true model membership.
    """
    _check_input(p, tol)
    m = prob_to_moment(p, tol=tol)
    m3 = marginalize(m, 3, tol=tol)

    try:
        eta = recover_generic(m3, tol_guard)
    except GuardVanished as g:
        trail = [{"stratum": "Generic", "guard": g.guard, "value": format_scalar(g.denominator)}]
        return _submodel_branch(p, m, trail, relaxed, tol, tol_guard)

    if eta.v < 0:
        return MembershipCertificate(
            NOT_IN_MODEL,
            params=eta,
            witness={"reason": "negative-v", "v": format_scalar(eta.v)},
        )
    try:
        theta = from_linear(lift(eta, 1), tol=tol)
    except NotInImage as err:
        return MembershipCertificate(
            NOT_IN_MODEL,
            params=eta,
            witness={"reason": "no-real-parameters", "detail": str(err)},
        )

    if not theta.stochastic and not relaxed:
        return MembershipCertificate(
            NOT_IN_MODEL, params=eta, witness=_nonstochastic_witness(theta)
        )

    mismatch = _forward_matches(p, theta, tol)
    if mismatch is None:
        return MembershipCertificate(
            IN_MODEL, theta, params=eta, notes=("relaxed",) if relaxed else ()
        )
    index, actual = mismatch
    return MembershipCertificate(
        NOT_IN_MODEL,
        params=eta,
        witness={
            "reason": "forward-mismatch",
            "coordinate": string_of_index(index, p.n),
            "input": format_scalar(p.values[index]),
            "forward": format_scalar(actual),
        },
    )


def fiber(
    p: Distribution,
    relaxed: bool = False,
    tol: float = DEFAULT_TOL,
    tol_guard: float = DEFAULT_GUARD_TOL,
) -> tuple[StochasticParams, ...]:
    """The parameter preimage of a generically recoverable distribution.

    Returns both square-root lifts, i.e. {theta, swap(theta)}; these
    coincide only when v = 0.  Without ``relaxed`` the input must pass the
    full membership test; with it, any real-parameter preimage is returned
    even if nonstochastic.
    """
    if p.system == PROBABILITY:
        _check_input(p, tol)
        m = prob_to_moment(p, tol=tol)
    else:
        m = p.require(MOMENT)
    try:
        eta = recover_generic(marginalize(m, 3, tol=tol), tol_guard)
    except GuardVanished as g:
        raise NotInModelError(f"fiber undefined: guard {g.guard} vanished") from g
    try:
        thetas = (
            from_linear(lift(eta, 1), tol=tol),
            from_linear(lift(eta, -1), tol=tol),
        )
    except (NoRealLift, NotInImage) as err:
        raise NotInModelError(f"no real preimage: {err}") from err
    for theta in thetas:
        if not theta.stochastic and not relaxed:
            raise NotInModelError("preimage parameters are not stochastic")
        image = phi_baum(theta, m.n, MOMENT, tol=tol)
        if not all(scalar_eq(x, y, tol) for x, y in zip(image.values, m.values)):
            raise NotInModelError("recovered parameters do not reproduce the input")
    if thetas[0] == thetas[1]:
        return (thetas[0],)
    return thetas
