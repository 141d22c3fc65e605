"""Closed-form expectations for the constrained eavesdropping attack.

All quantities are per block of ``m`` pulses and are expectations (real
numbers, never sampled integers). The attack has two knobs: the blocking
probability applied to one- and two-photon pulses and the measuring
probability applied to unblocked single-photon pulses. The two solve_*
functions tune them so the receiver's sifted-bit count and error count look
exactly like an undisturbed link; whether the solutions are probabilities
at all is the feasibility question this model maps out.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import AttackPlan, SystemParams, poisson_pmf, poisson_tail
from .strategy import DEFAULT_TRUNCATION_TOL, DirectAttackTable, direct_attack_rate

__all__ = [
    "DegenerateModelError",
    "AnalyticReport",
    "sifted_bits_baseline",
    "sifted_bits_attacked",
    "errors_baseline",
    "errors_attacked",
    "solve_blocking_prob",
    "solve_measuring_prob",
    "eve_information",
    "full_report",
]


class DegenerateModelError(ArithmeticError):
    """A solver denominator underflowed to zero; the attack model does not
    apply at this parameter point (mean photon number far too large)."""


def sifted_bits_baseline(params: SystemParams) -> float:
    """Expected sifted bits per block with no eavesdropper.

    A pulse contributes when at least one of its photons survives channel
    and detector (mean surviving count eta*mu*alpha) and the two legitimate
    bases agree (probability 1/2). Detector dark counts are neglected.
    """
    return 0.5 * params.m * poisson_tail(params.eta * params.mu * params.alpha, 1)


def sifted_bits_attacked(params: SystemParams, p_block: float, direct_rate: float) -> float:
    """Expected sifted bits per block while the attack runs.

    One- and two-photon pulses pass with probability 1 - p_block and then
    face the ordinary losses; successful direct attacks inject a photon at
    the detector, skipping the channel, so their term carries eta only.
    """
    single_double = poisson_pmf(params.mu, 1) + poisson_pmf(params.mu, 2)
    return 0.5 * params.m * (
        single_double * (1.0 - p_block) * params.eta * params.alpha + direct_rate * params.eta
    )


def errors_baseline(params: SystemParams) -> float:
    """Expected errors per block with no eavesdropper (intrinsic flips only)."""
    return sifted_bits_baseline(params) * params.r_c


def errors_attacked(params: SystemParams, p_block: float, p_measure: float) -> float:
    """Expected errors per block while the attack runs.

    The eavesdropper suppresses the intrinsic error rate entirely, so the
    only errors left come from intercept-resend on measured single-photon
    pulses: wrong basis half the time, then a flipped sifted outcome half
    of those, hence the m/8 prefactor.
    """
    return (
        params.m / 8.0
        * poisson_pmf(params.mu, 1)
        * (1.0 - p_block)
        * p_measure
        * params.eta
        * params.alpha
    )


def solve_blocking_prob(params: SystemParams, direct_rate: float) -> float:
    """Blocking probability that leaves the sifted-bit count unchanged.

    Solves sifted_bits_attacked == sifted_bits_baseline for p_block and
    returns the raw solution, unclamped; values outside [0, 1] mean the
    count rate cannot be matched by blocking alone.

    Raises:
        DegenerateModelError: no one- or two-photon pulses exist at this
            ``mu`` (the Poisson weights underflowed to zero).
    """
    denom = (poisson_pmf(params.mu, 1) + poisson_pmf(params.mu, 2)) * params.eta * params.alpha
    if denom == 0.0:
        raise DegenerateModelError(
            f"one- and two-photon pulse weights underflow at mu={params.mu}; "
            "the blocking constraint is undefined"
        )
    baseline = poisson_tail(params.eta * params.mu * params.alpha, 1)
    return 1.0 - (baseline - direct_rate * params.eta) / denom


def solve_measuring_prob(params: SystemParams, p_block: float) -> float:
    """Measuring probability that reproduces the unattacked error count.

    Solves errors_attacked == errors_baseline for p_measure and returns the
    raw solution, unclamped; a value above 1 means the error count cannot
    be emulated at this blocking level.

    Raises:
        DegenerateModelError: p_block == 1 with a nonzero intrinsic error
            rate (no single-photon pulse passes, so no measuring rate can
            produce errors), or the single-photon weight underflowed.
    """
    single = poisson_pmf(params.mu, 1) * params.eta * params.alpha
    if single == 0.0:
        raise DegenerateModelError(
            f"single-photon pulse weight underflows at mu={params.mu}; "
            "the measuring constraint is undefined"
        )
    if p_block == 1.0:
        if params.r_c == 0.0:
            return 0.0
        raise DegenerateModelError(
            "p_block = 1 leaves no single-photon pulses to carry the expected errors"
        )
    baseline = poisson_tail(params.eta * params.mu * params.alpha, 1)
    return baseline / single * (4.0 * params.r_c) / (1.0 - p_block)


def eve_information(params: SystemParams, plan: AttackPlan, direct_rate: float) -> float:
    """Expected sifted bits per block known to the eavesdropper.

    Three disjoint paths contribute:

      * measured single-photon pulses where her random basis matched the
        sender's (factor 1/2) and the resent photon was detected,
      * two-photon pulses where she stored one photon and the forwarded one
        was detected (the stored photon is read after basis reconciliation,
        so it reveals the bit with certainty),
      * successful direct attacks, whose injected photon skips the channel
        and faces only detector efficiency.

    The overall 1/2 is the legitimate parties' sifting.
    """
    ea = params.eta * params.alpha
    measured = 0.5 * poisson_pmf(params.mu, 1) * (1.0 - plan.p_block) * plan.p_measure * ea
    stored = poisson_pmf(params.mu, 2) * (1.0 - plan.p_block) * ea
    injected = direct_rate * params.eta
    return 0.5 * params.m * (measured + stored + injected)


@dataclass(frozen=True, slots=True)
class AnalyticReport:
    """Expected per-block counts at one parameter point.

    ``plan`` holds the raw solved knobs. When a feasibility flag is off the
    attack cannot actually be executed, and the attacked fields are model
    extrapolations rather than expectations of any physical process; they
    are kept because feasibility maps need to show how far out a point is.
    """

    params: SystemParams
    plan: AttackPlan
    direct_rate: float
    sifted: float
    sifted_attacked: float
    errors: float
    errors_attacked: float
    eve_info: float


def full_report(
    params: SystemParams,
    table: DirectAttackTable,
    match_count_rate: bool = True,
    truncation_tol: float = DEFAULT_TRUNCATION_TOL,
) -> AnalyticReport:
    """Solve the attack at one parameter point and evaluate every expectation.

    With ``match_count_rate`` the blocking probability comes from the
    count-rate constraint; without it the attack blocks nothing (p_block = 0)
    and only emulates the error rate. The measuring probability always comes
    from the error-rate constraint. Infeasible solutions are returned with
    their flags down, not raised: where the constraints fail is a primary
    output, not an error.

    Raises:
        DegenerateModelError: propagated from the solvers.
        TruncationError: the table is too short for ``params.mu``.
    """
    # Degeneracy is about the parameter point, truncation about the table:
    # when the Poisson weights underflow no table length would help, so the
    # applicability check comes first.
    if poisson_pmf(params.mu, 1) + poisson_pmf(params.mu, 2) == 0.0:
        raise DegenerateModelError(
            f"one- and two-photon pulse weights underflow at mu={params.mu}; "
            "the attack model does not apply"
        )
    rate = direct_attack_rate(table, params.mu, tol=truncation_tol)
    p_block = solve_blocking_prob(params, rate) if match_count_rate else 0.0
    p_measure = solve_measuring_prob(params, p_block)
    plan = AttackPlan(p_block=p_block, p_measure=p_measure)
    return AnalyticReport(
        params=params,
        plan=plan,
        direct_rate=rate,
        sifted=sifted_bits_baseline(params),
        sifted_attacked=sifted_bits_attacked(params, p_block, rate),
        errors=errors_baseline(params),
        errors_attacked=errors_attacked(params, p_block, p_measure),
        eve_info=eve_information(params, plan, rate),
    )
