"""Domain types and Poisson pulse statistics shared by every other module.

The physical scenario is a BB84 transmitter emitting weak coherent pulses:
photon numbers are Poisson distributed, the quantum channel transmits each
photon with probability ``alpha``, and the receiver's detector fires for an
arriving photon with probability ``eta``. Everything downstream is written
in terms of the two primitives defined here, the Poisson mass function and
its upper tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ParameterError",
    "SystemParams",
    "AttackPlan",
    "poisson_pmf",
    "poisson_tail",
]

# Direct evaluation of exp(-mu) * mu**l / l! is fine up to here; beyond,
# mu**l and l! can leave double range, so the pmf switches to log space.
_DIRECT_EVAL_MAX_L = 20


class ParameterError(ValueError):
    """A physical parameter or configuration value is out of range."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


@dataclass(frozen=True, slots=True)
class SystemParams:
    """Physical scenario: source intensity, link losses, and block size.

    Attributes:
        mu: Mean photon number per pulse, > 0.
        alpha: Channel transmittivity in (0, 1].
        eta: Detector quantum efficiency in (0, 1].
        r_c: Intrinsic error probability per sifted bit in [0, 1).
        m: Pulses per block, integer >= 1.
    """

    mu: float
    alpha: float
    eta: float
    r_c: float
    m: int

    def __post_init__(self) -> None:
        _require(
            isinstance(self.mu, (int, float)) and math.isfinite(self.mu) and self.mu > 0.0,
            f"mu must be a finite number > 0, got {self.mu!r}",
        )
        _require(
            isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha) and 0.0 < self.alpha <= 1.0,
            f"alpha must lie in (0, 1], got {self.alpha!r}",
        )
        _require(
            isinstance(self.eta, (int, float)) and math.isfinite(self.eta) and 0.0 < self.eta <= 1.0,
            f"eta must lie in (0, 1], got {self.eta!r}",
        )
        _require(
            isinstance(self.r_c, (int, float)) and math.isfinite(self.r_c) and 0.0 <= self.r_c < 1.0,
            f"r_c must lie in [0, 1), got {self.r_c!r}",
        )
        _require(
            isinstance(self.m, int) and not isinstance(self.m, bool) and self.m >= 1,
            f"m must be an integer >= 1, got {self.m!r}",
        )


@dataclass(frozen=True, slots=True)
class AttackPlan:
    """Eavesdropper knobs: blocking and measuring probabilities.

    Values are stored raw, without clamping to [0, 1]. A solved plan can
    land outside the probability range, and how far outside is itself a
    result (it measures how badly a matching constraint is violated), so
    feasibility is reported through the flags instead of by rejecting or
    repairing the numbers.
    """

    p_block: float
    p_measure: float

    def __post_init__(self) -> None:
        _require(
            isinstance(self.p_block, (int, float)) and math.isfinite(self.p_block),
            f"p_block must be finite, got {self.p_block!r}",
        )
        _require(
            isinstance(self.p_measure, (int, float)) and math.isfinite(self.p_measure),
            f"p_measure must be finite, got {self.p_measure!r}",
        )

    @property
    def feasible_block(self) -> bool:
        """True when the blocking probability is an actual probability."""
        return 0.0 <= self.p_block <= 1.0

    @property
    def feasible_measure(self) -> bool:
        """True when the measuring probability is an actual probability."""
        return 0.0 <= self.p_measure <= 1.0

    @property
    def feasible(self) -> bool:
        return self.feasible_block and self.feasible_measure


def poisson_pmf(mu: float, l: int) -> float:
    """Probability of exactly ``l`` photons in a pulse of mean ``mu``.

    Args:
        mu: Mean photon number, > 0.
        l: Photon count, >= 0.

    Returns:
        exp(-mu) * mu**l / l!, evaluated directly for l <= 20 and as
        exp(-mu + l*log(mu) - lgamma(l + 1)) above that, so large counts
        neither overflow nor lose the exponent range.

    Raises:
        ParameterError: ``mu`` is not a finite positive number, or ``l`` is
            negative.
    """
    _require(math.isfinite(mu) and mu > 0.0, f"mu must be a finite number > 0, got {mu!r}")
    _require(l >= 0, f"photon count must be >= 0, got {l!r}")
    if l > _DIRECT_EVAL_MAX_L:
        return math.exp(-mu + l * math.log(mu) - math.lgamma(l + 1))
    return math.exp(-mu) * mu**l / math.factorial(l)


def poisson_tail(mean: float, l: int) -> float:
    """Probability of ``l`` or more photons in a pulse of mean ``mean``.

    Computed as one minus the lower partial sum. The j = 0 term is folded
    into -expm1(-mean), which keeps full precision in the small-mean regime
    every lossy link lives in. The result is clamped at zero: once the true
    tail falls below float cancellation noise the subtraction can come out
    marginally negative.

    Raises:
        ParameterError: ``mean`` is not a finite positive number, or ``l``
            is negative.
    """
    _require(math.isfinite(mean) and mean > 0.0, f"mean must be a finite number > 0, got {mean!r}")
    _require(l >= 0, f"photon count must be >= 0, got {l!r}")
    if l == 0:
        return 1.0
    tail = -math.expm1(-mean)
    for j in range(1, l):
        tail -= poisson_pmf(mean, j)
    return max(tail, 0.0)
