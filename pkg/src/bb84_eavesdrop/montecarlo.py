"""Pulse-level stochastic replay of the attack.

The simulator shares nothing with the closed-form module except the Poisson
mass function used to build its sampling table: every pulse is played out
photon by photon, so the two models cross-validate each other.

Randomness is counter based. Pulse ``i`` always consumes the same eight
uniform draws, Philox blocks 2i and 2i+1 under the run's seed, so any
partition of the pulse range into chunks or worker threads reproduces the
serial run bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .analytic import AnalyticReport
from .core import AttackPlan, ParameterError, SystemParams, poisson_pmf
from .strategy import MIN_EXPLOITABLE_PHOTONS, DirectAttackTable

__all__ = [
    "PULSE_DRAWS",
    "DEFAULT_CHUNK_PULSES",
    "DEFAULT_SIGMA",
    "SimConfig",
    "SimTally",
    "simulate",
    "StatCheck",
    "ComparisonVerdict",
    "compare_to_analytic",
]

PULSE_DRAWS = 8  # uniforms per pulse: two Philox blocks of four
_BLOCKS_PER_PULSE = PULSE_DRAWS // 4
DEFAULT_CHUNK_PULSES = 1 << 19
DEFAULT_SIGMA = 3.5

# Fixed layout of the eight uniforms each pulse owns. Branches reuse
# columns only for mutually exclusive decisions, so every uniform feeds at
# most one Bernoulli per pulse.
_COL_PHOTONS = 0    # photon number (Poisson inverse CDF)
_COL_ACT = 1        # block? (l = 1, 2) / direct attack conclusive? (l >= 3)
_COL_MEASURE = 2    # intercept an unblocked single-photon pulse?
_COL_EVE_BASIS = 3  # eavesdropper basis matches the sender's?
_COL_DETECT = 4     # channel + detector survival (baseline: detected count)
_COL_SIFT = 5       # receiver basis matches the sender's?
_COL_ERROR = 6      # intrinsic flip (baseline) / resend flip (attack)
# column 7 is reserved


@dataclass(frozen=True, slots=True)
class SimConfig:
    """One simulation run: scenario, attack plan, and sampling controls."""

    params: SystemParams
    n_pulses: int
    seed: int
    eve_active: bool = False
    plan: AttackPlan | None = None
    table: DirectAttackTable | None = None

    def __post_init__(self) -> None:
        if not (isinstance(self.n_pulses, int) and self.n_pulses >= 1):
            raise ParameterError(f"n_pulses must be an integer >= 1, got {self.n_pulses!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.eve_active:
            if self.plan is None or self.table is None:
                raise ParameterError("eve_active runs need both a plan and a strategy table")
        elif self.plan is not None:
            raise ParameterError("a plan was given but eve_active is False")


_COUNT_FIELDS = (
    "sifted",
    "errors",
    "eve_known",
    "bob_multi_photon_events",
    "nonzero_photon_pulses",
    "blocked_1",
    "blocked_2",
    "measured_1",
    "passed_1",
    "indirect_2",
    "direct_success",
    "direct_fail",
)

_CSV_COLUMNS = ("pulses",) + _COUNT_FIELDS + ("stderr_sifted", "stderr_errors", "stderr_eve_known")


@dataclass(frozen=True, slots=True)
class SimTally:
    """Counters from one simulation run.

    The branch counters partition the nonzero-photon pulses of an attacked
    run; ``direct_fail`` counts every multi-photon pulse the eavesdropper
    absorbed, including three-photon pulses (absorbed without an attempt).
    Standard errors are binomial sqrt(N p (1-p)) estimates from the
    observed proportions.
    """

    config: SimConfig
    pulses: int
    sifted: int
    errors: int
    eve_known: int
    bob_multi_photon_events: int
    nonzero_photon_pulses: int
    blocked_1: int
    blocked_2: int
    measured_1: int
    passed_1: int
    indirect_2: int
    direct_success: int
    direct_fail: int
    stderr_sifted: float
    stderr_errors: float
    stderr_eve_known: float

    @staticmethod
    def csv_header() -> str:
        return ",".join(_CSV_COLUMNS)

    def to_csv_row(self) -> str:
        values = [getattr(self, name) for name in _CSV_COLUMNS]
        return ",".join(
            format(v, ".17g") if isinstance(v, float) else str(v) for v in values
        )


def _photon_cap(mu: float) -> int:
    """Largest photon number the sampling table needs to resolve."""
    return int(math.ceil(mu + 20.0 * math.sqrt(mu) + 50.0))


def _poisson_cdf(mu: float, l_cap: int) -> np.ndarray:
    return np.cumsum([poisson_pmf(mu, l) for l in range(l_cap + 1)])


def _binomial_stderr(successes: int, trials: int) -> float:
    p_hat = successes / trials
    return math.sqrt(trials * p_hat * (1.0 - p_hat))


def _chunk_counts(
    config: SimConfig,
    start: int,
    count: int,
    cdf: np.ndarray,
    attack_probs: np.ndarray | None,
) -> tuple[int, ...]:
    """Play out pulses [start, start + count) and return the count tuple."""
    params = config.params
    rng = Generator(Philox(key=config.seed, counter=_BLOCKS_PER_PULSE * start))
    u = rng.random((count, PULSE_DRAWS))
    l_cap = len(cdf) - 1
    l = np.minimum(np.searchsorted(cdf, u[:, _COL_PHOTONS], side="right"), l_cap)
    survive = params.eta * params.alpha

    zeros = np.zeros(count, dtype=bool)
    blocked_1 = blocked_2 = measured_1 = passed_1 = indirect_2 = zeros
    direct_success = direct_fail = zeros

    if config.eve_active:
        plan = config.plan
        one = l == 1
        two = l == 2
        multi = l >= 3
        blocked_1 = one & (u[:, _COL_ACT] < plan.p_block)
        unblocked_1 = one & ~blocked_1
        measured_1 = unblocked_1 & (u[:, _COL_MEASURE] < plan.p_measure)
        passed_1 = unblocked_1 & ~measured_1
        blocked_2 = two & (u[:, _COL_ACT] < plan.p_block)
        indirect_2 = two & ~blocked_2
        direct_success = multi & (u[:, _COL_ACT] < attack_probs[l])
        direct_fail = multi & ~direct_success

        # At most one photon ever reaches the receiver: forwarded and resent
        # photons cross the channel (eta * alpha), injected ones appear at
        # the detector and face only its efficiency.
        detect_prob = np.zeros(count)
        detect_prob[measured_1 | passed_1 | indirect_2] = survive
        detect_prob[direct_success] = params.eta
        detected = u[:, _COL_DETECT] < detect_prob
        sifted = detected & (u[:, _COL_SIFT] < 0.5)

        eve_basis_match = u[:, _COL_EVE_BASIS] < 0.5
        # Wrong-basis resends flip the sifted outcome half the time; every
        # other path is error free because the attack suppresses the
        # intrinsic error rate.
        errors = sifted & measured_1 & ~eve_basis_match & (u[:, _COL_ERROR] < 0.5)
        eve_known = sifted & ((measured_1 & eve_basis_match) | indirect_2 | direct_success)
        bob_multi = zeros
    else:
        # Each of the l photons survives channel and detector independently,
        # so the detected count is Binomial(l, eta * alpha); one uniform
        # picks it through the inverse CDF (only the 0 / 1 / 2+ split
        # matters here).
        miss = 1.0 - survive
        if miss > 0.0:
            p_zero = miss**l
            p_one = l * survive * miss ** np.maximum(l - 1, 0)
        else:
            p_zero = (l == 0).astype(float)
            p_one = (l == 1).astype(float)
        detected = u[:, _COL_DETECT] >= p_zero
        bob_multi = u[:, _COL_DETECT] >= p_zero + p_one
        sifted = detected & (u[:, _COL_SIFT] < 0.5)
        errors = sifted & (u[:, _COL_ERROR] < params.r_c)
        eve_known = zeros

    def total(mask: np.ndarray) -> int:
        return int(np.count_nonzero(mask))

    return (
        total(sifted),
        total(errors),
        total(eve_known),
        total(bob_multi),
        total(l > 0),
        total(blocked_1),
        total(blocked_2),
        total(measured_1),
        total(passed_1),
        total(indirect_2),
        total(direct_success),
        total(direct_fail),
    )


def simulate(
    config: SimConfig,
    workers: int = 1,
    chunk_pulses: int = DEFAULT_CHUNK_PULSES,
) -> SimTally:
    """Run the pulse-level simulation described by ``config``.

    The tally is a pure function of ``config``: the same seed gives a
    bit-identical result for any ``workers`` or ``chunk_pulses``, because
    every pulse reads its randomness from a fixed offset of a counter-based
    stream.

    Plan probabilities outside [0, 1] are tolerated and act clamped (a
    blocking probability of 1.2 blocks everything, -0.1 blocks nothing), so
    infeasible plans can still be played to see what they would do. Photon
    numbers beyond the strategy table continue with its last entry; that
    region carries Poisson mass below any practical tolerance.

    Args:
        config: Scenario, plan, pulse count, and seed.
        workers: Worker threads; chunks merge in pulse order either way.
        chunk_pulses: Pulses vectorized per chunk (memory/speed knob).
    """
    if workers < 1:
        raise ParameterError(f"workers must be >= 1, got {workers}")
    if chunk_pulses < 1:
        raise ParameterError(f"chunk_pulses must be >= 1, got {chunk_pulses}")

    params = config.params
    l_cap = _photon_cap(params.mu)
    attack_probs = None
    if config.eve_active:
        table = config.table
        l_cap = max(l_cap, table.l_max)
        attack_probs = np.zeros(l_cap + 1)
        attack_probs[MIN_EXPLOITABLE_PHOTONS : table.l_max + 1] = table.probs[MIN_EXPLOITABLE_PHOTONS:]
        if table.l_max < l_cap:
            attack_probs[table.l_max + 1 :] = attack_probs[table.l_max]
    cdf = _poisson_cdf(params.mu, l_cap)

    starts = range(0, config.n_pulses, chunk_pulses)

    def run_chunk(start: int) -> tuple[int, ...]:
        count = min(chunk_pulses, config.n_pulses - start)
        return _chunk_counts(config, start, count, cdf, attack_probs)

    if workers == 1:
        chunk_results = [run_chunk(start) for start in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunk_results = list(pool.map(run_chunk, starts))

    counts = dict(zip(_COUNT_FIELDS, (sum(column) for column in zip(*chunk_results))))
    n = config.n_pulses
    return SimTally(
        config=config,
        pulses=n,
        **counts,
        stderr_sifted=_binomial_stderr(counts["sifted"], n),
        stderr_errors=_binomial_stderr(counts["errors"], n),
        stderr_eve_known=_binomial_stderr(counts["eve_known"], n),
    )


@dataclass(frozen=True, slots=True)
class StatCheck:
    """One statistic of the tally measured against its expectation."""

    name: str
    observed: int
    expected: float
    stderr: float
    z: float
    ok: bool


@dataclass(frozen=True, slots=True)
class ComparisonVerdict:
    """Z-scores of a tally against the closed-form attacked expectations."""

    checks: tuple[StatCheck, ...]
    sigma: float

    @property
    def passed(self) -> bool:
        return all(check.ok for check in self.checks)

    def format_table(self) -> str:
        lines = [
            f"{'statistic':<12} {'observed':>10} {'expected':>14} {'stderr':>10} {'z':>9}  verdict"
        ]
        for check in self.checks:
            verdict = "ok" if check.ok else f"FAIL (|z| > {self.sigma:g})"
            lines.append(
                f"{check.name:<12} {check.observed:>10d} {check.expected:>14.2f} "
                f"{check.stderr:>10.2f} {check.z:>9.2f}  {verdict}"
            )
        return "\n".join(lines)


def compare_to_analytic(
    tally: SimTally, report: AnalyticReport, sigma: float = DEFAULT_SIGMA
) -> ComparisonVerdict:
    """Check a tally against the attacked expectations of a report.

    Expectations scale from the report's per-block ``m`` to the tally's
    pulse count and are tested at ``sigma`` standard errors under the
    binomial null (stderr taken from the expected proportion, so a grossly
    wrong observation cannot shrink its own error bar). Comparing a
    baseline tally against an attacked report is legitimate and useful: a
    count-rate-matched attack should agree on ``sifted`` and disagree
    loudly on ``eve_known``.

    Raises:
        ParameterError: the tally and report were built from different
            system parameters.
    """
    if tally.config.params != report.params:
        raise ParameterError("tally and report were built from different system parameters")
    n = tally.pulses
    scale = n / report.params.m
    pairs = (
        ("sifted", tally.sifted, report.sifted_attacked * scale),
        ("errors", tally.errors, report.errors_attacked * scale),
        ("eve_known", tally.eve_known, report.eve_info * scale),
    )
    checks = []
    for name, observed, expected in pairs:
        proportion = min(max(expected / n, 0.0), 1.0)
        stderr = math.sqrt(n * proportion * (1.0 - proportion))
        if stderr == 0.0:
            z = 0.0 if observed == expected else math.inf
        else:
            z = (observed - expected) / stderr
        checks.append(StatCheck(name, observed, expected, stderr, z, abs(z) <= sigma))
    return ComparisonVerdict(checks=tuple(checks), sigma=sigma)
