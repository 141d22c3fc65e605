"""Pluggable model of the eavesdropper's direct attack on multi-photon pulses.

A direct attack measures every photon of an intercepted pulse separately
and, when the measurements pin down the transmitted polarization, injects a
fresh photon in that state right at the receiver's detector. How often the
measurements succeed is a property of the chosen measurement strategy, so
it lives in a table indexed by photon number rather than in a hard-coded
formula: swap the table and every downstream result follows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .core import ParameterError, poisson_pmf, poisson_tail

__all__ = [
    "DEFAULT_L_MAX",
    "DEFAULT_MU_MAX",
    "DEFAULT_TRUNCATION_TOL",
    "MIN_EXPLOITABLE_PHOTONS",
    "TruncationError",
    "TableFormatError",
    "DirectAttackTable",
    "build_default_table",
    "build_pessimistic_table",
    "load_table",
    "direct_attack_rate",
]

DEFAULT_L_MAX = 64
DEFAULT_MU_MAX = 5.0
DEFAULT_TRUNCATION_TOL = 1e-12

# The attack exploits pulses of four or more photons. Three-photon pulses
# are absorbed without yield even though a conclusive measurement is
# sometimes possible (the table still records that probability); keeping
# them out of the aggregate is what the count-rate and information formulas
# downstream assume.
MIN_EXPLOITABLE_PHOTONS = 4


class TruncationError(ValueError):
    """The table is too short for the requested mean photon number."""


class TableFormatError(ValueError):
    """A strategy table file does not follow the ``l probability`` format."""


@dataclass(frozen=True, slots=True)
class DirectAttackTable:
    """Success probabilities of a direct-attack strategy, by photon number.

    Attributes:
        probs: probs[l] is the probability that measuring an l-photon pulse
            determines its polarization conclusively. Entries 0..2 must be
            zero: with fewer than three photons it is impossible both to
            unmask the wrong basis (two differing wrong-basis outcomes) and
            to read the bit in the right one.
        tail_bound: Poisson mass ignored above the table at the largest
            mean photon number the table was built for (metadata only).
        strategy_name: Short identifier for reports and plots.
    """

    probs: tuple[float, ...]
    tail_bound: float
    strategy_name: str

    def __post_init__(self) -> None:
        if len(self.probs) < 4:
            raise ParameterError(
                f"table must cover photon numbers up to at least 3, got l_max={len(self.probs) - 1}"
            )
        for l in (0, 1, 2):
            if self.probs[l] != 0.0:
                raise ParameterError(f"probs[{l}] must be 0, got {self.probs[l]!r}")
        for l, value in enumerate(self.probs):
            if not (isinstance(value, float) and math.isfinite(value) and 0.0 <= value <= 1.0):
                raise ParameterError(f"probs[{l}] must be a float in [0, 1], got {value!r}")
        if not (math.isfinite(self.tail_bound) and self.tail_bound >= 0.0):
            raise ParameterError(f"tail_bound must be >= 0, got {self.tail_bound!r}")

    @property
    def l_max(self) -> int:
        return len(self.probs) - 1


def build_default_table(l_max: int = DEFAULT_L_MAX, mu_max: float = DEFAULT_MU_MAX) -> DirectAttackTable:
    """Exact table for the conclusive-exclusion measurement strategy.

    Each photon of an l-photon pulse is measured in an independently,
    uniformly chosen basis (rectilinear or diagonal). The pulse is read
    conclusively iff

      * at least two photons measured in the basis that is wrong for the
        transmitted state give differing outcomes, which unmasks that basis
        as the wrong one, and
      * at least one photon was measured in the correct basis, whose
        deterministic outcome then reveals the bit.

    With k wrong-basis photons (binomial weight C(l, k) / 2**l) the k
    outcomes are not all identical with probability 1 - 2**(1 - k), so

        probs[l] = sum over 2 <= k <= l-1 of C(l, k) 2**(-l) (1 - 2**(1-k))

    Each entry is accumulated in exact rational arithmetic and rounded to
    float once.

    Args:
        l_max: Largest photon number covered, >= 3.
        mu_max: Largest mean photon number the table is intended for; only
            sets the ``tail_bound`` metadata.

    Raises:
        ParameterError: ``l_max`` < 3.
    """
    if l_max < 3:
        raise ParameterError(f"l_max must be >= 3, got {l_max}")
    probs = [0.0, 0.0, 0.0]
    for l in range(3, l_max + 1):
        total = sum(
            Fraction(math.comb(l, k), 2**l) * (1 - Fraction(2, 2**k))
            for k in range(2, l)
        )
        probs.append(float(total))
    return DirectAttackTable(
        probs=tuple(probs),
        tail_bound=poisson_tail(mu_max, l_max + 1),
        strategy_name="conclusive-exclusion",
    )


def build_pessimistic_table(l_max: int = DEFAULT_L_MAX, mu_max: float = DEFAULT_MU_MAX) -> DirectAttackTable:
    """Upper-bound table: every pulse of three or more photons is read."""
    if l_max < 3:
        raise ParameterError(f"l_max must be >= 3, got {l_max}")
    return DirectAttackTable(
        probs=(0.0, 0.0, 0.0) + (1.0,) * (l_max - 2),
        tail_bound=poisson_tail(mu_max, l_max + 1),
        strategy_name="pessimistic-unit",
    )


def load_table(path: str | Path, mu_max: float = DEFAULT_MU_MAX) -> DirectAttackTable:
    """Read a strategy table from a text file of ``l probability`` pairs.

    One pair per line, whitespace separated; blank lines and ``#`` comments
    are ignored. Photon numbers may appear in any order, and anything not
    listed defaults to probability 0. Entries for l = 0..2, if present,
    must be 0, and the table must reach at least l = 3.

    Raises:
        TableFormatError: malformed lines, duplicate photon numbers, values
            outside [0, 1], or a table that stops below l = 3.
    """
    path = Path(path)
    entries: dict[int, float] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise TableFormatError(f"{path}:{lineno}: expected 'l probability', got {raw!r}")
        try:
            l = int(fields[0])
            value = float(fields[1])
        except ValueError:
            raise TableFormatError(f"{path}:{lineno}: cannot parse {raw!r}") from None
        if l < 0:
            raise TableFormatError(f"{path}:{lineno}: photon number must be >= 0")
        if l in entries:
            raise TableFormatError(f"{path}:{lineno}: duplicate entry for l={l}")
        entries[l] = value
    if not entries or max(entries) < 3:
        raise TableFormatError(f"{path}: table must define probabilities up to at least l=3")
    l_max = max(entries)
    probs = tuple(entries.get(l, 0.0) for l in range(l_max + 1))
    try:
        return DirectAttackTable(
            probs=probs,
            tail_bound=poisson_tail(mu_max, l_max + 1),
            strategy_name=path.stem,
        )
    except ParameterError as exc:
        raise TableFormatError(f"{path}: {exc}") from None


def direct_attack_rate(
    table: DirectAttackTable, mu: float, tol: float = DEFAULT_TRUNCATION_TOL
) -> float:
    """Probability that a random pulse becomes a successful direct attack.

    Averages the table over the photon-number distribution, counting only
    exploitable pulses:

        rate = sum over l >= 4 up to l_max of poisson_pmf(mu, l) * probs[l]

    Args:
        table: Strategy table.
        mu: Mean photon number, > 0.
        tol: Cap on the Poisson mass the truncated sum is allowed to ignore
            above ``l_max``.

    Raises:
        TruncationError: poisson_tail(mu, l_max + 1) exceeds ``tol``,
            meaning the table is too short for this ``mu``.
        ParameterError: invalid ``mu``.
    """
    ignored = poisson_tail(mu, table.l_max + 1)
    if ignored > tol:
        raise TruncationError(
            f"Poisson mass {ignored:.3e} beyond l_max={table.l_max} exceeds tolerance "
            f"{tol:.1e} at mu={mu}; build a longer table"
        )
    return sum(
        poisson_pmf(mu, l) * table.probs[l]
        for l in range(MIN_EXPLOITABLE_PHOTONS, table.l_max + 1)
    )
