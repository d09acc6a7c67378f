"""Diversity and change indices for attention distributions.

All indices use base-2 logarithms, so entropy is in bits and the effective
number of issues is ``2 ** entropy``.  The functions accept either a
:class:`Distribution` or a plain 1-D array of shares; arrays are taken
positionally and renormalized.

Zero shares follow the usual continuity conventions: ``0 * log2(0) = 0`` in
the entropy and ``0 * log2(0 / q) = 0`` in the divergence.  A zero in the
*reference* distribution where the current one is positive makes the
divergence infinite, which is why :func:`smooth` exists.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from datetime import date
from typing import Union

import numpy as np

from .errors import (
    AlignmentError,
    DegenerateInputError,
    InfiniteDivergenceError,
    ParameterError,
    ShareSumError,
)

__all__ = [
    "Distribution",
    "MeasureRecord",
    "SUM_TOLERANCE",
    "default_epsilon",
    "effective_number",
    "entropy",
    "inverse_simpson",
    "kl_divergence",
    "pedersen",
    "smooth",
]

# Accepted range for the raw share total of a directly constructed
# distribution.  Poll exports lose a few percent to rounding and "don't know".
SUM_TOLERANCE = (0.97, 1.03)


class Distribution:
    """Normalized attention shares over an ordered set of issue ids.

    Parameters
    ----------
    entries : mapping or iterable of (issue_id, share) pairs
        Shares must be finite and nonnegative; ids must be unique.
    lenient : bool, optional
        Accept any positive total and renormalize.  By default the raw total
        must lie within :data:`SUM_TOLERANCE`.

    The pre-normalization total is kept in :attr:`raw_total`.  Instances are
    immutable; the share array is read-only.
    """

    __slots__ = ("_issues", "_shares", "_index", "raw_total")

    def __init__(
        self,
        entries: Mapping[str, float] | Iterable[tuple[str, float]],
        *,
        lenient: bool = False,
    ) -> None:
        pairs = list(entries.items() if isinstance(entries, Mapping) else entries)
        if not pairs:
            raise DegenerateInputError("distribution has no entries")
        issues = tuple(str(issue) for issue, _ in pairs)
        index = {issue: i for i, issue in enumerate(issues)}
        if len(index) != len(issues):
            dupes = sorted({i for i in issues if issues.count(i) > 1})
            raise AlignmentError(f"duplicate issue ids in distribution: {dupes}")
        shares = np.array([float(s) for _, s in pairs], dtype=float)
        if not np.all(np.isfinite(shares)) or np.any(shares < 0):
            raise DegenerateInputError("shares must be finite and nonnegative")
        total = math.fsum(shares)
        if total <= 0:
            raise DegenerateInputError("distribution has no positive share")
        if not lenient and not SUM_TOLERANCE[0] <= total <= SUM_TOLERANCE[1]:
            raise ShareSumError(
                f"shares sum to {total:.6g}, outside {SUM_TOLERANCE}; "
                "check units or pass lenient=True"
            )
        if total != 1.0:
            shares = shares / total
        shares.flags.writeable = False
        self._issues = issues
        self._shares = shares
        self._index = index
        self.raw_total = total

    @classmethod
    def uniform(cls, issues: Sequence[str]) -> Distribution:
        return cls(((i, 1.0) for i in issues), lenient=True)

    @property
    def issues(self) -> tuple[str, ...]:
        return self._issues

    @property
    def shares(self) -> np.ndarray:
        return self._shares

    @property
    def support_size(self) -> int:
        """Number of issues with strictly positive share."""
        return int(np.count_nonzero(self._shares))

    def __len__(self) -> int:
        return len(self._issues)

    def __contains__(self, issue: object) -> bool:
        return issue in self._index

    def __iter__(self):
        return iter(zip(self._issues, self._shares.tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return self._issues == other._issues and np.array_equal(
            self._shares, other._shares
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {s:.4g}" for i, s in self)
        return f"Distribution({{{body}}})"

    def share(self, issue: str) -> float:
        """Share of *issue*; 0.0 for issues outside the support."""
        i = self._index.get(issue)
        return 0.0 if i is None else float(self._shares[i])

    def as_dict(self) -> dict[str, float]:
        return dict(self)

    def reindex(self, support: Sequence[str]) -> Distribution:
        """Express the distribution over *support*, absent issues at 0.

        *support* must contain every issue of this distribution.  Mass is
        unchanged, so no renormalization takes place.
        """
        support = tuple(support)
        if support == self._issues:
            return self
        members = set(support)
        missing = [i for i in self._issues if i not in members]
        if missing:
            raise AlignmentError(f"support is missing issues {missing}")
        out = Distribution.__new__(Distribution)
        shares = np.array([self.share(i) for i in support], dtype=float)
        shares.flags.writeable = False
        out._issues = support
        out._shares = shares
        out._index = {issue: i for i, issue in enumerate(support)}
        if len(out._index) != len(support):
            raise AlignmentError("support contains duplicate issue ids")
        out.raw_total = self.raw_total
        return out

    def restrict(self, keep: Iterable[str]) -> Distribution:
        """Keep only the issues in *keep* (in this distribution's order) and
        renormalize.  Raises :class:`DegenerateInputError` if no mass is left."""
        keep = set(keep)
        return Distribution(
            ((i, s) for i, s in self if i in keep), lenient=True
        )


Shares = Union[Distribution, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class MeasureRecord:
    """Per-bucket measures.  ``novelty_bits`` and ``pedersen`` are ``None``
    on the first bucket of a series."""

    bucket_start: date
    total_issues: int
    entropy_bits: float
    effective_number: float
    inverse_simpson: float
    novelty_bits: float | None
    pedersen: float | None
    gap_before: bool = False


def _shares(d: Shares) -> np.ndarray:
    if isinstance(d, Distribution):
        return d.shares
    s = np.asarray(d, dtype=float)
    if s.ndim != 1:
        raise DegenerateInputError("shares must be one-dimensional")
    if s.size == 0:
        raise DegenerateInputError("distribution has no entries")
    if not np.all(np.isfinite(s)) or np.any(s < 0):
        raise DegenerateInputError("shares must be finite and nonnegative")
    total = s.sum()
    if total <= 0:
        raise DegenerateInputError("distribution has no positive share")
    return s / total


def _aligned(current: Shares, previous: Shares) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(current, Distribution) and isinstance(previous, Distribution):
        if current.issues != previous.issues:
            raise AlignmentError(
                "distributions are over different supports; align them first"
            )
    p, q = _shares(current), _shares(previous)
    if p.shape != q.shape:
        raise AlignmentError(f"support sizes differ: {p.size} vs {q.size}")
    return p, q


def entropy(d: Shares) -> float:
    """Shannon entropy in bits, ``-sum(p * log2(p))`` over positive shares.

    Ranges from 0 (all attention on one issue) to ``log2(n)`` (uniform).
    """
    p = _shares(d)
    p = p[p > 0]
    return float(-np.dot(p, np.log2(p))) + 0.0


def effective_number(d: Shares) -> float:
    """Effective number of issues, ``2 ** entropy(d)``.

    Equals 1 for a point mass and ``n`` for a uniform distribution over ``n``
    issues.  This is the Hill number of order 1.
    """
    return float(2.0 ** entropy(d))


def inverse_simpson(d: Shares) -> float:
    """Inverse Simpson index ``1 / sum(p ** 2)`` (Hill number of order 2)."""
    p = _shares(d)
    return float(1.0 / np.dot(p, p))


def kl_divergence(current: Shares, previous: Shares) -> float:
    """Novelty of *current* relative to *previous*, in bits.

    ``sum(p * log2(p / q))`` over issues where ``p > 0``.  Both arguments must
    be over the same support.

    Raises
    ------
    AlignmentError
        If the supports differ.
    InfiniteDivergenceError
        If *previous* has a zero share where *current* is positive.  Smooth
        both distributions with :func:`smooth` first.
    """
    p, q = _aligned(current, previous)
    mask = p > 0
    if np.any(q[mask] == 0):
        raise InfiniteDivergenceError(
            "previous distribution has zero share where current is positive; "
            "smooth both distributions before computing the divergence"
        )
    p, q = p[mask], q[mask]
    value = float(np.dot(p, np.log2(p / q)))
    # Gibbs' inequality; only rounding can push this below zero.
    return max(value, 0.0)


def pedersen(current: Shares, previous: Shares) -> float:
    """Pedersen volatility, half the L1 distance between two share vectors.

    Reported on the 0-1 scale.  Distributions over different issue sets are
    compared on the union of their supports, absent issues counting as 0.
    """
    if isinstance(current, Distribution) and isinstance(previous, Distribution):
        if current.issues != previous.issues:
            union = list(current.issues)
            union += [i for i in previous.issues if i not in current]
            current, previous = current.reindex(union), previous.reindex(union)
    p, q = _aligned(current, previous)
    return min(0.5 * float(np.abs(p - q).sum()), 1.0)


def default_epsilon(support_size: int) -> float:
    """Default smoothing pseudocount, ``1 / (10 * support_size)``."""
    if support_size < 1:
        raise ParameterError("support size must be at least 1")
    return 1.0 / (10 * support_size)


def smooth(d: Distribution, support: Sequence[str], epsilon: float) -> Distribution:
    """Extend *d* to *support*, add *epsilon* to every share and renormalize.

    The result is strictly positive everywhere, so it can serve as the
    reference of :func:`kl_divergence`.  Additive smoothing is monotone, so
    the ordering of shares (and the argmax) is preserved.
    """
    if not (isinstance(epsilon, (int, float)) and math.isfinite(epsilon) and epsilon > 0):
        raise ParameterError(f"epsilon must be a positive finite number, got {epsilon!r}")
    extended = d.reindex(support)
    return Distribution(
        zip(extended.issues, (extended.shares + epsilon).tolist()), lenient=True
    )
