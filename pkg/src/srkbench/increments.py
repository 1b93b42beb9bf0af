"""Increment laws for the driver variables of weak SRK schemes.

A scheme of weak order p needs increments whose moments agree with the
standard normal up to order 2p+1 (first variable block) and 2p-1 (second
block).  Besides the normal itself, this module provides the symmetric
discrete laws that achieve exactly that with 2, 3 or 5 atoms:

    zero  point mass at 0                          matches moments k <= 1
    d3    +-1           w.p. 1/2                   matches moments k <= 3
    d5    +-sqrt(3)     w.p. 1/6,  0 w.p. 2/3      matches moments k <= 5
    d7    +-sqrt(6)     w.p. 1/30, +-1 w.p. 3/10,
          0 w.p. 1/3                               matches moments k <= 7

Atom values are surds, so moments are computed from the exact squared
values and probabilities; all discrete moments are exact rationals.
Sampling consumes exactly one uniform variate per draw (inverse CDF for
both the discrete laws and the normal), which keeps stream positions
aligned between scalar and vectorized consumers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import ndtri


@dataclass(frozen=True)
class IncrementDistribution:
    """A law for one driver variable.

    For discrete kinds, ``values`` holds the atoms in ascending order with
    ``squares`` their exact squared values and ``probs`` exact rational
    probabilities.  ``matched_through`` is the largest k such that all
    moments up to k equal those of N(0, 1); it is None for the normal law
    itself.
    """

    name: str
    kind: str  # "gaussian" or "discrete"
    matched_through: int | None = None
    values: tuple[float, ...] = ()
    squares: tuple[int, ...] = ()
    probs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.kind == "discrete":
            if sum(self.probs) != 1:
                raise ValueError("atom probabilities must sum to 1 exactly")
            if list(self.values) != sorted(self.values):
                raise ValueError("atoms must be in ascending order")

    def moment(self, k):
        """Exact k-th moment: a Fraction for discrete laws, an int for the normal."""
        if k < 0:
            raise ValueError("moment index must be nonnegative")
        if self.kind == "gaussian":
            if k % 2 == 1:
                return 0
            return math.prod(range(k - 1, 0, -2)) if k else 1
        if k % 2 == 1:
            # symmetric atoms with equal probabilities
            return Fraction(0)
        half = k // 2
        return sum((p * Fraction(sq) ** half for sq, p in zip(self.squares, self.probs)),
                   Fraction(0))

    def transform(self, u):
        """Map uniforms in (0, 1) to draws from this law, elementwise."""
        u = np.asarray(u)
        if self.kind == "gaussian":
            return ndtri(u)
        cut = np.cumsum([float(p) for p in self.probs[:-1]])
        idx = np.searchsorted(cut, u, side="left")
        return np.asarray(self.values, dtype=float)[idx]

    def sample(self, stream):
        """One draw, consuming one uniform from the stream."""
        return float(self.transform(stream.take(1))[0])


_SQRT3 = math.sqrt(3.0)
_SQRT6 = math.sqrt(6.0)

GAUSSIAN = IncrementDistribution(name="gaussian", kind="gaussian")
ZERO = IncrementDistribution(
    name="zero", kind="discrete", matched_through=1,
    values=(0.0,), squares=(0,), probs=(Fraction(1),),
)
D3 = IncrementDistribution(
    name="d3", kind="discrete", matched_through=3,
    values=(-1.0, 1.0), squares=(1, 1),
    probs=(Fraction(1, 2), Fraction(1, 2)),
)
D5 = IncrementDistribution(
    name="d5", kind="discrete", matched_through=5,
    values=(-_SQRT3, 0.0, _SQRT3), squares=(3, 0, 3),
    probs=(Fraction(1, 6), Fraction(2, 3), Fraction(1, 6)),
)
D7 = IncrementDistribution(
    name="d7", kind="discrete", matched_through=7,
    values=(-_SQRT6, -1.0, 0.0, 1.0, _SQRT6), squares=(6, 1, 0, 1, 6),
    probs=(Fraction(1, 30), Fraction(3, 10), Fraction(1, 3),
           Fraction(3, 10), Fraction(1, 30)),
)

_BY_NAME = {d.name: d for d in (GAUSSIAN, ZERO, D3, D5, D7)}


def by_name(name):
    """Look up a law by its CLI name (gaussian, zero, d3, d5, d7)."""
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown increment distribution {name!r}; "
                         f"choose from {sorted(_BY_NAME)}") from None


def moment(dist, k):
    return dist.moment(k)


def sample(dist, stream):
    return dist.sample(stream)


def required_distributions(p):
    """Minimal discrete pair for a weak order p scheme.

    The first block of driver variables must match normal moments through
    order 2p+1, the second block through 2p-1.
    """
    pairs = {1: (D3, ZERO), 2: (D5, D3), 3: (D7, D5)}
    if p not in pairs:
        raise ValueError("order p must be 1, 2 or 3")
    return pairs[p]


def distribution_pair(name):
    """CLI pairing: the named law drives the first block, the next lower
    matching law drives the second block."""
    pairs = {
        "gaussian": (GAUSSIAN, GAUSSIAN),
        "d7": (D7, D5),
        "d5": (D5, D3),
        "d3": (D3, ZERO),
        "zero": (ZERO, ZERO),
    }
    try:
        return pairs[name]
    except KeyError:
        raise ValueError(f"unknown increment distribution {name!r}; "
                         f"choose from {sorted(pairs)}") from None
