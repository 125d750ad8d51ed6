"""Moment laws, nonclassicality visibility, parity and transfer diagnostics.

The mean and variance laws are the exact closed forms from the spin
picture with the calibrated rotation angle (alpha = 2*theta, r =
sin^2(theta)): mean Delta*(1-2r), variance ((S^2-Delta^2)/2 + S)*4r(1-r).
Their small-angle expansion is the usual ballistic-spread form, checked in
the tests up to a single global constant.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Union

from .errors import DegenerateError, RangeError
from .states import DeltaDistribution

Number = Union[int, float, Fraction]


def _items(dist):
    if isinstance(dist, DeltaDistribution):
        return list(dist.items())
    return sorted(dist.items())


def mean_delta(dist):
    """First moment of Delta_out over a distribution or marginal map."""
    return sum(d * p for d, p in _items(dist))


def variance_delta(dist):
    """Second central moment of Delta_out."""
    mean = mean_delta(dist)
    return sum(p * (d - mean) ** 2 for d, p in _items(dist))


def predicted_mean(total: int, delta: int, r):
    """Exact mean law Delta*(1-2r); Fraction in, Fraction out."""
    return delta * (1 - 2 * r)


def predicted_variance(total: int, delta: int, r):
    """Exact variance law ((S^2-Delta^2)/2 + S) * 4r(1-r).

    sin^2 of the calibrated rotation angle is 4r(1-r); the small-r limit
    is proportional to the ballistic theta^2 form.
    """
    base = (total * total - delta * delta) // 2 + total
    return base * 4 * r * (1 - r)


@dataclass(frozen=True)
class VisibilityReport:
    """Second-order interference visibility and its quantumness flag."""

    value: Number
    nonclassical: bool

    def __post_init__(self):
        if self.nonclassical != (self.value > Fraction(1, 2)):
            raise RangeError("nonclassical flag must equal (value > 1/2)")


def _report(value) -> VisibilityReport:
    return VisibilityReport(value, value > Fraction(1, 2))


def visibility_from_moments(g_ab, g_aa, g_bb, r) -> VisibilityReport:
    """Visibility from normally ordered moments <:na nb:>, <:na^2:>, <:nb^2:>.

    Invariant under common scaling of the three moments, which is the
    algebraic form of loss immunity.
    """
    t = 1 - r
    numerator = 2 * r * t * g_ab
    denominator = r * t * (g_aa + g_bb) + (r * r + t * t) * g_ab
    if denominator == 0:
        raise DegenerateError("visibility denominator vanished")
    return _report(numerator / denominator)


def visibility_fock(n: int, m: int, r) -> VisibilityReport:
    """Visibility of |n> meeting |m>; Fock moments <:n^2:> = n(n-1)."""
    if n < 0 or m < 0:
        raise RangeError("photon numbers must be non-negative")
    return visibility_from_moments(n * m, n * (n - 1), m * (m - 1), r)


def nonclassical_mask(n_max: int, m_max: int, r) -> Dict[tuple, bool]:
    """Grid scan of the nonclassical region over 0 <= n <= n_max, 0 <= m <= m_max.

    Degenerate cells (vanishing denominator, e.g. a bare single photon
    against vacuum) are reported classical.
    """
    mask = {}
    for n in range(n_max + 1):
        for m in range(m_max + 1):
            try:
                mask[(n, m)] = visibility_fock(n, m, r).nonclassical
            except DegenerateError:
                mask[(n, m)] = False
    return mask


def parity_violation(dist, total: int | None = None):
    """Largest probability found off the parity lattice of the photon total.

    A DeltaDistribution stores the dense parity lattice, so any violation
    would be a construction bug and the result is structurally zero; for a
    plain Delta_out -> probability map (e.g. a lossy marginal) pass the
    nominal total so the reference parity is known.
    """
    if isinstance(dist, DeltaDistribution):
        reference = dist.total
        items = list(dist.items())
    else:
        if total is None:
            raise RangeError("a plain marginal needs the nominal photon total")
        reference = total
        items = sorted(dist.items())
    worst = 0
    for delta_out, prob in items:
        if (reference - delta_out) % 2 != 0 and prob > worst:
            worst = prob
    return worst


def tv_distance(dist_a, dist_b):
    """Total variation distance, supports united with zeros."""
    map_a = dict(_items(dist_a))
    map_b = dict(_items(dist_b))
    keys = set(map_a) | set(map_b)
    return sum(abs(map_a.get(k, 0) - map_b.get(k, 0)) for k in keys) / 2


def transfer_fidelity(dist: DeltaDistribution, delta: int):
    """Probability of arriving at the mirrored position -delta."""
    return dist.prob(-delta)
