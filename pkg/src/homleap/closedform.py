"""Closed-form output statistics of two Fock states meeting at a beam splitter.

Two routes are provided.  `amplitude_expansion` expands the output state
term by term (the double sum over how many photons from each input end up
in the first port) and squares collected amplitudes; `prob_delta_out` and
`distribution` evaluate the single-sum closed form directly.  The closed
form's port/sign convention is pinned by the single-photon case: a photon
entering the first mode leaves through the first port with probability
1-r, so r = 0 is the identity and r = 1 maps Delta to -Delta.

The alternating sum cancels catastrophically for large S in floating
point, so the float path switches to the stable Wigner-rotation recurrence
above S = 30; exact-rational mode always evaluates the sum literally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import List, Union

from .errors import LatticeError, RangeError
from .states import (
    FLOAT,
    BeamSplitter,
    DeltaDistribution,
    FockPair,
    JointCountDistribution,
    NumericMode,
)
from . import walk

#: largest S for which the float path evaluates the alternating sum directly
DIRECT_FLOAT_LIMIT = 30


@dataclass(frozen=True)
class ClosedFormTerm:
    """One summand of the closed form, indexed by k."""

    k: int
    value: Union[float, Fraction]


def _term_range(total, delta, delta_out):
    lo = max(0, (delta_out - delta) // 2)
    hi = min((total - delta) // 2, (total + delta_out) // 2)
    return lo, hi


def _sum_terms(total, delta, delta_out, r):
    """Summands at each admissible k; generic over Fraction and float r.

    Terms are built incrementally (each from its predecessor), which keeps
    exact-rational evaluation cheap.
    """
    f_plus = (total + delta) // 2
    f_minus = (total - delta) // 2
    f_plus_out = (total + delta_out) // 2
    ratio = r / (r - 1)
    lo, hi = _term_range(total, delta, delta_out)
    if lo > hi:
        return []
    term = comb(f_minus, lo) * comb(f_plus, f_plus_out - lo) * ratio**lo
    terms = [term]
    for k in range(lo, hi):
        term = (
            term
            * (f_minus - k)
            * (f_plus_out - k)
            * ratio
            / ((k + 1) * (f_plus - f_plus_out + k + 1))
        )
        terms.append(term)
    return terms


def closed_form_terms(
    pair: FockPair, bs: BeamSplitter, delta_out: int, mode: NumericMode = FLOAT
) -> List[ClosedFormTerm]:
    """The closed-form summands for one outcome, k in ascending order.

    k runs from max{0, (delta_out-delta)/2} to min{(S-delta)/2,
    (S+delta_out)/2}.  Undefined at the singular endpoints r = 0 and r = 1,
    which the probability routines short-circuit instead.
    """
    total, delta = pair.total, pair.delta
    if abs(delta_out) > total or (total - delta_out) % 2 != 0:
        raise LatticeError(f"{delta_out} is off the lattice of S={total}")
    r = _reflectivity(bs, mode)
    if r == 0 or r == 1:
        raise RangeError("closed-form terms are singular at r = 0 and r = 1")
    lo, _hi = _term_range(total, delta, delta_out)
    values = _sum_terms(total, delta, delta_out, r if mode.is_exact else float(r))
    return [ClosedFormTerm(lo + i, v) for i, v in enumerate(values)]


def _reflectivity(bs: BeamSplitter, mode: NumericMode):
    if mode.is_exact:
        return bs.value(exact=True)
    return bs.reflectivity


def _point_mass(total: int, at: int, exact: bool) -> DeltaDistribution:
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    probs = [zero] * (total + 1)
    probs[(at + total) // 2] = one
    return DeltaDistribution(total, tuple(probs))


def _closed_form(total, delta, delta_out, r):
    """Single-sum closed form; generic over Fraction and float arithmetic."""
    terms = _sum_terms(total, delta, delta_out, r)
    if not terms:
        return r * 0
    total_sum = math.fsum(terms) if isinstance(r, float) else sum(terms)
    f_plus_out = (total + delta_out) // 2
    f_minus_out = (total - delta_out) // 2
    f_plus = (total + delta) // 2
    f_minus = (total - delta) // 2
    prefactor = (
        Fraction(
            factorial(f_plus_out) * factorial(f_minus_out),
            factorial(f_plus) * factorial(f_minus),
        )
        * (1 - r) ** total
        * (r / (1 - r)) ** ((delta - delta_out) // 2)
    )
    value = prefactor * total_sum * total_sum
    return value if isinstance(value, Fraction) else float(value)


def prob_delta_out(
    pair: FockPair, bs: BeamSplitter, delta_out: int, mode: NumericMode = FLOAT
):
    """Probability of measuring population difference delta_out.

    Exact Fraction in rational mode (requires a rational beam splitter),
    float otherwise.
    """
    total, delta = pair.total, pair.delta
    if abs(delta_out) > total or (total - delta_out) % 2 != 0:
        raise LatticeError(f"{delta_out} is off the lattice of S={total}")
    r = _reflectivity(bs, mode)
    # endpoints short-circuit before any division by r or 1-r
    if r == 0:
        hit = delta_out == delta
    elif r == 1:
        hit = delta_out == -delta
    else:
        if mode.is_exact:
            return _closed_form(total, delta, delta_out, r)
        if total <= DIRECT_FLOAT_LIMIT:
            return _closed_form(total, delta, delta_out, float(r))
        probs = walk.rotation_probabilities(pair, bs)
        return float(probs[(delta_out + total) // 2])
    one = Fraction(1) if mode.is_exact else 1.0
    return one * int(hit)


def distribution(
    pair: FockPair, bs: BeamSplitter, mode: NumericMode = FLOAT
) -> DeltaDistribution:
    """Closed-form distribution over the full Delta_out lattice."""
    total, delta = pair.total, pair.delta
    r = _reflectivity(bs, mode)
    if r == 0:
        return _point_mass(total, delta, mode.is_exact)
    if r == 1:
        return _point_mass(total, -delta, mode.is_exact)
    if not mode.is_exact and total > DIRECT_FLOAT_LIMIT:
        probs = walk.rotation_probabilities(pair, bs)
        return DeltaDistribution(total, tuple(float(p) for p in probs))
    probs = tuple(
        prob_delta_out(pair, bs, d, mode) for d in range(-total, total + 1, 2)
    )
    return DeltaDistribution(total, probs)


def amplitude_expansion(
    mode_a: int, mode_b: int, bs: BeamSplitter, mode: NumericMode = FLOAT
) -> JointCountDistribution:
    """Joint output counts from the term-by-term output-state expansion.

    Expands (sqrt(1-r) c1 - sqrt(r) c2)^K (sqrt(r) c1 + sqrt(1-r) c2)^L
    over the two output-port creation operators, collects the amplitude on
    each (p, q) with p + q = K + L, and squares.  Agrees with
    `distribution` through the Delta_out marginal.
    """
    if mode_a < 0 or mode_b < 0:
        raise LatticeError("mode occupations must be non-negative")
    cap_k, cap_l = mode_a, mode_b
    total = cap_k + cap_l
    r = _reflectivity(bs, mode)
    exact = mode.is_exact
    entries = {}
    if exact:
        t = 1 - r
        for p in range(total + 1):
            q = total - p
            rho_r = (cap_k + p) % 2  # leftover sqrt(r) power
            rho_t = (cap_l + p) % 2  # leftover sqrt(1-r) power
            bracket = Fraction(0)
            for k in range(max(0, p - cap_l), min(cap_k, p) + 1):
                e_r = cap_k + p - 2 * k
                e_t = cap_l - p + 2 * k
                sign = -1 if (cap_k - k) % 2 else 1
                bracket += (
                    sign
                    * comb(cap_k, k)
                    * comb(cap_l, p - k)
                    * r ** ((e_r - rho_r) // 2)
                    * t ** ((e_t - rho_t) // 2)
                )
            entries[(p, q)] = (
                bracket
                * bracket
                * r**rho_r
                * t**rho_t
                * Fraction(
                    factorial(p) * factorial(q), factorial(cap_k) * factorial(cap_l)
                )
            )
    elif total > DIRECT_FLOAT_LIMIT:
        # the alternating amplitude sums cancel catastrophically here; take
        # the stable rotation-recurrence probabilities on the same support
        probs = walk.rotation_probabilities(
            FockPair(total, cap_k - cap_l), BeamSplitter(float(r))
        )
        for p in range(total + 1):
            entries[(p, total - p)] = float(probs[p])
    else:
        r = float(r)
        sqrt_r = math.sqrt(r)
        sqrt_t = math.sqrt(1.0 - r)
        for p in range(total + 1):
            q = total - p
            terms = []
            for k in range(max(0, p - cap_l), min(cap_k, p) + 1):
                sign = -1.0 if (cap_k - k) % 2 else 1.0
                terms.append(
                    sign
                    * comb(cap_k, k)
                    * comb(cap_l, p - k)
                    * sqrt_r ** (cap_k + p - 2 * k)
                    * sqrt_t ** (cap_l - p + 2 * k)
                )
            amp = math.fsum(terms)
            entries[(p, q)] = (
                amp
                * amp
                * float(
                    Fraction(
                        factorial(p) * factorial(q),
                        factorial(cap_k) * factorial(cap_l),
                    )
                )
            )
    return JointCountDistribution(entries)
