"""Physical imperfection models: distinguishability, mixed inputs, lossy detectors.

Distinguishability rotates one input beam into a superposition over an
orthogonal polarization.  The beam splitter does not mix polarizations and
counting detectors trace over them, so the output is exactly an incoherent
binomial mixture over the polarization split: interference of the surviving
parallel photons convolved with the plain binomial splitting of the
orthogonal remainder.  The equivalence with a coherent four-mode evolution
is still verified at small S in the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Mapping, Tuple

from .closedform import amplitude_expansion
from .errors import ModeError, NoSolution, RangeError
from .states import (
    FLOAT,
    BeamSplitter,
    DeltaDistribution,
    FockPair,
    JointCountDistribution,
    NumericMode,
)


@dataclass(frozen=True)
class DistinguishabilityAngle:
    """Polarization rotation angle: 0 = indistinguishable, pi/2 = distinguishable.

    Values within 1e-4 of the endpoints snap onto them, so hand-rounded
    inputs like 1.5708 mean exactly pi/2.
    """

    y: float

    _ENDPOINT_SNAP = 1e-4

    def __post_init__(self):
        y = float(self.y)
        if -self._ENDPOINT_SNAP < y < 0.0:
            y = 0.0
        elif math.pi / 2 < y < math.pi / 2 + self._ENDPOINT_SNAP:
            y = math.pi / 2
        if not (0.0 <= y <= math.pi / 2):
            raise RangeError(f"distinguishability angle must lie in [0, pi/2], got {self.y}")
        object.__setattr__(self, "y", y)

    def weights(self, count: int, exact: bool = False):
        """Binomial weights over the parallel-sector photon number n."""
        if exact:
            if self.y == 0.0:
                cos_sq, sin_sq = Fraction(1), Fraction(0)
            elif self.y == math.pi / 2:
                cos_sq, sin_sq = Fraction(0), Fraction(1)
            else:
                raise ModeError("exact weights exist only at y = 0 or y = pi/2")
        else:
            cos_sq = math.cos(self.y) ** 2
            sin_sq = 1.0 - cos_sq
        return [
            comb(count, n) * cos_sq**n * sin_sq ** (count - n)
            for n in range(count + 1)
        ]


@dataclass(frozen=True)
class MixedFockSource:
    """Fock state |K> degraded photon-by-photon: each survives with probability eta."""

    nominal: int
    eta: float

    def __post_init__(self):
        if self.nominal < 0:
            raise RangeError("nominal photon number must be non-negative")
        if not (0.0 <= float(self.eta) <= 1.0):
            raise RangeError(f"eta must lie in [0, 1], got {self.eta}")

    def weights(self):
        """Probability of k surviving photons, k = 0..K; sums to 1."""
        eta = self.eta
        return [
            comb(self.nominal, k) * eta**k * (1 - eta) ** (self.nominal - k)
            for k in range(self.nominal + 1)
        ]

    def mean_photons(self):
        return self.eta * self.nominal

    def second_factorial_moment(self):
        """Normally ordered <n(n-1)> = K(K-1) eta^2."""
        return self.nominal * (self.nominal - 1) * self.eta**2


@dataclass(frozen=True)
class Detector:
    """Photon-counting detector with efficiency and count resolution.

    Efficiency drives binomial thinning (apply_detector_loss); resolution
    is the count bin width consumed by bin_resolution.  Efficiency 1 with
    resolution 1 is the ideal detector and acts as the identity.
    """

    efficiency: float = 1.0
    resolution: int = 1

    def __post_init__(self):
        if not (0.0 < self.efficiency <= 1.0):
            raise RangeError(f"efficiency must lie in (0, 1], got {self.efficiency}")
        if self.resolution < 1:
            raise RangeError("resolution must be a positive integer")


def _port_probability_a(bs: BeamSplitter, exact: bool):
    # a-photon exits the first port with probability 1-r (fixed by the
    # single-photon expansion); b-photon with probability r
    r = bs.value(exact) if exact else bs.reflectivity
    return 1 - r


def decohere_distribution(
    pair: FockPair,
    angle: DistinguishabilityAngle,
    bs: BeamSplitter,
    mode: NumericMode = FLOAT,
    rotated_beam: str = "a",
) -> DeltaDistribution:
    """Output statistics with partially distinguishable inputs.

    `rotated_beam` selects which input is decomposed over the orthogonal
    polarization ("a" holds S-N photons, "b" holds N); the Delta = 0 case
    is insensitive to the choice.
    """
    if isinstance(angle, (int, float)):
        angle = DistinguishabilityAngle(float(angle))
    if rotated_beam not in ("a", "b"):
        raise RangeError("rotated_beam must be 'a' or 'b'")
    total = pair.total
    exact = mode.is_exact
    rotated = pair.mode_a if rotated_beam == "a" else pair.mode_b
    fixed = pair.mode_b if rotated_beam == "a" else pair.mode_a
    stay = _port_probability_a(bs, exact)  # rotated-beam photon -> first port
    if rotated_beam == "b":
        stay = 1 - stay
    weights = angle.weights(rotated, exact)
    zero = Fraction(0) if exact else 0.0
    out = [zero] * (total + 1)
    for n, w in enumerate(weights):
        if w == 0:
            continue
        if rotated_beam == "a":
            joint = amplitude_expansion(n, fixed, bs, mode)
        else:
            joint = amplitude_expansion(fixed, n, bs, mode)
        spare = rotated - n  # orthogonal photons, split binomially
        for (p_par, _q), prob in joint.items():
            if prob == 0:
                continue
            for extra in range(spare + 1):
                split = comb(spare, extra) * stay**extra * (1 - stay) ** (spare - extra)
                out[p_par + extra] += w * prob * split
    return DeltaDistribution(total, tuple(out))


def classical_reference(pair: FockPair, bs: BeamSplitter) -> DeltaDistribution:
    """Fully distinguishable limit: two independent binomial splittings.

    Each of the K first-mode photons exits the first port with probability
    1-r, each of the L second-mode photons with probability r; the output
    count is their convolution.  Computed directly from binomials, with no
    interference machinery, as an independent classical reference.
    """
    total = pair.total
    cap_k, cap_l = pair.mode_a, pair.mode_b
    r = bs.reflectivity
    out = [0.0] * (total + 1)
    for i in range(cap_k + 1):
        weight_a = comb(cap_k, i) * (1 - r) ** i * r ** (cap_k - i)
        for j in range(cap_l + 1):
            weight_b = comb(cap_l, j) * r**j * (1 - r) ** (cap_l - j)
            out[i + j] += weight_a * weight_b
    return DeltaDistribution(total, tuple(out))


def mixed_distribution(
    src_a: MixedFockSource,
    src_b: MixedFockSource,
    bs: BeamSplitter,
    mode: NumericMode = FLOAT,
) -> JointCountDistribution:
    """Output counts for two independently degraded Fock sources.

    Totals vary between terms, so the result lives on joint counts; the
    Delta_out marginal no longer has a strict parity comb.
    """
    weights_a = src_a.weights()
    weights_b = src_b.weights()
    acc: Dict[Tuple[int, int], float] = {}
    for k, w_k in enumerate(weights_a):
        if w_k == 0:
            continue
        for l, w_l in enumerate(weights_b):
            if w_l == 0:
                continue
            joint = amplitude_expansion(k, l, bs, mode)
            scale = w_k * w_l
            for key, prob in joint.items():
                acc[key] = acc.get(key, 0) + scale * prob
    return JointCountDistribution(acc)


def apply_detector_loss(
    joint: JointCountDistribution, det: Detector
) -> JointCountDistribution:
    """Independent binomial thinning of each port's count."""
    eff = det.efficiency
    if eff == 1.0:
        return joint
    acc: Dict[Tuple[int, int], float] = {}
    for (p, q), prob in joint.items():
        if prob == 0:
            continue
        for kept_p in range(p + 1):
            thin_p = comb(p, kept_p) * eff**kept_p * (1 - eff) ** (p - kept_p)
            for kept_q in range(q + 1):
                thin_q = comb(q, kept_q) * eff**kept_q * (1 - eff) ** (q - kept_q)
                key = (kept_p, kept_q)
                acc[key] = acc.get(key, 0) + prob * thin_p * thin_q
    return JointCountDistribution(acc)


def bin_resolution(marginal: Mapping[int, float], width: int) -> Dict[int, float]:
    """Aggregate a Delta_out marginal into contiguous bins of fixed width.

    The zero-containing bin is centered on 0 and keys are bin centers;
    ties at bin edges go to the higher bin.  Width below the lattice step
    acts as the identity.
    """
    if width < 1:
        raise RangeError("bin width must be a positive integer")
    if width < 2:
        return dict(sorted(marginal.items()))
    out: Dict[int, float] = {}
    for delta_out, prob in sorted(marginal.items()):
        center = ((2 * delta_out + width) // (2 * width)) * width
        out[center] = out.get(center, 0) + prob
    return dict(sorted(out.items()))


def product_2d(dist_h, dist_v) -> Dict[Tuple[int, int], float]:
    """Outer product of two independent direction marginals."""
    items_h = dist_h.items() if hasattr(dist_h, "items") else dist_h
    items_v = list(dist_v.items() if hasattr(dist_v, "items") else dist_v)
    out: Dict[Tuple[int, int], float] = {}
    for dh, ph in items_h:
        for dv, pv in items_v:
            out[(dh, dv)] = ph * pv
    return out


def purity(src: MixedFockSource):
    """Tr rho^2 of the degraded source: sum of squared weights."""
    return sum(w * w for w in src.weights())


def _purity_of(nominal: int, eta: float) -> float:
    return purity(MixedFockSource(nominal, eta))


def eta_for_purity(nominal: int, target: float, tol: float = 1e-12) -> float:
    """Survival probability giving the requested purity, by bisection.

    Purity is monotone increasing on eta in [1/2, 1]; targets below the
    eta = 1/2 floor (or above 1) have no solution.
    """
    if not (0.0 < target <= 1.0):
        raise NoSolution(f"purity target {target} outside (0, 1]")
    if target == 1.0:
        return 1.0
    if nominal == 0:
        raise NoSolution("a vacuum source has purity 1 for every eta")
    floor = _purity_of(nominal, 0.5)
    if target < floor:
        raise NoSolution(
            f"purity {target} below the achievable floor {floor:.6f} for K={nominal}"
        )
    lo, hi = 0.5, 1.0
    if not (_purity_of(nominal, lo) <= target <= _purity_of(nominal, hi)):
        raise NoSolution("purity not monotone on the bracket; target unreachable")
    while hi - lo > tol * 0.5:
        mid = 0.5 * (lo + hi)
        if _purity_of(nominal, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def eta_for_joint_purity(
    nominal_a: int, nominal_b: int, target: float, tol: float = 1e-12
) -> float:
    """Common survival probability giving a joint (product) input purity."""
    if not (0.0 < target <= 1.0):
        raise NoSolution(f"purity target {target} outside (0, 1]")
    if target == 1.0:
        return 1.0
    if nominal_a == 0 and nominal_b == 0:
        raise NoSolution("two vacuum sources have joint purity 1 for every eta")

    def joint(eta):
        return _purity_of(nominal_a, eta) * _purity_of(nominal_b, eta)

    if target < joint(0.5):
        raise NoSolution(
            f"joint purity {target} below the achievable floor {joint(0.5):.6f}"
        )
    lo, hi = 0.5, 1.0
    while hi - lo > tol * 0.5:
        mid = 0.5 * (lo + hi)
        if joint(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
