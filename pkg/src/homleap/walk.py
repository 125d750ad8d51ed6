"""Line-graph walk machinery: hopping generator, unitary evolution, Wigner rotations.

This is the brute-force ground truth the closed-form path is checked
against.  The generator is the symmetric tridiagonal matrix of nearest
neighbour hoppings on the Delta lattice; evolution goes through its
eigendecomposition (exact unitarity up to rounding, and the equally
spaced spectrum doubles as a built-in test).  The same transition
probabilities are reachable through Wigner small-d rotation matrices of
spin S/2 with rotation angle alpha = 2*theta, r = sin^2(theta); that
calibration is fixed by the single-photon case and verified in the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, LatticeError, RangeError
from .states import BeamSplitter, DeltaDistribution, FockPair, delta_lattice

#: below this |sin(beta)| the three-term recurrence divides by ~0; the
#: explicit factorial sum has a single dominant term there and is used instead
_RECURRENCE_SIN_FLOOR = 1e-6


def hopping_amplitude(total: int, delta: int) -> float:
    """Hopping amplitude on the lattice edge between delta and delta-2.

    Equals sqrt((S+Delta)(S-Delta+2))/2 and is symmetric in its two site
    labels.  The edge exists for Delta >= -S+2.
    """
    if abs(delta) > total or (total - delta) % 2 != 0:
        raise LatticeError(f"position {delta} is off the lattice of S={total}")
    if delta < -total + 2:
        raise LatticeError(f"no edge below {-total + 2} for S={total}")
    return 0.5 * math.sqrt((total + delta) * (total - delta + 2))


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """Symmetric tridiagonal walk generator with zero diagonal."""

    total: int
    off_diagonal: Tuple[float, ...]

    def __post_init__(self):
        if len(self.off_diagonal) != self.total:
            raise LatticeError(
                f"expected {self.total} couplings, got {len(self.off_diagonal)}"
            )
        if self.total >= 1 and any(c <= 0 for c in self.off_diagonal):
            raise RangeError("all couplings must be strictly positive")

    def dense(self) -> np.ndarray:
        off = np.asarray(self.off_diagonal, dtype=float)
        return np.diag(off, 1) + np.diag(off, -1)


def build_hamiltonian(total: int) -> TridiagonalHamiltonian:
    """Walk generator on the Delta lattice of S photons.

    Couplings are listed along the lattice in ascending order, i.e. entry i
    couples -S+2i to -S+2i+2.  The global sign of the two-mode hopping
    Hamiltonian (phase pi gives an overall minus) is dropped: it is
    unobservable in every exported probability.
    """
    if total < 0:
        raise RangeError("photon total must be non-negative")
    offs = tuple(hopping_amplitude(total, d) for d in range(-total + 2, total + 1, 2))
    return TridiagonalHamiltonian(total, offs)


@lru_cache(maxsize=None)
def _eigensystem(total: int):
    # read-only after insertion; shared across threads
    if total == 0:
        return np.zeros(1), np.ones((1, 1))
    ham = build_hamiltonian(total)
    vals, vecs = eigh_tridiagonal(
        np.zeros(total + 1), np.asarray(ham.off_diagonal, dtype=float)
    )
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return vals, vecs


@dataclass(frozen=True)
class AmplitudeVector:
    """Complex walker amplitudes over the Delta lattice of S photons."""

    total: int
    amplitudes: Tuple[complex, ...]

    def __post_init__(self):
        if len(self.amplitudes) != self.total + 1:
            raise LatticeError("amplitude vector length must be S+1")
        norm = sum(abs(a) ** 2 for a in self.amplitudes)
        if abs(norm - 1.0) > 1e-9:
            raise RangeError(f"amplitude vector norm {norm!r} is not 1")

    def lattice(self) -> list:
        return delta_lattice(self.total)

    def probabilities(self) -> np.ndarray:
        return np.abs(np.asarray(self.amplitudes)) ** 2


def evolve(pair: FockPair, theta: float) -> AmplitudeVector:
    """Walker state exp(-i*theta*H)|Delta> via eigendecomposition."""
    vals, vecs = _eigensystem(pair.total)
    start = vecs[(pair.delta + pair.total) // 2, :]
    amps = vecs @ (np.exp(-1j * theta * vals) * start)
    return AmplitudeVector(pair.total, tuple(amps))


def evolved_distribution(pair: FockPair, bs: BeamSplitter) -> DeltaDistribution:
    """Output statistics by direct unitary evolution (the ground-truth route)."""
    probs = evolve(pair, bs.theta).probabilities()
    return DeltaDistribution(pair.total, tuple(float(p) for p in probs))


def _check_spin_indices(two_s: int, *two_ms: int):
    if two_s < 0:
        raise DomainError("spin must be non-negative")
    for m2 in two_ms:
        if abs(m2) > two_s or (two_s - m2) % 2 != 0:
            raise DomainError(
                f"projection {m2}/2 invalid for spin {two_s}/2 (doubled ints)"
            )


def _log_factorial(n: int) -> float:
    return math.lgamma(n + 1)


def _wigner_sum(two_s: int, two_m1: int, two_m2: int, beta: float) -> float:
    """Explicit factorial sum for d^s_{m1,m2}(beta), log-domain magnitudes.

    Only used near beta = 0 mod pi where a single term dominates and the
    recurrence would divide by sin(beta) ~ 0.
    """
    c = math.cos(beta / 2.0)
    s = math.sin(beta / 2.0)
    pref = 0.5 * (
        _log_factorial((two_s + two_m1) // 2)
        + _log_factorial((two_s - two_m1) // 2)
        + _log_factorial((two_s + two_m2) // 2)
        + _log_factorial((two_s - two_m2) // 2)
    )
    terms = []
    for k in range(two_s + 1):
        e1 = (two_s + two_m2) // 2 - k          # (s + m2 - k)!
        e2 = (two_m1 - two_m2) // 2 + k         # (m1 - m2 + k)!
        e3 = (two_s - two_m1) // 2 - k          # (s - m1 - k)!
        if e1 < 0 or e2 < 0 or e3 < 0:
            continue
        ec = two_s + (two_m2 - two_m1) // 2 - 2 * k
        es = (two_m1 - two_m2) // 2 + 2 * k
        if (c == 0.0 and ec > 0) or (s == 0.0 and es > 0):
            continue
        sign = -1.0 if e2 % 2 else 1.0
        if c < 0.0 and ec % 2:
            sign = -sign
        if s < 0.0 and es % 2:
            sign = -sign
        log_mag = (
            pref
            - _log_factorial(e1)
            - _log_factorial(k)
            - _log_factorial(e2)
            - _log_factorial(e3)
        )
        if ec:
            log_mag += ec * math.log(abs(c))
        if es:
            log_mag += es * math.log(abs(s))
        terms.append(sign * math.exp(log_mag))
    return math.fsum(terms)


def _edge_seed(two_s: int, two_n: int, c: float, s: float, top: bool):
    """Analytically known edge element d^s_{+/-s, n}(beta) as (sign, ln|d|)."""
    a = (two_s + two_n) // 2  # s + n
    b = (two_s - two_n) // 2  # s - n
    ec, es = (a, b) if top else (b, a)
    sign = -1.0 if (top and b % 2) else 1.0
    if c < 0.0 and ec % 2:
        sign = -sign
    if s < 0.0 and es % 2:
        sign = -sign
    log_mag = 0.5 * (
        _log_factorial(two_s) - _log_factorial(a) - _log_factorial(b)
    )
    if ec:
        log_mag += ec * math.log(abs(c)) if c != 0.0 else -math.inf
    if es:
        log_mag += es * math.log(abs(s)) if s != 0.0 else -math.inf
    return sign, log_mag


# block-exponent extended floats for the recurrence passes: values are
# mantissa * 2**(500*block), so tails spanning thousands of orders of
# magnitude never overflow, underflow or lose their relative scale
_BLOCK = 2.0**500
_BLOCK_INV = 2.0**-500
_LOG_BLOCK = 500.0 * math.log(2.0)


def _renormalize(mantissa: float, block: int):
    mag = abs(mantissa)
    if mag >= _BLOCK:
        return mantissa * _BLOCK_INV, block + 1
    if 0.0 < mag < _BLOCK_INV:
        return mantissa * _BLOCK, block - 1
    return mantissa, block


def _from_log(sign: float, log_mag: float):
    if log_mag == -math.inf:
        return 0.0, 0
    block = int(round(log_mag / _LOG_BLOCK))
    return sign * math.exp(log_mag - block * _LOG_BLOCK), block


def _log_abs(mantissa: float, block: int) -> float:
    if mantissa == 0.0:
        return -math.inf
    return math.log(abs(mantissa)) + block * _LOG_BLOCK


def wigner_d_column(two_s: int, two_m2: int, beta: float) -> np.ndarray:
    """All elements d^s_{m1, m2}(beta) for m1 = -s..s, ascending (doubled).

    Three-term recurrence in m1 at fixed m2, seeded with the analytic edge
    elements and run from both edges toward increasing magnitude; the two
    branches are stitched at the magnitude peak and the column normalized
    to unit 2-norm (columns of a rotation matrix are unit vectors).
    """
    _check_spin_indices(two_s, two_m2)
    if two_s == 0:
        return np.ones(1)
    sb = math.sin(beta)
    if abs(sb) < _RECURRENCE_SIN_FLOOR:
        return np.array(
            [_wigner_sum(two_s, m1, two_m2, beta) for m1 in range(-two_s, two_s + 1, 2)]
        )
    cb = math.cos(beta)
    c = math.cos(beta / 2.0)
    s = math.sin(beta / 2.0)
    size = two_s + 1

    def c_up(two_m):  # coupling to m+1, i.e. sqrt((s-m)(s+m+1))
        return 0.5 * math.sqrt((two_s - two_m) * (two_s + two_m + 2))

    def c_dn(two_m):  # coupling to m-1
        return 0.5 * math.sqrt((two_s + two_m) * (two_s - two_m + 2))

    def step(a_coeff, v1, v0, b_coeff, divisor):
        # ((a*v1 - b*v0) / divisor) on block-exponent pairs; a zero mantissa
        # carries no scale information and must not set the common block
        (m1, e1), (m0, e0) = v1, v0
        if m1 == 0.0 and m0 == 0.0:
            return 0.0, 0
        if m1 == 0.0:
            target = e0
        elif m0 == 0.0:
            target = e1
        else:
            target = max(e1, e0)
        a1 = m1 * _BLOCK_INV ** (target - e1) if e1 < target else m1
        a0 = m0 * _BLOCK_INV ** (target - e0) if e0 < target else m0
        return _renormalize((a_coeff * a1 - b_coeff * a0) / divisor, target)

    # (two_m2 - two_m*cb) d_m = sb * (c_up d_{m+1} + c_dn d_{m-1}), doubled units
    up = [(0.0, 0)] * size
    up[0] = _from_log(*_edge_seed(two_s, two_m2, c, s, top=False))
    if up[0][0] == 0.0:  # exact zero seed happens only at snapped angles
        up[0] = (1e-300, -2)
    up[1] = step(two_m2 + two_s * cb, up[0], (0.0, 0), 0.0, sb * c_up(-two_s))
    for i in range(1, size - 1):
        two_m = -two_s + 2 * i
        up[i + 1] = step(
            two_m2 - two_m * cb, up[i], up[i - 1], sb * c_dn(two_m), sb * c_up(two_m)
        )

    down = [(0.0, 0)] * size
    down[-1] = _from_log(*_edge_seed(two_s, two_m2, c, s, top=True))
    if down[-1][0] == 0.0:
        down[-1] = (1e-300, -2)
    down[-2] = step(two_m2 - two_s * cb, down[-1], (0.0, 0), 0.0, sb * c_dn(two_s))
    for i in range(size - 2, 0, -1):
        two_m = -two_s + 2 * i
        down[i - 1] = step(
            two_m2 - two_m * cb, down[i], down[i + 1], sb * c_up(two_m), sb * c_dn(two_m)
        )

    # stitch where both branches are reliable: inside the oscillatory region
    # |up * down| is proportional to the squared true solution, while in
    # either decaying tail (where one branch is contaminated by the growing
    # complementary solution) the product stays at the small Wronskian scale
    strength = [
        _log_abs(*up[i]) + _log_abs(*down[i]) for i in range(size)
    ]
    peak = max(range(size), key=lambda i: strength[i])
    peak_block = up[peak][1]
    column = np.empty(size)
    for i in range(peak + 1):
        m, e = up[i]
        column[i] = m * _BLOCK ** (e - peak_block) if e != peak_block else m
    ratio = (up[peak][0] / down[peak][0]) * _BLOCK ** (up[peak][1] - down[peak][1])
    for i in range(peak + 1, size):
        m, e = down[i]
        scaled = m * _BLOCK ** (e - down[peak][1]) if e != down[peak][1] else m
        column[i] = ratio * scaled
    column /= math.sqrt(float(np.dot(column, column)))
    return column


def wigner_d(two_s: int, two_m1: int, two_m2: int, beta: float) -> float:
    """Wigner small-d element d^s_{m1,m2}(beta) with doubled integer indices."""
    _check_spin_indices(two_s, two_m1, two_m2)
    return float(_wigner_column_cached(two_s, two_m2, beta)[(two_m1 + two_s) // 2])


@lru_cache(maxsize=4096)
def _wigner_column_cached(two_s: int, two_m2: int, beta: float):
    col = wigner_d_column(two_s, two_m2, beta)
    col.setflags(write=False)
    return col


def rotation_probabilities(pair: FockPair, bs: BeamSplitter) -> np.ndarray:
    """|transition amplitude|^2 over the lattice via the Wigner route.

    Identical statistics to evolved_distribution but computed through the
    stable rotation-matrix recurrence; this is the large-S float path of
    the closed-form module.
    """
    alpha = 2.0 * bs.theta
    col = _wigner_column_cached(pair.total, pair.delta, alpha)
    return col * col
