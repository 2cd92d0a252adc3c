"""Coherent-state constellations and prior vectors.

Amplitudes are plain Python/numpy complex numbers. A phase-space rotation
by ``theta`` maps the coherent state ``|beta>`` to ``|beta * exp(-1j*theta)>``,
which is the action of ``exp(-1j * theta * n)`` with ``n`` the number operator.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

ORBIT_TOL = 1e-12
PRIOR_SUM_TOL = 1e-12

# ring order used for 16QAM: inner, (3+i), (1+3i), corner
QAM16_RING_SEEDS = (1 + 1j, 3 + 1j, 1 + 3j, 3 + 3j)
QAM16_RINGS = ((0, 1, 2, 3), (4, 5, 6, 7), (8, 9, 10, 11), (12, 13, 14, 15))


class Tag(enum.Enum):
    GENERIC = "generic"
    SYMMETRIC = "symmetric"
    ASK3 = "ask3"
    QAM16 = "qam16"


def rotate(beta: complex, theta: float) -> complex:
    """Amplitude of ``exp(-1j*theta*n)|beta>``."""
    return complex(beta) * cmath.exp(-1j * theta)


def check_amplitude(beta) -> complex:
    beta = complex(beta)
    if not (math.isfinite(beta.real) and math.isfinite(beta.imag)):
        raise ValidationError(f"amplitude {beta!r} is not finite")
    return beta


@dataclass(frozen=True)
class Constellation:
    """Ordered coherent-state amplitudes plus an optional symmetry tag.

    For ``Tag.SYMMETRIC`` the amplitude list must be the orbit of
    ``amplitudes[0]`` under rotation by ``angle = 2*pi/M``.
    ``alpha`` records the real scale parameter of the ASK3/QAM16 families.
    """

    amplitudes: tuple
    tag: Tag = Tag.GENERIC
    angle: float | None = None
    alpha: float | None = None
    _array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        amps = tuple(check_amplitude(a) for a in self.amplitudes)
        if not amps:
            raise ValidationError("a constellation needs at least one amplitude")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "_array", np.array(amps, dtype=complex))
        if self.tag is Tag.SYMMETRIC:
            self._check_symmetric()
        elif self.tag is Tag.ASK3:
            self._check_ask3()
        elif self.tag is Tag.QAM16:
            self._check_qam16()

    @property
    def size(self) -> int:
        return len(self.amplitudes)

    def __len__(self):
        return len(self.amplitudes)

    def as_array(self) -> np.ndarray:
        return self._array.copy()

    def _check_symmetric(self):
        theta = 2 * math.pi / self.size
        if self.angle is None:
            object.__setattr__(self, "angle", theta)
        elif not math.isclose(self.angle, theta, rel_tol=1e-12):
            raise ValidationError(f"rotation angle must be 2*pi/M = {theta!r}")
        base = self.amplitudes[0]
        for k, a in enumerate(self.amplitudes):
            if abs(a - rotate(base, k * theta)) > ORBIT_TOL * max(1.0, abs(base)):
                raise ValidationError(f"amplitude {k} is not the {k}-th rotation of amplitude 0")

    def _check_ask3(self):
        if self.alpha is None or self.alpha < 0:
            raise ValidationError("ASK3 needs a real alpha >= 0")
        expected = (0.0, self.alpha, -self.alpha)
        if self.size != 3 or any(abs(a - e) > ORBIT_TOL for a, e in zip(self.amplitudes, expected)):
            raise ValidationError("ASK3 amplitudes must be (0, alpha, -alpha)")

    def _check_qam16(self):
        if self.alpha is None or self.alpha <= 0:
            raise ValidationError("QAM16 needs a real alpha > 0")
        expected = _qam16_amplitudes(self.alpha)
        if self.size != 16 or np.max(np.abs(self._array - expected)) > ORBIT_TOL * max(1.0, self.alpha):
            raise ValidationError("QAM16 amplitudes do not match the canonical grid")


def make_psk(m: int, alpha) -> Constellation:
    """M-ary phase-shift keyed set: ``alpha * exp(-2j*pi*k/M)`` for k = 0..M-1."""
    if int(m) != m or m < 1:
        raise ValidationError(f"M must be a positive integer, got {m!r}")
    m = int(m)
    alpha = check_amplitude(alpha)
    theta = 2 * math.pi / m
    amps = tuple(rotate(alpha, k * theta) for k in range(m))
    return Constellation(amps, Tag.SYMMETRIC, angle=theta)


def make_ask3(alpha: float) -> Constellation:
    """Ternary amplitude-shift keyed set ``(0, alpha, -alpha)``.

    ``alpha = 0`` is allowed; all three states then coincide.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0:
        raise ValidationError(f"ASK3 alpha must be a finite real >= 0, got {alpha!r}")
    return Constellation((0.0, alpha, -alpha), Tag.ASK3, alpha=alpha)


def _qam16_amplitudes(alpha: float) -> np.ndarray:
    quarter = cmath.exp(-0.5j * math.pi)
    return np.array([alpha * seed * quarter**k for seed in QAM16_RING_SEEDS for k in range(4)])


def make_qam16(alpha: float) -> Constellation:
    """16QAM with unit cell ``alpha``.

    Index order is rings (1+i), (3+i), (1+3i), (3+3i); within a ring the
    amplitudes follow repeated quarter-turn rotations by ``exp(-1j*pi/2)``.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0:
        raise ValidationError(f"QAM16 alpha must be a finite real > 0, got {alpha!r}")
    return Constellation(tuple(_qam16_amplitudes(alpha)), Tag.QAM16, alpha=alpha)


def uniform_prior(m: int) -> np.ndarray:
    if int(m) != m or m < 1:
        raise ValidationError(f"M must be a positive integer, got {m!r}")
    return np.full(int(m), 1.0 / m)


def check_prior(xi, m: int | None = None) -> np.ndarray:
    """Validate a prior vector and return it as a float array.

    Entries must be non-negative and sum to one within 1e-12. Tiny negative
    round-off (above -1e-15) is clipped to zero.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.ndim != 1 or xi.size == 0:
        raise ValidationError("prior must be a non-empty 1-D vector")
    if m is not None and xi.size != m:
        raise ValidationError(f"prior has length {xi.size}, expected {m}")
    if not np.all(np.isfinite(xi)):
        raise ValidationError("prior has non-finite entries")
    if np.any(xi < -1e-15):
        raise ValidationError(f"prior has negative entry {xi.min()!r}")
    if abs(xi.sum() - 1.0) > PRIOR_SUM_TOL:
        raise ValidationError(f"prior sums to {xi.sum()!r}, not 1")
    return np.clip(xi, 0.0, None)
