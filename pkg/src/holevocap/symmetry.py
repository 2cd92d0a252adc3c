"""Symmetry reductions of the prior.

A symmetry of a pure-state ensemble is recorded as an index permutation of
the constellation. A unitary symmetry preserves the Gram matrix
(``G[s(i), s(j)] == G[i, j]``); an anti-unitary one such as amplitude
conjugation maps it to its complex conjugate. Averaging a prior over the
orbits of such permutations can only raise the entropy, by unitary (or
anti-unitary) invariance plus concavity.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .ensemble import QAM16_RINGS, Constellation, Tag, check_prior, uniform_prior
from .entropy import delta_s
from .errors import ValidationError
from .gram import gram_of

SYMMETRY_TOL = 1e-12


class ReductionKind(enum.Enum):
    FULL_SYMMETRIC = "full_symmetric"
    ASK3 = "ask3"
    QAM16 = "qam16"


@dataclass(frozen=True)
class SymmetryReduction:
    kind: ReductionKind
    free_parameter_count: int
    expand: Callable[..., np.ndarray]
    classes: tuple  # index groups sharing one prior value after reduction


def check_partition(orbits: Sequence[Sequence[int]], m: int) -> tuple:
    orbits = tuple(tuple(int(i) for i in orbit) for orbit in orbits)
    flat = sorted(i for orbit in orbits for i in orbit)
    if any(len(o) == 0 for o in orbits) or flat != list(range(m)):
        raise ValidationError(f"orbits do not partition 0..{m - 1}")
    return orbits


def orbit_average(xi, orbits: Sequence[Sequence[int]]) -> np.ndarray:
    """Replace every prior entry by the mean over its orbit."""
    xi = check_prior(xi)
    orbits = check_partition(orbits, xi.size)
    out = np.empty_like(xi)
    for orbit in orbits:
        idx = list(orbit)
        out[idx] = xi[idx].mean()
    return out


def orbits_of(permutations: Sequence[Sequence[int]], m: int) -> tuple:
    """Orbits of ``0..m-1`` under the group generated by ``permutations``.

    Each orbit lists indices in the order they are reached from its smallest
    member.
    """
    seen = np.zeros(m, dtype=bool)
    orbits = []
    for start in range(m):
        if seen[start]:
            continue
        orbit = [start]
        seen[start] = True
        k = 0
        while k < len(orbit):
            for perm in permutations:
                j = int(perm[orbit[k]])
                if not seen[j]:
                    seen[j] = True
                    orbit.append(j)
            k += 1
        orbits.append(tuple(orbit))
    return tuple(orbits)


def is_gram_symmetry(g, perm, antiunitary: bool = False, tol: float = SYMMETRY_TOL) -> bool:
    g = np.asarray(g)
    perm = np.asarray(perm)
    permuted = g[np.ix_(perm, perm)]
    target = np.conj(g) if antiunitary else g
    return bool(np.max(np.abs(permuted - target)) <= tol)


def amplitude_permutation(constellation: Constellation, mapped) -> np.ndarray:
    """Permutation ``s`` with ``amplitudes[s[i]] == mapped[i]`` (within 1e-12)."""
    amps = constellation.as_array()
    mapped = np.asarray(mapped, dtype=complex)
    perm = np.empty(amps.size, dtype=int)
    for i, target in enumerate(mapped):
        d = np.abs(amps - target)
        j = int(np.argmin(d))
        if d[j] > SYMMETRY_TOL * max(1.0, abs(target)):
            raise ValidationError(f"image of amplitude {i} is not in the constellation")
        perm[i] = j
    if len(set(perm.tolist())) != amps.size:
        raise ValidationError("map is not a permutation of the constellation")
    return perm


def rotation_permutation(constellation: Constellation, theta: float) -> np.ndarray:
    amps = constellation.as_array()
    return amplitude_permutation(constellation, amps * np.exp(-1j * theta))


def conjugation_permutation(constellation: Constellation) -> np.ndarray:
    return amplitude_permutation(constellation, np.conj(constellation.as_array()))


# ---------------------------------------------------------------- reductions

def expand_ask3(xi1: float) -> np.ndarray:
    """``(xi1, (1 - xi1)/2, (1 - xi1)/2)``."""
    xi1 = float(xi1)
    if not 0.0 <= xi1 <= 1.0:
        raise ValidationError(f"xi1 must lie in [0, 1], got {xi1!r}")
    rest = 0.5 * (1.0 - xi1)
    return np.array([xi1, rest, rest])


def qam16_xi3(xi1: float, xi2: float) -> float:
    return (1.0 - 4.0 * xi1 - 8.0 * xi2) / 4.0


def expand_qam16(xi1: float, xi2: float) -> np.ndarray:
    """Per-letter prior: xi1 on the inner ring, xi2 on both middle rings, xi3 on the corners."""
    xi3 = qam16_xi3(xi1, xi2)
    if min(xi1, xi2) < 0 or xi3 < -1e-15:
        raise ValidationError(f"(xi1, xi2) = ({xi1}, {xi2}) is outside xi1, xi2 >= 0, xi1 + 2 xi2 <= 1/4")
    return np.repeat([xi1, xi2, xi2, max(xi3, 0.0)], 4)


def qam16_rotation_average(xi) -> np.ndarray:
    """Average over the quarter-turn orbits (the four rings, 2a and 2b separate)."""
    return orbit_average(check_prior(xi, 16), QAM16_RINGS)


def qam16_conjugation_merge(xi) -> np.ndarray:
    """Average rings 2a and 2b, which amplitude conjugation swaps.

    Expects a ring-constant prior (output of :func:`qam16_rotation_average`).
    """
    xi = check_prior(xi, 16)
    out = xi.copy()
    merged = 0.5 * (xi[4:8].mean() + xi[8:12].mean())
    out[4:12] = merged
    return out


def reduce_qam16(xi) -> tuple:
    """``(xi1, xi2)``: mean inner-ring prior and mean prior over both middle rings."""
    xi = check_prior(xi, 16)
    merged = qam16_conjugation_merge(qam16_rotation_average(xi))
    return float(merged[0]), float(merged[4])


def full_symmetric_reduction(m: int) -> SymmetryReduction:
    return SymmetryReduction(ReductionKind.FULL_SYMMETRIC, 0, lambda: uniform_prior(m), (tuple(range(m)),))


def ask3_reduction() -> SymmetryReduction:
    return SymmetryReduction(ReductionKind.ASK3, 1, expand_ask3, ((0,), (1, 2)))


def qam16_reduction() -> SymmetryReduction:
    classes = (QAM16_RINGS[0], QAM16_RINGS[1] + QAM16_RINGS[2], QAM16_RINGS[3])
    return SymmetryReduction(ReductionKind.QAM16, 2, expand_qam16, classes)


def reduction_for(constellation: Constellation) -> SymmetryReduction:
    if constellation.tag is Tag.SYMMETRIC:
        return full_symmetric_reduction(constellation.size)
    if constellation.tag is Tag.ASK3:
        return ask3_reduction()
    if constellation.tag is Tag.QAM16:
        return qam16_reduction()
    raise ValidationError(f"no symmetry reduction for tag {constellation.tag.name}")


@dataclass(frozen=True)
class OptimalityReport:
    trials: int
    uniform_bits: float
    best_random_bits: float
    max_violation: float  # max over trials of delta_s(random) - delta_s(uniform), bits

    @property
    def holds(self) -> bool:
        return self.max_violation <= 1e-9


def verify_symmetric_optimality(constellation: Constellation, trials: int = 1000, seed: int = 0) -> OptimalityReport:
    """Compare the uniform prior against random Dirichlet priors.

    A positive ``max_violation`` above 1e-9 bits would contradict the
    uniform-prior optimality of symmetric sets; it is reported, not raised.
    """
    if constellation.tag is not Tag.SYMMETRIC:
        raise ValidationError("verify_symmetric_optimality needs a SYMMETRIC constellation")
    m = constellation.size
    from .entropy import gram_delta_s

    g = gram_of(constellation)
    reference = gram_delta_s(g, uniform_prior(m)).bits
    rng = np.random.default_rng(seed)
    best = -np.inf
    for _ in range(trials):
        xi = rng.dirichlet(np.ones(m))
        xi /= xi.sum()
        best = max(best, gram_delta_s(g, xi).bits)
    return OptimalityReport(trials, reference, float(best), float(best - reference))


def symmetrization_gain(constellation: Constellation, xi, orbits) -> float:
    """``delta_s(orbit_average(xi)) - delta_s(xi)`` in bits."""
    return delta_s(constellation, orbit_average(xi, orbits)).bits - delta_s(constellation, xi).bits
