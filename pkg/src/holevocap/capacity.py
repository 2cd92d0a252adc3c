"""Classical capacity of pure coherent-state ensembles.

``C = max_xi S(rho(xi))``. Symmetric sets use the closed form at the uniform
prior; 3ASK and 16QAM reduce the prior to one and two free parameters;
arbitrary Gram matrices go through a general simplex optimizer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .ensemble import Constellation, Tag, make_ask3, make_qam16, rotate, uniform_prior
from .entropy import LN2, entropy_nats
from .errors import ValidationError
from .gram import coherent_overlap, gram_of, validate_gram, weighted_gram_batch
from .optimize import ClassProblem, golden_section_max, kkt_status, maximize_on_simplex, newton_polish
from .spectral import block_circulant_eigenvalues, circulant_eigenvalues, hermitian_eig
from .symmetry import ask3_reduction, expand_ask3, expand_qam16, qam16_reduction, qam16_xi3

ASK3_SCAN_POINTS = 101
ASK3_WIDTH = 1e-10
QAM16_GRID_STEP = 1.0 / 400
GENERIC_STARTS = 8
GENERIC_SEED = 0
# a reduced prior component counts as active above this value
ACTIVATION_LEVEL = 1e-4


class Method(enum.Enum):
    CIRCULANT_CLOSED_FORM = "circulant_closed_form"
    ASK3_1D = "ask3_1d"
    QAM16_2D = "qam16_2d"
    GENERIC_GRADIENT = "generic_gradient"


@dataclass(frozen=True)
class CapacityResult:
    """Optimum of the Holevo quantity.

    ``first_order_residual`` is the KKT residual in bits per unit prior: the
    spread of ``dS/dxi_i`` over the support plus any positive excess off it.
    ``parameters`` holds the reduced prior (``(xi1,)`` for 3ASK,
    ``(xi1, xi2, xi3)`` for 16QAM, empty otherwise).
    """

    capacity_bits: float
    optimal_prior: np.ndarray
    optimal_eigenvalues: np.ndarray
    method: Method
    iterations: int
    first_order_residual: float
    parameters: tuple = field(default=())


def _residual_bits(problem: ClassProblem, p) -> float:
    res, _, _ = kkt_status(problem, problem.evaluate(p))
    return res / LN2


# ------------------------------------------------------------------ symmetric

def symmetric_capacity(constellation: Constellation) -> CapacityResult:
    """Capacity of an M-ary symmetric set from the DFT of its overlap row."""
    if constellation.tag is not Tag.SYMMETRIC:
        raise ValidationError("symmetric_capacity needs a SYMMETRIC constellation")
    m = constellation.size
    alpha = constellation.amplitudes[0]
    row = [coherent_overlap(alpha, rotate(alpha, 2 * math.pi * k / m)) for k in range(m)]
    lam = np.sort(circulant_eigenvalues(row))[::-1]
    lam = lam / lam.sum()
    nats = entropy_nats(lam)
    # at the uniform prior every letter sees the same -<psi|ln rho|psi>
    return CapacityResult(nats / LN2, uniform_prior(m), lam, Method.CIRCULANT_CLOSED_FORM, 0, 0.0)


# ----------------------------------------------------------------------- 3ASK

def _ask3_terms(xi1: float, kappa: float):
    k2 = kappa * kappa
    k4 = k2 * k2
    b = (1.0 + xi1) + k4 * (1.0 - xi1)
    prod = 0.5 * (1.0 - k2) ** 2 * (1.0 - xi1) * xi1  # lam2 * lam3
    disc = 0.25 * b * b - 2.0 * (1.0 - k2) ** 2 * (1.0 - xi1) * xi1
    return k2, k4, b, prod, disc


def ask3_eigenvalues(xi1: float, kappa: float) -> np.ndarray:
    """Closed-form spectrum of ``xi1|0><0| + (1-xi1)/2 (|a><a| + |-a><-a|)``.

    ``kappa = <0|a> = exp(-|a|^2/2)``. Returns ``(lam1, lam2, lam3)``::

        lam1 = (1 - kappa^4)(1 - xi1) / 2
        lam2, lam3 = (b -/+ 2 sqrt(b^2/4 - 2 (1 - kappa^2)^2 (1 - xi1) xi1)) / 4
        b = (1 + xi1) + kappa^4 (1 - xi1)

    ``lam2`` is evaluated as ``(1 - kappa^2)^2 (1 - xi1) xi1 / (2 lam3)``, the
    same number without the cancellation of the difference form.
    """
    xi1 = float(xi1)
    kappa = float(kappa)
    if not 0.0 <= xi1 <= 1.0:
        raise ValidationError(f"xi1 must lie in [0, 1], got {xi1!r}")
    if not 0.0 <= kappa <= 1.0:
        raise ValidationError(f"kappa must lie in [0, 1], got {kappa!r}")
    _, k4, b, prod, disc = _ask3_terms(xi1, kappa)
    if disc < -1e-12:
        raise ValidationError(f"negative discriminant {disc!r}")
    root = math.sqrt(max(disc, 0.0))
    lam1 = 0.5 * (1.0 - k4) * (1.0 - xi1)
    lam3 = 0.25 * (b + 2.0 * root)
    lam2 = prod / lam3 if lam3 > 0 else 0.0
    return np.array([lam1, lam2, lam3])


def _ask3_entropy(xi1: float, kappa: float) -> float:
    return entropy_nats(ask3_eigenvalues(xi1, kappa))


def _ask3_slope(xi1: float, kappa: float) -> float:
    """``d/dxi1`` of the closed-form entropy (nats); ``+inf`` where lam2 = 0 is entered."""
    k2, k4, b, prod, disc = _ask3_terms(xi1, kappa)
    lam = ask3_eigenvalues(xi1, kappa)
    root = math.sqrt(max(disc, 0.0))
    db = 1.0 - k4
    dprod = 0.5 * (1.0 - k2) ** 2 * (1.0 - 2.0 * xi1)
    ddisc = 0.5 * b * db - 2.0 * (1.0 - k2) ** 2 * (1.0 - 2.0 * xi1)
    droot = ddisc / (2.0 * root) if root > 0 else 0.0
    dlam1 = -0.5 * db
    dlam3 = 0.25 * (db + 2.0 * droot)
    dlam2 = (dprod - lam[1] * dlam3) / lam[2] if lam[2] > 0 else 0.0
    slope = 0.0
    for value, deriv in zip(lam, (dlam1, dlam2, dlam3)):
        if deriv == 0.0:
            continue
        if value <= 0.0:
            if deriv > 0:
                return math.inf
            continue
        slope -= deriv * math.log(value)
    return slope


def _ask3_refine(kappa: float, lo: float, hi: float, max_iter: int = 200):
    """Bisection on the sign of the (monotone) slope inside the scan bracket."""
    if _ask3_slope(lo, kappa) <= 0:
        return lo, 1
    if _ask3_slope(hi, kappa) >= 0:
        return hi, 2
    it = 2
    while it < max_iter and hi - lo > 1e-15 * max(lo, 1e-300):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        it += 1
        if _ask3_slope(mid, kappa) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), it


def ask3_capacity(alpha_sq: float) -> CapacityResult:
    """Maximize the closed-form 3ASK entropy over ``xi1``.

    A 101-point scan brackets the maximum and golden-section search narrows
    it to width 1e-10. The objective is concave in ``xi1``, so the bracket
    around the best scan point holds the global maximum. Golden section only
    resolves a maximum to about sqrt(machine epsilon), so the result is
    refined by bisecting on the sign of the analytic slope.
    """
    alpha_sq = float(alpha_sq)
    if not math.isfinite(alpha_sq) or alpha_sq < 0:
        raise ValidationError(f"alpha_sq must be >= 0, got {alpha_sq!r}")
    kappa = math.exp(-0.5 * alpha_sq)
    if kappa == 1.0:
        # all three states coincide; take the small-energy limit xi1 = 0
        xi1, iterations = 0.0, 0
    else:
        grid = np.linspace(0.0, 1.0, ASK3_SCAN_POINTS)
        values = [_ask3_entropy(x, kappa) for x in grid]
        k = int(np.argmax(values))
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
        xi1, best, iterations = golden_section_max(lambda x: _ask3_entropy(x, kappa), lo, hi, ASK3_WIDTH)
        refined, extra = _ask3_refine(kappa, lo, hi)
        iterations += extra
        if _ask3_entropy(refined, kappa) >= best - 1e-15:
            xi1 = refined
    lam = np.sort(ask3_eigenvalues(xi1, kappa))[::-1]
    prior = expand_ask3(xi1)
    if xi1 > 0 and kappa < 1.0:
        # class derivatives g0, g1 with mu = xi1 g0 + (1 - xi1) g1: spread is max(xi1, 1-xi1) |g0 - g1|
        slope = _ask3_slope(xi1, kappa)
        residual = max(xi1, 1.0 - xi1) * abs(slope) / LN2
    elif kappa < 1.0:
        problem = ClassProblem(gram_of(make_ask3(math.sqrt(alpha_sq))), ask3_reduction().classes)
        residual = _residual_bits(problem, [0.0, 1.0])
    else:
        residual = 0.0
    return CapacityResult(entropy_nats(lam) / LN2, prior, lam, Method.ASK3_1D, iterations, residual, (xi1,))


# ---------------------------------------------------------------------- 16QAM

def _qam16_grid():
    n = int(round(0.25 / QAM16_GRID_STEP))
    pts = [(i, j) for i in range(n + 1) for j in range((n - i) // 2 + 1)]
    ij = np.array(pts, dtype=float)
    return ij[:, 0] * QAM16_GRID_STEP, ij[:, 1] * QAM16_GRID_STEP


def qam16_grid_values(alpha_sq: float):
    """Entropy (nats) on the grid ``xi1, xi2 in {0, 1/400, ...}``, ``xi1 + 2 xi2 <= 1/4``.

    Ring-constant priors commute with the quarter-turn rotation, so each
    weighted Gram splits into four 4x4 Fourier blocks.
    """
    g = gram_of(make_qam16(math.sqrt(alpha_sq)))
    x1, x2 = _qam16_grid()
    x3 = np.maximum((1.0 - 4 * x1 - 8 * x2) / 4.0, 0.0)
    xis = np.repeat(np.stack([x1, x2, x2, x3], axis=1), 4, axis=1)
    lam = block_circulant_eigenvalues(weighted_gram_batch(g, xis), 4)
    pos = lam > 0
    values = -np.sum(np.where(pos, lam * np.log(np.where(pos, lam, 1.0)), 0.0), axis=1)
    return x1, x2, values


def qam16_capacity(alpha_sq: float, tol: float = 1e-9 * LN2) -> CapacityResult:
    """Maximize the entropy over the reduced 16QAM prior ``(xi1, xi2)``.

    Grid search (step 1/400 per coordinate) followed by an active-set Newton
    polish on the three ring masses ``(4 xi1, 8 xi2, 4 xi3)``.
    """
    alpha_sq = float(alpha_sq)
    if not math.isfinite(alpha_sq) or alpha_sq < 0:
        raise ValidationError(f"alpha_sq must be >= 0, got {alpha_sq!r}")
    if alpha_sq == 0.0:
        # all letters coincide; take the small-energy limit (outer ring only)
        lam = np.zeros(16)
        lam[0] = 1.0
        return CapacityResult(0.0, expand_qam16(0.0, 0.0), lam, Method.QAM16_2D, 0, 0.0, (0.0, 0.0, 0.25))
    x1, x2, values = qam16_grid_values(alpha_sq)
    k = int(np.argmax(values))
    start = np.array([4 * x1[k], 8 * x2[k], max(1.0 - 4 * x1[k] - 8 * x2[k], 0.0)])
    g = gram_of(make_qam16(math.sqrt(alpha_sq)))
    problem = ClassProblem(g, qam16_reduction().classes)
    out = newton_polish(problem, start, tol=tol)
    p = out.p
    xi1, xi2 = p[0] / 4.0, p[1] / 8.0
    xi3 = qam16_xi3(xi1, xi2)
    prior = expand_qam16(xi1, xi2)
    lam = out.evaluation.spectrum.eigenvalues
    return CapacityResult(out.value / LN2, prior, lam, Method.QAM16_2D, out.iterations,
                          out.residual / LN2, (xi1, xi2, xi3))


# -------------------------------------------------------------------- generic

def generic_capacity(g, starts: int = GENERIC_STARTS, seed: int = GENERIC_SEED,
                     tol: float = 1e-10) -> CapacityResult:
    """Capacity of an arbitrary pure-state ensemble given by its Gram matrix.

    Projected-gradient ascent from the uniform prior and ``starts`` random
    interior priors, each finished by an active-set Newton polish; the best
    value wins. The random starts come from a fixed seed.
    """
    g = validate_gram(g)
    m = g.shape[0]
    problem = ClassProblem(g)
    rng = np.random.default_rng(seed)
    initial = [uniform_prior(m)] + [rng.dirichlet(np.ones(m)) for _ in range(starts)]
    out = maximize_on_simplex(problem, initial, tol=tol)
    lam = out.evaluation.spectrum.eigenvalues
    return CapacityResult(out.value / LN2, out.p.copy(), lam, Method.GENERIC_GRADIENT,
                          out.iterations, out.residual / LN2)


def capacity(constellation: Constellation) -> CapacityResult:
    """Dispatch on the constellation tag."""
    if constellation.tag is Tag.SYMMETRIC:
        return symmetric_capacity(constellation)
    if constellation.tag is Tag.ASK3:
        return ask3_capacity(constellation.alpha ** 2)
    if constellation.tag is Tag.QAM16:
        return qam16_capacity(constellation.alpha ** 2)
    return generic_capacity(gram_of(constellation))


# ----------------------------------------------------------------- thresholds

@dataclass(frozen=True)
class Threshold:
    kind: str
    parameter: str
    value: float
    lo: float
    hi: float
    level: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


_PARAMETERS = {("ask3", "xi1"): 0, ("qam16", "xi1"): 0, ("qam16", "xi2"): 1}


def reduced_parameter(kind: str, which: str, alpha_sq: float) -> float:
    key = (kind, which)
    if key not in _PARAMETERS:
        raise ValidationError(f"unknown parameter {which!r} for {kind!r}")
    result = ask3_capacity(alpha_sq) if kind == "ask3" else qam16_capacity(alpha_sq)
    return result.parameters[_PARAMETERS[key]]


def activation_threshold(kind: str, which: str, level: float = ACTIVATION_LEVEL,
                         lo: float = 0.0, hi: float = 5.0, width: float = 1e-4) -> Threshold:
    """Bisect on ``|alpha|^2`` for the point where a reduced prior exceeds ``level``.

    ``lo`` is assumed inactive (not evaluated); ``hi`` must be active.
    """
    if not 0 <= lo < hi:
        raise ValidationError("need 0 <= lo < hi")
    if reduced_parameter(kind, which, hi) <= level:
        raise ValidationError(f"{which} never exceeds {level:g} for {kind} on [{lo:g}, {hi:g}]")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if reduced_parameter(kind, which, mid) > level:
            hi = mid
        else:
            lo = mid
    return Threshold(kind, which, 0.5 * (lo + hi), lo, hi, level)
