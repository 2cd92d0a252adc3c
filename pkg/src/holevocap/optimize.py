"""Maximizers for the entropy functional over (reduced) probability simplices.

The prior is parameterized by masses ``p`` over *classes* of letters; every
letter in class ``r`` gets ``p[r] / len(r)``. Singleton classes give the plain
problem over all priors, while the rings of a symmetric constellation give
the reduced problems. All values here are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .entropy import (
    KERNEL_TOL,
    GradientParts,
    entropy_nats,
    gradient_parts,
    hessian_nats,
)
from .errors import ValidationError
from .spectral import Spectrum, hermitian_eig

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
# adding a boundary class is skipped when its best possible first-order gain
# is below this many nats
GAIN_FLOOR = 1e-14


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, width: float = 1e-10,
                       max_iter: int = 200):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x), iterations)``.

    The end points are compared with the interior estimate at the end, so a
    maximum sitting on the boundary is returned exactly.
    """
    a, b = float(lo), float(hi)
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > width and it < max_iter:
        it += 1
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    x, fx = (x1, f1) if f1 >= f2 else (x2, f2)
    for end in (lo, hi):
        fe = f(end)
        if fe > fx:
            x, fx = end, fe
    return x, fx, it


def project_simplex(c) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}`` (sort-based)."""
    c = np.asarray(c, dtype=float)
    u = np.sort(c)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, c.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(c - css[rho] / (rho + 1.0), 0.0)


@dataclass
class Evaluation:
    p: np.ndarray
    value: float
    spectrum: Spectrum
    parts: GradientParts
    grad: np.ndarray  # class gradient, finite part
    flagged: np.ndarray
    hessian: np.ndarray | None = None


class ClassProblem:
    """Entropy of ``rho(xi)`` as a function of class masses ``p``."""

    def __init__(self, g, classes: Sequence[Sequence[int]] | None = None):
        self.g = np.asarray(g, dtype=complex)
        m = self.g.shape[0]
        if classes is None:
            classes = [(i,) for i in range(m)]
        self.classes = tuple(tuple(int(i) for i in c) for c in classes)
        flat = sorted(i for c in self.classes for i in c)
        if flat != list(range(m)):
            raise ValidationError("classes must partition the letters")
        self.k = len(self.classes)
        self.expand_matrix = np.zeros((m, self.k))
        for r, c in enumerate(self.classes):
            self.expand_matrix[list(c), r] = 1.0 / len(c)
        self.evaluations = 0

    def prior(self, p) -> np.ndarray:
        return self.expand_matrix @ np.asarray(p, dtype=float)

    def spectrum(self, p, vectors=True) -> Spectrum:
        s = np.sqrt(self.prior(p))
        self.evaluations += 1
        return hermitian_eig(s[:, None] * self.g * s[None, :], psd=True, vectors=vectors)

    def value(self, p) -> float:
        return entropy_nats(self.spectrum(p, vectors=False).eigenvalues)

    def evaluate(self, p, hessian: bool = False) -> Evaluation:
        p = np.asarray(p, dtype=float)
        xi = self.prior(p)
        spec = self.spectrum(p)
        parts = gradient_parts(self.g, xi, spec)
        grad = self.expand_matrix.T @ parts.finite
        flagged = np.array([bool(np.any(parts.flagged[list(c)])) for c in self.classes])
        ev = Evaluation(p, entropy_nats(spec.eigenvalues), spec, parts, grad, flagged)
        if hessian:
            h = hessian_nats(xi, spec)
            sup = p > 0
            hc = np.full((self.k, self.k), np.nan)
            js = self.expand_matrix[:, sup]
            members = xi > 0
            hc[np.ix_(sup, sup)] = js[members].T @ h[np.ix_(members, members)] @ js[members]
            ev.hessian = hc
        return ev

    def boundary_mass(self, ev: Evaluation, r: int, mu: float):
        """First-order optimal mass and gain for a zero-mass class with kernel weight.

        Adding mass ``e`` along ``e_r - p`` changes the entropy by about
        ``e*a - sum_k e*c_k*ln(e*c_k) + e*D`` where ``c_k`` are the eigenvalues of
        the kernel-part Gram of the class members divided by the class size,
        ``D = sum c_k`` and ``a`` is the finite directional derivative. The
        maximizer is ``e* = exp((a - sum c_k ln c_k) / D)`` with gain ``e* D``.
        """
        members = list(self.classes[r])
        proj = ev.parts.projections[:, members]
        kern = self.g[np.ix_(members, members)] - proj.conj().T @ proj
        c = hermitian_eig(kern, vectors=False).eigenvalues / len(members)
        c = c[c > KERNEL_TOL / len(members)]
        if c.size == 0:
            return 0.0, 0.0
        d = c.sum()
        a = ev.grad[r] - mu
        log_e = (a - np.sum(c * np.log(c))) / d
        if log_e > 0:
            return 1.0, math.inf
        e = math.exp(log_e)
        return e, e * d


def kkt_status(problem: ClassProblem, ev: Evaluation):
    """First-order optimality residual (nats) and the best class to activate.

    The residual is the spread of class derivatives over the support plus
    any positive excess of an off-support class. Off-support classes with an
    infinite derivative count as satisfied only if their best first-order
    gain is below ``GAIN_FLOOR``.
    """
    p = ev.p
    sup = p > 0
    mu = float(np.dot(p[sup], ev.grad[sup]))
    res = float(np.max(np.abs(ev.grad[sup] - mu))) if np.any(sup) else 0.0
    best = None  # (score, r, mass or None)
    for r in np.nonzero(~sup)[0]:
        if ev.flagged[r]:
            e, gain = problem.boundary_mass(ev, r, mu)
            if gain > GAIN_FLOOR:
                res = math.inf
                if best is None or gain > best[0]:
                    best = (gain, int(r), e)
                continue
        excess = ev.grad[r] - mu
        if excess > 0:
            res = max(res, float(excess))
            if best is None or excess > best[0]:
                best = (float(excess), int(r), None)
    return res, mu, best


@dataclass
class SimplexResult:
    p: np.ndarray
    value: float
    residual: float  # nats
    iterations: int
    evaluation: Evaluation


def _line_activate(problem: ClassProblem, p: np.ndarray, r: int) -> tuple:
    """Golden-section search along ``p -> e_r``; concave, so global on the segment."""
    target = np.zeros_like(p)
    target[r] = 1.0

    def f(t):
        return problem.value((1 - t) * p + t * target)

    t, _, it = golden_section_max(f, 0.0, 1.0, width=1e-12)
    return (1 - t) * p + t * target, it


def projected_gradient(problem: ClassProblem, p0, max_iter: int = 60, tol: float = 1e-4):
    """Projected-gradient ascent with adaptive step halving/doubling."""
    p = project_simplex(p0)
    step = 1.0
    value = problem.value(p)
    it = 0
    for it in range(1, max_iter + 1):
        ev = problem.evaluate(p)
        res, _, _ = kkt_status(problem, ev)
        if res < tol:
            break
        g = ev.grad.copy()
        if np.any(ev.flagged & (p == 0)):
            finite_max = np.max(g[~ev.flagged]) if np.any(~ev.flagged) else 0.0
            g[ev.flagged & (p == 0)] = finite_max + 1.0
        while step > 1e-14:
            cand = project_simplex(p + step * g)
            cv = problem.value(cand)
            if cv > value:
                p, value = cand, cv
                step *= 2.0
                break
            step *= 0.5
        else:
            break
    return p, it


def newton_polish(problem: ClassProblem, p0, tol: float = 1e-10, max_iter: int = 100) -> SimplexResult:
    """Active-set Newton on the faces of the simplex.

    Each iteration either takes a Newton step restricted to the current
    support (dropping a class that hits zero), or, once the support is
    equalized, activates the best off-support class. Stops when the first-
    order residual is below ``tol`` or no further progress is possible.
    """
    p = np.asarray(p0, dtype=float).copy()
    p[p < 0] = 0.0
    p /= p.sum()
    ev = problem.evaluate(p, hessian=True)
    best_res = math.inf
    stall = 0
    it = 0
    for it in range(1, max_iter + 1):
        res, mu, cand = kkt_status(problem, ev)
        if res < tol:
            break
        if res < best_res * 0.99:
            best_res, stall = res, 0
        else:
            stall += 1
            if stall >= 6:
                break
        sup = np.nonzero(p > 0)[0]
        spread = float(np.max(np.abs(ev.grad[sup] - mu))) if sup.size else 0.0
        if cand is not None and (spread < max(tol, 1e-3 * cand[0]) or sup.size == 1 or math.isinf(cand[0])):
            _, r, mass = cand
            if mass is not None and mass < 1e-3:
                target = np.zeros_like(p)
                target[r] = 1.0
                p = (1 - mass) * p + mass * target
            else:
                p, _ = _line_activate(problem, p, r)
            ev = problem.evaluate(p, hessian=True)
            continue
        if sup.size < 2:
            break
        g = ev.grad[sup]
        h = ev.hessian[np.ix_(sup, sup)]
        n = sup.size
        kkt = np.zeros((n + 1, n + 1))
        kkt[:n, :n] = h
        kkt[:n, n] = 1.0
        kkt[n, :n] = 1.0
        rhs = np.concatenate([-g, [0.0]])
        try:
            d = np.linalg.solve(kkt, rhs)[:n]
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:n]
        slope = float(g @ d)
        if not np.all(np.isfinite(d)) or slope <= 0:
            d = g - g.mean()
            slope = float(g @ d)
            if slope <= 0:
                break
        neg = d < 0
        tmax = float(np.min(-p[sup][neg] / d[neg])) if np.any(neg) else math.inf
        t = min(1.0, tmax)
        while True:
            trial = p.copy()
            trial[sup] = p[sup] + t * d
            hit = t >= tmax
            if hit:
                block = sup[neg][np.argmin(-p[sup][neg] / d[neg])]
                trial[block] = 0.0
            trial = np.maximum(trial, 0.0)
            trial /= trial.sum()
            if t * slope < 1e-13:
                break
            if problem.value(trial) >= ev.value + 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 1e-12:
                trial = p
                break
        p = trial
        ev = problem.evaluate(p, hessian=True)
    res, _, _ = kkt_status(problem, ev)
    return SimplexResult(p, ev.value, res, it, ev)


def maximize_on_simplex(problem: ClassProblem, starts: Sequence, tol: float = 1e-10,
                        warmup: bool = True) -> SimplexResult:
    """Best result over several starting points (ties keep the earliest)."""
    best = None
    total = 0
    for p0 in starts:
        p = np.asarray(p0, dtype=float)
        warm_it = 0
        if warmup:
            p, warm_it = projected_gradient(problem, p)
        out = newton_polish(problem, p, tol=tol)
        total += warm_it + out.iterations
        if best is None or out.value > best.value + 1e-15 or (
                abs(out.value - best.value) <= 1e-15 and out.residual < best.residual):
            best = out
    best.iterations = total
    return best
