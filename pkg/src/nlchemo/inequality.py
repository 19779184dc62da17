"""Empirical check of the interpolation inequality

    ||phi||_q^q <= C0 ||phi||_r^delta + eps ||grad phi||_2^2 + ||phi||_2^2

on random smooth nonnegative grid functions. For each sample the smallest
admissible C0 is ``max(0, (lhs - eps*grad - l2) / ||phi||_r^delta)``; the
fitted constant for a given eps is the maximum over samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .grid import Grid
from .regimes import GNExponents, gn_exponents

C0_CEILING = 1e12


def random_profiles(grid: Grid, count: int, rng: np.random.Generator, modes: int = 6):
    """Yield smooth nonnegative cosine series with random amplitudes and scales."""
    x = grid.centers(0) / grid.extents[0]
    k = np.arange(modes + 1)
    basis = np.cos(np.pi * np.outer(k, x))
    for _ in range(count):
        coef = rng.normal(size=modes + 1) / (1.0 + k) ** rng.uniform(0.5, 2.0)
        phi = coef @ basis
        phi = phi - phi.min() + rng.uniform(0.0, 0.5) * np.abs(phi).max()
        phi *= 10.0 ** rng.uniform(-2.0, 2.0) / max(phi.max(), 1e-300)
        yield phi


def inequality_terms(phi: np.ndarray, grid: Grid, q, r, delta):
    h = grid.h[0]
    lhs = float(np.sum(phi**q) * h)
    lr = float(np.sum(phi**r) * h) ** (1.0 / r)
    grad = float(np.sum((np.diff(phi) / h) ** 2) * h)
    l2 = float(np.sum(phi**2) * h)
    return lhs, lr**delta, grad, l2


@dataclass
class EpsilonFit:
    eps: float
    c0: float
    median: float
    quantiles: dict
    worst_sample: int
    violations: int


@dataclass
class InequalityCheck:
    q: float
    r: float
    n: int
    exponents: GNExponents
    samples: int
    fits: list[EpsilonFit] = field(default_factory=list)

    @property
    def violated(self) -> bool:
        return any(f.violations for f in self.fits)

    def to_dict(self):
        e = self.exponents
        return {
            "q": self.q,
            "r": self.r,
            "n": self.n,
            "lambda": e.lam,
            "delta": e.delta,
            "p": e.p if np.isfinite(e.p) else "inf",
            "convention": e.convention,
            "samples": self.samples,
            "fits": [vars(f) for f in self.fits],
            "violated": self.violated,
        }


def check_inequality(q, r, n, samples=200, eps=(1.0, 0.1), cells=256, seed=0) -> InequalityCheck:
    """Fit C0 per eps over ``samples`` random profiles on a unit interval.

    Raises PreconditionError if (q, r, n) is not admissible.
    """
    ex = gn_exponents(q, r, n)
    if not ex.admissible:
        raise PreconditionError(f"inadmissible (q={q}, r={r}, n={n}): {ex.reason}")
    grid = Grid.interval(1.0, cells)
    rng = np.random.default_rng(seed)
    terms = np.array([inequality_terms(phi, grid, q, r, ex.delta)
                      for phi in random_profiles(grid, samples, rng)])
    lhs, lr_d, grad, l2 = terms.T
    out = InequalityCheck(float(q), float(r), int(n), ex, samples)
    for e in eps:
        excess = lhs - e * grad - l2
        with np.errstate(divide="ignore", invalid="ignore"):
            need = np.where(excess > 0, excess / lr_d, 0.0)
        need = np.where(np.isfinite(need), need, np.inf)
        worst = int(np.argmax(need))
        out.fits.append(EpsilonFit(
            eps=float(e),
            c0=float(need[worst]),
            median=float(np.median(need)),
            quantiles={str(p): float(np.quantile(need, p)) for p in (0.5, 0.9, 0.99)},
            worst_sample=worst,
            violations=int(np.sum(need > C0_CEILING)),
        ))
    return out
