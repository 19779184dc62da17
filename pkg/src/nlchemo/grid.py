"""
Cell-centered finite-volume discretization of a 1D interval or 2D rectangle.

All operators close the boundary with a mirrored ghost cell, so every
boundary face carries zero flux (homogeneous Neumann condition). The
discrete divergence of any face flux therefore telescopes, and both the
Laplacian and the chemotactic flux term integrate to zero over the domain
up to round-off.

Array-level kernels (leading underscore) take raw ``ndarray`` values and
are used by the time stepper; the public functions wrap them for
:class:`Field` objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import PreconditionError, StructuralError

CENTRAL = "CENTRAL"
UPWIND = "UPWIND"


@dataclass(frozen=True)
class Grid:
    """Uniform Cartesian mesh.

    Attributes:
        extents: side length per axis
        cells: number of cells per axis
    """

    extents: tuple[float, ...]
    cells: tuple[int, ...]

    def __post_init__(self):
        extents = tuple(float(e) for e in np.atleast_1d(self.extents))
        cells = tuple(int(c) for c in np.atleast_1d(self.cells))
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "cells", cells)
        if len(extents) != len(cells):
            raise StructuralError(
                f"extents {extents} and cells {cells} differ in length"
            )
        if len(cells) not in (1, 2):
            raise StructuralError(f"only 1D and 2D grids are supported, got dim={len(cells)}")
        if any(not np.isfinite(e) or e <= 0 for e in extents):
            raise StructuralError(f"extents must be positive, got {extents}")
        if any(c < 4 for c in cells):
            raise StructuralError(f"need at least 4 cells per axis, got {cells}")

    @classmethod
    def interval(cls, length=1.0, cells=64):
        return cls((length,), (cells,))

    @classmethod
    def rectangle(cls, lx=1.0, ly=1.0, nx=32, ny=32):
        return cls((lx, ly), (nx, ny))

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def size(self) -> int:
        return prod(self.cells)

    @property
    def h(self) -> tuple[float, ...]:
        return tuple(e / c for e, c in zip(self.extents, self.cells))

    @property
    def cell_volume(self) -> float:
        return prod(self.h)

    @property
    def measure(self) -> float:
        """|Omega|, the product of the extents."""
        return prod(self.extents)

    def centers(self, axis=0) -> np.ndarray:
        h = self.h[axis]
        return (np.arange(self.cells[axis]) + 0.5) * h

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Cell-center coordinates broadcast to the grid shape."""
        return np.meshgrid(*(self.centers(d) for d in range(self.dim)), indexing="ij")

    def field(self, values) -> "Field":
        return Field(self, values)

    def constant(self, c) -> "Field":
        return Field(self, np.full(self.shape, float(c)))

    def sample(self, func) -> "Field":
        """Evaluate ``func(*coords)`` at cell centers."""
        values = np.asarray(func(*self.mesh()), dtype=float)
        return Field(self, np.broadcast_to(values, self.shape).copy())


@dataclass
class Field:
    """Cell-averaged scalar on a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.size != self.grid.size:
            raise StructuralError(
                f"{values.size} values do not fit a grid with {self.grid.size} cells"
            )
        if values.shape != self.grid.shape:
            values = values.reshape(self.grid.shape)
        self.values = values

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def sum(self) -> float:
        """Integral over the domain (midpoint rule)."""
        return float(self.values.sum() * self.grid.cell_volume)


def _same_grid(*fields: Field) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise StructuralError(f"fields live on different grids: {grid} vs {f.grid}")
    return grid


def _sl(ndim, axis, s):
    idx = [slice(None)] * ndim
    idx[axis] = s
    return tuple(idx)


def _diff(a: np.ndarray, axis: int) -> np.ndarray:
    return a[_sl(a.ndim, axis, slice(1, None))] - a[_sl(a.ndim, axis, slice(None, -1))]


def _face_divergence(flux: np.ndarray, h: float, axis: int, out: np.ndarray, sign=1.0):
    """Accumulate ``sign * div(flux)`` into ``out``.

    ``flux`` lives on the interior faces; boundary faces carry zero flux.
    """
    scale = sign / h
    out[_sl(out.ndim, axis, slice(None, -1))] += scale * flux
    out[_sl(out.ndim, axis, slice(1, None))] -= scale * flux


def _laplacian(values: np.ndarray, h: tuple[float, ...]) -> np.ndarray:
    out = np.zeros_like(values)
    for axis, hd in enumerate(h):
        _face_divergence(_diff(values, axis) / hd, hd, axis, out)
    return out


def _face_values(u: np.ndarray, dv: np.ndarray, axis: int, scheme: str) -> np.ndarray:
    lo = u[_sl(u.ndim, axis, slice(None, -1))]
    hi = u[_sl(u.ndim, axis, slice(1, None))]
    if scheme == CENTRAL:
        return 0.5 * (lo + hi)
    if scheme == UPWIND:
        # cells drift up the gradient of v, so the donor cell is the one behind
        return np.where(dv > 0, lo, hi)
    raise ValueError(f"unknown u_face scheme {scheme!r}")


def _chemotaxis(u, v, chi, h, scheme=CENTRAL):
    """-chi * div(u grad v) with zero boundary flux."""
    out = np.zeros_like(u)
    for axis, hd in enumerate(h):
        dv = _diff(v, axis)
        flux = chi * _face_values(u, dv, axis, scheme) * dv / hd
        _face_divergence(flux, hd, axis, out, sign=-1.0)
    return out


def _check_nonnegative(values: np.ndarray, what="field"):
    if values.size and values.min() < 0:
        idx = np.unravel_index(int(np.argmin(values)), values.shape)
        raise PreconditionError(
            f"{what} has negative value {values[idx]:.6g} at cell {tuple(int(i) for i in idx)}"
        )


def laplacian(f: Field) -> Field:
    """Five-point (three-point in 1D) Laplacian with zero-flux ghost cells."""
    return Field(f.grid, _laplacian(f.values, f.grid.h))


def chemotaxis_divergence(u: Field, v: Field, chi: float, scheme: str = CENTRAL) -> Field:
    """Discrete ``-chi * div(u grad v)`` assembled from face fluxes.

    With ``scheme="CENTRAL"`` the face density is the mean of the two
    neighbouring cells; ``"UPWIND"`` takes the donor cell instead.
    """
    grid = _same_grid(u, v)
    if not chi > 0:
        raise PreconditionError(f"chi must be positive, got {chi}")
    return Field(grid, _chemotaxis(u.values, v.values, chi, grid.h, scheme))


def integrate_power(f: Field, gamma: float) -> float:
    """Midpoint-rule approximation of the integral of f**gamma."""
    _check_nonnegative(f.values)
    return float(np.sum(f.values**gamma) * f.grid.cell_volume)


@dataclass(frozen=True)
class Norms:
    lk: dict
    sup: float
    min: float

    def __getitem__(self, k):
        return self.lk[k]


def norms(f: Field, ks=(1, 2)) -> Norms:
    """L^k norms for each requested k, plus the cellwise max and min."""
    vol = f.grid.cell_volume
    a = np.abs(f.values)
    lk = {k: float(np.sum(a**k) * vol) ** (1.0 / k) for k in ks}
    return Norms(lk=lk, sup=float(f.values.max()), min=float(f.values.min()))
