"""Linear solves for the implicit diffusion stage.

Both solvers handle ``(I + diag(sink) - w * Laplacian) x = b`` with the
zero-flux Laplacian of :mod:`nlchemo.grid`, where ``w = theta * dt`` and
``sink`` is an optional nonnegative diagonal (used by the semi-implicit
consumption term). The operator is symmetric positive definite.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg.lapack import dgtsv

from .errors import SolverError
from .grid import _laplacian

MAX_CG_ITER = 10_000


def solve_tridiagonal(b, w, h, sink=None):
    """Direct tridiagonal solve in 1D (LAPACK gtsv)."""
    n = b.shape[0]
    r = w / h**2
    off = np.full(n - 1, -r)
    diag = np.full(n, 1.0 + 2.0 * r)
    diag[0] = diag[-1] = 1.0 + r
    if sink is not None:
        diag += sink
    _, _, _, x, info = dgtsv(off, diag, off.copy(), b)
    if info != 0:
        raise SolverError(f"tridiagonal solve failed (LAPACK info={info})")
    return x


def _operator_diagonal(shape, w, h, sink):
    diag = np.ones(shape)
    for axis, hd in enumerate(h):
        # interior cells couple to two neighbours along each axis, edge cells to one
        nb = np.full(shape[axis], 2.0)
        nb[0] = nb[-1] = 1.0
        bshape = [1] * len(shape)
        bshape[axis] = shape[axis]
        diag = diag + (w / hd**2) * nb.reshape(bshape)
    if sink is not None:
        diag = diag + sink
    return diag


def solve_pcg(b, w, h, sink=None, x0=None, tol=1e-10, maxiter=MAX_CG_ITER):
    """Jacobi-preconditioned conjugate gradients, matrix free.

    Stops when ``||r|| <= tol * ||b||``. A final correction along the
    constant mode makes the residual sum to zero, so the discrete mass
    balance of the exact solve holds to round-off rather than to ``tol``.

    Returns ``(x, iterations)``.
    """

    def apply(x):
        y = x - w * _laplacian(x, h)
        if sink is not None:
            y = y + sink * x
        return y

    inv_diag = 1.0 / _operator_diagonal(b.shape, w, h, sink)
    x = b.copy() if x0 is None else x0.copy()
    r = b - apply(x)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b), 0
    target = tol * bnorm
    z = inv_diag * r
    p = z.copy()
    rz = float(np.vdot(r, z))
    it = 0
    rnorm = np.linalg.norm(r)
    while rnorm > target:
        if it >= maxiter:
            raise SolverError(
                f"CG did not converge in {maxiter} iterations "
                f"(relative residual {rnorm / bnorm:.3e} > {tol:.1e})",
                residual=rnorm / bnorm,
                iterations=it,
            )
        ap = apply(p)
        step = rz / float(np.vdot(p, ap))
        x += step * p
        r -= step * ap
        z = inv_diag * r
        rz_new = float(np.vdot(r, z))
        p = z + (rz_new / rz) * p
        rz = rz_new
        rnorm = np.linalg.norm(r)
        it += 1

    ones = np.ones_like(b)
    x += (b.sum() - apply(x).sum()) / apply(ones).sum()
    return x, it
