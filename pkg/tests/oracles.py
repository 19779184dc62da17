"""Reference solutions that do not go through the package's discretization."""

import numpy as np
from scipy.integrate import solve_ivp


def homogeneous_ode(mode_sign, a, b, alpha, beta, gamma, measure, u0, v0, t_end, t_eval=None):
    """Scalar ODE obeyed by spatially constant data:

    u' = sign * (a u^alpha - b |Omega| u^(beta+gamma)),   v' = -u v
    """

    def rhs(t, y):
        u, v = y
        return [mode_sign * (a * u**alpha - b * measure * u ** (beta + gamma)), -u * v]

    sol = solve_ivp(rhs, (0.0, t_end), [u0, v0], method="DOP853", rtol=1e-12, atol=1e-14,
                    t_eval=t_eval, dense_output=True)
    assert sol.success, sol.message
    return sol


def logistic(t, u0, r=2.0, k=2.0):
    """Closed form of u' = r u (1 - u/k)."""
    e = np.exp(r * t)
    return k * u0 * e / (k + u0 * (e - 1.0))


def ode_blowup_time(u0, threshold):
    """First time u' = u^2 started at u0 reaches ``threshold``: 1/u0 - 1/threshold."""
    return 1.0 / u0 - 1.0 / threshold


def neumann_matrix_1d(n, h):
    """Dense three-point Neumann Laplacian built entry by entry."""
    m = np.zeros((n, n))
    for i in range(n):
        if i > 0:
            m[i, i - 1] += 1.0
            m[i, i] -= 1.0
        if i < n - 1:
            m[i, i + 1] += 1.0
            m[i, i] -= 1.0
    return m / h**2


def neumann_matrix_2d(nx, ny, hx, hy):
    ix, iy = np.eye(nx), np.eye(ny)
    return np.kron(neumann_matrix_1d(nx, hx), iy) + np.kron(ix, neumann_matrix_1d(ny, hy))
