"""Riemann theta function of a real multiplicative period matrix.

The period data comes in multiplicatively as the positive symmetric matrix q
(diagonal in (0,1)); lattice weights are assembled from half-integer powers of
q with the positive square root of the diagonal, which keeps the sqrt(s)
degeneration terms exact and avoids any branch choice.  Genus 0 is the
constant 1.
"""

import math

import numpy as np

from .errors import AdmissibilityError, TruncationError

TWO_PI = 2.0 * np.pi

# Largest retained lattice term may not exceed this multiple of the result.
CONDITION_LIMIT = 1e12


def lattice_radius(q_max, eps):
    """Box radius so the largest dropped Gaussian term stays under eps."""
    if not 0.0 < q_max < 1.0:
        raise AdmissibilityError("diagonal periods must lie in (0, 1)")
    return math.ceil(math.sqrt(2.0 * math.log(1.0 / eps) / math.log(1.0 / q_max))) + 2


class ThetaEvaluator:
    """Lattice-sum theta evaluator for one period matrix.

    Parameters
    ----------
    q : (g, g) array-like, real
        Multiplicative periods.  Must be symmetric with diagonal in (0, 1),
        and log q must be negative definite for the sum to converge.
    eps : float
        Target absolute size of the largest dropped term.
    radius : int, optional
        Override for the lattice box radius (tests use it for oracle margins).
    """

    def __init__(self, q, eps=1e-10, radius=None):
        q = np.asarray(q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise AdmissibilityError("period matrix must be square")
        self.genus = q.shape[0]
        self.q = q
        self.eps = float(eps)
        if self.genus == 0:
            self.radius = 0
            self._points = np.zeros((1, 0), dtype=float)
            self._weights = np.ones(1, dtype=float)
            return
        if not np.allclose(q, q.T, rtol=0.0, atol=1e-12):
            raise AdmissibilityError("period matrix must be symmetric")
        if np.any(q <= 0.0):
            raise AdmissibilityError("multiplicative periods must be positive")
        log_q = np.log(q)
        if np.max(np.linalg.eigvalsh(log_q)) >= 0.0:
            raise AdmissibilityError(
                "log of the period matrix is not negative definite; "
                "the theta series would diverge"
            )
        q_max = float(np.max(np.diag(q)))
        self.radius = int(radius) if radius is not None else lattice_radius(q_max, eps)
        rng = np.arange(-self.radius, self.radius + 1, dtype=float)
        grids = np.meshgrid(*([rng] * self.genus), indexing="ij")
        points = np.stack([grid.ravel() for grid in grids], axis=1)
        self._points = points
        # w_u = exp(u . log q . u / 2); real positive by construction
        self._weights = np.exp(0.5 * np.einsum("ui,ij,uj->u", points, log_q, points))

    def _phases(self, z):
        z = np.asarray(z, dtype=complex).reshape(self.genus)
        # column-wise accumulation, no BLAS matvec: reduction order is fixed,
        # so reports stay byte-identical across thread counts
        acc = np.zeros(self._points.shape[0], dtype=complex)
        for k in range(self.genus):
            acc = acc + self._points[:, k] * z[k]
        return np.exp(2j * np.pi * acc)

    def theta(self, z):
        """Theta value at a complex g-vector z."""
        if self.genus == 0:
            return 1.0 + 0.0j
        terms = self._weights * self._phases(z)
        value = complex(np.add.reduce(terms))
        peak = float(np.max(np.abs(terms)))
        if peak > CONDITION_LIMIT * abs(value):
            raise TruncationError(
                "theta sum ill-conditioned: largest term %.3e against value %.3e"
                % (peak, abs(value))
            )
        return value

    def theta_and_grad(self, z):
        """Theta and its z-gradient (term-differentiated series)."""
        if self.genus == 0:
            return 1.0 + 0.0j, np.zeros(0, dtype=complex)
        terms = self._weights * self._phases(z)
        value = complex(np.add.reduce(terms))
        peak = float(np.max(np.abs(terms)))
        if peak > CONDITION_LIMIT * abs(value):
            raise TruncationError(
                "theta sum ill-conditioned: largest term %.3e against value %.3e"
                % (peak, abs(value))
            )
        grad = np.empty(self.genus, dtype=complex)
        for j in range(self.genus):
            grad[j] = 2j * np.pi * complex(np.add.reduce(self._points[:, j] * terms))
        return value, grad

    def dlog_theta(self, z, j=None):
        """Logarithmic partial derivative(s) of theta at z.

        With j given (1-based) returns that component, otherwise the vector.
        """
        value, grad = self.theta_and_grad(z)
        if abs(value) <= 1e-12:
            raise TruncationError("theta vanishes at the requested point")
        ratio = grad / value
        if j is None:
            return ratio
        if not 1 <= j <= self.genus:
            raise ValueError("component index out of range")
        return complex(ratio[j - 1])


def theta_order1(multipliers, z):
    """Two-term truncation 1 + sum_i (e^{2 pi i z_i} + e^{-2 pi i z_i}) sqrt(s_i)."""
    multipliers = np.asarray(multipliers, dtype=float)
    z = np.asarray(z, dtype=complex).reshape(multipliers.shape)
    total = 1.0 + 0.0j
    for s_i, z_i in zip(multipliers, z):
        total += (np.exp(2j * np.pi * z_i) + np.exp(-2j * np.pi * z_i)) * math.sqrt(s_i)
    return complex(total)
