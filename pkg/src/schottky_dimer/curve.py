"""One uniformized curve: group, period data, theta, Abel vectors.

The genus-0 case is a first-class citizen: empty period matrix, theta
identically one, prime form (a - b) and zero-length Abel vectors.  All
higher layers are written against this interface so they never branch on
the genus themselves.
"""

import numpy as np

from .abelian import AbelianData
from .schottky import is_infinite
from .theta import ThetaEvaluator


class Curve:
    def __init__(self, group=None, word_length=6, eps=1e-10, tail_tol=1e-6):
        self.group = group
        self.word_length = word_length
        if group is None or group.genus == 0:
            self.genus = 0
            self.abelian = None
            self.periods = np.zeros((0, 0))
            self.log_periods = np.zeros((0, 0), dtype=complex)
        else:
            self.genus = group.genus
            self.abelian = AbelianData(group, word_length, tail_tol=tail_tol)
            self.periods, self.log_periods = self.abelian.period_matrix()
        self.theta_eval = ThetaEvaluator(self.periods, eps=eps)

    # -- theta ------------------------------------------------------------

    def theta(self, z):
        return self.theta_eval.theta(np.asarray(z, dtype=complex))

    def dlog_theta(self, z, j=None):
        return self.theta_eval.dlog_theta(np.asarray(z, dtype=complex), j)

    # -- differentials and prime form --------------------------------------

    def omega_first(self, i, z):
        if self.genus == 0:
            raise ValueError("no holomorphic differentials at genus 0")
        return self.abelian.omega_first(i, z)

    def omega_third(self, x, y, z):
        """Third-kind kernel with residue +1 at x, -1 at y."""
        if self.genus == 0:
            return 1.0 / (z - x) - 1.0 / (z - y)
        return self.abelian.omega_third(x, y, z)

    def prime_form(self, a, b):
        if is_infinite(a) or is_infinite(b):
            raise ValueError("prime form needs finite points")
        if self.genus == 0:
            return complex(a) - complex(b)
        return self.abelian.prime_form(a, b)

    # -- Abel vectors -------------------------------------------------------

    def abel(self, divisor):
        """Sum of normalized Abel vectors, one per divisor point.

        Any degree is allowed; the normalization fixes the basepoint at
        infinity, so mixed-degree ledger vectors stay mutually consistent.
        """
        if self.genus == 0:
            return np.zeros(0, dtype=complex)
        total = np.zeros(self.genus, dtype=complex)
        for point, mult in divisor:
            if mult == 0:
                continue
            total = total + mult * self.abelian.point_abel(point)
        return total

    def abel_real(self, divisor, tol=1e-10):
        """Abel vector of a divisor on the real oval, with the junk imaginary
        part checked against tol and stripped."""
        vec = self.abel(divisor)
        drift = float(np.max(np.abs(vec.imag))) if self.genus else 0.0
        if drift > tol:
            raise ValueError("divisor is not real enough: imag %.3e" % drift)
        return vec.real.copy()
