"""Truncated Schottky-series evaluators for differentials, periods and Abel maps.

All series run over reduced group words up to the configured cap.  Values are
densities against dz in the plane chart, so contour integrals of them need no
extra normalization.  Convergence is the caller's responsibility in the sense
that the multipliers must be small enough; the period and Abel routines check
their own tails and raise TruncationError instead of returning drifted values.
"""

import cmath

import numpy as np

from .errors import PoleCollisionError, TruncationError
from .schottky import apply_stack, conjugated_word, cross_ratio, is_infinite

TWO_PI_I = 2j * np.pi

# Evaluation closer than this to an enumerated pole is refused.
POLE_MARGIN = 1e-9


def _as_divisor(divisor):
    # combine repeated points so (x) - (x) really is the empty divisor
    combined = {}
    order = []
    for point, mult in divisor:
        point = complex(point)
        if point not in combined:
            combined[point] = 0
            order.append(point)
        combined[point] += int(mult)
    return [(p, combined[p]) for p in order if combined[p] != 0]


class AbelianData:
    """Series evaluators bound to one Schottky group and one word-length cap.

    Parameters
    ----------
    group : SchottkyGroup
    word_length : int
        Cap on reduced word length in every sum and product.
    tail_tol : float
        Allowed change between the cap and cap-1 truncations of the period
        products; exceeding it raises TruncationError.
    """

    def __init__(self, group, word_length, tail_tol=1e-6):
        if word_length < 1 and group.genus > 0:
            raise ValueError("word length cap must be at least 1")
        self.group = group
        self.word_length = int(word_length)
        self.tail_tol = float(tail_tol)
        self._coset_cache = {}
        self._orbit_cache = {}
        self._abel_cache = {}
        self._period_cache = None

    # -- pole bookkeeping -----------------------------------------------------

    def _coset_images(self, i):
        """Images of the two fixed points of generator i under coset words."""
        if i not in self._coset_cache:
            words = self.group.coset_words(i, self.word_length)
            mats = self.group.matrix_stack(words)
            alpha = self.group.alphas[i - 1]
            self._coset_cache[i] = (
                words,
                apply_stack(mats, alpha),
                apply_stack(mats, alpha.conjugate()),
            )
        return self._coset_cache[i]

    def _orbit(self, x):
        """Images of x under every word up to the cap (cached per point)."""
        key = complex(x)
        if key not in self._orbit_cache:
            words = self.group.words(self.word_length)
            mats = self.group.matrix_stack(words)
            self._orbit_cache[key] = apply_stack(mats, key)
        return self._orbit_cache[key]

    @staticmethod
    def _guard(z, poles, what):
        gap = np.min(np.abs(poles - z)) if len(poles) else np.inf
        if gap < POLE_MARGIN:
            raise PoleCollisionError(
                "%s evaluated %.2e away from a series pole" % (what, gap)
            )

    # -- differentials ----------------------------------------------------------

    def omega_first(self, i, z):
        """Normalized 1st-kind differential for handle i, as a density at z."""
        if not 1 <= i <= self.group.genus:
            raise ValueError("handle index out of range")
        z = complex(z)
        _, att, rep = self._coset_images(i)
        self._guard(z, att, "omega_first")
        self._guard(z, rep, "omega_first")
        return complex(np.add.reduce(1.0 / (z - att) - 1.0 / (z - rep))) / TWO_PI_I

    def omega_basis(self, z):
        """All g first-kind densities at z, as a vector."""
        return np.array(
            [self.omega_first(i, z) for i in range(1, self.group.genus + 1)],
            dtype=complex,
        )

    def omega_third(self, x, y, z):
        """3rd-kind differential with residue +1 at x and -1 at y, at z."""
        x, y, z = complex(x), complex(y), complex(z)
        if x == y:
            raise ValueError("third-kind differential needs distinct poles")
        xs = self._orbit(x)
        ys = self._orbit(y)
        self._guard(z, xs, "omega_third")
        self._guard(z, ys, "omega_third")
        return complex(np.add.reduce(1.0 / (z - xs) - 1.0 / (z - ys)))

    # -- periods ---------------------------------------------------------------

    def _q_entry(self, i, j, max_len):
        words = self.group.double_coset_words(i, j, max_len)
        alpha_i = self.group.alphas[i - 1]
        if i == j:
            base = complex(self.group.multipliers[i - 1])
        else:
            alpha_j = self.group.alphas[j - 1]
            base = cross_ratio(
                alpha_i, alpha_i.conjugate(), alpha_j, alpha_j.conjugate()
            )
        rest = [w for w in words if w]
        if rest:
            mats = self.group.matrix_stack(rest)
            alpha_j = self.group.alphas[j - 1]
            ca = apply_stack(mats, alpha_j)
            cb = apply_stack(mats, alpha_j.conjugate())
            factors = ((alpha_i - ca) * (alpha_i.conjugate() - cb)) / (
                (alpha_i - cb) * (alpha_i.conjugate() - ca)
            )
            base *= complex(np.prod(factors))
        return base

    def period_matrix(self):
        """Multiplicative periods q and the matrix Omega = log q / (2 pi i).

        q is real, symmetric, with diagonal in (0, 1); Omega is purely
        imaginary by the same branch choice.  Failing the tail or reality
        checks raises TruncationError.
        """
        if self._period_cache is not None:
            return self._period_cache
        g = self.group.genus
        q = np.ones((g, g), dtype=float)
        for i in range(1, g + 1):
            for j in range(i, g + 1):
                full = self._q_entry(i, j, self.word_length)
                prev = self._q_entry(i, j, max(self.word_length - 1, 0))
                if abs(full - prev) > self.tail_tol * max(1.0, abs(full)):
                    raise TruncationError(
                        "period q[%d,%d] tail %.3e exceeds %.3e; raise the word cap"
                        % (i, j, abs(full - prev), self.tail_tol)
                    )
                if abs(full.imag) > 1e-9 * max(1.0, abs(full)):
                    raise TruncationError(
                        "period q[%d,%d] has stray imaginary part %.3e"
                        % (i, j, abs(full.imag))
                    )
                if full.real <= 0.0:
                    raise TruncationError("period q[%d,%d] not positive" % (i, j))
                q[i - 1, j - 1] = q[j - 1, i - 1] = full.real
        if any(not 0.0 < q[k, k] < 1.0 for k in range(g)):
            raise TruncationError("diagonal periods left (0, 1)")
        omega = np.log(q) / TWO_PI_I
        self._period_cache = (q, omega)
        return self._period_cache

    # -- prime form --------------------------------------------------------------

    def prime_form(self, a, b):
        """Coordinate part of the prime form; antisymmetric, ~ (a-b) near the diagonal."""
        a, b = complex(a), complex(b)
        if a == b:
            raise ValueError("prime form needs distinct arguments")
        value = a - b
        words = self.group.star_words(self.word_length)
        if not words:
            return value
        mats = self.group.matrix_stack(words)
        ga = apply_stack(mats, a)
        gb = apply_stack(mats, b)
        for z, images in ((a, gb), (a, ga), (b, ga), (b, gb)):
            self._guard(z, images, "prime_form")
        factors = ((a - gb) * (b - ga)) / ((a - ga) * (b - gb))
        return value * complex(np.prod(factors))

    # -- Abel maps ---------------------------------------------------------------

    def point_abel(self, p):
        """Abel vector of the degree-1 divisor (p), base point at infinity.

        Componentwise principal logs of the coset products; only differences
        of these vectors (degree-0 data) are well defined mod Z^g.
        """
        if is_infinite(p):
            # every coset factor tends to 1; infinity is the base point
            return np.zeros(self.group.genus, dtype=complex)
        key = complex(p)
        if key not in self._abel_cache:
            g = self.group.genus
            vec = np.zeros(g, dtype=complex)
            for i in range(1, g + 1):
                _, att, rep = self._coset_images(i)
                self._guard(key, att, "point_abel")
                self._guard(key, rep, "point_abel")
                logs = np.log((key - att) / (key - rep))
                vec[i - 1] = complex(np.add.reduce(logs)) / TWO_PI_I
            self._abel_cache[key] = vec
        return self._abel_cache[key]

    def divisor_abel(self, divisor):
        """Abel vector of a divisor given as (point, multiplicity) pairs."""
        terms = _as_divisor(divisor)
        vec = np.zeros(self.group.genus, dtype=complex)
        for point, mult in terms:
            vec = vec + mult * self.point_abel(point)
        return vec

    def abel_map_real(self, divisor):
        """Lifted Abel vector in R^g of a degree-0 divisor with real points.

        Sigma-symmetry pairs each coset word with its letterwise-negated
        partner; the paired Blaschke product is exactly unimodular for real
        divisor points, and the lift is the ordered sum of principal
        arguments of the identity factor and the pair products.
        """
        terms = _as_divisor(divisor)
        degree = sum(m for _, m in terms)
        if degree != 0:
            raise ValueError("Abel map needs a degree-0 divisor, got degree %d" % degree)
        for point, _ in terms:
            if abs(point.imag) > 1e-12:
                raise ValueError("real-locus Abel map needs real divisor points")
        g = self.group.genus
        out = np.zeros(g, dtype=float)
        for i in range(1, g + 1):
            words, att, rep = self._coset_images(i)
            index = {w: k for k, w in enumerate(words)}
            factors = np.ones(len(words), dtype=complex)
            for point, mult in terms:
                self._guard(point, att, "abel_map_real")
                self._guard(point, rep, "abel_map_real")
                factors *= ((point - att) / (point - rep)) ** mult
            total = 0.0
            seen = set()
            for k, w in enumerate(words):
                if w in seen:
                    continue
                partner = conjugated_word(w)
                if partner == w:
                    total += cmath.phase(factors[k])
                    seen.add(w)
                    continue
                pk = index.get(partner)
                if pk is None:
                    # negation preserves the no-trailing-letter condition, so
                    # a missing partner is a word-cache bug, not a data issue
                    raise TruncationError("conjugate coset word missing for %r" % (w,))
                pair = factors[k] * factors[pk]
                if abs(abs(pair) - 1.0) > 1e-8:
                    raise TruncationError(
                        "paired Abel factor modulus drifted to %.12f" % abs(pair)
                    )
                total += cmath.phase(pair)
                seen.add(w)
                seen.add(partner)
            out[i - 1] = total / (2.0 * np.pi)
        return out
