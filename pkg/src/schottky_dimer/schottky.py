"""Schottky groups built from half-plane-symmetric generator data.

Each generator is pinned by a fixed point ``alpha`` in the open upper half
plane together with a real multiplier ``0 < s < 1``; its second fixed point
is the complex conjugate of the first, so ``z -> conj(z)`` normalizes the
whole group.  Group elements are reduced words in the generators, stored as
tuples of nonzero integers: letter ``+i`` is generator ``i`` (1-based) and
``-i`` its inverse.
"""

import cmath
import math

import numpy as np

from .errors import AdmissibilityError

INFINITY = complex(math.inf, 0.0)


def is_infinite(z):
    z = complex(z)
    return math.isinf(z.real) or math.isinf(z.imag)


def _letter_key(letter):
    # enumeration order +1 < -1 < +2 < -2 < ...
    return (abs(letter), letter < 0)


def word_key(word):
    return tuple(_letter_key(l) for l in word)


def inverse_word(word):
    return tuple(-l for l in reversed(word))


def conjugated_word(word):
    """Letterwise sign flip: the word of conj . gamma . conj."""
    return tuple(-l for l in word)


class MoebiusMap:
    """Fractional linear map ``z -> (a*z + b) / (c*z + d)``."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a = complex(a)
        self.b = complex(b)
        self.c = complex(c)
        self.d = complex(d)

    def __call__(self, z):
        if is_infinite(z):
            return self.a / self.c if self.c != 0 else INFINITY
        z = complex(z)
        den = self.c * z + self.d
        if den == 0:
            return INFINITY
        return (self.a * z + self.b) / den

    def __matmul__(self, other):
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def inverse(self):
        det = self.det()
        return MoebiusMap(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __repr__(self):
        return f"MoebiusMap({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


def make_generator(alpha, s):
    """Det-1 map with fixed points ``alpha``, ``conj(alpha)`` and multiplier ``s``.

    ``alpha`` attracts iteration, ``conj(alpha)`` repels.  The determinant of
    the unnormalized coefficient matrix is ``s * (alpha - conj(alpha))**2``,
    a negative real, and the branch of its square root is fixed so that the
    normalized trace ``(1 + s)/sqrt(s)`` comes out positive.
    """
    alpha = complex(alpha)
    s = float(s)
    if not alpha.imag > 0:
        raise AdmissibilityError(f"fixed point {alpha} must lie in the open upper half plane")
    if not 0.0 < s < 1.0:
        raise AdmissibilityError(f"multiplier {s} must lie in (0, 1)")
    ac = alpha.conjugate()
    root = 2j * math.sqrt(s) * alpha.imag
    return MoebiusMap(
        (alpha - s * ac) / root,
        ((s - 1.0) * alpha * ac) / root,
        (1.0 - s) / root,
        (s * alpha - ac) / root,
    )


def multiplier(gamma):
    """Eigenvalue-ratio multiplier of a loxodromic map, the root with modulus <= 1."""
    t = gamma.trace() / cmath.sqrt(gamma.det())
    w = t * t - 2.0
    k = (w + cmath.sqrt(w * w - 4.0)) / 2.0
    if abs(k) > 1.0:
        k = 1.0 / k
    return k


def fixed_points(gamma):
    """(attracting, repelling) fixed points on the sphere."""
    if gamma.c == 0:
        if gamma.a == gamma.d:
            return INFINITY, INFINITY
        finite = gamma.b / (gamma.d - gamma.a)
        if abs(gamma.a) > abs(gamma.d):
            return INFINITY, finite
        return finite, INFINITY
    disc = cmath.sqrt((gamma.a - gamma.d) ** 2 + 4.0 * gamma.b * gamma.c)
    z1 = (gamma.a - gamma.d + disc) / (2.0 * gamma.c)
    z2 = (gamma.a - gamma.d - disc) / (2.0 * gamma.c)
    # derivative modulus at a fixed point z is |det| / |c*z + d|^2
    if abs(gamma.c * z1 + gamma.d) >= abs(gamma.c * z2 + gamma.d):
        return z1, z2
    return z2, z1


def cross_ratio(a, b, c, d):
    """Cross ratio ``(a-c)(b-d) / ((a-d)(b-c))``; one argument may be infinite.

    >>> cross_ratio(0, 1, 2, 3)
    (1.3333333333333333+0j)
    """
    a, b, c, d = complex(a), complex(b), complex(c), complex(d)
    if is_infinite(a):
        num, den = b - d, b - c
    elif is_infinite(b):
        num, den = a - c, a - d
    elif is_infinite(c):
        num, den = b - d, a - d
    elif is_infinite(d):
        num, den = a - c, b - c
    else:
        num, den = (a - c) * (b - d), (a - d) * (b - c)
    if den == 0:
        raise ValueError("cross ratio degenerate: repeated points")
    return num / den


def apply_stack(mats, z):
    """Apply an (n, 2, 2) stack of matrices to one finite point, returning (n,) images."""
    z = complex(z)
    num = mats[:, 0, 0] * z + mats[:, 0, 1]
    den = mats[:, 1, 0] * z + mats[:, 1, 1]
    return num / den


class SchottkyGroup:
    """Free group on symmetric generators, with word enumeration caches.

    Parameters
    ----------
    alphas : sequence of complex
        Upper-half-plane fixed points, one per generator.  May be empty,
        which models the trivial group on the sphere.
    multipliers : sequence of float
        Loxodromic multipliers in (0, 1), one per generator.
    """

    def __init__(self, alphas, multipliers):
        alphas = [complex(a) for a in alphas]
        multipliers = [float(s) for s in multipliers]
        if len(alphas) != len(multipliers):
            raise AdmissibilityError("need exactly one multiplier per fixed point")
        self.genus = len(alphas)
        self.alphas = np.array(alphas, dtype=complex)
        self.multipliers = np.array(multipliers, dtype=float)
        self.generators = [make_generator(a, s) for a, s in zip(alphas, multipliers)]
        self._letters = []
        for i in range(1, self.genus + 1):
            self._letters.extend([i, -i])
        self._gen_mats = {}
        for i, gen in enumerate(self.generators, start=1):
            self._gen_mats[i] = gen.matrix()
            self._gen_mats[-i] = gen.inverse().matrix()
        self._words_by_len = [[()]]
        self._mats = {(): np.eye(2, dtype=complex)}

    # -- word enumeration ---------------------------------------------------

    def _extend_to(self, max_len):
        while len(self._words_by_len) <= max_len:
            fresh = []
            for w in self._words_by_len[-1]:
                last = w[-1] if w else 0
                for letter in self._letters:
                    if letter == -last:
                        continue
                    w2 = w + (letter,)
                    fresh.append(w2)
                    self._mats[w2] = self._mats[w] @ self._gen_mats[letter]
            self._words_by_len.append(fresh)

    def words(self, max_len):
        """All reduced words of length <= max_len, by length then letter order."""
        if max_len < 0:
            raise ValueError("word length cap must be nonnegative")
        self._extend_to(max_len)
        out = []
        for block in self._words_by_len[: max_len + 1]:
            out.extend(block)
        return out

    def coset_words(self, i, max_len):
        """Representatives of the cosets ``gamma * <gen_i>``: words not ending in +-i."""
        return [w for w in self.words(max_len) if not w or abs(w[-1]) != i]

    def double_coset_words(self, i, j, max_len):
        """Representatives of ``<gen_i> * gamma * <gen_j>``.

        The identity class plus every nonempty reduced word that neither
        starts with letter +-i nor ends with letter +-j; freeness of the
        group makes such representatives unique.
        """
        out = [()]
        for w in self.words(max_len):
            if w and abs(w[0]) != i and abs(w[-1]) != j:
                out.append(w)
        return out

    def star_words(self, max_len):
        """One representative per pair {gamma, gamma^{-1}}, identity omitted."""
        out = []
        for w in self.words(max_len):
            if w and word_key(w) < word_key(inverse_word(w)):
                out.append(w)
        return out

    # -- matrices and application --------------------------------------------

    def word_matrix(self, word):
        mat = self._mats.get(word)
        if mat is None:
            self._extend_to(len(word))
            mat = self._mats[word]
        return mat

    def word_map(self, word):
        m = self.word_matrix(word)
        return MoebiusMap(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def matrix_stack(self, word_list):
        """(n, 2, 2) array of word matrices in the given order."""
        if not word_list:
            return np.zeros((0, 2, 2), dtype=complex)
        return np.stack([self.word_matrix(w) for w in word_list])

    # -- geometry -------------------------------------------------------------

    def isometric_discs(self):
        """Map letter -> (center, radius) of that letter's target disc.

        A reduced word starting with letter L sends every point outside all
        2g discs into disc L, so pairwise disjoint discs bound a fundamental
        domain and make every series over the group geometrically convergent.
        """
        discs = {}
        for i, gen in enumerate(self.generators, start=1):
            r = 1.0 / abs(gen.c)
            discs[i] = (gen.a / gen.c, r)
            discs[-i] = (-gen.d / gen.c, r)
        return discs

    def classical_check(self, margin=1e-9):
        """Smallest gap between isometric discs; raises when any two nearly touch."""
        discs = self.isometric_discs()
        letters = sorted(discs, key=_letter_key)
        best = math.inf
        for p in range(len(letters)):
            for q in range(p + 1, len(letters)):
                c1, r1 = discs[letters[p]]
                c2, r2 = discs[letters[q]]
                gap = abs(c1 - c2) - (r1 + r2)
                if gap < margin:
                    raise AdmissibilityError(
                        f"isometric discs for letters {letters[p]} and {letters[q]}"
                        f" overlap or nearly touch (gap {gap:.3e})")
                best = min(best, gap)
        return best

    def domain_gap(self, z):
        """Distance from z to the nearest isometric disc; negative inside one."""
        z = complex(z)
        discs = self.isometric_discs()
        if not discs:
            return math.inf
        return min(abs(z - c) - r for c, r in discs.values())

    def subgroup(self, keep):
        """New group on the listed 1-based generator indices, order preserved."""
        idx = [k - 1 for k in keep]
        return SchottkyGroup(self.alphas[idx], self.multipliers[idx])
