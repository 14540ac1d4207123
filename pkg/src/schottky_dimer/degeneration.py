"""Degeneration scans: closing handles and checking convergence orders.

A scan evaluates a quantity along a geometric multiplier schedule, compares
against a fixed limit and fits the decay order from log-log differences.
First-order references for the weight and the single-step kernel function
come from the explicit handle-closing expansion; both have exact limits at
s = 0 (the subgroup curve), so no extrapolation guesswork is involved.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .curve import Curve
from .schottky import SchottkyGroup

TWO_PI = 2.0 * math.pi


@dataclass
class LimitScan:
    quantity: str
    s_values: list
    values: list
    limit: complex
    diffs: list
    order: float
    residual: float
    conclusive: bool
    note: str = ""


@dataclass
class SeriesExpansion:
    """constant + sum_i coefficients[i] * sqrt(s_i); exact at s = 0."""

    constant: complex
    coefficients: np.ndarray
    domain: str
    second_order: object = None  # reserved, never populated

    def evaluate(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if s.shape != self.coefficients.shape:
            raise ValueError("one multiplier per handle expected")
        if np.any(s < 0.0):
            raise ValueError("multipliers are nonnegative")
        return self.constant + np.sum(self.coefficients * np.sqrt(s))


def geometric_schedule(s0=0.04, steps=6):
    """Multipliers s0, s0/2, ..., s0/2**(steps-1)."""
    if steps < 4:
        raise ValueError("need at least 4 steps to fit an order")
    return [s0 * 2.0 ** (-k) for k in range(steps)]


def fit_order(s_values, diffs, residual_limit=0.1):
    """Least-squares exponent p with diff ~ C * s**p, plus an rms residual."""
    s = np.asarray(s_values, dtype=float)
    d = np.asarray(diffs, dtype=float)
    if len(s) < 4:
        raise ValueError("need at least 4 points to fit an order")
    if np.any(d <= 0.0):
        # hit the limit exactly; faster than any power
        return math.inf, 0.0, True
    x = np.log2(s)
    y = np.log2(d)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), resid, resid <= residual_limit


def limit_scan(fn, s_values, limit, quantity="", residual_limit=0.1):
    """Evaluate fn along the schedule and fit |fn(s) - limit| ~ s**order."""
    if len(s_values) < 4:
        raise ValueError("need at least 4 points to fit an order")
    if any(b >= a for a, b in zip(s_values, s_values[1:])):
        raise ValueError("schedule must be strictly decreasing")
    values = [complex(fn(s)) for s in s_values]
    limit = complex(limit)
    diffs = [abs(v - limit) for v in values]
    order, residual, conclusive = fit_order(s_values, diffs, residual_limit)
    note = "" if conclusive else "fit residual %.3f exceeds %.2f" % (
        residual,
        residual_limit,
    )
    return LimitScan(
        quantity, list(s_values), values, limit, diffs, order, residual,
        conclusive, note,
    )


def write_scan_csv(result, path):
    with open(path, "w") as handle:
        handle.write("s,quantity_re,quantity_im,abs_diff,fitted_order\n")
        for s, v, d in zip(result.s_values, result.values, result.diffs):
            handle.write(
                "%r,%r,%r,%r,%r\n" % (s, v.real, v.imag, d, result.order)
            )


# -- reference curves ------------------------------------------------------------


def subgroup_reference(group, vanishing):
    """Group with the listed (1-based) handles removed; None at genus 0.

    Returns (group or None, kept indices).
    """
    vanishing = set(vanishing)
    for i in vanishing:
        if not 1 <= i <= group.genus:
            raise ValueError("no handle %r in a genus-%d group" % (i, group.genus))
    kept = [i for i in range(1, group.genus + 1) if i not in vanishing]
    if not kept:
        return None, []
    return group.subgroup(kept), kept


def curve_family(alphas, multipliers, index, word_length=6, eps=1e-10,
                 tail_tol=1e-6):
    """s -> Curve with handle `index` at multiplier s; s = 0 is the subgroup."""
    alphas = list(alphas)
    base = [float(m) for m in multipliers]
    if not 1 <= index <= len(base):
        raise ValueError("no handle %r" % index)

    def make(s):
        if s == 0.0:
            group, _ = subgroup_reference(
                SchottkyGroup(alphas, base), [index]
            )
            return Curve(group, word_length, eps=eps, tail_tol=tail_tol)
        mults = list(base)
        mults[index - 1] = float(s)
        return Curve(
            SchottkyGroup(alphas, mults), word_length, eps=eps, tail_tol=tail_tol
        )

    return make


# -- first-order handle-closing expansions ---------------------------------------


def _phi(point, center):
    """Degenerate Abel factor of one handle: modulus 1 on the real line."""
    p = complex(point)
    if not cmath.isfinite(p):
        return 1.0 + 0.0j
    return (p - center) / (p - center.conjugate())


def limit_face_phase(center, divisor, t_component=0.0):
    """Handle component of t + Abel(divisor) once the handle has closed."""
    total = float(t_component)
    for point, mult in divisor:
        total += mult * cmath.phase(_phi(point, center)) / TWO_PI
    return total


def weight_order1(weights, edge):
    """First-order expansion of one edge weight in the sqrt-multipliers.

    All handles close together; the constant term is the flat weight
    beta - alpha and each handle contributes a cosine pair at the two
    limiting face phases.
    """
    beta = weights.angle(edge.minus_track)
    alpha = weights.angle(edge.plus_track)
    constant = complex(beta - alpha)
    led = weights.ledger
    divisors = [
        led.divisor(led.face_counter(f))
        for f in (edge.left_face, edge.right_face)
    ]
    centers = [complex(a) for a in weights.curve.group.alphas] if (
        weights.curve.genus
    ) else []
    coeffs = np.zeros(len(centers), dtype=complex)
    for i, center in enumerate(centers):
        total = 0.0
        for div in divisors:
            phase = limit_face_phase(center, div, weights.t[i])
            total += 2.0 * math.cos(TWO_PI * phase)
        coeffs[i] = -constant * total
    return SeriesExpansion(constant, coeffs, "weight")


def kernel_order1(weights, edge, u, side="left"):
    """First-order expansion of the face-to-white kernel step at u.

    side selects which face the step leaves: the left face crosses the
    edge's minus track, the right face its plus track.  Each handle's
    coefficient is a modulus-one cross-ratio product over (u) + d(white).
    """
    if side == "left":
        track_angle = weights.angle(edge.minus_track)
    elif side == "right":
        track_angle = weights.angle(edge.plus_track)
    else:
        raise ValueError("side must be left or right")
    led = weights.ledger
    divisor = [(u, 1)] + led.divisor(led.white_counter(edge.white))
    constant = 1.0 / (u - track_angle)
    centers = [complex(a) for a in weights.curve.group.alphas] if (
        weights.curve.genus
    ) else []
    coeffs = np.zeros(len(centers), dtype=complex)
    for i, center in enumerate(centers):
        prod = 1.0 + 0.0j
        for point, mult in divisor:
            prod *= _phi(point, center) ** mult
        phase = cmath.exp(2j * math.pi * weights.t[i])
        coeffs[i] = (phase * prod + 1.0 / (phase * prod)) * constant
    return SeriesExpansion(constant, coeffs, "kernel")
