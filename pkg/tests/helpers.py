"""Shared fixtures-by-hand for the numerical test suites."""

import numpy as np

from schottky_dimer.schottky import SchottkyGroup


def random_group(genus, rng, s_max=0.05, spread=None):
    """Random classical configuration: separated centers, small multipliers.

    Separation is kept generous so that word-length 6 truncations settle the
    period products well below their tail tolerance.
    """
    if spread is None:
        spread = max(2.0, 1.1 * genus)
    for _ in range(200):
        xs = np.sort(rng.uniform(-spread, spread, genus))
        if genus > 1 and np.min(np.diff(xs)) < 1.6:
            continue
        ys = rng.uniform(0.9, 1.2, genus)
        ss = rng.uniform(0.005, s_max, genus)
        group = SchottkyGroup(xs + 1j * ys, ss)
        try:
            group.classical_check(margin=0.05)
        except Exception:
            continue
        return group
    raise RuntimeError("failed to sample an admissible configuration")


def symmetric_genus2(s=0.04):
    return SchottkyGroup([-1.0 + 1.0j, 1.0 + 1.0j], [s, s])
