"""Deterministic random streams: one root seed, one child stream per suite."""

import numpy as np

SUITES = ("ball-integral", "box-sum", "weyl", "shrink", "arcs", "diagonal", "recursion", "projective", "minor")


def suite_rng(seed, suite):
    """Generator for ``suite`` (a name from SUITES or an index) under ``seed``."""
    index = SUITES.index(suite) if isinstance(suite, str) else int(suite)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(index,)))
