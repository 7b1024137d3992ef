"""Hand-constructed worked instances, one per decision case.

Shared by the tests, the selftest suites and the example scripts.
"""

from __future__ import annotations

import numpy as np

from .cones import second_order
from .subspaces import AffineInclusion


def t51() -> AffineInclusion:
    """Full image: Im A = R^3 meets the cone interior."""
    return AffineInclusion(np.eye(3), np.zeros(3), second_order(3))


def t52i() -> AffineInclusion:
    """Axis line misses the cone except at 0; the shifted line is interior."""
    return AffineInclusion(np.array([[0.0], [1.0], [0.0]]),
                           np.array([1.0, 0.0, 0.0]), second_order(3))


def t52ii() -> AffineInclusion:
    """Same line, offset inside the image: S is the kernel slice."""
    return AffineInclusion(np.array([[0.0], [1.0], [0.0]]),
                           np.array([0.0, 2.0, 0.0]), second_order(3))


def t52iii() -> AffineInclusion:
    """Tangent line: the shifted line touches the cone at a single point."""
    return AffineInclusion(np.array([[0.0], [1.0], [0.0]]),
                           np.array([1.0, 0.0, 1.0]), second_order(3))


def t53i() -> AffineInclusion:
    """Tangent plane with offset inside the image."""
    return AffineInclusion(np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                           np.array([1.0, 1.0, 0.0]), second_order(3))


def t53ii() -> AffineInclusion:
    """Tangent plane with offset leaving the image: bound fails at infinity."""
    return AffineInclusion(np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                           np.array([1.0, 0.0, 0.0]), second_order(3))


def t53iii() -> AffineInclusion:
    """One-dimensional image along a boundary ray."""
    return AffineInclusion(np.array([[1.0], [1.0]]), np.zeros(2), second_order(2))


def degenerate_zero() -> AffineInclusion:
    """A = 0 with feasible offset: S is the whole space."""
    return AffineInclusion(np.zeros((3, 1)), np.array([1.0, 0.0, 0.0]), second_order(3))


def infeasible() -> AffineInclusion:
    """Axis line with an offset the cone can never absorb."""
    return AffineInclusion(np.array([[0.0], [1.0], [0.0]]),
                           np.array([-1.0, 0.0, 0.0]), second_order(3))


def worked_instances() -> dict[str, AffineInclusion]:
    return {
        "t51": t51(),
        "t52i": t52i(),
        "t52ii": t52ii(),
        "t52iii": t52iii(),
        "t53i": t53i(),
        "t53ii": t53ii(),
        "t53iii": t53iii(),
        "degenerate_zero": degenerate_zero(),
        "infeasible": infeasible(),
    }
