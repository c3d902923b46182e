"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

import curvedq as cq


def elementwise_diff(op_a, op_b):
    """Max elementwise difference between two sparse operators, relative
    to the largest entry of the first."""
    diff = op_a.matrix - op_b.matrix
    scale = np.max(np.abs(op_a.matrix.data))
    if diff.nnz == 0:
        return 0.0
    return float(np.max(np.abs(diff.data)) / scale)


def relative_errors(values, oracle, floor=None):
    """|values - oracle| / max(|oracle|, floor); default floor is a tenth
    of the oracle's spectral span (handles exactly-zero levels)."""
    oracle = np.asarray(oracle, dtype=float)
    if floor is None:
        floor = 0.1 * max(np.ptp(oracle), 1e-12)
    return np.abs(np.asarray(values) - oracle) / np.maximum(np.abs(oracle), floor)


@pytest.fixture
def sphere_chart():
    return cq.sphere(1.0)


@pytest.fixture
def torus_chart():
    return cq.torus(2.0, 1.0)


@pytest.fixture
def cylinder_chart():
    return cq.cylinder(1.0, 5.0)
