#!/usr/bin/env python

import itertools
import math
from builtins import range

import numpy as np
import pytest

import errors
import measure
import recurrence
import utilities

# Literal sum over every sequence of steps
def literalPathSum(t, ell, k, m):
    total = 0.0
    for steps in itertools.product(range(-1, t.q + 1), repeat=ell):
        ordinate = k
        weight = 1.0
        for j in steps:
            destination = ordinate - j
            if destination < 0:
                weight = 0.0
                break
            weight *= t.coefficient(ordinate, destination)
            ordinate = destination
        if ordinate == m:
            total += weight
    return total

def randomOpTable(rng, N, size):
    return recurrence.opTable(N, rng.uniform(0.5, 1.5, size), rng.uniform(-0.5, 0.5, size))

def randomBandedTable(rng, N, q, size):
    entries = [(k, -1, rng.uniform(0.5, 1.5)) for k in range(size)]
    for k in range(size):
        for j in range(0, min(q, k) + 1):
            entries.append((k, j, rng.uniform(-1.0, 1.0)))
    return recurrence.bandedTable(N, q, entries, size=size)

def test_gueTable():
    t = recurrence.gueTable(10)
    assert t.form == 'op'
    assert t.size == 10 + recurrence.DEFAULT_PAD
    assert t.coefficient(0, 1) == pytest.approx(math.sqrt(0.1))
    assert t.coefficient(4, 5) == pytest.approx(math.sqrt(0.5))
    assert t.coefficient(5, 4) == t.coefficient(4, 5)
    assert t.coefficient(4, 4) == 0.0
    assert t.coefficient(4, 2) == 0.0

def test_chebyshevTable():
    t = recurrence.chebyshevTable(5)
    assert t.coefficient(0, 1) == pytest.approx(1.0 / math.sqrt(2.0))
    assert t.coefficient(3, 4) == 0.5

def test_pathSumMomentLiteral():
    rng = utilities.rngStream(3)
    for trial in range(10):
        t = randomOpTable(rng, 5, 12)
        for ell in range(5):
            for k in range(5):
                for m in range(5):
                    assert recurrence.pathSumMoment(t, ell, k, m) == pytest.approx(literalPathSum(t, ell, k, m), rel=1e-12, abs=1e-12)

def test_pathSumMomentBanded():
    rng = utilities.rngStream(4)
    t = randomBandedTable(rng, 4, 2, 12)
    for ell in range(5):
        for k in range(4):
            for m in range(4):
                assert recurrence.pathSumMoment(t, ell, k, m) == pytest.approx(literalPathSum(t, ell, k, m), rel=1e-12, abs=1e-12)

def test_pathSumMomentQuadrature():
    N = 6
    m = measure.equilibriumMeasure(-1.0, 1.0, 64)
    t = recurrence.chebyshevTable(N)
    values = np.array([np.polynomial.chebyshev.chebval(m.points, [0] * k + [1]) for k in range(N)])
    values[1:] *= math.sqrt(2.0)
    for ell in range(5):
        for k in range(N):
            for j in range(N):
                exact = float(np.sum(m.weights * m.points ** ell * values[k] * values[j]))
                assert recurrence.pathSumMoment(t, ell, k, j) == pytest.approx(exact, abs=1e-12)

def test_pathSumOutOfRange():
    t = recurrence.gueTable(4, pad=2)
    with pytest.raises(errors.OutOfRangeError):
        recurrence.pathSumMoment(t, 2, 6, 6)
    with pytest.raises(errors.OutOfRangeError):
        recurrence.pathSumMoment(t, 6, 3, 3)

def test_meanMomentGue():
    for N in (1, 5, 50):
        t = recurrence.gueTable(N)
        assert recurrence.meanMoment(t, 0) == pytest.approx(1.0)
        assert recurrence.meanMoment(t, 1) == 0.0
        assert recurrence.meanMoment(t, 2) == pytest.approx(1.0)
        assert recurrence.meanMoment(t, 4) == pytest.approx(2.0 + 1.0 / N ** 2)

def test_meanMomentSemicircle():
    t = recurrence.gueTable(200)
    assert abs(recurrence.meanMoment(t, 2) - 1.0) < 0.02
    assert abs(recurrence.meanMoment(t, 6) - 5.0) < 0.05

def test_sectionTraceMoment():
    rng = utilities.rngStream(5)
    t = randomBandedTable(rng, 6, 2, 14)
    H = recurrence.hessenbergMatrix(t)
    for ell in range(6):
        assert recurrence.sectionTraceMoment(t, ell) == pytest.approx(np.trace(np.linalg.matrix_power(H, ell)), rel=1e-12, abs=1e-12)

def test_restrictedPathSumEscape():
    t = recurrence.gueTable(8)
    # only the path 7 -> 8 -> 7 leaves the section in two steps
    assert recurrence.restrictedPathSum(t, 2, 7, 7, escapeStep=1, escapeLevel=8) == pytest.approx(1.0)
    assert recurrence.restrictedPathSum(t, 2, 6, 6, escapeStep=1, escapeLevel=8) == 0.0
    full = recurrence.restrictedPathSum(t, 4, 7, 7)
    below = recurrence.restrictedPathSum(t, 4, 7, 7, ceiling=8)
    assert full > below

def test_hessenbergMatrix():
    t = recurrence.gueTable(5)
    H = recurrence.hessenbergMatrix(t)
    assert H.shape == (5, 5)
    assert (H == H.T).all()
    assert H[1, 0] == pytest.approx(math.sqrt(0.2))
    rng = utilities.rngStream(6)
    banded = randomBandedTable(rng, 6, 2, 10)
    H = recurrence.hessenbergMatrix(banded)
    assert not np.tril(H, -2).any()
    assert H[3, 2] == banded.coefficient(2, 3)
    assert H[0, 2] == banded.coefficient(2, 0)

def test_tableFromMeasureChebyshev():
    t = recurrence.tableFromMeasure(measure.equilibriumMeasure(-1.0, 1.0, 256), 10)
    reference = recurrence.chebyshevTable(10)
    assert np.allclose(t.a, reference.a, atol=1e-10)
    assert np.allclose(t.b, reference.b, atol=1e-10)

def test_tableFromMeasureHermite():
    N = 10
    t = recurrence.tableFromMeasure(measure.scaledHermiteMeasure(N, 200), N)
    reference = recurrence.gueTable(N)
    assert np.allclose(t.a, reference.a, atol=1e-9)
    assert np.allclose(t.b, reference.b, atol=1e-9)

def test_tableFromMeasureCircle():
    t = recurrence.tableFromMeasure(measure.uniformCircleMeasure(64), 8, pad=4)
    assert t.form == 'banded'
    assert t.q == 0
    for k in range(t.size):
        assert t.coefficient(k, k + 1) == pytest.approx(1.0)
        assert abs(t.coefficient(k, k)) < 1e-12

def test_tableFromMeasureRank():
    with pytest.raises(errors.RankError):
        recurrence.tableFromMeasure(measure.ReferenceMeasure([0.0, 1.0, 2.0], [1.0, 1.0, 1.0]), 2, pad=4)

def test_tableConfig():
    t = recurrence.tableFromConfig({'form': 'banded', 'N': 2, 'q': 1, 'c': [[0, -1, 1.0], [1, -1, 2.0], [1, 1, [0.0, 1.0]], [2, -1, 1.0]]})
    assert t.coefficient(1, 0) == 1.0j
    assert t.coefficient(1, 2) == 2.0
    again = recurrence.tableFromConfig(recurrence.tableToConfig(t))
    assert again.coefficient(1, 0) == 1.0j
    op = recurrence.tableFromConfig({'form': 'op', 'a': [1.0, 1.0, 1.0], 'b': [0.0, 0.5, 0.0]}, N=2)
    assert op.coefficient(1, 1) == 0.5
    with pytest.raises(errors.ConfigError):
        recurrence.tableFromConfig({'form': 'op', 'a': [1.0], 'b': [0.0]})

def test_degenerateTable():
    with pytest.raises(errors.DegenerateRecurrenceError):
        recurrence.opTable(2, [1.0, 0.0, 1.0], [0.0, 0.0, 0.0])

def test_tableFactory():
    for name in recurrence.TableFactory.allTableNames():
        t = recurrence.classicalTable(name, 4)
        assert t.N == 4
    with pytest.raises(errors.UnknownNameError):
        recurrence.classicalTable('laguerre', 4)
    with pytest.raises(errors.ParameterError):
        recurrence.classicalTable('gue', 0)

def test_invalidOpTable():
    with pytest.raises(errors.ParameterError):
        recurrence.opTable(2, [-1.0, 1.0, 1.0], [0.0, 0.0, 0.0])
    with pytest.raises(errors.ParameterError):
        recurrence.opTable(2, [1.0, 1.0, 1.0], [0.0, 0.0])
    with pytest.raises(errors.ParameterError):
        recurrence.pathSumMoment(recurrence.gueTable(3), -1, 0, 0)

def test_pathSumMomentLocality():
    rng = utilities.rngStream(8)
    size = 30
    a = rng.uniform(0.5, 1.5, size)
    b = rng.uniform(-0.5, 0.5, size)
    t = recurrence.opTable(10, a, b)
    for k, ell, m in ((12, 3, 13), (5, 4, 5), (3, 5, 0)):
        outside = np.array([j < k - ell or j > k + ell for j in range(size)])
        perturbedA = np.where(outside, a + rng.uniform(0.1, 0.5, size), a)
        perturbedB = np.where(outside, b + rng.uniform(0.1, 0.5, size), b)
        perturbed = recurrence.opTable(10, perturbedA, perturbedB)
        assert recurrence.pathSumMoment(perturbed, ell, k, m) == recurrence.pathSumMoment(t, ell, k, m)
    # inside the window the value moves
    inside = a.copy()
    inside[12] += 0.25
    assert recurrence.pathSumMoment(recurrence.opTable(10, inside, b), 3, 12, 13) != recurrence.pathSumMoment(t, 3, 12, 13)

def test_tableFromMeasureShifted():
    m = measure.equilibriumMeasure(-1.0, 1.0, 64)
    t = recurrence.tableFromMeasure(m, 6, pad=4)
    s = recurrence.tableFromMeasure(m.shifted(0.75), 6, pad=4)
    assert np.allclose(s.a, t.a, atol=1e-10)
    assert np.allclose(s.b, t.b + 0.75, atol=1e-10)
