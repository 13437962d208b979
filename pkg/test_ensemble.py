#!/usr/bin/env python

import itertools
import math
from builtins import range

import numpy as np
import pytest

import ensemble
import errors
import measure
import recurrence
import utilities

def fourAtoms():
    return measure.ReferenceMeasure([-1.5, -0.5, 0.5, 1.5], [0.1, 0.4, 0.3, 0.2])

def test_biorthogonality():
    m = measure.ReferenceMeasure([0.0, 1.0], [0.5, 0.5])
    with pytest.raises(errors.BiorthogonalityError):
        ensemble.ProjectionKernel(m, [[1.0, 1.0], [1.0, 0.0]])

def test_evalP():
    e = ensemble.classicalEnsemble('chebyshev', 4, nNodes=64)
    values = ensemble.evalP(e, 0.3)
    assert values[0] == pytest.approx(1.0)
    assert values[1] == pytest.approx(math.sqrt(2.0) * 0.3)
    assert values[2] == pytest.approx(math.sqrt(2.0) * (2 * 0.3 ** 2 - 1.0))

def test_evalKernelChristoffelDarboux():
    e = ensemble.classicalEnsemble('gue', 6, nNodes=64)
    for x, y in ((0.1, 0.7), (-1.2, 0.4), (0.5, 0.5 + 1e-3)):
        direct = ensemble.evalKernel(e, x, y, christoffelDarboux=False)
        assert ensemble.evalKernel(e, x, y, christoffelDarboux=True) == pytest.approx(direct, rel=1e-9)
    assert ensemble.evalKernel(e, 0.2, 0.2) == pytest.approx(float(np.sum(e.polynomialValues(0.2) ** 2)))

def test_evalKernelAtoms():
    e = ensemble.opEnsemble(fourAtoms(), 2, pad=1)
    x, y = e.measure.points[0], e.measure.points[2]
    assert ensemble.evalKernel(e, x, y) == pytest.approx(ensemble.evalKernel(e, y, x))

def test_meanDensity():
    e = ensemble.classicalEnsemble('chebyshev', 8, nNodes=128)
    densities = ensemble.meanDensities(e)
    assert float(np.sum(densities * e.measure.weights)) == pytest.approx(1.0)
    x = e.measure.points[5]
    assert ensemble.meanDensity(e, x) == pytest.approx(densities[5])
    assert ensemble.meanMeasure(e).totalMass() == pytest.approx(1.0)

def test_meanMomentByQuadrature():
    e = ensemble.classicalEnsemble('chebyshev', 10, nNodes=128)
    for ell in range(7):
        assert np.real(ensemble.meanMomentByQuadrature(e, ell)) == pytest.approx(recurrence.meanMoment(e.table, ell), abs=1e-12)

def test_sectionMatrix():
    e = ensemble.classicalEnsemble('chebyshev', 6, nNodes=64)
    assert np.allclose(ensemble.sectionMatrix(e), recurrence.hessenbergMatrix(e.table), atol=1e-12)

def test_kernelReproducing():
    e = ensemble.classicalEnsemble('chebyshev', 5, nNodes=40)
    m = e.measure
    for x, y in ((0.3, -0.2), (0.9, 0.1), (m.points[4], 0.55)):
        row = np.array([ensemble.evalKernel(e, x, u) for u in m.points])
        column = np.array([ensemble.evalKernel(e, u, y) for u in m.points])
        assert float(np.sum(row * m.weights * column)) == pytest.approx(ensemble.evalKernel(e, x, y), abs=1e-10)
    tilted = ensemble.tiltNonorthogonal(ensemble.classicalEnsemble('chebyshev', 2, nNodes=16), [[0.05, 0.0], [0.0, 0.05]], rng=utilities.rngStream(1))
    K = tilted.kernelMatrix()
    assert np.allclose((K * tilted.measure.weights) @ K, K, atol=1e-10)

def test_jointDensity():
    e = ensemble.opEnsemble(fourAtoms(), 2, pad=1)
    m = e.measure
    total = 0.0
    for i, j in itertools.combinations(range(m.size), 2):
        density = ensemble.jointDensity(e, [m.points[i], m.points[j]])
        assert density > 0.0
        total += density * m.weights[i] * m.weights[j]
        logDensity = ensemble.logJointDensity(e, [m.points[i], m.points[j]])
        assert logDensity == pytest.approx(math.log(density) - math.log(2.0))
    assert total == pytest.approx(1.0)
    assert ensemble.jointDensity(e, [m.points[1], m.points[1]]) == pytest.approx(0.0, abs=1e-12)
    assert ensemble.jointDensity(e, []) == 1.0

def test_chebyshevFallback():
    reference = ensemble.classicalEnsemble('chebyshev', 3, nNodes=32)
    e = ensemble.PolynomialEnsemble(reference.measure, 3, pValues=reference.pValues)
    assert e.table is None
    assert np.allclose(e.polynomialValues(0.3), reference.polynomialValues(0.3), atol=1e-10)
    coefficients = e.pCoefficients()
    assert coefficients.shape[0] == 3
    assert np.all(coefficients[np.triu_indices(coefficients.shape[0], 1, coefficients.shape[1])] == 0.0)
    assert np.allclose(e.polynomialValues(e.measure.points), reference.pValues, atol=1e-10)
    assert np.allclose(reference.pCoefficients(), coefficients, atol=1e-10)
    with pytest.raises(errors.OutOfRangeError):
        e.polynomialValues(0.3, 4)

def test_tiltZero():
    e = ensemble.classicalEnsemble('chebyshev', 2, nNodes=16)
    assert ensemble.tiltNonorthogonal(e, [[0.0, 0.0], [0.0, 0.0]]) is e

def test_tiltSmall():
    e = ensemble.classicalEnsemble('chebyshev', 2, nNodes=16)
    tilted = ensemble.tiltNonorthogonal(e, [[0.05, 0.0], [0.0, 0.05]], rng=utilities.rngStream(1))
    assert not tilted.hermitian
    assert tilted.table is None
    m = tilted.measure
    gram = (tilted.pValues * m.weights) @ np.conj(tilted.qValues).T
    assert np.allclose(gram, np.eye(2), atol=1e-10)
    assert ensemble.scanPositivity(tilted) > 0
    assert (ensemble.meanDensities(tilted) >= 0.0).all()

def test_tiltLarge():
    e = ensemble.classicalEnsemble('chebyshev', 2, nNodes=16)
    with pytest.raises(errors.InvalidTiltError) as info:
        ensemble.tiltNonorthogonal(e, [[5.0, 0.0], [0.0, 5.0]])
    assert len(info.value.witness) >= 1
    unchecked = ensemble.tiltNonorthogonal(e, [[5.0, 0.0], [0.0, 5.0]], validate=False)
    assert not unchecked.hermitian

def test_tiltNeedsHermitian():
    e = ensemble.classicalEnsemble('chebyshev', 2, nNodes=16)
    tilted = ensemble.tiltNonorthogonal(e, [[0.05, 0.0], [0.0, 0.05]])
    with pytest.raises(errors.UnsupportedError):
        ensemble.tiltNonorthogonal(tilted, [[0.05], [0.05]])
