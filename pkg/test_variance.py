#!/usr/bin/env python

import math
from builtins import range

import numpy as np
import pytest
from scipy import stats

import ensemble
import errors
import recurrence
import sampler
import utilities
import variance

def test_variancePowerGue():
    for N in (1, 5, 40):
        t = recurrence.gueTable(N)
        assert variance.variancePower(t, 1) == pytest.approx(1.0)
        assert variance.variancePower(t, 2) == pytest.approx(2.0)
        assert variance.variancePower(t, 0) == 0.0

def test_variancePowerWindow():
    N = 20
    ell = 2
    reference = recurrence.gueTable(N)
    a = reference.a
    a[:N - ell] *= 1.3
    a[N + ell:] *= 0.7
    b = reference.b
    b[:N - ell] += 0.2
    changed = recurrence.opTable(N, a, b)
    assert variance.variancePower(changed, ell) == pytest.approx(variance.variancePower(reference, ell), rel=1e-12)
    assert recurrence.meanMoment(changed, ell) != pytest.approx(recurrence.meanMoment(reference, ell))

def test_covariancePower():
    t = recurrence.gueTable(15)
    assert variance.covariancePower(t, 1, 2) == pytest.approx(0.0, abs=1e-12)
    assert variance.covariancePower(t, 2, 2) == pytest.approx(variance.variancePower(t, 2))
    assert variance.covariancePower(t, 1, 3) == pytest.approx(variance.covariancePower(t, 3, 1))

def test_polynomialVariance():
    t = recurrence.gueTable(15)
    assert variance.polynomialVariance(t, [0.0, 1.0, 1.0]) == pytest.approx(3.0)
    assert variance.polynomialVariance(t, [4.0]) == 0.0
    assert variance.polynomialVariance(t, [1.0, 0.0, 0.0, 2.0]) == pytest.approx(4.0 * variance.variancePower(t, 3))

def test_varianceUpperBound():
    t = recurrence.gueTable(10)
    assert variance.varianceUpperBound(t, 1) == pytest.approx(4.4)
    for ell in range(1, 5):
        assert variance.varianceUpperBound(t, ell) >= variance.variancePower(t, ell)
    with pytest.raises(errors.ImplementationInconsistencyError):
        variance.varianceUpperBound(t, 1, exact=10.0)

def test_lipschitzVarianceBound():
    t = recurrence.gueTable(30)
    bound = variance.lipschitzVarianceBound(t.coefficient(29, 30), 1.0)
    assert variance.variancePower(t, 1) <= bound + 1e-12
    assert variance.lipschitzVarianceBound(0.5, 2.0) == 1.0

def test_limitingQMoment():
    L = variance.BivariateLimit(0.5)
    assert variance.limitingQMoment(L, 0, 0) == pytest.approx(1.0)
    assert variance.limitingQMoment(L, 1, 1) == pytest.approx(-0.25)
    assert variance.limitingQMoment(L, 2, 0) == pytest.approx(0.5)
    assert variance.limitingQMoment(L, 1, 0) == pytest.approx(0.0, abs=1e-15)
    shifted = variance.BivariateLimit(1.0, 2.0)
    assert variance.limitingQMoment(shifted, 1, 0) == pytest.approx(2.0)
    with pytest.raises(errors.ParameterError):
        variance.limitingQMoment(L, 10, 10, order=16)
    with pytest.raises(errors.ParameterError):
        variance.BivariateLimit(0.0)

def test_limitingVariance():
    L = variance.BivariateLimit(1.0)
    assert variance.limitingVariance(lambda x: x, L) == pytest.approx(1.0, abs=1e-3)
    assert variance.limitingVariance(lambda x: x ** 2, L) == pytest.approx(2.0, abs=1e-3)
    assert variance.limitingVariance(lambda x: x ** 2, L, fprime=lambda x: 2.0 * x) == pytest.approx(2.0, abs=1e-3)
    assert variance.limitingVariance(lambda x: 3.0, L) == 0.0
    half = variance.BivariateLimit(0.5, 1.0)
    assert variance.limitingVariance(lambda x: x, half) == pytest.approx(0.25, abs=1e-3)

def test_empiricalQMoment():
    e = ensemble.classicalEnsemble('chebyshev', 200)
    assert variance.empiricalQMoment(e, 0, 0) == pytest.approx(1.0, abs=1e-8)
    assert variance.empiricalQMoment(e, 1, 1) == pytest.approx(-0.25, abs=1e-8)
    assert variance.empiricalQMoment(e, 2, 0) == pytest.approx(0.5, abs=1e-8)
    small = ensemble.classicalEnsemble('chebyshev', 2, nNodes=16)
    tilted = ensemble.tiltNonorthogonal(small, [[0.05, 0.0], [0.0, 0.05]])
    with pytest.raises(errors.UnsupportedError):
        variance.empiricalQMoment(tilted, 1, 1)

def test_cumulants():
    rng = utilities.rngStream(12)
    x = rng.standard_normal(20000)
    estimates = variance.cumulants(x)
    assert estimates.count == 20000
    assert estimates.values[1] == pytest.approx(stats.kstat(x - np.mean(x), 2))
    assert abs(estimates.mean) < 4.0 * estimates.errors[0]
    assert abs(estimates.variance - 1.0) < 4.0 * estimates.errors[1]
    assert abs(estimates.skewness) < 0.1
    assert abs(estimates.excessKurtosis) < 0.2
    assert estimates.errors[1] == pytest.approx(math.sqrt(2.0 / 20000), rel=0.2)
    with pytest.raises(errors.TooFewReplicasError):
        variance.cumulants(x[:50])

def test_leaveOneOutKStats():
    rng = utilities.rngStream(13)
    x = rng.exponential(size=120)
    x = x - np.mean(x)
    jackknife = variance._leaveOneOutKStats(x)
    for i in (0, 7, 119):
        rest = np.delete(x, i)
        assert jackknife[0][i] == pytest.approx(np.mean(rest))
        for order in (2, 3, 4):
            assert jackknife[order - 1][i] == pytest.approx(stats.kstat(rest, order), rel=1e-8, abs=1e-12)

def test_covarianceEstimate():
    rng = utilities.rngStream(14)
    x = rng.standard_normal(5000)
    value, error = variance.covarianceEstimate(x, x)
    assert value == pytest.approx(np.var(x, ddof=1))
    assert error > 0.0
    with pytest.raises(errors.TooFewReplicasError):
        variance.covarianceEstimate([1.0], [1.0])

def test_linearStatistics():
    configuration = sampler.PointConfiguration([1.0, 2.0], [0, 1], 0.0)
    values = variance.linearStatistics([configuration, np.array([3.0])], lambda x: x ** 2)
    assert list(values) == [5.0, 9.0]

def test_monteCarloVariance():
    draw = lambda rng: sampler.sampleMatrixModel('gue', 10, rng)
    estimates, statistics = variance.monteCarloVariance(draw, lambda x: x, 2000, seed=3)
    assert len(statistics) == 2000
    assert abs(estimates.variance - 1.0) < 4.0 * estimates.errors[1]

def test_limitFromTable():
    L = variance.limitFromTable(recurrence.gueTable(400))
    assert L.a == pytest.approx(1.0, abs=0.01)
    assert L.b == 0.0
