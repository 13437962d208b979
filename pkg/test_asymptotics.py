#!/usr/bin/env python

from builtins import range

import numpy as np
import pytest
from scipy import special

import asymptotics
import errors
import recurrence
import utilities

def test_arcsineMoment():
    assert asymptotics.arcsineMoment(0) == 1.0
    assert asymptotics.arcsineMoment(2) == 0.5
    assert asymptotics.arcsineMoment(3) == 0.0
    assert asymptotics.arcsineMoment(6) == 5.0 / 16.0
    with pytest.raises(errors.ParameterError):
        asymptotics.arcsineMoment(-1)

def test_muAbMomentSemicircle():
    p = asymptotics.opProfile({'power': 0.5})
    assert asymptotics.muAbMoment(p, 2) == pytest.approx(1.0, abs=1e-10)
    assert asymptotics.muAbMoment(p, 4) == pytest.approx(2.0, abs=1e-10)
    assert asymptotics.muAbMoment(p, 6) == pytest.approx(5.0, abs=1e-10)
    assert asymptotics.muAbMoment(p, 5) == 0.0

def test_muAbMomentConstant():
    a, b = 0.7, 0.3
    p = asymptotics.opProfile(a, b)
    for ell in range(11):
        affine = sum(special.comb(ell, j, exact=True) * (2.0 * a) ** j * b ** (ell - j) * asymptotics.arcsineMoment(j) for j in range(ell + 1))
        assert asymptotics.muAbMoment(p, ell) == pytest.approx(affine, rel=1e-9)

def test_closedStepCounts():
    assert set(asymptotics.closedStepCounts(2, 1)) == set([(1, 0, 1), (0, 2, 0)])
    assert asymptotics.closedStepCounts(0, 3) == ((0, 0, 0, 0, 0),)
    for counts in asymptotics.closedStepCounts(6, 3):
        assert sum(counts) == 6
        assert sum(j * k for j, k in zip(range(-1, 4), counts)) == 0

def test_bandedLimitMomentConstant():
    a, b = 0.8, 0.25
    p = asymptotics.CoefficientProfile(1, {-1: a, 0: b, 1: a})
    assert asymptotics.bandedLimitMoment(p, 0) == pytest.approx(1.0)
    assert asymptotics.bandedLimitMoment(p, 2) == pytest.approx(2 * a * a + b * b)
    zeroMean = asymptotics.CoefficientProfile(1, {-1: a, 1: a})
    assert asymptotics.bandedLimitMoment(zeroMean, 1) == 0.0

def test_bandedMatchesMuAb():
    rng = utilities.rngStream(21)
    for trial in range(20):
        aCoefficients = list(rng.uniform(0.1, 1.0, 3))
        bCoefficients = list(rng.uniform(-0.5, 0.5, 2))
        op = asymptotics.opProfile({'poly': aCoefficients}, {'poly': bCoefficients})
        banded = asymptotics.CoefficientProfile(1, {-1: {'poly': aCoefficients}, 0: {'poly': bCoefficients}, 1: {'poly': aCoefficients}})
        for ell in range(9):
            assert asymptotics.bandedLimitMoment(banded, ell) == pytest.approx(asymptotics.muAbMoment(op, ell), rel=1e-8, abs=1e-12)

def test_oddMomentsVanish():
    p = asymptotics.CoefficientProfile(1, {-1: {'power': 0.5}, 1: {'power': 0.5}})
    for ell in range(1, 10, 2):
        assert asymptotics.bandedLimitMoment(p, ell) == 0.0

def test_bandedLimitGuard():
    p = asymptotics.CoefficientProfile(5, {-1: 1.0, 5: 1.0})
    with pytest.raises(errors.CombinatorialLimitError):
        asymptotics.bandedLimitMoment(p, 2)
    with pytest.raises(errors.CombinatorialLimitError):
        asymptotics.bandedLimitMoment(asymptotics.opProfile(1.0), 13)

def test_muAbSample():
    p = asymptotics.opProfile({'power': 0.5})
    draws = asymptotics.muAbSample(p, utilities.rngStream(22), size=200000)
    assert abs(np.mean(draws ** 2) - 1.0) < 0.01
    assert np.max(np.abs(draws)) <= 2.0
    assert isinstance(asymptotics.muAbSample(p, utilities.rngStream(22)), float)
    constant = asymptotics.opProfile(0.0, 1.5)
    assert (asymptotics.muAbSample(constant, utilities.rngStream(23), size=10) == 1.5).all()

def test_profileFunctions():
    table = asymptotics.profileFunction({'table': {'s': [0.0, 1.0], 'values': [1.0, 3.0]}})
    assert table(0.25) == pytest.approx(1.5)
    power = asymptotics.profileFunction({'power': 2.0, 'scale': 3.0})
    assert power(0.5) == pytest.approx(0.75)
    poly = asymptotics.profileFunction({'poly': [1.0, 2.0]})
    assert poly(0.5) == pytest.approx(2.0)
    with pytest.raises(errors.ConfigError):
        asymptotics.profileFunction({'spline': []})
    with pytest.raises(errors.OutOfRangeError):
        asymptotics.CoefficientProfile(1, {3: 1.0})

def test_profileConfig():
    op = asymptotics.CoefficientProfile.fromConfig({'form': 'op', 'a': 0.5, 'b': 0.0})
    assert op.isOP
    banded = asymptotics.CoefficientProfile.fromConfig({'form': 'banded', 'q': 2, 'a': {'-1': 1.0, '2': {'poly': [0.5]}}})
    assert banded.q == 2
    assert not banded.isOP
    assert banded.values(2, [0.3])[0] == pytest.approx(0.5)

def test_tableFromProfileGue():
    t = asymptotics.tableFromProfile(asymptotics.opProfile({'power': 0.5}), 50)
    reference = recurrence.gueTable(50)
    assert np.allclose(t.a, reference.a)
    assert np.allclose(t.b, reference.b)

def test_limitReport():
    report = asymptotics.limitReport(recurrence.gueTable(200), asymptotics.opProfile({'power': 0.5}), 6)
    assert len(report) == 7
    assert report[0][3] == pytest.approx(0.0, abs=1e-12)
    assert report[2][3] <= 0.02
    chebyshev = asymptotics.limitReport(recurrence.chebyshevTable(200), asymptotics.opProfile(0.5), 8)
    assert chebyshev[4][3] <= 0.02

def test_bandedLimitFinite():
    p = asymptotics.CoefficientProfile(2, {-1: 1.0, 2: 0.5})
    t = asymptotics.tableFromProfile(p, 400)
    assert t.q == 2
    assert asymptotics.bandedLimitMoment(p, 3) == pytest.approx(1.5)
    assert abs(recurrence.meanMoment(t, 3) - 1.5) < 0.02
    report = asymptotics.limitReport(t, p, 6)
    assert report[6][3] < 0.1
