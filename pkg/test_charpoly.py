#!/usr/bin/env python

import math
from builtins import range

import numpy as np
import pytest

import charpoly
import ensemble
import errors
import measure
import recurrence

def test_zerosChebyshev():
    N = 12
    zeroSet = charpoly.zeros(recurrence.chebyshevTable(N))
    expected = np.sort(np.cos((2 * np.arange(N) + 1) * math.pi / (2 * N)))
    assert np.allclose(np.sort(zeroSet.zeros), expected, atol=1e-12)
    assert zeroSet.N == N

def test_powerSums():
    t = recurrence.gueTable(10)
    zeroSet = charpoly.zeros(t)
    H = recurrence.hessenbergMatrix(t)
    for ell in range(7):
        assert zeroSet.powerSum(ell) == pytest.approx(np.trace(np.linalg.matrix_power(H, ell)), abs=1e-10)
    assert zeroSet.powerSums(2)[0] == pytest.approx(10.0)

def test_zerosCircle():
    zeroSet = charpoly.zeros(recurrence.circleTable(16))
    assert (zeroSet.zeros == 0.0).all()
    assert zeroSet.powerSum(3) == 0.0

def test_zerosOfMatrix():
    section = np.array([[1.0, 2.0, 3.0], [0.0, 4.0, 5.0], [0.0, 0.0, 6.0]])
    zeroSet = charpoly.zerosOfMatrix(section)
    assert list(zeroSet.zeros) == [1.0, 4.0, 6.0]
    rotation = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert np.allclose(np.sort_complex(charpoly.zerosOfMatrix(rotation).zeros), [-1.0j, 1.0j])

def test_powerSumMismatch():
    with pytest.raises(errors.EigenSolverError):
        charpoly.ZeroSet([1.0, 2.0], section=np.array([[1.0, 1.0], [1.0, 1.0]]))

def test_momentGapGue():
    for N in (10, 50):
        t = recurrence.gueTable(N)
        zeroSet = charpoly.zeros(t, maxPower=4)
        gap, bound = charpoly.momentGap(t, 2, zeroSet)
        assert gap == pytest.approx(1.0 / N)
        assert gap <= bound
        gap, bound = charpoly.momentGap(t, 4, zeroSet)
        assert gap == pytest.approx((5.0 - 2.0 / N) / N)
        assert gap <= bound
        gap, _ = charpoly.momentGap(t, 3, zeroSet)
        assert gap < 1e-12

def test_momentGapChebyshev():
    for N in (20, 40):
        gap, bound = charpoly.momentGap(recurrence.chebyshevTable(N), 2)
        assert gap == pytest.approx(0.25 / N)
        assert gap <= bound

def test_logPotential():
    m = measure.equilibriumMeasure(-1.0, 1.0, 1024)
    z = 5.0
    assert charpoly.logPotential(m, z) == pytest.approx(math.log(2.0) - math.log(z + math.sqrt(z * z - 1.0)), abs=1e-10)
    assert charpoly.logPotential([0.0, 2.0], 1.0 + 1.0j) == pytest.approx(-0.5 * math.log(2.0))
    with pytest.raises(errors.SingularityError):
        charpoly.logPotential(m, m.points[3])

def test_balayage():
    e = ensemble.classicalEnsemble('chebyshev', 50, nNodes=256)
    assert charpoly.balayageDiscrepancy(e, charpoly.zeros(e.table), radius=5.0) < 0.02

def test_interlaces():
    t = recurrence.gueTable(12)
    outer = charpoly.zeros(t)
    inner = charpoly.zeros(t.withN(11))
    assert charpoly.interlaces(outer, inner)
    assert not charpoly.interlaces(outer, outer)
    assert not charpoly.interlaces([0.0, 1.0, 2.0], [1.5, 1.8])
