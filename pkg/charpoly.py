#!/usr/bin/env python

# This file is part of PolyEns.
#
# PolyEns is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# PolyEns is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with PolyEns.  If not, see <https://www.gnu.org/licenses/>.

import logging
import math
from builtins import range

import numpy as np
import scipy.linalg as la

import ensemble
import errors
import measure
import recurrence

POWER_SUM_TOLERANCE = 1e-8
DEFAULT_MAX_POWER = 6
SINGULARITY_DISTANCE = 1e-6

# Zeros of the average characteristic polynomial, i.e. the eigenvalues of the
# finite section, together with their power sums. The power sums are checked
# against traces of powers of the section when it is given.
class ZeroSet:
    def __init__(self, zeros, section=None, maxPower=DEFAULT_MAX_POWER):
        self.__zeros = np.array(zeros)
        self.__powerSums = {}
        if section is not None:
            power = np.eye(len(self.__zeros), dtype=section.dtype)
            for ell in range(1, maxPower + 1):
                power = power @ section
                trace = np.trace(power)
                value = self.powerSum(ell)
                scale = max(1.0, float(np.sum(np.abs(self.__zeros) ** ell)))
                if abs(value - trace) > POWER_SUM_TOLERANCE * scale:
                    raise errors.EigenSolverError('Power sum {0} of the zeros is {1} but the trace is {2}'.format(ell, value, trace))

    @property
    def zeros(self):
        return self.__zeros
    @property
    def N(self):
        return len(self.__zeros)

    # p_ell = sum_i z_i^ell
    def powerSum(self, ell):
        if ell not in self.__powerSums:
            value = np.sum(self.__zeros ** ell) if self.N > 0 else 0.0
            self.__powerSums[ell] = complex(value) if np.iscomplexobj(value) else float(value)
        return self.__powerSums[ell]

    def powerSums(self, maxPower):
        return [self.powerSum(ell) for ell in range(maxPower + 1)]

# Eigenvalues of a section matrix. Triangular sections are already in Schur
# form and give their diagonal exactly.
def zerosOfMatrix(section, symmetricTridiagonal=False, maxPower=DEFAULT_MAX_POWER):
    section = np.asarray(section)
    try:
        if not np.any(np.tril(section, -1)) or not np.any(np.triu(section, 1)):
            values = np.array(np.diagonal(section))
        elif symmetricTridiagonal:
            values = la.eigvalsh_tridiagonal(np.real(np.diagonal(section)), np.real(np.diagonal(section, 1)))
        else:
            values = la.eigvals(section)
            if np.all(np.imag(values) == 0.0):
                values = np.real(values)
    except (la.LinAlgError, ValueError) as err:
        raise errors.EigenSolverError('Eigenvalues did not converge: {0}'.format(err))
    return ZeroSet(values, section, maxPower)

def zeros(t, maxPower=DEFAULT_MAX_POWER):
    return zerosOfMatrix(recurrence.hessenbergMatrix(t), symmetricTridiagonal=(t.form == 'op'), maxPower=maxPower)

# |mean_moment - p_ell / N| and its bound (2 ell)^ell / N * max |c(k,m)|^ell
# over the coefficients near N. The difference is also computed as the sum
# over paths that reach N, and both must agree.
def momentGap(t, ell, zeroSet=None):
    N = t.N
    zeroSet = zeros(t, maxPower=0) if zeroSet is None else zeroSet
    mean = recurrence.meanMoment(t, ell)
    powerSum = zeroSet.powerSum(ell)
    gap = abs(mean - powerSum / N)
    escaping = N * mean - recurrence.sectionTraceMoment(t, ell)
    if abs(escaping - (N * mean - powerSum)) > 1e-7 * max(1.0, abs(powerSum)):
        raise errors.ImplementationInconsistencyError('Escaping paths give {0} but the zeros give {1}'.format(escaping, N * mean - powerSum))
    bound = (2.0 * ell) ** ell / N * recurrence.maxAbsCoefficient(t, N - ell, N + ell) ** ell
    logging.debug('Moment gap at ell={0}: {1:.6e} (bound {2:.6e})'.format(ell, gap, bound))
    if gap > bound * (1.0 + 1e-12) + 1e-14:
        raise errors.ImplementationInconsistencyError('Moment gap {0} exceeds its bound {1} at ell={2}'.format(gap, bound, ell))
    return gap, bound

## Logarithmic potentials

def _atomsOf(source):
    if isinstance(source, measure.ReferenceMeasure):
        return source.points, source.weights
    if isinstance(source, ZeroSet):
        source = source.zeros
    points = np.asarray(source)
    return points, np.full(len(points), 1.0 / len(points))

# integral of log(1/|z - x|) against a measure, a zero set (counting measure
# normalized to mass 1) or a list of points (same)
def logPotential(source, z):
    points, weights = _atomsOf(source)
    distances = np.abs(z - points)
    closest = int(np.argmin(distances))
    if distances[closest] < SINGULARITY_DISTANCE:
        raise errors.SingularityError('{0} is within {1} of the atom {2}'.format(z, distances[closest], points[closest]))
    return float(-np.sum(weights * np.log(distances)))

# Largest difference between the potentials of the mean measure and of the
# zero counting measure on a circle around the support
def balayageDiscrepancy(e, zeroSet, radius=None, nPoints=8):
    meanMeasure = ensemble.meanMeasure(e)
    if radius is None:
        radius = 2.5 * float(np.max(np.abs(e.measure.points)))
    worst = 0.0
    for j in range(nPoints):
        z = radius * np.exp(2j * math.pi * (j + 0.5) / nPoints)
        worst = max(worst, abs(logPotential(meanMeasure, z) - logPotential(zeroSet, z)))
    return worst

# True when the sorted real zeros 'inner' of the (N-1)-section sit between
# consecutive zeros 'outer' of the N-section
def interlaces(outer, inner, tolerance=1e-10):
    outer = np.sort(np.real(outer.zeros if isinstance(outer, ZeroSet) else outer))
    inner = np.sort(np.real(inner.zeros if isinstance(inner, ZeroSet) else inner))
    if len(inner) != len(outer) - 1:
        return False
    return bool(np.all(outer[:-1] <= inner + tolerance) and np.all(inner <= outer[1:] + tolerance))
