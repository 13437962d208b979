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

import itertools
import logging
import math
from builtins import range

import numpy as np
from numpy.polynomial import chebyshev
from scipy import special

import errors
import measure
import recurrence

BIORTHOGONALITY_TOLERANCE = 1e-8
HERMITIAN_TOLERANCE = 1e-10
POSITIVITY_TOLERANCE = 1e-9
DEFAULT_SCAN_SIZE = 20000

# A finite rank projection kernel K(x, y) = sum_k P_k(x) conj(Q_k(y)) on the
# atoms of a reference measure. P and Q are stored as (N, n_atoms) arrays of
# values; nothing here requires them to be polynomials.
class ProjectionKernel:
    def __init__(self, referenceMeasure, pValues, qValues=None):
        pValues = np.array(pValues)
        if pValues.ndim == 1:
            pValues = pValues.reshape(1, -1) if pValues.size else pValues.reshape(0, referenceMeasure.size)
        qValues = pValues if qValues is None else np.array(qValues).reshape(pValues.shape)
        if pValues.shape[1] != referenceMeasure.size:
            raise errors.ParameterError('Values given at {0} points but the measure has {1} atoms'.format(pValues.shape[1], referenceMeasure.size))
        self.__measure = referenceMeasure
        self.__p = pValues
        self.__q = qValues
        self.__p.setflags(write=False)
        self.__q.setflags(write=False)
        N = pValues.shape[0]
        gram = (pValues * referenceMeasure.weights) @ np.conj(qValues).T
        error = float(np.max(np.abs(gram - np.eye(N)))) if N > 0 else 0.0
        if error > BIORTHOGONALITY_TOLERANCE:
            raise errors.BiorthogonalityError('Families are not biorthogonal: max |<P_j,Q_k> - delta| = {0:.3e}'.format(error))
        self.__hermitian = N == 0 or float(np.max(np.abs(qValues - pValues))) <= HERMITIAN_TOLERANCE

    @property
    def N(self):
        return self.__p.shape[0]
    @property
    def measure(self):
        return self.__measure
    @property
    def pValues(self):
        return self.__p
    @property
    def qValues(self):
        return self.__q
    @property
    def hermitian(self):
        return self.__hermitian

    # [K(x_i, x_j)] for atom index lists 'rows' and 'columns' (all atoms if None)
    def kernelMatrix(self, rows=None, columns=None):
        p = self.__p if rows is None else self.__p[:, rows]
        q = self.__q if columns is None else self.__q[:, columns]
        return p.T @ np.conj(q)

    # K(x_i, .) at every atom
    def kernelRow(self, i):
        return self.__p[:, i] @ np.conj(self.__q)

    # K(., x_j) at every atom
    def kernelColumn(self, j):
        return self.__p.T @ np.conj(self.__q[:, j])

    def kernelDiagonal(self):
        return np.einsum('ki,ki->i', self.__p, np.conj(self.__q))

# Polynomial ensemble: P_k has degree k. With a recurrence table P is evaluated
# anywhere by the forward recurrence, otherwise through a Chebyshev expansion
# fitted on the atoms. 'consistent' says whether the table is the table of
# <x P_k, Q_m> for this (P, Q) pair or only a recurrence for P.
class PolynomialEnsemble(ProjectionKernel):
    def __init__(self, referenceMeasure, N, table=None, qValues=None, pValues=None, p0=None, consistent=True):
        if table is None and pValues is None:
            raise errors.ParameterError('Need either a recurrence table or the values of P')
        if p0 is None:
            p0 = 1.0 / math.sqrt(referenceMeasure.totalMass())
        self.__table = table
        self.__p0 = p0
        self.__consistent = consistent and table is not None
        self.__chebyshev = None
        if table is not None:
            pValues = recurrenceValues(table, p0, referenceMeasure.points, N)
        ProjectionKernel.__init__(self, referenceMeasure, pValues, qValues)
        if table is None:
            self.__chebyshev = _chebyshevExpansion(referenceMeasure, self.pValues)

    @property
    def table(self):
        return self.__table if self.__consistent else None
    @property
    def polynomialTable(self):
        return self.__table
    @property
    def p0(self):
        return self.__p0

    # Chebyshev coefficients of P_0..P_{N-1}, row k of degree k, on the
    # interval spanned by the real atoms
    def pCoefficients(self):
        if self.__chebyshev is None:
            self.__chebyshev = _chebyshevExpansion(self.measure, self.pValues)
        return self.__chebyshev[0]

    # P_0..P_{count-1} at 'x' (scalar or array)
    def polynomialValues(self, x, count=None):
        count = self.N if count is None else count
        if self.__table is not None:
            return recurrenceValues(self.__table, self.__p0, x, count)
        if count > self.N:
            raise errors.OutOfRangeError('Only P_0..P_{0} are known without a table'.format(self.N - 1), index=count - 1)
        coefficients, lo, hi = self.__chebyshev
        u = (2.0 * np.asarray(x) - (lo + hi)) / (hi - lo)
        return np.array([chebyshev.chebval(u, coefficients[k]) for k in range(count)])

def recurrenceValues(table, p0, x, count):
    x = np.asarray(x)
    values = np.zeros((count,) + x.shape, dtype=np.result_type(x, table.dtype, float))
    if count == 0:
        return values
    values[0] = p0
    for k in range(count - 1):
        top = table.coefficient(k, k + 1)
        if top == 0.0:
            raise errors.DegenerateRecurrenceError('<x P_{0}, Q_{1}> vanishes'.format(k, k + 1))
        s = x * values[k]
        for m in range(max(0, k - table.q), k + 1):
            s = s - table.coefficient(k, m) * values[m]
        values[k + 1] = s / top
    return values

def _chebyshevExpansion(referenceMeasure, pValues):
    if not referenceMeasure.isReal:
        raise errors.UnsupportedError('Chebyshev expansion needs a real support')
    x = referenceMeasure.points
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi <= lo:
        hi = lo + 1.0
    u = (2.0 * x - (lo + hi)) / (hi - lo)
    N = pValues.shape[0]
    coefficients = np.zeros((N, N))
    root = np.sqrt(referenceMeasure.weights)
    for k in range(N):
        coefficients[k, :k + 1] = chebyshev.chebfit(u, np.real(pValues[k]), k, w=root)
        if abs(coefficients[k, k]) <= 1e-12 * max(1.0, np.max(np.abs(coefficients[k]))):
            raise errors.DegenerateRecurrenceError('P_{0} does not have exact degree {0}'.format(k))
    return coefficients, lo, hi

## Constructors

def opEnsemble(referenceMeasure, N, table=None, pad=recurrence.DEFAULT_PAD):
    if table is None:
        table = recurrence.tableFromMeasure(referenceMeasure, N, pad)
    return PolynomialEnsemble(referenceMeasure, N, table=table)

def classicalEnsemble(name, N, nNodes=measure.DEFAULT_NODES, pad=recurrence.DEFAULT_PAD):
    table = recurrence.classicalTable(name, N, pad)
    if name == 'gue':
        referenceMeasure = measure.scaledHermiteMeasure(N, nNodes)
    elif name == 'chebyshev':
        referenceMeasure = measure.equilibriumMeasure(-1.0, 1.0, nNodes)
    else:
        referenceMeasure = measure.uniformCircleMeasure(nNodes)
    return PolynomialEnsemble(referenceMeasure, N, table=table)

## Evaluation

def evalP(e, x):
    return e.polynomialValues(x)

def _christoffelDarboux(e, x, y):
    table = e.table
    N = e.N
    px = e.polynomialValues(x, N + 1)
    py = e.polynomialValues(y, N + 1)
    top = table.coefficient(N - 1, N)
    return top * (px[N] * py[N - 1] - px[N - 1] * py[N]) / (x - y)

# K(x, y). Atoms use the stored values; other points need Q = P. Hermitian OP
# ensembles use the Christoffel-Darboux form away from the diagonal unless
# 'christoffelDarboux' is False.
def evalKernel(e, x, y, christoffelDarboux=None):
    m = e.measure
    cdAvailable = e.hermitian and e.table is not None and e.table.form == 'op' and np.isrealobj(x) and np.isrealobj(y)
    if christoffelDarboux is None:
        christoffelDarboux = cdAvailable and abs(x - y) > 1e-6 * max(1.0, abs(x), abs(y))
    if christoffelDarboux:
        if not cdAvailable:
            raise errors.UnsupportedError('Christoffel-Darboux form needs a hermitian OP ensemble')
        return float(_christoffelDarboux(e, x, y))
    if m.hasAtom(x) and m.hasAtom(y):
        i = m.atomIndex(x)
        j = m.atomIndex(y)
        value = np.sum(e.pValues[:, i] * np.conj(e.qValues[:, j]))
    elif e.hermitian and isinstance(e, PolynomialEnsemble):
        value = np.sum(e.polynomialValues(x) * np.conj(e.polynomialValues(y)))
    else:
        raise errors.UnsupportedPointError('Q is only known at atoms, got ({0}, {1})'.format(x, y))
    return complex(value) if np.iscomplexobj(value) and np.imag(value) != 0.0 else float(np.real(value))

# K(x,x)/N at every atom
def meanDensities(e):
    density = np.real(e.kernelDiagonal()) / e.N
    lowest = int(np.argmin(density))
    if density[lowest] < -POSITIVITY_TOLERANCE:
        raise errors.KernelValidityError('Mean density {0} at atom {1} is negative'.format(density[lowest], e.measure.points[lowest]))
    return np.clip(density, 0.0, None)

def meanDensity(e, x):
    i = e.measure.atomIndex(x)
    density = float(np.real(np.sum(e.pValues[:, i] * np.conj(e.qValues[:, i])))) / e.N
    if density < -POSITIVITY_TOLERANCE:
        raise errors.KernelValidityError('Mean density {0} at {1} is negative'.format(density, x))
    return max(density, 0.0)

# The mean empirical measure K(x,x)/N mu(dx) as a measure of its own, over the
# atoms where it is positive
def meanMeasure(e):
    density = meanDensities(e)
    keep = density > 0.0
    return measure.ReferenceMeasure(e.measure.points[keep], e.measure.weights[keep] * density[keep], kind='atoms')

def meanMomentByQuadrature(e, ell):
    m = e.measure
    return complex(np.sum(m.weights * m.points ** ell * e.kernelDiagonal())) / e.N

# [<x P_j, Q_i>] for i, j < N computed on the atoms, for ensembles whose table
# does not describe (P, Q)
def sectionMatrix(e):
    m = e.measure
    H = (np.conj(e.qValues) * m.weights * m.points) @ e.pValues.T
    if np.isrealobj(H) or np.max(np.abs(np.imag(H))) == 0.0:
        return np.real(H)
    return H

def _indices(e, points):
    return [e.measure.atomIndex(point) for point in points]

def _determinantScale(matrix):
    return max(1.0, float(np.prod(np.abs(np.diagonal(matrix)))))

# det [K(x_i, x_j)]
def jointDensity(e, points):
    if len(points) == 0:
        return 1.0
    matrix = e.kernelMatrix(_indices(e, points), _indices(e, points))
    value = float(np.real(np.linalg.det(matrix)))
    if value < -POSITIVITY_TOLERANCE * _determinantScale(matrix):
        raise errors.PositivityViolationError('Correlation determinant {0} is negative'.format(value), witness=list(points))
    return max(value, 0.0)

# log of det [K(x_i, x_j)] / N!, the density of the ordered configuration
# with respect to mu^N
def logJointDensity(e, points):
    matrix = e.kernelMatrix(_indices(e, points), _indices(e, points))
    sign, logdet = np.linalg.slogdet(matrix)
    if np.real(sign) <= 0.0:
        return -np.inf
    return float(logdet) - special.gammaln(len(points) + 1)

## Non-orthogonal ensembles

# Q_k = P_k + sum_j tilt[k][j] P_{N+j}. The directions P_N, P_{N+1}, ... are
# orthogonal to every P_k with k < N, so biorthogonality is untouched.
def tiltNonorthogonal(e, tilt, validate=True, rng=None, scanSize=DEFAULT_SCAN_SIZE):
    if not e.hermitian or not isinstance(e, PolynomialEnsemble) or e.table is None:
        raise errors.UnsupportedError('Tilting needs a hermitian ensemble with a recurrence table')
    tilt = np.asarray(tilt, dtype=float)
    if tilt.ndim == 1:
        tilt = tilt.reshape(e.N, -1)
    if tilt.shape[0] != e.N:
        raise errors.ParameterError('Tilt needs one row per P_k, got {0} rows for N={1}'.format(tilt.shape[0], e.N))
    if tilt.size == 0 or not np.any(tilt):
        return e
    directions = tilt.shape[1]
    values = e.polynomialValues(e.measure.points, e.N + directions)
    qValues = values[:e.N] + tilt @ values[e.N:]
    tilted = PolynomialEnsemble(e.measure, e.N, table=e.polynomialTable, qValues=qValues, p0=e.p0, consistent=False)
    if validate:
        scanPositivity(tilted, rng, scanSize, errorClass=errors.InvalidTiltError)
    return tilted

# Checks every k-point correlation determinant, k = 1..N, on all k-subsets of
# atoms when there are at most 'scanSize' of them and on random subsets
# otherwise. Returns the number of determinants checked.
def scanPositivity(kernel, rng=None, scanSize=DEFAULT_SCAN_SIZE, errorClass=errors.PositivityViolationError):
    n = kernel.measure.size
    full = kernel.kernelMatrix()
    checked = 0
    for k in range(1, kernel.N + 1):
        if special.comb(n, k, exact=True) <= scanSize:
            tuples = np.array(list(itertools.combinations(range(n), k)), dtype=int)
        else:
            if rng is None:
                rng = np.random.default_rng(0)
            count = max(100, scanSize // kernel.N)
            tuples = np.sort(np.argsort(rng.random((count, n)), axis=1)[:, :k], axis=1)
        minors = full[tuples[:, :, None], tuples[:, None, :]]
        determinants = np.real(np.linalg.det(minors))
        scales = np.maximum(1.0, np.prod(np.abs(np.diagonal(minors, axis1=1, axis2=2)), axis=1))
        worst = int(np.argmin(determinants / scales))
        if determinants[worst] < -POSITIVITY_TOLERANCE * scales[worst]:
            witness = [kernel.measure.points[i] for i in tuples[worst]]
            raise errorClass('Negative {0}-point correlation {1} at {2}'.format(k, determinants[worst], witness), witness=witness)
        checked += len(tuples)
    logging.debug('Positivity scan checked {0} determinants'.format(checked))
    return checked
