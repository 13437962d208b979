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
import os
import threading
from builtins import range

import numpy as np
import scipy.linalg as la

import ensemble
import errors
import measure
import utilities

NORMALIZATION_TOLERANCE = 1e-8
DEFAULT_REFACTOR_EVERY = 32

class SamplerConfig:
    def __init__(self, mode='auto', rngSeed=utilities.DEFAULT_SEED, negativityTolerance=measure.NEGATIVITY_TOLERANCE,
                 maxPointsCheck=False, refactorEvery=DEFAULT_REFACTOR_EVERY):
        self.mode = mode
        self.rngSeed = rngSeed
        self.negativityTolerance = negativityTolerance
        self.maxPointsCheck = maxPointsCheck
        self.refactorEvery = refactorEvery

        if 'POLYENS_NEGATIVITY_TOLERANCE' in os.environ:
            self.negativityTolerance = float(os.environ['POLYENS_NEGATIVITY_TOLERANCE'])
        if 'POLYENS_REFACTOR_EVERY' in os.environ:
            self.refactorEvery = int(os.environ['POLYENS_REFACTOR_EVERY'])

        if self.mode not in SamplerFactory.allModeNames():
            raise errors.UnknownNameError('Unknown sampler mode {0}'.format(self.mode))

# One exact sample: the points in the order they were drawn, their atom
# indices, and the log density of the ordered tuple with respect to mu^N
class PointConfiguration:
    def __init__(self, points, indices, logDensity):
        self.points = np.asarray(points)
        self.indices = list(indices)
        self.logDensity = logDensity

    def __len__(self):
        return len(self.indices)

## Conditional states

# Tracks the law of the next point given the points drawn so far.
class AbstractConditionalState:
    def __init__(self, kernel, tolerance):
        self.kernel = kernel
        self.tolerance = tolerance
        self.prefix = []

    def prefixPoints(self):
        return [self.kernel.measure.points[i] for i in self.prefix]

    # Unnormalized residual K(x,x) - (projection onto the prefix) at every atom
    def residualDiagonal(self):
        raise NotImplementedError()
    def add(self, index):
        raise NotImplementedError()

    # Density of the next point with respect to mu at every atom
    def densities(self):
        remaining = self.kernel.N - len(self.prefix)
        if remaining <= 0:
            raise errors.ParameterError('All {0} points have already been drawn'.format(self.kernel.N))
        values = np.real(self.residualDiagonal()) / remaining
        top = max(float(np.max(values)), 0.0)
        lowest = int(np.argmin(values))
        if values[lowest] < -self.tolerance * top:
            raise errors.PositivityViolationError(
                'Conditional density {0} at atom {1} after prefix {2}'.format(values[lowest], self.kernel.measure.points[lowest], self.prefixPoints()),
                witness=self.prefixPoints())
        return np.clip(values, 0.0, None)

# Schur complement form: with M the kernel matrix of the prefix,
#   S(x, y) = K(x, y) - K(x, prefix) M^-1 K(prefix, y)
# is kept as K - sum_j u_j(x) v_j(y) and updated by one rank-1 term per point.
# Every 'refactorEvery' points the terms are rebuilt from an LU factorization
# of M with partial pivoting.
class SchurState(AbstractConditionalState):
    def __init__(self, kernel, tolerance=measure.NEGATIVITY_TOLERANCE, refactorEvery=DEFAULT_REFACTOR_EVERY):
        AbstractConditionalState.__init__(self, kernel, tolerance)
        n = kernel.measure.size
        dtype = np.result_type(kernel.pValues, kernel.qValues, float)
        self.__u = np.zeros((kernel.N, n), dtype=dtype)
        self.__v = np.zeros((kernel.N, n), dtype=dtype)
        self.__kernelDiagonal = kernel.kernelDiagonal()
        self.__diagonal = np.array(self.__kernelDiagonal)
        self.__refactorEvery = refactorEvery

    def residualDiagonal(self):
        return self.__diagonal

    def add(self, index):
        k = len(self.prefix)
        pivot = self.__diagonal[index]
        if not np.real(pivot) > 0.0:
            raise errors.NumericalBreakdownError('Prefix minor is not positive after adding atom {0}'.format(self.kernel.measure.points[index]))
        column = self.kernel.kernelColumn(index) - self.__u[:k].T @ self.__v[:k, index]
        row = self.kernel.kernelRow(index) - self.__u[:k, index] @ self.__v[:k]
        self.__u[k] = column / pivot
        self.__v[k] = row
        self.__diagonal = self.__diagonal - self.__u[k] * row
        self.prefix.append(index)
        if len(self.prefix) % self.__refactorEvery == 0:
            self.refactor()

    # Rebuild the rank-1 terms from scratch
    def refactor(self):
        k = len(self.prefix)
        if k == 0:
            return
        u, diagonal = self.__fromScratch()
        self.__u[:k] = u
        self.__v[:k] = self.kernel.kernelMatrix(self.prefix, None)
        drift = float(np.max(np.abs(diagonal - self.__diagonal)))
        logging.debug('Refactored Schur state at {0} points, drift {1:.3e}'.format(k, drift))
        self.__diagonal = diagonal

    def __fromScratch(self):
        minor = self.kernel.kernelMatrix(self.prefix, self.prefix)
        factorization = la.lu_factor(minor)
        left = self.kernel.kernelMatrix(None, self.prefix)
        right = self.kernel.kernelMatrix(self.prefix, None)
        u = la.lu_solve(factorization, left.T, trans=1)
        diagonal = self.__kernelDiagonal - np.einsum('ji,ji->i', u, right)
        return u, diagonal

    # The residual diagonal recomputed from the minor, without touching the state
    def scratchDiagonal(self):
        if len(self.prefix) == 0:
            return np.array(self.__kernelDiagonal)
        return self.__fromScratch()[1]

# Gram-Schmidt form for hermitian kernels: psi_i = K(., x_i) is orthogonalized
# against the previous psi's without normalizing. By the reproducing property
# <psi_x, psiHat_j> = conj(psiHat_j(x)), so the residual is
#   K(x,x) - sum_j |psiHat_j(x)|^2 / |psiHat_j|^2
class HKPVState(AbstractConditionalState):
    def __init__(self, kernel, tolerance=measure.NEGATIVITY_TOLERANCE):
        if not kernel.hermitian:
            raise errors.UnsupportedError('HKPV sampling needs a hermitian kernel')
        AbstractConditionalState.__init__(self, kernel, tolerance)
        self.__weights = kernel.measure.weights
        self.__psi = []
        self.__psiHat = []
        self.__norms = []
        self.__diagonal = np.real(kernel.kernelDiagonal())

    def residualDiagonal(self):
        return self.__diagonal

    @property
    def norms(self):
        return list(self.__norms)

    def add(self, index):
        psi = self.kernel.kernelColumn(index)
        psiHat = np.array(psi)
        for previous, norm in zip(self.__psiHat, self.__norms):
            if norm > 0.0:
                psiHat = psiHat - (np.sum(self.__weights * psi * np.conj(previous)) / norm) * previous
        norm = float(np.real(np.sum(self.__weights * np.abs(psiHat) ** 2)))
        self.__psi.append(psi)
        self.__psiHat.append(psiHat)
        self.__norms.append(norm)
        if norm > 0.0:
            self.__diagonal = self.__diagonal - np.abs(psiHat) ** 2 / norm
        self.prefix.append(index)

    # det of the Gram matrix [<psi_i, psi_j>] and the product of the squared
    # norms of the orthogonalized family
    def gramDeterminant(self):
        psi = np.array(self.__psi)
        gram = (psi * self.__weights) @ np.conj(psi).T
        return float(np.real(np.linalg.det(gram))), float(np.prod(self.__norms)), float(np.prod(np.real(np.diagonal(gram))))

class SamplerFactory:
    @staticmethod
    def __stateFromName():
        return {
            'hkpv': lambda kernel, cfg: HKPVState(kernel, cfg.negativityTolerance),
            'schur': lambda kernel, cfg: SchurState(kernel, cfg.negativityTolerance, cfg.refactorEvery)
        }
    @staticmethod
    def allModeNames():
        return list(SamplerFactory.__stateFromName().keys()) + ['auto']
    @staticmethod
    def state(kernel, cfg):
        mode = cfg.mode
        if mode == 'auto':
            mode = 'hkpv' if kernel.hermitian else 'schur'
        builders = SamplerFactory.__stateFromName()
        if mode not in builders:
            raise errors.UnknownNameError('Unknown sampler mode {0}'.format(mode))
        return builders[mode](kernel, cfg)

def conditionalState(kernel, cfg=None, prefix=()):
    cfg = SamplerConfig() if cfg is None else cfg
    state = SamplerFactory.state(kernel, cfg)
    for point in prefix:
        state.add(kernel.measure.atomIndex(point))
    return state

def conditionalDensity(state, x):
    return float(state.densities()[state.kernel.measure.atomIndex(x)])

# Compares the Gram determinant of the psi's with the product of the squared
# norms of their orthogonalization. Returns the determinant.
def baseTimesHeightCheck(state):
    if not isinstance(state, HKPVState):
        raise errors.UnsupportedError('Base times height check needs an HKPV state')
    if len(state.prefix) == 0:
        raise errors.ParameterError('Base times height check needs a nonempty prefix')
    determinant, product, hadamard = state.gramDeterminant()
    if abs(determinant - product) > 1e-8 * max(abs(determinant), abs(product)) + 1e-12 * hadamard:
        raise errors.OrthogonalizationDriftError('Gram determinant {0} differs from product of norms {1}'.format(determinant, product))
    return determinant

## Sampling

# Draws x_1 from K(x,x)/N mu(dx), then each next point from the conditional
# law given the prefix.
def sample(kernel, cfg=None, rng=None):
    cfg = SamplerConfig() if cfg is None else cfg
    rng = utilities.rngStream(cfg.rngSeed) if rng is None else rng
    N = kernel.N
    if N == 0:
        return PointConfiguration([], [], 0.0)
    state = SamplerFactory.state(kernel, cfg)
    weights = kernel.measure.weights
    logDensity = 0.0
    for k in range(N):
        density = state.densities()
        if cfg.maxPointsCheck:
            total = float(np.sum(density * weights))
            if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
                raise errors.NumericalBreakdownError('Conditional density of point {0} integrates to {1}'.format(k + 1, total))
        index = measure.categoricalIndex(density, weights, rng, cfg.negativityTolerance)
        if not density[index] > 0.0:
            raise errors.NumericalBreakdownError('Drew atom {0} with zero density'.format(index))
        logDensity += math.log(density[index])
        state.add(index)
    return PointConfiguration([kernel.measure.points[i] for i in state.prefix], state.prefix, logDensity)

## Contractions

def _spectralArrays(spectral):
    lambdas = np.array([float(item[0]) for item in spectral])
    phi = np.array([item[1] for item in spectral])
    psi = np.array([item[2] for item in spectral])
    return lambdas, phi, psi

# K = sum_k lambda_k phi_k(x) psi_k(y) on the atoms
def contractionDiagonal(spectral):
    lambdas, phi, psi = _spectralArrays(spectral)
    return np.real(np.einsum('k,ki,ki->i', lambdas, phi, psi))

# Keeps each spectral term independently with probability lambda_k and returns
# the projection kernel of the kept terms.
def thinContraction(referenceMeasure, spectral, rng):
    lambdas, phi, psi = _spectralArrays(spectral)
    if np.any(lambdas <= 0.0) or np.any(lambdas > 1.0):
        raise errors.ParameterError('Contraction eigenvalues must lie in (0, 1], got {0}'.format(lambdas.tolist()))
    if len(lambdas) > 0:
        gram = (phi * referenceMeasure.weights) @ psi.T
        error = float(np.max(np.abs(gram - np.eye(len(lambdas)))))
        if error > ensemble.BIORTHOGONALITY_TOLERANCE:
            raise errors.BiorthogonalityError('Spectral families are not biorthogonal: {0:.3e}'.format(error))
    kept = np.flatnonzero(rng.random(len(lambdas)) < lambdas)
    return ensemble.ProjectionKernel(referenceMeasure, phi[kept], np.conj(psi[kept]))

## Replicas

# Calls draw(rng) for replicas 0..count-1 with rng = stream(seed, r), spread
# over worker threads. Results come back in replica order.
def runReplicas(draw, count, seed=utilities.DEFAULT_SEED, workers=None):
    results = [None] * count
    failures = []
    def work(replicas):
        try:
            for r in replicas:
                results[r] = draw(utilities.rngStream(seed, r))
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception as err:
            failures.append(err)

    workers = min(utilities.threadCount(workers), max(1, count))
    threads = []
    for chunk in utilities.splitList(list(range(count)), workers):
        threads.append(threading.Thread(None, target=work, args=(chunk,)))
        threads[-1].start()
    for thread in threads:
        thread.join()
    if failures:
        raise failures[0]
    return results

def sampleReplicas(kernel, count, cfg=None, workers=None):
    cfg = SamplerConfig() if cfg is None else cfg
    return runReplicas(lambda rng: sample(kernel, cfg, rng), count, cfg.rngSeed, workers)

## Matrix models

# Eigenvalues of the tridiagonal beta = 2 Hermite model, scaled so that their
# joint law is the GUE ensemble with weight exp(-N x^2 / 2).
def sampleMatrixModel(name, N, rng):
    if name != 'gue':
        raise errors.UnknownNameError('No matrix model for {0}'.format(name))
    diagonal = rng.standard_normal(N)
    offDiagonal = np.sqrt(rng.chisquare(2.0 * np.arange(N - 1, 0, -1)) / 2.0)
    return la.eigvalsh_tridiagonal(diagonal, offDiagonal) / math.sqrt(N)
