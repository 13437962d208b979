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

import numpy as np
from numpy.polynomial import chebyshev
from scipy import stats

import errors
import measure
import recurrence
import sampler
import utilities

DEFAULT_ORDER = 256
MIN_REPLICAS = 100
DIFFERENCE_STEP = 1e-5

# Limit of the two point measure built from P_{N-1} and P_N when the
# coefficients near N converge to a (off diagonal) and b (diagonal). In the
# variables x = b + 2 a u, y = b + 2 a v it has density (1 - u v) against the
# product of two arcsine laws on [-1, 1].
class BivariateLimit:
    def __init__(self, a, b=0.0):
        if not a > 0.0:
            raise errors.ParameterError('Limit needs a > 0, got {0}'.format(a))
        self.a = float(a)
        self.b = float(b)

    # Chebyshev-Gauss nodes u, their images x and the (equal) weights
    def quadrature(self, order):
        u, _ = chebyshev.chebgauss(order)
        return u, self.b + 2.0 * self.a * u, np.full(order, 1.0 / order)

    def __repr__(self):
        return 'BivariateLimit(a={0}, b={1})'.format(self.a, self.b)

# Integral of x^m y^n against the limit. The density factorizes, so the
# tensor quadrature is two products of one dimensional sums.
def limitingQMoment(L, m, n, order=None):
    order = max(64, 4 * (m + n)) if order is None else order
    if order < 4 * (m + n):
        raise errors.ParameterError('Quadrature order {0} is too low for degrees ({1}, {2})'.format(order, m, n))
    u, x, w = L.quadrature(order)
    first = np.sum(w * x ** m) * np.sum(w * x ** n)
    second = np.sum(w * u * x ** m) * np.sum(w * u * x ** n)
    return float(first - second)

# Limiting variance of sum f(x_i): a^2 times the integral of the squared
# difference quotient of f against the limit. On the diagonal the quotient
# is f'(x), from 'fprime' or a central difference.
def limitingVariance(f, L, fprime=None, order=DEFAULT_ORDER):
    u, x, w = L.quadrature(order)
    fx = np.real(measure.evaluateAt(f, x))
    dx = x[:, None] - x[None, :]
    diagonal = np.abs(dx) < 1e-8 * max(1.0, L.a)
    safe = np.where(diagonal, 1.0, dx)
    quotient = (fx[:, None] - fx[None, :]) / safe
    if np.any(diagonal):
        if fprime is not None:
            slope = np.real(measure.evaluateAt(fprime, x))
        else:
            slope = np.real(measure.evaluateAt(f, x + DIFFERENCE_STEP) - measure.evaluateAt(f, x - DIFFERENCE_STEP)) / (2.0 * DIFFERENCE_STEP)
        quotient = np.where(diagonal, np.broadcast_to(slope[:, None], quotient.shape), quotient)
    density = 1.0 - u[:, None] * u[None, :]
    value = L.a ** 2 * float(np.sum(w[:, None] * w[None, :] * density * quotient ** 2))
    return max(value, 0.0)

# Moment (m, n) of the two point measure
#  1/2 [P_N(x) P_{N-1}(y) - P_{N-1}(x) P_N(y)]^2 mu(dx) mu(dy)
# computed from one dimensional sums over the atoms.
def empiricalQMoment(e, mdeg, ndeg):
    table = e.table
    if table is None or table.form != 'op' or not e.hermitian:
        raise errors.UnsupportedError('The two point measure is defined for orthogonal polynomial ensembles only')
    m = e.measure
    values = e.polynomialValues(m.points, e.N + 1)
    A = values[e.N]
    B = values[e.N - 1]
    x = m.points
    def S(g):
        return float(np.real(np.sum(m.weights * g)))
    X = x ** mdeg
    Y = x ** ndeg
    return 0.5 * (S(A * A * X) * S(B * B * Y) - 2.0 * S(A * B * X) * S(A * B * Y) + S(B * B * X) * S(A * A * Y))

def _scalar(value, dtype):
    return complex(value) if np.issubdtype(dtype, np.complexfloating) else float(np.real(value))

# Cov[sum x_i^ell, sum x_i^m] as the weight of the paths of length ell + m
# from k < N back to k that sit at or above N after ell steps.
def covariancePower(t, ell, m):
    N = t.N
    if ell == 0 or m == 0:
        return _scalar(0.0, t.dtype)
    total = 0.0
    for k in range(max(0, N - ell), N):
        total += recurrence.restrictedPathSum(t, ell + m, k, k, escapeStep=ell, escapeLevel=N)
    return _scalar(total, t.dtype)

# Var[sum x_i^ell]. The path sum is checked against
#  Tr(K M^{2 ell} K) - Tr((K M^ell K)^2)
# computed on the (N + ell) section, which holds every path involved.
def variancePower(t, ell):
    N = t.N
    value = covariancePower(t, ell, ell)
    if ell == 0:
        return 0.0
    H = recurrence.hessenbergMatrix(t, N + ell)
    A = np.linalg.matrix_power(H, ell)
    full = np.trace((A @ A)[:N, :N])
    section = A[:N, :N]
    matrixValue = full - np.trace(section @ section)
    scale = max(1.0, abs(full))
    if abs(matrixValue - value) > 1e-9 * scale:
        raise errors.ImplementationInconsistencyError('Variance of the power {0}: paths give {1} but the section gives {2}'.format(ell, value, matrixValue))
    value = float(np.real(value))
    if value < -1e-9 * scale:
        raise errors.ImplementationInconsistencyError('Negative variance {0} for the power {1}'.format(value, ell))
    return max(value, 0.0)

# Var[sum f(x_i)] for f = sum_ell coefficients[ell] x^ell
def polynomialVariance(t, coefficients):
    coefficients = list(coefficients)
    value = 0.0
    scale = 0.0
    for ell in range(1, len(coefficients)):
        for m in range(1, len(coefficients)):
            if coefficients[ell] == 0 or coefficients[m] == 0:
                continue
            term = coefficients[ell] * coefficients[m] * covariancePower(t, ell, m)
            value += term
            scale += abs(term)
    value = float(np.real(value))
    if value < -1e-9 * max(1.0, scale):
        raise errors.ImplementationInconsistencyError('Negative variance {0} for polynomial {1}'.format(value, coefficients))
    return max(value, 0.0)

# (2 ell)^{2 ell} max |c(k,m)|^{2 ell} over the coefficients within ell of N
def varianceUpperBound(t, ell, exact=None):
    top = recurrence.maxAbsCoefficient(t, t.N - ell, t.N + ell)
    bound = (2.0 * ell) ** (2 * ell) * top ** (2 * ell)
    exact = variancePower(t, ell) if exact is None else exact
    if exact > bound * (1.0 + 1e-12) + 1e-14:
        raise errors.ImplementationInconsistencyError('Variance {0} of the power {1} exceeds its bound {2}'.format(exact, ell, bound))
    return bound

# Bound on the variance of a linear statistic with Lipschitz constant 'lip'
# when every off diagonal coefficient is at most 'aTop'
def lipschitzVarianceBound(aTop, lip):
    return (aTop * lip) ** 2

## Monte Carlo

class CumulantEstimates:
    def __init__(self, count, values, standardErrors):
        self.count = count
        self.values = list(values)
        self.errors = list(standardErrors)

    @property
    def mean(self):
        return self.values[0]
    @property
    def variance(self):
        return self.values[1]
    @property
    def skewness(self):
        if self.values[1] <= 0.0:
            return float('nan')
        return self.values[2] / self.values[1] ** 1.5
    @property
    def excessKurtosis(self):
        if self.values[1] <= 0.0:
            return float('nan')
        return self.values[3] / self.values[1] ** 2

    def toDict(self):
        return {'replicas': self.count, 'kappa': self.values, 'stderr': self.errors,
                'skewness': self.skewness, 'excess_kurtosis': self.excessKurtosis}

# k-statistics of orders 2..4 of every leave-one-out sample, from power sums
def _leaveOneOutKStats(x):
    n = len(x) - 1
    S1 = np.sum(x) - x
    S2 = np.sum(x ** 2) - x ** 2
    S3 = np.sum(x ** 3) - x ** 3
    S4 = np.sum(x ** 4) - x ** 4
    k1 = S1 / n
    k2 = (n * S2 - S1 ** 2) / (n * (n - 1.0))
    k3 = (2.0 * S1 ** 3 - 3.0 * n * S1 * S2 + n ** 2 * S3) / (n * (n - 1.0) * (n - 2.0))
    k4 = (-6.0 * S1 ** 4 + 12.0 * n * S1 ** 2 * S2 - 3.0 * n * (n - 1.0) * S2 ** 2
          - 4.0 * n * (n + 1.0) * S1 * S3 + n ** 2 * (n + 1.0) * S4) / (n * (n - 1.0) * (n - 2.0) * (n - 3.0))
    return [k1, k2, k3, k4]

# First four cumulants of the replica statistics with jackknife standard errors
def cumulants(statistics):
    x = np.real(np.asarray(statistics)).astype(float)
    R = len(x)
    if R < MIN_REPLICAS:
        raise errors.TooFewReplicasError('Need at least {0} replicas, got {1}'.format(MIN_REPLICAS, R))
    mean = float(np.mean(x))
    centered = x - mean
    values = [mean] + [float(stats.kstat(centered, n)) for n in (2, 3, 4)]
    values[1] = max(values[1], 0.0)
    standardErrors = []
    for thetas in _leaveOneOutKStats(centered):
        spread = math.sqrt((R - 1.0) / R * float(np.sum((thetas - np.mean(thetas)) ** 2)))
        standardErrors.append(spread)
    return CumulantEstimates(R, values, standardErrors)

# Sample covariance and its standard error
def covarianceEstimate(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    R = len(xs)
    if R < 2 or len(ys) != R:
        raise errors.TooFewReplicasError('Need two matching series of at least 2 replicas')
    products = (xs - np.mean(xs)) * (ys - np.mean(ys))
    return float(np.sum(products) / (R - 1.0)), float(np.std(products, ddof=1) / math.sqrt(R))

# sum_i f(x_i) for each configuration
def linearStatistics(configurations, f):
    out = []
    for configuration in configurations:
        points = configuration.points if isinstance(configuration, sampler.PointConfiguration) else np.asarray(configuration)
        out.append(float(np.real(np.sum(measure.evaluateAt(f, points)))))
    return np.array(out)

# Linear statistics of 'count' replicas of draw(rng), one stream per replica
def monteCarloVariance(draw, f, count, seed=utilities.DEFAULT_SEED, workers=None):
    statistics = sampler.runReplicas(lambda rng: linearStatistics([draw(rng)], f)[0], count, seed, workers)
    estimates = cumulants(statistics)
    logging.info('Monte Carlo over {0} replicas: variance {1:.6g} +- {2:.2g}'.format(count, estimates.variance, estimates.errors[1]))
    return estimates, np.array(statistics)

# Limit of the coefficients near N, read off the table rows N-ell..N+ell
def limitFromTable(t, ell=4):
    rows = range(max(0, t.N - ell), min(t.size - 1, t.N + ell))
    a = float(np.mean([abs(t.coefficient(k, k + 1)) for k in rows]))
    b = float(np.mean([np.real(t.coefficient(k, k)) for k in rows]))
    return BivariateLimit(a, b)
