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

import functools
import logging
import math
from builtins import range

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial
from scipy import special

import errors
import measure
import recurrence

QUADRATURE_ORDER = 256
MAX_BANDED_POWER = 12
MAX_BANDED_WIDTH = 4

# Gauss-Legendre rule on [0, 1]
def _unitQuadrature(order=QUADRATURE_ORDER):
    x, w = legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w

# A profile entry is a number, {"poly": [c0, c1, ...]}, {"power": p, "scale": c}
# or {"table": {"s": [...], "values": [...]}} (piecewise linear), or already a
# callable.
def profileFunction(entry):
    if callable(entry):
        return entry
    if isinstance(entry, (int, float)):
        value = float(entry)
        return lambda s: np.full(np.shape(s), value) if np.ndim(s) else value
    if not isinstance(entry, dict):
        raise errors.ConfigError('Cannot read a profile function from {0}'.format(entry))
    if 'poly' in entry:
        coefficients = np.asarray(entry['poly'], dtype=float)
        return lambda s: polynomial.polyval(s, coefficients)
    if 'power' in entry:
        power = float(entry['power'])
        scale = float(entry.get('scale', 1.0))
        return lambda s: scale * np.power(s, power)
    if 'table' in entry:
        knots = np.asarray(entry['table']['s'], dtype=float)
        values = np.asarray(entry['table']['values'], dtype=float)
        if knots.shape != values.shape or len(knots) < 2 or np.any(np.diff(knots) <= 0.0):
            raise errors.ConfigError('Profile table needs increasing knots with one value each')
        return lambda s: np.interp(s, knots, values)
    raise errors.ConfigError('Unknown profile function {0}'.format(sorted(entry.keys())))

# Limits a_j(s) of c(k, k-j) as k/N -> s, for j = -1..q. An OP profile is
# given by a(s) (for j = -1 and j = 1) and b(s) (for j = 0).
class CoefficientProfile:
    def __init__(self, q, functions, form='banded'):
        if form not in ('op', 'banded'):
            raise errors.UnknownNameError('Unknown profile form {0}'.format(form))
        if q < 0:
            raise errors.ParameterError('Profile bandwidth must be nonnegative, got {0}'.format(q))
        for j in functions:
            if j < -1 or j > q:
                raise errors.OutOfRangeError('Profile offset {0} outside -1..{1}'.format(j, q), index=j)
        self.__q = q
        self.__form = form
        self.__functions = dict((j, profileFunction(f)) for j, f in functions.items())
        s, _ = _unitQuadrature()
        for j in self.__functions:
            self.values(j, s)

    @property
    def q(self):
        return self.__q
    @property
    def form(self):
        return self.__form
    @property
    def isOP(self):
        return self.__form == 'op'

    # a_j at the points 's'; offsets without a function are zero
    def values(self, j, s):
        s = np.asarray(s, dtype=float)
        if j not in self.__functions:
            return np.zeros(s.shape)
        return np.real(measure.evaluateAt(self.__functions[j], s))

    def a(self, s):
        return self.values(-1, s)

    def b(self, s):
        return self.values(0, s)

    @staticmethod
    def fromConfig(config):
        if config.get('form', 'op') == 'op':
            return opProfile(config['a'], config.get('b', 0.0))
        functions = dict((int(j), f) for j, f in config['a'].items())
        return CoefficientProfile(int(config['q']), functions)

    def __repr__(self):
        return 'CoefficientProfile({0}, q={1}, offsets={2})'.format(self.__form, self.__q, sorted(self.__functions.keys()))

def opProfile(a, b=0.0):
    return CoefficientProfile(1, {-1: a, 0: b, 1: a}, form='op')

## Moments

def arcsineMoment(ell):
    if ell < 0:
        raise errors.ParameterError('Moment order must be nonnegative, got {0}'.format(ell))
    if ell % 2 == 1:
        return 0.0
    m = ell // 2
    return special.comb(2 * m, m, exact=True) / float(4 ** m)

# Moment of 2 a(U) xi + b(U) with U uniform on [0, 1] and xi arcsine on [-1, 1]:
#  sum_m C(ell, 2m) C(2m, m) int a^{2m} b^{ell-2m} ds
def muAbMoment(p, ell):
    if not p.isOP:
        raise errors.UnsupportedError('muAbMoment needs an OP profile')
    if ell < 0:
        raise errors.ParameterError('Moment order must be nonnegative, got {0}'.format(ell))
    s, w = _unitQuadrature()
    a = p.a(s)
    b = p.b(s)
    total = 0.0
    for m in range(ell // 2 + 1):
        weight = special.comb(ell, 2 * m, exact=True) * special.comb(2 * m, m, exact=True)
        total += weight * float(np.sum(w * a ** (2 * m) * b ** (ell - 2 * m)))
    return total

def muAbSample(p, rng, size=None):
    if not p.isOP:
        raise errors.UnsupportedError('muAbSample needs an OP profile')
    u = rng.random(size)
    xi = np.cos(math.pi * rng.random(size))
    value = 2.0 * p.a(u) * xi + p.b(u)
    return float(value) if size is None else value

# Step counts (k_{-1}, ..., k_q) of closed paths of length ell: sum k_j = ell
# and sum j k_j = 0
@functools.lru_cache(maxsize=None)
def closedStepCounts(ell, q):
    out = []
    def extend(prefix, left, balance):
        j = len(prefix) - 1
        if j == q:
            if balance + q * left == 0:
                out.append(tuple(prefix) + (left,))
            return
        for count in range(left + 1):
            # the remaining offsets are all >= j+1, so the balance must be reachable
            rest = left - count
            newBalance = balance + j * count
            if newBalance + (j + 1) * rest > 0 or newBalance + q * rest < 0:
                continue
            extend(prefix + [count], rest, newBalance)
    extend([], ell, 0)
    return tuple(out)

def bandedLimitMoment(p, ell):
    if ell < 0:
        raise errors.ParameterError('Moment order must be nonnegative, got {0}'.format(ell))
    if ell > MAX_BANDED_POWER or p.q > MAX_BANDED_WIDTH:
        raise errors.CombinatorialLimitError('Banded limit moments are enumerated for ell <= {0} and q <= {1}, got ell={2}, q={3}'.format(MAX_BANDED_POWER, MAX_BANDED_WIDTH, ell, p.q))
    s, w = _unitQuadrature()
    values = [p.values(j, s) for j in range(-1, p.q + 1)]
    total = 0.0
    for counts in closedStepCounts(ell, p.q):
        ways = math.factorial(ell)
        product = np.ones(len(s))
        for count, value in zip(counts, values):
            ways //= math.factorial(count)
            if count:
                product = product * value ** count
        total += ways * float(np.sum(w * product))
    return total

def limitMoment(p, ell):
    return muAbMoment(p, ell) if p.isOP else bandedLimitMoment(p, ell)

# Rows (ell, finite N mean moment, limit moment, |gap|) for ell = 0..lmax
def limitReport(t, p, lmax):
    report = []
    for ell in range(lmax + 1):
        finite = recurrence.meanMoment(t, ell)
        finite = float(np.real(finite))
        limit = limitMoment(p, ell)
        report.append((ell, finite, limit, abs(finite - limit)))
        logging.debug('Limit report ell={0}: finite {1:.6g}, limit {2:.6g}'.format(ell, finite, limit))
    return report

# Table with c(k, k+1) = a_{-1}((k+1)/N) and c(k, k-j) = a_j(k/N) otherwise.
# For the OP profile a(s) = sqrt(s) this is exactly the GUE table.
def tableFromProfile(p, N, pad=recurrence.DEFAULT_PAD):
    size = N + pad
    k = np.arange(size)
    up = p.values(-1, (k + 1.0) / N)
    if p.isOP:
        return recurrence.opTable(N, up, p.b(k / float(N)))
    entries = [(row, -1, up[row]) for row in range(size)]
    for j in range(0, p.q + 1):
        values = p.values(j, k / float(N))
        entries.extend((row, j, values[row]) for row in range(j, size) if values[row] != 0.0)
    return recurrence.bandedTable(N, p.q, entries, size=size)
