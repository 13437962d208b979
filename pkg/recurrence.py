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

import errors

DEFAULT_PAD = 16
ORTHONORMALITY_TOLERANCE = 1e-9
BANDWIDTH_TOLERANCE = 1e-12

# Recurrence coefficients c(k, m) = <x P_k, Q_m> of an ensemble of size N.
#
# Row k holds the q+2 coefficients c(k, k-j) for j = -1..q, i.e. column 0 is
# the superdiagonal c(k, k+1) and column j+1 is c(k, k-j). Rows exist for
# k = 0..size-1 where size = N + pad. In OP form a_k = c(k, k+1) and
# b_k = c(k, k), so column 2 of row k repeats a_{k-1}.
class RecurrenceTable:
    FORMS = ('op', 'banded')

    def __init__(self, N, form, bands):
        if form not in RecurrenceTable.FORMS:
            raise errors.UnknownNameError('Unknown table form {0}'.format(form))
        bands = np.array(bands)
        if bands.ndim != 2 or bands.shape[1] < 2:
            raise errors.ParameterError('Bands must be a (size, q+2) array, got shape {0}'.format(bands.shape))
        if N < 1 or bands.shape[0] < N:
            raise errors.OutOfRangeError('Table with {0} rows cannot describe N={1}'.format(bands.shape[0], N), index=N - 1)
        zero = np.flatnonzero(bands[:, 0] == 0.0)
        if len(zero) > 0:
            raise errors.DegenerateRecurrenceError('Superdiagonal coefficient vanishes at row {0}'.format(zero[0]))
        if form == 'op':
            if np.iscomplexobj(bands) or np.any(bands[:, 0] < 0.0):
                raise errors.ParameterError('OP tables need positive a_k and real b_k')
        self.__N = int(N)
        self.__form = form
        self.__bands = bands
        self.__bands.setflags(write=False)

    @property
    def N(self):
        return self.__N
    @property
    def form(self):
        return self.__form
    @property
    def q(self):
        return self.__bands.shape[1] - 2
    @property
    def size(self):
        return self.__bands.shape[0]
    @property
    def pad(self):
        return self.size - self.__N
    @property
    def dtype(self):
        return self.__bands.dtype
    @property
    def a(self):
        return np.array(self.__bands[:, 0])
    @property
    def b(self):
        return np.array(self.__bands[:, 1])

    def checkIndex(self, k):
        if k < 0 or k >= self.size:
            raise errors.OutOfRangeError('Coefficient index {0} outside stored range 0..{1}'.format(k, self.size - 1), index=k)

    # Rows lo..hi-1 of the band storage
    def rows(self, lo, hi):
        self.checkIndex(lo)
        self.checkIndex(hi - 1)
        return self.__bands[lo:hi]

    # <x P_k, Q_m>
    def coefficient(self, k, m):
        self.checkIndex(k)
        j = k - m
        if m < 0 or j < -1 or j > self.q:
            return 0.0
        return self.__bands[k, j + 1]

    # Same table with a different N, keeping the stored rows
    def withN(self, N):
        return RecurrenceTable(N, self.__form, self.__bands)

    def __repr__(self):
        return 'RecurrenceTable({0}, N={1}, q={2}, size={3})'.format(self.__form, self.__N, self.q, self.size)

def opTable(N, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise errors.ParameterError('a and b must be lists of equal length, got {0} and {1}'.format(a.shape, b.shape))
    bands = np.zeros((len(a), 3))
    bands[:, 0] = a
    bands[:, 1] = b
    bands[1:, 2] = a[:-1]
    return RecurrenceTable(N, 'op', bands)

# 'entries' is an iterable of (k, j, value) meaning <x P_k, Q_{k-j}> = value.
# Entries not given are zero.
def bandedTable(N, q, entries, size=None):
    entries = list(entries)
    if size is None:
        size = max(int(k) for k, _, _ in entries) + 1 if entries else N
    isComplex = any(isinstance(value, complex) for _, _, value in entries)
    bands = np.zeros((size, q + 2), dtype=complex if isComplex else float)
    for k, j, value in entries:
        k = int(k)
        j = int(j)
        if j < -1 or j > q:
            raise errors.OutOfRangeError('Band offset {0} outside -1..{1}'.format(j, q), index=j)
        if k < 0 or k >= size:
            raise errors.OutOfRangeError('Row {0} outside 0..{1}'.format(k, size - 1), index=k)
        bands[k, j + 1] = value
    return RecurrenceTable(N, 'banded', bands)

def tableFromConfig(config, N=None):
    N = config.get('N', N)
    if N is None:
        raise errors.ConfigError('Table config needs N')
    if config['form'] == 'op':
        return opTable(N, config['a'], config['b'])
    entries = []
    for k, j, value in config['c']:
        if isinstance(value, (list, tuple)):
            value = complex(value[0], value[1])
        entries.append((k, j, value))
    return bandedTable(N, config['q'], entries)

def tableToConfig(t):
    if t.form == 'op':
        return {'form': 'op', 'N': t.N, 'a': t.a.tolist(), 'b': t.b.tolist()}
    entries = []
    for k in range(t.size):
        for j in range(-1, t.q + 1):
            value = t.coefficient(k, k - j)
            if value != 0.0 and k - j >= 0:
                value = complex(value)
                entries.append([k, j, value.real if value.imag == 0.0 else [value.real, value.imag]])
    return {'form': 'banded', 'N': t.N, 'q': t.q, 'c': entries}

## Path sums

def _asScalar(value, dtype):
    if np.issubdtype(dtype, np.complexfloating):
        return complex(value)
    return float(np.real(value))

# Weighted sum over lattice paths of length 'ell' from ordinate 'start' to
# ordinate 'target'. Up steps k -> k+1 and down steps k -> k-j (j <= q) carry
# the weight c(k, destination).
#
# The vector of x^step P_start in the basis P is propagated one multiplication
# by x at a time, keeping only ordinates that can still reach 'target'. With
# 'ceiling', paths must stay below it. With 'escapeStep', paths must sit at an
# ordinate >= 'escapeLevel' after that many steps.
def restrictedPathSum(t, ell, start, target, ceiling=None, escapeStep=None, escapeLevel=None):
    t.checkIndex(start)
    if target < 0:
        raise errors.OutOfRangeError('Target index {0} is negative'.format(target), index=target)
    if ell < 0:
        raise errors.ParameterError('Path length must be nonnegative, got {0}'.format(ell))
    if ceiling is not None and (start >= ceiling or target >= ceiling):
        return _asScalar(0.0, t.dtype)
    if ell == 0:
        hit = start == target and (escapeStep != 0 or start >= escapeLevel)
        return _asScalar(1.0 if hit else 0.0, t.dtype)
    q = t.q
    lo = start
    vec = np.ones(1, dtype=t.dtype)
    for step in range(1, ell + 1):
        rows = t.rows(lo, lo + len(vec))
        remaining = ell - step
        winLo = max(0, start - q * step, target - remaining)
        winHi = min(start + step, target + q * remaining)
        if ceiling is not None:
            winHi = min(winHi, ceiling - 1)
        if escapeStep == step:
            winLo = max(winLo, escapeLevel)
        if winHi < winLo:
            return _asScalar(0.0, t.dtype)
        out = np.zeros(winHi - winLo + 1, dtype=t.dtype)
        sources = np.arange(lo, lo + len(vec))
        for column in range(q + 2):
            destinations = sources - (column - 1)
            keep = (destinations >= winLo) & (destinations <= winHi)
            out[destinations[keep] - winLo] += vec[keep] * rows[keep, column]
        lo = winLo
        vec = out
    if lo <= target < lo + len(vec):
        return _asScalar(vec[target - lo], t.dtype)
    return _asScalar(0.0, t.dtype)

# <x^ell P_k, Q_m>
def pathSumMoment(t, ell, k, m):
    t.checkIndex(m)
    return restrictedPathSum(t, ell, k, m)

# (1/N) sum_{k<N} <x^ell P_k, Q_k>
def meanMoment(t, ell):
    total = sum(restrictedPathSum(t, ell, k, k) for k in range(t.N))
    return total / t.N

# Sum over k < N of the paths from k back to k that never reach N. This is
# the trace of the ell-th power of the N x N section.
def sectionTraceMoment(t, ell):
    return sum(restrictedPathSum(t, ell, k, k, ceiling=t.N) for k in range(t.N))

## Matrices

# Column j holds the coordinates of x P_j in the basis P_0..P_{size-1}, so the
# matrix is upper Hessenberg: entry (i, j) = <x P_j, Q_i> vanishes for i > j+1.
# In OP form this is the symmetric Jacobi matrix.
def hessenbergMatrix(t, size=None):
    size = t.N if size is None else size
    rows = t.rows(0, size)
    H = np.zeros((size, size), dtype=t.dtype)
    for column in range(t.q + 2):
        j = column - 1
        for k in range(size):
            i = k - j
            if 0 <= i < size:
                H[i, k] = rows[k, column]
    return H

# max |<x P_k, Q_m>| over lo <= k, m <= hi, restricted to stored rows
def maxAbsCoefficient(t, lo, hi):
    lo = max(lo, 0)
    hi = min(hi, t.size - 1)
    best = 0.0
    for k in range(lo, hi + 1):
        for j in range(-1, t.q + 1):
            m = k - j
            if lo <= m <= hi:
                best = max(best, abs(t.coefficient(k, m)))
    return best

## Construction

# Recurrence table of the orthonormal polynomials of a discrete measure.
# Real supports use Lanczos (three-term, OP form); complex supports use Arnoldi
# and return a banded table with the detected bandwidth. Both fully
# reorthogonalize against every previous vector.
def tableFromMeasure(m, N, pad=DEFAULT_PAD):
    count = N + pad
    if m.size < count + 1:
        raise errors.RankError('Measure has {0} atoms but {1} orthonormal polynomials were requested'.format(m.size, count + 1))
    x = m.points
    root = np.sqrt(m.weights)
    basis = np.zeros((count + 1, m.size), dtype=x.dtype)
    basis[0] = root / np.linalg.norm(root)
    scale = max(1.0, float(np.max(np.abs(x))))
    if m.isReal:
        table = _lanczos(x, basis, count, scale)
        table = opTable(N, table[0], table[1])
    else:
        table = _arnoldi(x, basis, count, scale, N)
    gram = basis.conj() @ basis.T
    drift = float(np.max(np.abs(gram - np.eye(count + 1))))
    logging.debug('Orthonormality drift {0:.3e} for {1} polynomials'.format(drift, count + 1))
    if drift > ORTHONORMALITY_TOLERANCE:
        raise errors.OrthogonalizationDriftError('Orthonormality lost: max |<P_i,P_j> - delta| = {0:.3e}'.format(drift))
    return table

def _lanczos(x, basis, count, scale):
    a = np.zeros(count)
    b = np.zeros(count)
    for k in range(count):
        v = x * basis[k]
        b[k] = np.dot(v, basis[k])
        v -= b[k] * basis[k]
        if k > 0:
            v -= a[k - 1] * basis[k - 1]
        residual = np.zeros_like(v)
        for _ in range(2):
            correction = basis[:k + 1].T @ (basis[:k + 1] @ v)
            v -= correction
            residual += correction
        a[k] = np.linalg.norm(v)
        if not a[k] > BANDWIDTH_TOLERANCE * scale:
            raise errors.RankError('Measure supports only {0} orthonormal polynomials'.format(k + 1))
        if np.linalg.norm(residual) > ORTHONORMALITY_TOLERANCE * scale:
            raise errors.OrthogonalizationDriftError('Three-term residual {0:.3e} at degree {1}'.format(np.linalg.norm(residual), k + 1))
        basis[k + 1] = v / a[k]
    return a, b

def _arnoldi(x, basis, count, scale, N):
    coefficients = np.zeros((count, count + 1), dtype=complex)
    for k in range(count):
        v = x * basis[k]
        for _ in range(2):
            h = basis[:k + 1].conj() @ v
            v -= basis[:k + 1].T @ h
            coefficients[k, :k + 1] += h
        norm = np.linalg.norm(v)
        if not norm > BANDWIDTH_TOLERANCE * scale:
            raise errors.RankError('Measure supports only {0} orthonormal polynomials'.format(k + 1))
        coefficients[k, k + 1] = norm
        basis[k + 1] = v / norm
    q = 0
    for k in range(count):
        for m in range(k + 1):
            if abs(coefficients[k, m]) > BANDWIDTH_TOLERANCE * scale:
                q = max(q, k - m)
    entries = []
    for k in range(count):
        for j in range(-1, q + 1):
            if k - j >= 0:
                value = coefficients[k, k - j]
                if abs(value) <= BANDWIDTH_TOLERANCE * scale:
                    continue
                entries.append((k, j, complex(value) if value.imag != 0.0 else float(value.real)))
    logging.debug('Arnoldi table has lower bandwidth {0}'.format(q))
    return bandedTable(N, q, entries, size=count)

## Classical tables

def gueTable(N, pad=DEFAULT_PAD):
    k = np.arange(N + pad)
    return opTable(N, np.sqrt((k + 1.0) / N), np.zeros(N + pad))

def chebyshevTable(N, pad=DEFAULT_PAD):
    a = np.full(N + pad, 0.5)
    a[0] = 1.0 / math.sqrt(2.0)
    return opTable(N, a, np.zeros(N + pad))

# Orthonormal polynomials of the uniform measure on the circle are z^k, so
# z P_k = P_{k+1} and every other coefficient vanishes.
def circleTable(N, pad=DEFAULT_PAD):
    return bandedTable(N, 0, [(k, -1, 1.0) for k in range(N + pad)], size=N + pad)

class TableFactory:
    @staticmethod
    def __builderFromName():
        return {'gue': gueTable, 'chebyshev': chebyshevTable, 'circle': circleTable}
    @staticmethod
    def allTableNames():
        return TableFactory.__builderFromName().keys()
    @staticmethod
    def table(name, N, pad=DEFAULT_PAD):
        builders = TableFactory.__builderFromName()
        if name not in builders:
            raise errors.UnknownNameError('Unknown classical ensemble {0}, expected one of {1}'.format(name, sorted(builders.keys())))
        if N < 1:
            raise errors.ParameterError('Need N >= 1, got {0}'.format(N))
        return builders[name](N, pad)

def classicalTable(name, N, pad=DEFAULT_PAD):
    return TableFactory.table(name, N, pad)
