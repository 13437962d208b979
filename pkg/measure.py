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
from scipy import special

import errors

DEFAULT_NODES = 1024
NEGATIVITY_TOLERANCE = 1e-9

# A measure represented by finitely many atoms. Continuous measures are stored
# as quadrature discretizations, so 'kind' records where the atoms came from:
#  'atoms' - user supplied point masses
#  'grid'  - quadrature nodes and weights of a density
#  'named' - one of the classical measures of MeasureFactory
# Weights are not normalized.
class ReferenceMeasure:
    KINDS = ('atoms', 'grid', 'named')

    def __init__(self, points, weights, kind='atoms', name=None, params=None):
        if kind not in ReferenceMeasure.KINDS:
            raise errors.InvalidMeasureError('Unknown measure kind {0}'.format(kind))
        points = np.array(points)
        weights = np.array(weights, dtype=float)
        if points.ndim != 1 or points.shape != weights.shape or len(points) == 0:
            raise errors.InvalidMeasureError('Need matching non-empty point and weight lists, got {0} and {1}'.format(points.shape, weights.shape))
        if not np.all(np.isfinite(points)):
            raise errors.InvalidMeasureError('Atom points must be finite')
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0.0):
            bad = int(np.argmin(np.where(np.isfinite(weights), weights, -np.inf)))
            raise errors.InvalidMeasureError('Atom weights must be strictly positive, atom {0} has weight {1}'.format(bad, weights[bad]))
        if np.iscomplexobj(points) and np.all(points.imag == 0.0):
            points = points.real
        if not np.iscomplexobj(points):
            points = points.astype(float)
        self.__points = points
        self.__weights = weights
        self.__kind = kind
        self.__name = name
        self.__params = dict(params) if params else {}
        self.__index = {}
        for i, point in enumerate(points):
            key = complex(point)
            if key in self.__index:
                raise errors.InvalidMeasureError('Atoms must be distinct, {0} appears twice'.format(point))
            self.__index[key] = i
        self.__points.setflags(write=False)
        self.__weights.setflags(write=False)

    @property
    def points(self):
        return self.__points
    @property
    def weights(self):
        return self.__weights
    @property
    def kind(self):
        return self.__kind
    @property
    def name(self):
        return self.__name
    @property
    def params(self):
        return dict(self.__params)
    @property
    def size(self):
        return len(self.__points)
    @property
    def isReal(self):
        return not np.iscomplexobj(self.__points)

    def totalMass(self):
        return float(np.sum(self.__weights))

    # Index of the atom located exactly at 'point'
    def atomIndex(self, point):
        key = complex(point)
        if key not in self.__index:
            raise errors.UnsupportedPointError('{0} is not an atom of the measure'.format(point))
        return self.__index[key]

    def hasAtom(self, point):
        return complex(point) in self.__index

    # The image of the measure under x -> x + c
    def shifted(self, c):
        return ReferenceMeasure(self.__points + c, self.__weights, kind='atoms')

    def __repr__(self):
        label = self.__name if self.__name else self.__kind
        return 'ReferenceMeasure({0}, {1} atoms)'.format(label, self.size)

# Evaluate 'f' at every point. Vectorized functions are called once; anything
# else falls back to one call per point.
def evaluateAt(f, points):
    values = None
    try:
        with np.errstate(all='ignore'):
            values = np.asarray(f(points))
    except (KeyboardInterrupt, SystemExit):
        raise
    except Exception:
        values = None
    if values is not None and values.ndim == 0:
        values = np.full(points.shape, values[()])
    if values is None or values.shape != points.shape:
        values = np.array([f(point) for point in points])
    if values.dtype == object:
        values = values.astype(complex)
    finite = np.isfinite(values)
    if not np.all(finite):
        bad = points[int(np.argmin(finite))]
        raise errors.EvaluationError('Non-finite value at atom {0}'.format(bad), point=bad)
    return values

def _scalar(value):
    value = value[()] if isinstance(value, np.ndarray) else value
    if np.iscomplexobj(value):
        return complex(value)
    return float(value)

# Returns sum_i w_i f(x_i)
def integrate(f, m):
    return _scalar(np.sum(m.weights * evaluateAt(f, m.points)))

# <f, g> = integral of f times conj(g)
def innerProduct(f, g, m):
    fValues = evaluateAt(f, m.points)
    gValues = evaluateAt(g, m.points)
    return _scalar(np.sum(m.weights * fValues * np.conj(gValues)))

def moment(m, ell):
    return integrate(lambda x: x ** ell, m)

## Classical measures

# Arcsine (equilibrium) measure of [alpha, beta] at the Chebyshev-Gauss nodes,
# which integrate polynomials of degree < 2 nNodes exactly.
def equilibriumMeasure(alpha, beta, nNodes=DEFAULT_NODES):
    if not alpha < beta:
        raise errors.InvalidIntervalError('Need alpha < beta, got [{0}, {1}]'.format(alpha, beta))
    if nNodes < 2:
        raise errors.ParameterError('Need at least 2 nodes, got {0}'.format(nNodes))
    nodes, _ = chebyshev.chebgauss(nNodes)
    nodes = np.sort(nodes)
    points = 0.5 * (beta - alpha) * nodes + 0.5 * (alpha + beta)
    weights = np.full(nNodes, 1.0 / nNodes)
    return ReferenceMeasure(points, weights, kind='named', name='chebyshev-arcsine',
                            params={'alpha': alpha, 'beta': beta, 'nodes': nNodes})

# exp(-N x^2 / 2) dx at Gauss-Hermite nodes. Nodes whose weight underflows are
# dropped since atoms must carry positive mass.
def scaledHermiteMeasure(N, nNodes=DEFAULT_NODES):
    if N < 1:
        raise errors.ParameterError('Scaled Hermite measure needs N >= 1, got {0}'.format(N))
    t, w = special.roots_hermite(nNodes)
    scale = math.sqrt(2.0 / N)
    keep = w > np.finfo(float).tiny
    if not np.all(keep):
        logging.debug('Dropping {0} Gauss-Hermite nodes with negligible weight'.format(int(np.sum(~keep))))
    return ReferenceMeasure(t[keep] * scale, w[keep] * scale, kind='named', name='scaled-hermite',
                            params={'N': N, 'nodes': nNodes})

# Normalized arc length on the unit circle at the n-th roots of unity
def uniformCircleMeasure(nNodes=DEFAULT_NODES):
    if nNodes < 1:
        raise errors.ParameterError('Need at least one node, got {0}'.format(nNodes))
    points = np.exp(2j * np.pi * np.arange(nNodes) / nNodes)
    return ReferenceMeasure(points, np.full(nNodes, 1.0 / nNodes), kind='named', name='uniform-circle',
                            params={'nodes': nNodes})

class MeasureFactory:
    @staticmethod
    def __builderFromName():
        return {
            'chebyshev-arcsine': lambda p: equilibriumMeasure(p.get('alpha', -1.0), p.get('beta', 1.0), p.get('nodes', DEFAULT_NODES)),
            'scaled-hermite': lambda p: scaledHermiteMeasure(p['N'], p.get('nodes', DEFAULT_NODES)),
            'uniform-circle': lambda p: uniformCircleMeasure(p.get('nodes', DEFAULT_NODES))
        }
    @staticmethod
    def allMeasureNames():
        return MeasureFactory.__builderFromName().keys()
    @staticmethod
    def measure(name, params):
        builders = MeasureFactory.__builderFromName()
        if name not in builders:
            raise errors.UnknownNameError('Unknown measure {0}, expected one of {1}'.format(name, sorted(builders.keys())))
        try:
            return builders[name](params)
        except KeyError as err:
            raise errors.ConfigError('Measure {0} needs parameter {1}'.format(name, err))

# Points in JSON are numbers or [re, im] pairs
def _pointFromJson(value):
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return value

# Build a measure from its JSON description, e.g.
#  {"kind":"named","name":"chebyshev-arcsine","alpha":-1,"beta":1,"nodes":1024}
#  {"kind":"atoms","points":[...],"weights":[...]}
# Named measures may take N from the enclosing ensemble config.
def measureFromConfig(config, N=None):
    kind = config.get('kind', 'atoms')
    if kind == 'named':
        params = dict((key, value) for key, value in config.items() if key not in ('kind', 'name'))
        if N is not None and 'N' not in params:
            params['N'] = N
        return MeasureFactory.measure(config['name'], params)
    points = [_pointFromJson(p) for p in config['points']]
    weights = config.get('weights')
    if weights is None:
        weights = [1.0 / len(points)] * len(points)
    return ReferenceMeasure(points, weights, kind=kind)

def measureToConfig(m):
    if m.kind == 'named':
        config = {'kind': 'named', 'name': m.name}
        config.update(m.params)
        return config
    points = [[p.real, p.imag] if isinstance(p, complex) else p for p in m.points.tolist()]
    return {'kind': m.kind, 'points': points, 'weights': m.weights.tolist()}

## Sampling

# Index of an atom drawn with probability proportional to density * weight.
# Densities within -tolerance * max of zero are clamped.
def categoricalIndex(density, weights, rng, tolerance=NEGATIVITY_TOLERANCE):
    density = np.real(np.asarray(density))
    if density.shape != np.shape(weights):
        raise errors.ParameterError('Density has shape {0} but there are {1} atoms'.format(density.shape, len(weights)))
    top = np.max(density) if density.size else 0.0
    if not top > 0.0:
        raise errors.DegenerateDensityError('Density has no positive mass')
    lowest = int(np.argmin(density))
    if density[lowest] < -tolerance * top:
        raise errors.NegativityError('Density value {0} at atom {1} is below tolerance (max {2})'.format(density[lowest], lowest, top))
    mass = np.clip(density, 0.0, None) * weights
    cumulative = np.cumsum(mass)
    if not cumulative[-1] > 0.0:
        raise errors.DegenerateDensityError('Density has no positive mass')
    u = rng.random() * cumulative[-1]
    return min(int(np.searchsorted(cumulative, u, side='right')), len(cumulative) - 1)

def sampleCategorical(density, m, rng, tolerance=NEGATIVITY_TOLERANCE):
    return m.points[categoricalIndex(density, m.weights, rng, tolerance)]
