#!/usr/bin/env python3

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

import argparse
import itertools
import json
import logging
import math
import os
import sys
import time
from builtins import range

import numpy as np
import scipy.linalg as la
from scipy import special

import asymptotics
import charpoly
import ensemble
import measure
import polyens
import recurrence
import sampler
import utilities
import variance

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')

def dataConfig(name):
    return polyens.loadJson(os.path.join(DATA_DIR, name))

# Every path from k to m of length ell, one step at a time
def enumeratePaths(t, ell, k, m):
    if ell == 0:
        return 1.0 if k == m else 0.0
    total = 0.0
    for destination in range(max(0, k - t.q), k + 2):
        weight = t.coefficient(k, destination)
        if weight != 0.0:
            total += weight * enumeratePaths(t, ell - 1, destination, m)
    return total

# Gauss rule of an OP table: eigenvalues of its Jacobi matrix and the squared
# first components of the eigenvectors
def gaussRule(t, size):
    nodes, vectors = la.eigh_tridiagonal(t.b[:size], t.a[:size - 1])
    return nodes, vectors[0] ** 2

def catalan(m):
    return special.comb(2 * m, m, exact=True) // (m + 1)

def semicircleMoment(ell):
    return 0.0 if ell % 2 else float(catalan(ell // 2))

def _tv(p, q):
    return 0.5 * float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))

## Checks. Each returns (passed, details).

def checkPathSums(quick, seed, workers):
    rng = utilities.rngStream(seed, 1)
    worst = 0.0
    for trial in range(50):
        N = int(rng.integers(1, 9))
        ell = int(rng.integers(0, 5))
        size = N + 8
        t = recurrence.opTable(N, rng.uniform(0.5, 1.5, size), rng.uniform(-0.5, 0.5, size))
        nodes, weights = gaussRule(t, size)
        values = ensemble.recurrenceValues(t, 1.0, nodes, N + ell + 1)
        for k in range(N):
            for m in range(N):
                engine = recurrence.pathSumMoment(t, ell, k, m)
                literal = enumeratePaths(t, ell, k, m)
                quadrature = float(np.sum(weights * nodes ** ell * values[k] * values[m]))
                scale = max(1.0, abs(literal))
                worst = max(worst, abs(engine - literal) / scale, abs(engine - quadrature) / scale)
    return worst <= 1e-9, {'max_relative_error': worst}

def checkSemicircle(quick, seed, workers):
    t = polyens.tableFromConfig(dataConfig('gue.json'))
    errors200 = [abs(recurrence.meanMoment(t, ell) - semicircleMoment(ell)) for ell in range(7)]
    ratios = []
    for ell in (4, 6):
        gaps = [abs(recurrence.meanMoment(recurrence.gueTable(N), ell) - semicircleMoment(ell)) for N in (100, 200, 400)]
        ratios.extend([gaps[1] / gaps[0], gaps[2] / gaps[1]])
    profile = asymptotics.CoefficientProfile.fromConfig(dataConfig('gue-profile.json'))
    report = asymptotics.limitReport(t, profile, 6)
    passed = max(errors200) <= 0.05 and max(ratios) <= 0.6 and report[2][3] <= 0.02
    return passed, {'max_error': max(errors200), 'shrink_ratios': ratios, 'profile_gap_2': report[2][3]}

def checkArcsine(quick, seed, workers):
    t = polyens.tableFromConfig(dataConfig('chebyshev.json'))
    errors200 = [abs(recurrence.meanMoment(t, ell) - asymptotics.arcsineMoment(ell)) for ell in range(9)]
    profile = asymptotics.CoefficientProfile.fromConfig(dataConfig('chebyshev-profile.json'))
    report = asymptotics.limitReport(t, profile, 4)
    passed = max(errors200) <= 0.02 and report[4][3] <= 0.02
    return passed, {'max_error': max(errors200), 'profile_gap_4': report[4][3]}

def checkMomentGap(quick, seed, workers):
    details = {}
    passed = True
    for name in ('gue', 'chebyshev'):
        scaled = {}
        for N in (50, 100, 200):
            t = recurrence.classicalTable(name, N)
            zeroSet = charpoly.zeros(t, maxPower=4)
            for ell in range(1, 5):
                gap, _ = charpoly.momentGap(t, ell, zeroSet)
                if gap > 1e-12:
                    scaled.setdefault(ell, []).append(N * gap)
        for ell, values in scaled.items():
            spread = max(values) / min(values)
            details['{0}_ell{1}'.format(name, ell)] = spread
            passed = passed and spread <= 1.2
    return passed, details

def _pairLaw(e):
    m = e.measure
    law = {}
    for i, j in itertools.combinations(range(m.size), 2):
        law[(i, j)] = ensemble.jointDensity(e, [m.points[i], m.points[j]]) * m.weights[i] * m.weights[j]
    return law

def _empiricalPairs(e, count, seed, workers):
    cfg = sampler.SamplerConfig(rngSeed=seed, maxPointsCheck=True)
    counts = {}
    for configuration in sampler.sampleReplicas(e, count, cfg, workers):
        key = tuple(sorted(configuration.indices))
        counts[key] = counts.get(key, 0) + 1
    return counts

def checkSamplerExactness(quick, seed, workers):
    count = 40000 if quick else 100000
    atoms = measure.ReferenceMeasure([-1.5, -0.5, 0.5, 1.5], [0.1, 0.4, 0.3, 0.2])
    opEnsemble = ensemble.opEnsemble(atoms, 2, pad=1)
    tilted = polyens.ensembleFromConfig(dataConfig('tilted.json'), utilities.rngStream(seed, 2))
    details = {}
    passed = True
    for label, e in (('op', opEnsemble), ('tilted', tilted)):
        law = _pairLaw(e)
        counts = _empiricalPairs(e, count, seed, workers)
        exact = [law[key] for key in sorted(law)]
        empirical = [counts.get(key, 0) / float(count) for key in sorted(law)]
        details[label + '_total_mass'] = sum(exact)
        details[label + '_tv'] = _tv(exact, empirical)
        passed = passed and abs(sum(exact) - 1.0) <= 1e-8 and details[label + '_tv'] <= 0.02
    # Both conditional schemes on the same prefixes
    worst = 0.0
    e = ensemble.classicalEnsemble('chebyshev', 6, nNodes=32)
    for prefixSize in range(6):
        prefix = list(e.measure.points[[3 * i + 1 for i in range(prefixSize)]])
        hkpv = sampler.conditionalState(e, sampler.SamplerConfig(mode='hkpv'), prefix)
        schur = sampler.conditionalState(e, sampler.SamplerConfig(mode='schur'), prefix)
        worst = max(worst, float(np.max(np.abs(hkpv.densities() - schur.densities()))))
        total = float(np.sum(schur.densities() * e.measure.weights))
        passed = passed and abs(total - 1.0) <= 1e-8
    details['hkpv_schur_difference'] = worst
    return passed and worst <= 1e-10, details

def _gueStatistic(N, f, count, seed, workers):
    draw = lambda rng: sampler.sampleMatrixModel('gue', N, rng)
    return variance.monteCarloVariance(draw, f, count, seed, workers)[0]

def checkExactVariance(quick, seed, workers):
    exact = [variance.variancePower(recurrence.gueTable(N), 1) for N in (1, 10, 50, 200)]
    t = recurrence.gueTable(50)
    lipschitz = variance.lipschitzVarianceBound(t.coefficient(49, 50), 1.0)
    estimates = _gueStatistic(50, lambda x: x, 2000 if quick else 10000, seed, workers)
    passed = max(abs(v - 1.0) for v in exact) <= 1e-12 and exact[2] <= lipschitz + 1e-12
    passed = passed and abs(estimates.variance - 1.0) <= 3.0 * estimates.errors[1]
    return passed, {'exact': exact, 'lipschitz_bound': lipschitz, 'monte_carlo': estimates.variance, 'stderr': estimates.errors[1]}

# Matrix model draws of GUE at N=50, shared by the covariance and Lipschitz
# checks
_gueDraws = {}
def _gueConfigurations(seed, workers):
    if seed not in _gueDraws:
        _gueDraws[seed] = sampler.runReplicas(lambda rng: sampler.sampleMatrixModel('gue', 50, rng), 10000, seed, workers)
    return _gueDraws[seed]

def checkCovariance(quick, seed, workers):
    configurations = _gueConfigurations(seed, workers)
    exact = variance.covariancePower(recurrence.gueTable(50), 1, 2)
    estimate, error = variance.covarianceEstimate(variance.linearStatistics(configurations, lambda x: x),
                                                  variance.linearStatistics(configurations, lambda x: x ** 2))
    passed = abs(estimate - exact) <= 3.0 * error
    return passed, {'exact': exact, 'monte_carlo': estimate, 'stderr': error}

def checkLipschitzBound(quick, seed, workers):
    t = recurrence.gueTable(50)
    bound = variance.lipschitzVarianceBound(abs(t.coefficient(49, 50)), 1.0)
    estimates = variance.cumulants(variance.linearStatistics(_gueConfigurations(seed, workers), np.sin))
    passed = estimates.variance <= bound + 3.0 * estimates.errors[1]
    return passed, {'bound': bound, 'monte_carlo': estimates.variance, 'stderr': estimates.errors[1]}

# The chain-rule sampler on the discretized GUE against the exact variance
def checkChainSampler(quick, seed, workers):
    e = ensemble.classicalEnsemble('gue', 10)
    cfg = sampler.SamplerConfig(rngSeed=seed)
    draw = lambda rng: sampler.sample(e, cfg, rng)
    estimates, _ = variance.monteCarloVariance(draw, lambda x: x ** 2, 2000 if quick else 10000, seed, workers)
    exact = variance.variancePower(e.table, 2)
    passed = abs(estimates.variance - exact) <= 3.0 * estimates.errors[1]
    return passed, {'exact': exact, 'monte_carlo': estimates.variance, 'stderr': estimates.errors[1]}

def checkLimitingQ(quick, seed, workers):
    e = polyens.ensembleFromConfig(dataConfig('chebyshev.json'))
    mixed = variance.empiricalQMoment(e, 1, 1)
    mass = variance.empiricalQMoment(e, 0, 0)
    limit = variance.limitingQMoment(variance.BivariateLimit(0.5), 1, 1)
    passed = abs(mixed - limit) <= 0.05 and abs(limit + 0.25) <= 1e-12 and abs(mass - 1.0) <= 1e-8
    return passed, {'empirical_11': mixed, 'limit_11': limit, 'empirical_00': mass}

# The Monte Carlo run of sum x_i^2 at N=100 is shared by two checks
_squareStatistic = {}
def _squareEstimates(seed, workers):
    if seed not in _squareStatistic:
        _squareStatistic[seed] = _gueStatistic(100, lambda x: x ** 2, 10000, seed, workers)
    return _squareStatistic[seed]

def checkLimitingVariance(quick, seed, workers):
    L = variance.BivariateLimit(1.0)
    linear = variance.limitingVariance(lambda x: x, L)
    square = variance.limitingVariance(lambda x: x ** 2, L)
    estimates = _squareEstimates(seed, workers)
    exact = variance.variancePower(recurrence.gueTable(100), 2)
    passed = abs(linear - 1.0) <= 1e-3 and abs(estimates.variance - square) <= 0.1 * square
    return passed, {'limit_x': linear, 'limit_x2': square, 'exact_x2': exact, 'monte_carlo_x2': estimates.variance}

def checkCentralLimit(quick, seed, workers):
    estimates = _squareEstimates(seed, workers)
    passed = abs(estimates.skewness) <= 0.1 and abs(estimates.excessKurtosis) <= 0.2
    return passed, {'skewness': estimates.skewness, 'excess_kurtosis': estimates.excessKurtosis}

def checkLogPotential(quick, seed, workers):
    e = ensemble.classicalEnsemble('chebyshev', 100)
    zeroSet = charpoly.zeros(e.table)
    discrepancy = charpoly.balayageDiscrepancy(e, zeroSet, radius=5.0)
    circle = charpoly.zeros(polyens.tableFromConfig(dataConfig('circle.json')))
    passed = discrepancy <= 0.02 and bool(np.all(circle.zeros == 0.0))
    return passed, {'max_discrepancy': discrepancy, 'circle_zero_max': float(np.max(np.abs(circle.zeros)))}

def checkContraction(quick, seed, workers):
    count = 40000 if quick else 100000
    atoms = measure.ReferenceMeasure([-1.0, 0.0, 1.0, 2.0], [0.25, 0.25, 0.25, 0.25])
    basis = ensemble.opEnsemble(atoms, 2, pad=1).pValues
    spectral = [(0.7, basis[0], basis[0]), (0.4, basis[1], basis[1])]
    cfg = sampler.SamplerConfig(rngSeed=seed)
    def draw(rng):
        return sampler.sample(sampler.thinContraction(atoms, spectral, rng), cfg, rng).indices
    hits = np.zeros(atoms.size)
    for indices in sampler.runReplicas(draw, count, seed, workers):
        hits[indices] += 1.0
    intensity = sampler.contractionDiagonal(spectral) * atoms.weights
    tv = _tv(intensity / np.sum(intensity), hits / np.sum(hits))
    meanCount = float(np.sum(hits)) / count
    passed = tv <= 0.02 and abs(meanCount - 1.1) <= 0.02
    return passed, {'tv': tv, 'mean_count': meanCount}

CHECKS = [
    ('path-sums', checkPathSums),
    ('semicircle', checkSemicircle),
    ('arcsine', checkArcsine),
    ('moment-gap', checkMomentGap),
    ('sampler-exactness', checkSamplerExactness),
    ('exact-variance', checkExactVariance),
    ('covariance', checkCovariance),
    ('lipschitz-bound', checkLipschitzBound),
    ('chain-sampler', checkChainSampler),
    ('limiting-q', checkLimitingQ),
    ('limiting-variance', checkLimitingVariance),
    ('central-limit', checkCentralLimit),
    ('log-potential', checkLogPotential),
    ('contraction', checkContraction)
]

def allCheckNames():
    return [name for name, _ in CHECKS]

# Runs the named checks (all by default) and returns one record per check
def runChecks(quick=False, seed=utilities.DEFAULT_SEED, workers=None, names=None):
    records = []
    for name, check in CHECKS:
        if names is not None and name not in names:
            continue
        start = time.time()
        try:
            passed, details = check(quick, seed, workers)
            error = None
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception as err:
            logging.exception('Check {0} raised'.format(name))
            passed, details, error = False, {}, '{0}: {1}'.format(type(err).__name__, err)
        record = {'name': name, 'passed': bool(passed), 'details': _jsonable(details), 'seconds': round(time.time() - start, 3)}
        if error:
            record['error'] = error
        logging.info('{0} {1} in {2:.1f}s'.format('PASS' if passed else 'FAIL', name, record['seconds']))
        records.append(record)
    return records

def _jsonable(value):
    if isinstance(value, dict):
        return dict((key, _jsonable(item)) for key, item in value.items())
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, (np.floating, float)):
        return None if math.isnan(value) else float(value)
    if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
        return int(value)
    return value

if __name__=='__main__':

    parser = argparse.ArgumentParser(description='Run the PolyEns acceptance checks')
    parser.add_argument('--quick', action='store_true', help='Fewer replicas for the sampler checks')
    parser.add_argument('--seed', type=int, default=utilities.DEFAULT_SEED, metavar='S', help='Seed of the random streams')
    parser.add_argument('--workers', type=int, default=None, metavar='n', help='Worker threads, capped by POLYENS_THREADS')
    parser.add_argument('--only', nargs='+', default=None, choices=allCheckNames(), metavar='check', help='Run only these checks')
    args = parser.parse_args()

    logging.basicConfig(level=logging.INFO, format='%(asctime)s %(message)s')
    logging.info('Version {0}'.format(utilities.version()))

    records = runChecks(args.quick, args.seed, args.workers, args.only)
    passed = all(record['passed'] for record in records)
    print(json.dumps({'passed': passed, 'checks': records}, indent=2, sort_keys=True))
    sys.exit(0 if passed else 3)
