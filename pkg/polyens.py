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
import copy
import json
import logging
import os
import sys
from builtins import range
from io import open

import jsonschema
import numpy as np

import asymptotics
import charpoly
import ensemble
import errors
import measure
import recurrence
import sampler
import utilities
import variance

## Config schemas

_NUMBER = {'type': 'number'}
_POINT = {'oneOf': [_NUMBER, {'type': 'array', 'items': _NUMBER, 'minItems': 2, 'maxItems': 2}]}

PROFILE_FUNCTION_SCHEMA = {
    'oneOf': [
        _NUMBER,
        {'type': 'object', 'required': ['poly'], 'properties': {'poly': {'type': 'array', 'items': _NUMBER, 'minItems': 1}}},
        {'type': 'object', 'required': ['power'], 'properties': {'power': _NUMBER, 'scale': _NUMBER}},
        {'type': 'object', 'required': ['table'], 'properties': {'table': {
            'type': 'object', 'required': ['s', 'values'],
            'properties': {'s': {'type': 'array', 'items': _NUMBER}, 'values': {'type': 'array', 'items': _NUMBER}}}}}
    ]
}

PROFILE_SCHEMA = {
    'type': 'object',
    'oneOf': [
        {'required': ['a'], 'properties': {'form': {'const': 'op'}, 'a': PROFILE_FUNCTION_SCHEMA, 'b': PROFILE_FUNCTION_SCHEMA}},
        {'required': ['form', 'q', 'a'], 'properties': {
            'form': {'const': 'banded'},
            'q': {'type': 'integer', 'minimum': 0},
            'a': {'type': 'object', 'patternProperties': {'^-?[0-9]+$': PROFILE_FUNCTION_SCHEMA}, 'additionalProperties': False}}}
    ]
}

MEASURE_SCHEMA = {
    'type': 'object',
    'oneOf': [
        {'required': ['kind', 'name'], 'properties': {
            'kind': {'const': 'named'},
            'name': {'enum': sorted(measure.MeasureFactory.allMeasureNames())}}},
        {'required': ['points'], 'properties': {
            'kind': {'enum': ['atoms', 'grid']},
            'points': {'type': 'array', 'items': _POINT, 'minItems': 1},
            'weights': {'type': 'array', 'items': _NUMBER}}}
    ]
}

TABLE_SCHEMA = {
    'type': 'object',
    'required': ['form'],
    'oneOf': [
        {'required': ['a', 'b'], 'properties': {
            'form': {'const': 'op'},
            'a': {'type': 'array', 'items': _NUMBER}, 'b': {'type': 'array', 'items': _NUMBER}}},
        {'required': ['q', 'c'], 'properties': {
            'form': {'const': 'banded'},
            'q': {'type': 'integer', 'minimum': 0},
            'c': {'type': 'array', 'items': {'type': 'array', 'minItems': 3, 'maxItems': 3}}}}
    ]
}

ENSEMBLE_SCHEMA = {
    'definitions': {
        'ensemble': {
            'type': 'object',
            'properties': {
                'N': {'type': 'integer', 'minimum': 1},
                'nodes': {'type': 'integer', 'minimum': 2},
                'pad': {'type': 'integer', 'minimum': 1},
                'classical': {'enum': sorted(recurrence.TableFactory.allTableNames())},
                'measure': MEASURE_SCHEMA,
                'table': TABLE_SCHEMA,
                'profile': PROFILE_SCHEMA,
                'base': {'$ref': '#/definitions/ensemble'},
                'tilt': {'type': 'array', 'items': {'type': 'array', 'items': _NUMBER}},
                'validate': {'type': 'boolean'}
            },
            'oneOf': [
                {'required': ['classical', 'N']},
                {'required': ['measure'], 'not': {'anyOf': [{'required': ['classical']}, {'required': ['base']}]}},
                {'required': ['profile', 'N'], 'not': {'anyOf': [{'required': ['classical']}, {'required': ['base']}, {'required': ['measure']}]}},
                {'required': ['base', 'tilt']}
            ]
        }
    },
    '$ref': '#/definitions/ensemble'
}

def validate(config, schema, what):
    try:
        jsonschema.validate(instance=config, schema=schema)
    except jsonschema.ValidationError as err:
        path = '/'.join(str(part) for part in err.absolute_path)
        raise errors.ConfigError('Invalid {0} config at /{1}: {2}'.format(what, path, err.message))

def loadJson(path):
    with open(path, 'r', encoding='utf-8') as file:
        try:
            return json.load(file)
        except ValueError as err:
            raise errors.ConfigError('{0} is not valid JSON: {1}'.format(path, err))

# '--ensemble' is either a JSON file or a classical name used with --N
def ensembleConfig(args):
    if os.path.exists(args.ensemble):
        config = loadJson(args.ensemble)
        if args.N is not None and 'base' not in config:
            config['N'] = args.N
    elif args.ensemble in recurrence.TableFactory.allTableNames():
        if args.N is None:
            raise errors.ConfigError('Classical ensemble {0} needs --N'.format(args.ensemble))
        config = {'classical': args.ensemble, 'N': args.N}
    else:
        raise errors.ConfigError('{0} is neither a config file nor one of {1}'.format(args.ensemble, sorted(recurrence.TableFactory.allTableNames())))
    if args.nodes is not None:
        config['nodes'] = args.nodes
    if args.pad is not None:
        config['pad'] = args.pad
    validate(config, ENSEMBLE_SCHEMA, 'ensemble')
    return config

## Building models

def _size(config):
    if 'N' in config:
        return config['N']
    if 'table' in config and 'N' in config['table']:
        return config['table']['N']
    raise errors.ConfigError('Ensemble config needs N')

# Recurrence table of an ensemble config, or None for tilted ensembles whose
# table does not describe (P, Q)
def tableFromConfig(config):
    pad = config.get('pad', recurrence.DEFAULT_PAD)
    if 'base' in config:
        return None
    N = _size(config)
    if 'classical' in config:
        return recurrence.classicalTable(config['classical'], N, pad)
    if 'table' in config:
        try:
            return recurrence.tableFromConfig(config['table'], N)
        except (errors.ParameterError, errors.DegenerateRecurrenceError, errors.OutOfRangeError) as err:
            raise errors.ConfigError('Invalid table config: {0}'.format(err))
    if 'profile' in config:
        return asymptotics.tableFromProfile(asymptotics.CoefficientProfile.fromConfig(config['profile']), N, pad)
    referenceMeasure = measure.measureFromConfig(config['measure'], N)
    return recurrence.tableFromMeasure(referenceMeasure, N, pad)

def ensembleFromConfig(config, rng=None):
    if 'base' in config:
        base = ensembleFromConfig(config['base'], rng)
        return ensemble.tiltNonorthogonal(base, config['tilt'], validate=config.get('validate', True), rng=rng)
    N = _size(config)
    nodes = config.get('nodes', measure.DEFAULT_NODES)
    if 'classical' in config:
        return ensemble.classicalEnsemble(config['classical'], N, nodes, config.get('pad', recurrence.DEFAULT_PAD))
    if 'measure' not in config:
        raise errors.ConfigError('Sampling a profile ensemble needs a measure')
    referenceMeasure = measure.measureFromConfig(config['measure'], N)
    return ensemble.PolynomialEnsemble(referenceMeasure, N, table=tableFromConfig(config))

def _requireTable(table, what):
    if table is None:
        raise errors.UnsupportedError('{0} needs a recurrence table, tilted ensembles have none'.format(what))
    return table

## Output

def _number(value):
    value = complex(value)
    if value.imag == 0.0:
        return '{0:.17g}'.format(value.real)
    return '{0:.17g}{1:+.17g}j'.format(value.real, value.imag)

def _header(runConfig, seed):
    return ['# polyens {0}'.format(utilities.version()),
            '# config {0}'.format(utilities.configHash(runConfig)),
            '# seed {0}'.format(seed)]

def csvReport(runConfig, seed, columns, rows):
    lines = _header(runConfig, seed)
    lines.append(','.join(columns))
    for row in rows:
        lines.append(','.join(_number(v) if not isinstance(v, str) else v for v in row))
    return '\n'.join(lines) + '\n'

def jsonReport(runConfig, seed, body):
    report = {'version': utilities.version(), 'config_hash': utilities.configHash(runConfig), 'seed': seed}
    report.update(body)
    return json.dumps(report, indent=2, sort_keys=True) + '\n'

# Every result goes through this single writer
def writeOutput(text, path):
    if path is None or path == '-':
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, 'w', encoding='utf-8') as file:
        file.write(u'{0}'.format(text))
    logging.info('Wrote {0}'.format(path))

## Subcommands

def runSample(args, config, runConfig):
    cfg = sampler.SamplerConfig(mode=args.mode, rngSeed=args.seed)
    e = ensembleFromConfig(config, utilities.rngStream(args.seed, args.replicas))
    configurations = sampler.sampleReplicas(e, args.replicas, cfg, args.workers)
    columns = ['replica'] + ['x{0}'.format(i) for i in range(e.N)] + ['log_density']
    rows = [[r] + list(c.points) + [c.logDensity] for r, c in enumerate(configurations)]
    return csvReport(runConfig, args.seed, columns, rows), 0

def runMoments(args, config, runConfig):
    table = tableFromConfig(config)
    e = None if table is not None else ensembleFromConfig(config, utilities.rngStream(args.seed))
    rows = []
    for ell in range(args.lmax + 1):
        value = recurrence.meanMoment(table, ell) if table is not None else ensemble.meanMomentByQuadrature(e, ell)
        rows.append([ell, value])
    return csvReport(runConfig, args.seed, ['ell', 'mean_moment'], rows), 0

def runZeros(args, config, runConfig):
    table = tableFromConfig(config)
    if table is not None:
        zeroSet = charpoly.zeros(table)
    else:
        zeroSet = charpoly.zerosOfMatrix(ensemble.sectionMatrix(ensembleFromConfig(config, utilities.rngStream(args.seed))))
    values = sorted(np.asarray(zeroSet.zeros, dtype=complex).tolist(), key=lambda z: (z.real, z.imag))
    rows = [[i, z.real, z.imag] for i, z in enumerate(values)]
    return csvReport(runConfig, args.seed, ['index', 're', 'im'], rows), 0

def runGap(args, config, runConfig):
    table = _requireTable(tableFromConfig(config), 'gap')
    zeroSet = charpoly.zeros(table, maxPower=args.lmax)
    rows = []
    for ell in range(1, args.lmax + 1):
        gap, bound = charpoly.momentGap(table, ell, zeroSet)
        rows.append([ell, gap, bound])
    return csvReport(runConfig, args.seed, ['ell', 'gap', 'bound'], rows), 0

def _monteCarlo(args, config, f):
    if config.get('classical') == 'gue':
        draw = lambda rng: sampler.sampleMatrixModel('gue', config['N'], rng)
    else:
        e = ensembleFromConfig(config, utilities.rngStream(args.seed, args.mc))
        cfg = sampler.SamplerConfig(rngSeed=args.seed)
        draw = lambda rng: sampler.sample(e, cfg, rng)
    estimates, _ = variance.monteCarloVariance(draw, f, args.mc, args.seed, args.workers)
    return estimates

def runVariance(args, config, runConfig):
    table = _requireTable(tableFromConfig(config), 'variance')
    body = {}
    if args.poly:
        coefficients = args.poly
        f = lambda x: np.polynomial.polynomial.polyval(x, coefficients)
        body['coefficients'] = coefficients
        body['exact'] = variance.polynomialVariance(table, coefficients)
        fprime = lambda x: np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(coefficients))
    else:
        ell = args.power
        f = lambda x: x ** ell
        fprime = lambda x: ell * x ** (ell - 1)
        body['power'] = ell
        body['exact'] = variance.variancePower(table, ell)
        body['bound'] = variance.varianceUpperBound(table, ell, body['exact'])
        if ell == 1:
            body['lipschitz_bound'] = variance.lipschitzVarianceBound(abs(table.coefficient(table.N - 1, table.N)), 1.0)
    if table.form == 'op':
        body['limiting'] = variance.limitingVariance(f, variance.limitFromTable(table), fprime)
    if args.mc:
        estimates = _monteCarlo(args, config, f)
        body['monte_carlo'] = {'variance': estimates.variance, 'stderr': estimates.errors[1],
                               'skewness': estimates.skewness, 'excess_kurtosis': estimates.excessKurtosis,
                               'replicas': estimates.count}
    return jsonReport(runConfig, args.seed, body), 0

def runLimit(args, config, runConfig):
    table = _requireTable(tableFromConfig(config), 'limit')
    profileConfig = loadJson(args.profile)
    validate(profileConfig, PROFILE_SCHEMA, 'profile')
    runConfig['profile'] = profileConfig
    profile = asymptotics.CoefficientProfile.fromConfig(profileConfig)
    rows = asymptotics.limitReport(table, profile, args.lmax)
    return csvReport(runConfig, args.seed, ['ell', 'finite', 'limit', 'gap'], rows), 0

def runVerify(args, config, runConfig):
    import verify
    records = verify.runChecks(quick=args.quick, seed=args.seed, workers=args.workers)
    passed = all(record['passed'] for record in records)
    text = jsonReport(runConfig, args.seed, {'passed': passed, 'checks': records})
    return text, 0 if passed else 3

COMMANDS = {
    'sample': runSample,
    'moments': runMoments,
    'zeros': runZeros,
    'gap': runGap,
    'variance': runVariance,
    'limit': runLimit,
    'verify': runVerify
}

## Arguments

class ArgumentParser(argparse.ArgumentParser):
    # Usage errors exit with status 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, '{0}: error: {1}\n'.format(self.prog, message))

def argumentParser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=utilities.DEFAULT_SEED, metavar='S', help='Seed of the random streams')
    common.add_argument('--out', type=str, default=None, metavar='path', help='Output file, standard output if omitted')
    common.add_argument('--workers', type=int, default=None, metavar='n', help='Worker threads, capped by POLYENS_THREADS')
    common.add_argument('--log-file', type=str, default=None, metavar='path', help='Log file, standard error if omitted')
    common.add_argument('-v', '--verbose', action='store_true', help='Log numerical diagnostics')

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument('--ensemble', type=str, required=True, metavar='config', help='Ensemble config file or one of {0}'.format(', '.join(sorted(recurrence.TableFactory.allTableNames()))))
    model.add_argument('--N', type=int, default=None, metavar='N', help='Number of points')
    model.add_argument('--nodes', type=int, default=None, metavar='n', help='Atoms of the discretized reference measure')
    model.add_argument('--pad', type=int, default=None, metavar='n', help='Extra recurrence rows beyond N')

    parser = ArgumentParser(description='Polynomial ensembles: recurrence coefficients, exact sampling and asymptotics')
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    sample = subparsers.add_parser('sample', parents=[common, model], help='Draw exact samples')
    sample.add_argument('--replicas', type=int, default=1, metavar='R', help='Number of independent configurations')
    sample.add_argument('--mode', type=str, default='auto', choices=sorted(sampler.SamplerFactory.allModeNames()), help='Conditional update scheme')

    moments = subparsers.add_parser('moments', parents=[common, model], help='Mean moments of the empirical measure')
    moments.add_argument('--lmax', type=int, default=6, metavar='L', help='Largest moment order')

    subparsers.add_parser('zeros', parents=[common, model], help='Zeros of the average characteristic polynomial')

    gap = subparsers.add_parser('gap', parents=[common, model], help='Gap between mean moments and zero power sums')
    gap.add_argument('--lmax', type=int, default=4, metavar='L', help='Largest moment order')

    var = subparsers.add_parser('variance', parents=[common, model], help='Variance of a polynomial linear statistic')
    var.add_argument('--power', type=int, default=1, metavar='L', help='Statistic sum x_i^L')
    var.add_argument('--poly', type=float, nargs='+', default=None, metavar='c', help='Statistic sum f(x_i) with f = c0 + c1 x + ...')
    var.add_argument('--mc', type=int, default=0, metavar='R', help='Also estimate by Monte Carlo over R replicas')

    limit = subparsers.add_parser('limit', parents=[common, model], help='Compare mean moments with a limiting profile')
    limit.add_argument('--profile', type=str, required=True, metavar='profile', help='Coefficient profile config')
    limit.add_argument('--lmax', type=int, default=8, metavar='L', help='Largest moment order')

    verify = subparsers.add_parser('verify', parents=[common], help='Run the acceptance checks')
    verify.add_argument('--quick', action='store_true', help='Fewer replicas')
    return parser

# Run one parsed command line and return the exit status
def run(args):
    try:
        config = ensembleConfig(args) if args.command != 'verify' else {}
        runConfig = dict((key, value) for key, value in vars(args).items()
                         if key not in ('out', 'log_file', 'verbose', 'workers', 'ensemble', 'N', 'nodes', 'pad'))
        runConfig['ensemble'] = copy.deepcopy(config)
        text, status = COMMANDS[args.command](args, config, runConfig)
        writeOutput(text, args.out)
        return status
    except (KeyboardInterrupt, SystemExit):
        raise
    except errors.PolyEnsError as err:
        logging.error('{0}: {1}'.format(type(err).__name__, err))
        return err.exitCode
    except IOError as err:
        logging.error('I/O error: {0}'.format(err))
        return 1

if __name__=='__main__':
    args = argumentParser().parse_args()

    logging.basicConfig(
        filename=args.log_file,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(message)s'
    )
    logging.info('Version {0}'.format(utilities.version()))

    sys.exit(run(args))
