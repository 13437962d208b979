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

# Every error raised on purpose by PolyEns derives from PolyEnsError. The
# command line maps 'exitCode' straight to the process exit status.
class PolyEnsError(Exception):
    exitCode = 2

class ConfigError(PolyEnsError, ValueError):
    exitCode = 1

class EvaluationError(PolyEnsError, ValueError):
    def __init__(self, message, point=None):
        super(EvaluationError, self).__init__(message)
        self.point = point

class InvalidIntervalError(PolyEnsError, ValueError):
    pass

class InvalidMeasureError(PolyEnsError, ValueError):
    pass

class DegenerateDensityError(PolyEnsError, ValueError):
    pass

class NegativityError(PolyEnsError, ValueError):
    pass

class OutOfRangeError(PolyEnsError, IndexError):
    def __init__(self, message, index=None):
        super(OutOfRangeError, self).__init__(message)
        self.index = index

class RankError(PolyEnsError, ValueError):
    pass

class UnknownNameError(PolyEnsError, ValueError):
    pass

class DegenerateRecurrenceError(PolyEnsError, ValueError):
    pass

class UnsupportedPointError(PolyEnsError, ValueError):
    pass

class UnsupportedError(PolyEnsError, ValueError):
    pass

class KernelValidityError(PolyEnsError, ValueError):
    pass

class BiorthogonalityError(PolyEnsError, ValueError):
    pass

# Carries the configuration (prefix or tuple of points) that exposed the
# negative determinant.
class PositivityViolationError(PolyEnsError, ValueError):
    def __init__(self, message, witness=None):
        super(PositivityViolationError, self).__init__(message)
        self.witness = witness

class InvalidTiltError(PositivityViolationError):
    pass

class NumericalBreakdownError(PolyEnsError, ArithmeticError):
    pass

class OrthogonalizationDriftError(PolyEnsError, ArithmeticError):
    pass

class EigenSolverError(PolyEnsError, ArithmeticError):
    pass

class ParameterError(PolyEnsError, ValueError):
    pass

class SingularityError(PolyEnsError, ValueError):
    pass

# Raised when an inequality that always holds mathematically fails, which
# can only mean a bug.
class ImplementationInconsistencyError(PolyEnsError, AssertionError):
    pass

class TooFewReplicasError(PolyEnsError, ValueError):
    pass

class CombinatorialLimitError(PolyEnsError, ValueError):
    pass
