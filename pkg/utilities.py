#!/usr/bin/env python

import hashlib
import json
import os
from builtins import range
from io import open

import numpy as np

DEFAULT_SEED = 20181
DEFAULT_THREADS = 4

# Split a list into 'numParts' contiguous chunks whose sizes differ by at most
# one. Empty chunks are allowed when there are fewer items than parts.
def splitList(fullList, numParts):
    if numParts < 1:
        raise ValueError('Cannot split into {0} parts'.format(numParts))
    ret = []
    n = len(fullList)
    for part in range(numParts):
        ret.append([fullList[i] for i in range(part * n // numParts, (part+1) * n // numParts)])
    return ret

# Counter-based generator for replica 'replica' of a run seeded with 'seed'.
# The stream only depends on (seed, replica): Philox keyed by the SeedSequence
# with spawn key (replica,), so replicas can be generated in any order.
def rngStream(seed, replica=0):
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(replica),))
    return np.random.Generator(np.random.Philox(sequence))

# Number of worker threads, capped by POLYENS_THREADS
def threadCount(requested=None):
    count = DEFAULT_THREADS if requested is None else int(requested)
    if 'POLYENS_THREADS' in os.environ:
        count = min(count, int(os.environ['POLYENS_THREADS']))
    return max(1, count)

# Stable hash of a JSON-able configuration
def configHash(config):
    canonical = json.dumps(config, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]

def version():
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'version.txt')
    with open(path) as vFile:
        return vFile.readline().strip()
