"""Seeded generators for random tower morphisms."""

import numpy as np

from . import linalg
from .biaffine import BiaffineMor
from .cstarsplit import Partition
from .lotimes import _make
from .rigstruct import dim, obj_of_dim


def rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def gaussian(gen, rows, cols):
    return gen.standard_normal((rows, cols)) + 1j * gen.standard_normal((rows, cols))


def with_norm(gen, rows, cols, norm):
    """Gaussian matrix rescaled to the given operator norm."""
    m = gaussian(gen, rows, cols)
    if rows == 0 or cols == 0:
        return m
    return np.ascontiguousarray(m * (norm / np.linalg.norm(m, 2)))


def contraction(gen, rows, cols, max_norm=0.999):
    return with_norm(gen, rows, cols, gen.uniform(0.0, max_norm))


def unitary(gen, n):
    """Haar unitary via QR with the diagonal phase fix."""
    q, r = np.linalg.qr(gaussian(gen, n, n))
    d = np.diag(r)
    return np.ascontiguousarray(q * (d / np.abs(d)))


def isometry(gen, rows, cols):
    return np.ascontiguousarray(unitary(gen, rows)[:, :cols])


def biaffine_mor(gen, max_dim=3, dom=None):
    """Random ``[H, u, G]: A -> B`` with every object of dimension at most ``max_dim``."""
    a, b = (int(x) for x in gen.integers(1, max_dim + 1, size=2))
    if dom is not None:
        a = dim(dom)
    h = int(gen.integers(0, max_dim + 1))
    g = a + h - b
    if g < 0:
        h, g = h - g, 0
    n = a + h
    dom = dom if dom is not None else obj_of_dim(a)
    return BiaffineMor(dom, obj_of_dim(b), obj_of_dim(h), obj_of_dim(g), unitary(gen, n))


def dilation_mor(gen, max_dim=3, max_anc=3, isometric=False, dom=None):
    """Random ``[f, G]: A -> B`` with ``f`` a contraction (or isometry) into ``B ⊗ G``."""
    a, b, g = (int(x) for x in gen.integers(1, (max_dim + 1, max_dim + 1, max_anc + 1)))
    if dom is not None:
        a = dim(dom)
    if isometric and b * g < a:
        g = -(-a // b)
    rows = b * g
    mat = isometry(gen, rows, a) if isometric else contraction(gen, rows, a)
    dom = dom if dom is not None else obj_of_dim(a)
    return _make(dom, obj_of_dim(b), obj_of_dim(g), mat)


def partition(gen, max_total=8):
    blocks = []
    remaining = int(gen.integers(1, max_total + 1))
    while remaining:
        b = int(gen.integers(1, remaining + 1))
        blocks.append(b)
        remaining -= b
    return Partition(tuple(blocks))


def density(gen, n):
    m = gaussian(gen, n, n)
    rho = m @ linalg.dagger(m)
    return rho / np.trace(rho).real
