"""Objects of the skeletal rig category and their coherence isomorphisms.

An object is a shape tree over ``I``, ``O``, ``Dim(n)``, ``⊕`` and ``⊗``. Its
basis is laid out by offset concatenation for ``⊕`` and row-major pairing for
``⊗``; each structural isomorphism is the permutation matrix of the induced
index bijection.
"""

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ArityMismatch, DslSyntaxError


class Obj:
    """Base of the object shape tree."""

    def __add__(self, other):
        return Oplus(self, other)

    def __mul__(self, other):
        return Otimes(self, other)


@dataclass(frozen=True)
class UnitI(Obj):
    def __str__(self):
        return "I"


@dataclass(frozen=True)
class ZeroO(Obj):
    def __str__(self):
        return "O"


@dataclass(frozen=True)
class Dim(Obj):
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"Dim needs a natural number >= 1, got {self.n!r}")

    def __str__(self):
        return str(self.n)


@dataclass(frozen=True)
class Oplus(Obj):
    left: Obj
    right: Obj

    def __str__(self):
        right = f"({self.right})" if isinstance(self.right, Oplus) else str(self.right)
        return f"{self.left} + {right}"


@dataclass(frozen=True)
class Otimes(Obj):
    left: Obj
    right: Obj

    def __str__(self):
        left = f"({self.left})" if isinstance(self.left, Oplus) else str(self.left)
        right = f"({self.right})" if isinstance(self.right, (Oplus, Otimes)) else str(self.right)
        return f"{left} * {right}"


I = UnitI()
O = ZeroO()


def obj_of_dim(n):
    """Canonical object of dimension ``n``: ``O`` for 0, else ``Dim(n)``."""
    return O if n == 0 else Dim(int(n))


def dim(o):
    if isinstance(o, UnitI):
        return 1
    if isinstance(o, ZeroO):
        return 0
    if isinstance(o, Dim):
        return o.n
    if isinstance(o, Oplus):
        return dim(o.left) + dim(o.right)
    if isinstance(o, Otimes):
        return dim(o.left) * dim(o.right)
    raise TypeError(f"not an object expression: {o!r}")


@lru_cache(maxsize=None)
def basis(o):
    """Basis labels of ``o`` in layout order, as nested tuples."""
    if isinstance(o, UnitI):
        return ((),)
    if isinstance(o, ZeroO):
        return ()
    if isinstance(o, Dim):
        return tuple(("d", k) for k in range(o.n))
    if isinstance(o, Oplus):
        return tuple(("L", x) for x in basis(o.left)) + tuple(
            ("R", y) for y in basis(o.right)
        )
    if isinstance(o, Otimes):
        return tuple((x, y) for x in basis(o.left) for y in basis(o.right))
    raise TypeError(f"not an object expression: {o!r}")


@lru_cache(maxsize=None)
def _index(o):
    return {label: k for k, label in enumerate(basis(o))}


def _perm_matrix(src, dst, relabel):
    cols = basis(src)
    target = _index(dst)
    m = np.zeros((len(target), len(cols)), dtype=np.complex128)
    for j, label in enumerate(cols):
        m[target[relabel(label)], j] = 1.0
    return m


# name -> (arity, source, target, relabelling of a source basis label)
_STRUCTURE = {
    "assoc_plus": (
        3,
        lambda a, b, c: Oplus(Oplus(a, b), c),
        lambda a, b, c: Oplus(a, Oplus(b, c)),
        lambda x: ("L", x[1][1]) if x[0] == "L" and x[1][0] == "L"
        else ("R", ("L", x[1][1])) if x[0] == "L"
        else ("R", ("R", x[1])),
    ),
    "unit_r_plus": (1, lambda a: Oplus(a, O), lambda a: a, lambda x: x[1]),
    "unit_l_plus": (1, lambda a: Oplus(O, a), lambda a: a, lambda x: x[1]),
    "swap_plus": (
        2,
        lambda a, b: Oplus(a, b),
        lambda a, b: Oplus(b, a),
        lambda x: ("R" if x[0] == "L" else "L", x[1]),
    ),
    "assoc_times": (
        3,
        lambda a, b, c: Otimes(Otimes(a, b), c),
        lambda a, b, c: Otimes(a, Otimes(b, c)),
        lambda x: (x[0][0], (x[0][1], x[1])),
    ),
    "unit_r_times": (1, lambda a: Otimes(a, I), lambda a: a, lambda x: x[0]),
    "unit_l_times": (1, lambda a: Otimes(I, a), lambda a: a, lambda x: x[1]),
    "swap_times": (
        2,
        lambda a, b: Otimes(a, b),
        lambda a, b: Otimes(b, a),
        lambda x: (x[1], x[0]),
    ),
    "dist_l": (
        3,
        lambda a, b, c: Otimes(a, Oplus(b, c)),
        lambda a, b, c: Oplus(Otimes(a, b), Otimes(a, c)),
        lambda x: (x[1][0], (x[0], x[1][1])),
    ),
    "dist_r": (
        3,
        lambda a, b, c: Otimes(Oplus(a, b), c),
        lambda a, b, c: Oplus(Otimes(a, c), Otimes(b, c)),
        lambda x: (x[0][0], (x[0][1], x[1])),
    ),
    "ann_l": (1, lambda a: Otimes(O, a), lambda a: O, None),
    "ann_r": (1, lambda a: Otimes(a, O), lambda a: O, None),
}

STRUCTURAL_NAMES = tuple(_STRUCTURE)

#: DSL spelling of each structural name
DSL_NAMES = {
    "swapP": "swap_plus",
    "assocP": "assoc_plus",
    "unitRP": "unit_r_plus",
    "unitLP": "unit_l_plus",
    "swapT": "swap_times",
    "assocT": "assoc_times",
    "unitRT": "unit_r_times",
    "unitLT": "unit_l_times",
    "distL": "dist_l",
    "distR": "dist_r",
    "annL": "ann_l",
    "annR": "ann_r",
}


@dataclass(frozen=True)
class StructuralName:
    name: str
    inverse: bool = False

    def __post_init__(self):
        if self.name not in _STRUCTURE:
            raise ValueError(f"unknown structural isomorphism {self.name!r}")


def arity(name):
    return _STRUCTURE[_plain(name)][0]


def _plain(name):
    return name.name if isinstance(name, StructuralName) else name


def structural_type(name, args):
    """``(source, target)`` objects of the named isomorphism (after inversion)."""
    inverse = isinstance(name, StructuralName) and name.inverse
    key = _plain(name)
    if key not in _STRUCTURE:
        raise ValueError(f"unknown structural isomorphism {key!r}")
    n, src, dst, _ = _STRUCTURE[key]
    args = tuple(args)
    if len(args) != n:
        raise ArityMismatch(f"{key} takes {n} object argument(s), got {len(args)}")
    s, t = src(*args), dst(*args)
    return (t, s) if inverse else (s, t)


def structural_iso(name, args, inverse=False):
    """Permutation matrix of a coherence isomorphism.

    ``name`` is a ``StructuralName`` or a plain string (then ``inverse``
    selects the direction).
    """
    if isinstance(name, StructuralName):
        inverse = name.inverse
    key = _plain(name)
    s, t = structural_type(key, args)
    relabel = _STRUCTURE[key][3]
    if relabel is None:
        m = np.zeros((0, dim(s)), dtype=np.complex128)
    else:
        m = _perm_matrix(s, t, relabel)
    return np.ascontiguousarray(m.T) if inverse else m


def id_matrix(o):
    return np.eye(dim(o), dtype=np.complex128)


# Textual object syntax: I, O, naturals, '+', '*', parentheses; '*' binds tighter.

_OBJ_TOKEN = re.compile(r"\s*(?:(\d+)|([IO])|([+*()]))")


def parse_obj(text):
    """Parse an object expression such as ``"2 * (1 + I)"``."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _OBJ_TOKEN.match(text, pos)
        if not m:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", 1, pos + 1)
        tokens.append((m.group(1) or m.group(2) or m.group(3), m.start(m.lastindex) + 1))
        pos = m.end()
    parser = _ObjParser(tokens)
    o = parser.sum()
    if parser.pos != len(tokens):
        tok, col = tokens[parser.pos]
        raise DslSyntaxError(f"unexpected {tok!r}", 1, col)
    return o


class _ObjParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def _peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def _col(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][1]
        return self.tokens[-1][1] + 1 if self.tokens else 1

    def sum(self):
        o = self.product()
        while self._peek() == "+":
            self.pos += 1
            o = Oplus(o, self.product())
        return o

    def product(self):
        o = self.atom()
        while self._peek() == "*":
            self.pos += 1
            o = Otimes(o, self.atom())
        return o

    def atom(self):
        tok = self._peek()
        col = self._col()
        if tok is None:
            raise DslSyntaxError("unexpected end of object", 1, col)
        self.pos += 1
        if tok == "(":
            o = self.sum()
            if self._peek() != ")":
                raise DslSyntaxError("expected ')'", 1, self._col())
            self.pos += 1
            return o
        if tok == "I":
            return I
        if tok == "O":
            return O
        if tok.isdigit():
            n = int(tok)
            if n == 0:
                return O
            return Dim(n)
        raise DslSyntaxError(f"unexpected {tok!r}", 1, col)
