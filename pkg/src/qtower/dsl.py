"""A typed combinator language over the tower.

Programs are morphism expressions built from gates, matrix literals,
structural isomorphisms, ``discard``, ``measure`` and ``zero``, combined with
``;`` (sequencing), ``+`` (direct sum), ``*`` (tensor) and ``dagger(...)``.
Typechecking infers the boundary objects and the least level at which a
program makes sense::

    U  unitaries            -> numpy matrix
    C  contractions         -> BiaffineMor
    Q  CPTN channels        -> KrausChannel
    S  split idempotents    -> SplitMor

A program typed at one level may be evaluated at any higher level.
"""

import enum
import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import biaffine, channels, cstarsplit, linalg, lotimes
from .errors import (
    DslSyntaxError,
    LevelError,
    LevelTooLow,
    MatrixFormatError,
    ObjectMismatch,
    TypeMismatch,
)
from .hilbtower import Level as TowerLevel
from .hilbtower import validate_morphism
from .linalg import OperatorClass
from .rigstruct import (
    DSL_NAMES,
    I,
    O,
    Dim,
    Obj,
    Oplus,
    Otimes,
    StructuralName,
    dim,
    id_matrix,
    obj_of_dim,
    structural_iso,
    structural_type,
)


class Level(enum.IntEnum):
    U = 0
    C = 1
    Q = 2
    S = 3

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise ValueError(f"unknown level {value!r}; expected one of U, C, Q, S") from None


_R2 = 1 / math.sqrt(2)
GATES = {
    "H": np.array([[_R2, _R2], [_R2, -_R2]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "S": np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    "T": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=np.complex128),
    "CX": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
    ),
}
QUBIT = Dim(2)
GATE_TYPES = {name: QUBIT for name in ("H", "X", "Y", "Z", "S", "T")}
GATE_TYPES["CX"] = Otimes(QUBIT, QUBIT)

_STRUCT_DSL = {v: k for k, v in DSL_NAMES.items()}


# AST ------------------------------------------------------------------------


class Expr:
    pass


@dataclass(frozen=True)
class Gate(Expr):
    name: str


@dataclass(frozen=True)
class MatrixLit(Expr):
    # rows of complex entries, kept as tuples so the node is hashable
    rows: tuple

    @classmethod
    def of(cls, m):
        m = linalg.as_matrix(m)
        return cls(tuple(tuple(complex(z) for z in row) for row in m)), m.shape

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def matrix(self):
        r, c = self.shape
        return np.array(self.rows, dtype=np.complex128).reshape(r, c)


@dataclass(frozen=True)
class Structural(Expr):
    name: StructuralName
    args: tuple


@dataclass(frozen=True)
class Identity(Expr):
    obj: Obj


@dataclass(frozen=True)
class Discard(Expr):
    obj: Obj


@dataclass(frozen=True)
class Measure(Expr):
    partition: cstarsplit.Partition


@dataclass(frozen=True)
class Zero(Expr):
    dom: Obj
    cod: Obj


@dataclass(frozen=True)
class Seq(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Plus(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Times(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Dagger(Expr):
    body: Expr


def matrix_literal(m):
    return MatrixLit.of(m)[0]


# Lexer ----------------------------------------------------------------------

_TOKEN = re.compile(r"(?P<nat>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[;+*(),\[\]])")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int
    value: object = None


def _tokenize(text):
    toks = []
    pos, line, line_start = 0, 1, 0
    decoder = json.JSONDecoder()
    while pos < len(text):
        ch = text[pos]
        if ch == "\n":
            pos += 1
            line += 1
            line_start = pos
            continue
        if ch.isspace():
            pos += 1
            continue
        if ch == "#":
            while pos < len(text) and text[pos] != "\n":
                pos += 1
            continue
        col = pos - line_start + 1
        m = _TOKEN.match(text, pos)
        if not m:
            raise DslSyntaxError(f"unexpected character {ch!r}", line, col)
        if m.group("ident") == "U" and m.end() < len(text) and text[m.end()] == "[":
            start = m.end() + 1
            while start < len(text) and text[start].isspace():
                start += 1
            try:
                obj, end = decoder.raw_decode(text, start)
                mat = linalg.matrix_from_json(obj)
            except (json.JSONDecodeError, MatrixFormatError) as exc:
                raise DslSyntaxError(f"bad matrix literal ({exc})", line, col) from None
            while end < len(text) and text[end].isspace():
                end += 1
            if end >= len(text) or text[end] != "]":
                raise DslSyntaxError("expected ']' after matrix literal", line, col)
            toks.append(_Tok("matrix", text[pos:end + 1], line, col, mat))
            consumed = text[pos:end + 1]
            line += consumed.count("\n")
            if "\n" in consumed:
                line_start = pos + consumed.rindex("\n") + 1
            pos = end + 1
            continue
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# Parser ---------------------------------------------------------------------


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0

    @property
    def tok(self):
        return self.toks[self.pos]

    def _error(self, message, tok=None):
        tok = tok or self.tok
        shown = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise DslSyntaxError(f"{message}, found {shown}", tok.line, tok.col)

    def _advance(self):
        tok = self.tok
        self.pos += 1
        return tok

    def _expect(self, text):
        if self.tok.text != text or self.tok.kind == "eof":
            self._error(f"expected {text!r}")
        return self._advance()

    def program(self):
        e = self.seq()
        if self.tok.kind != "eof":
            self._error("unexpected token")
        return e

    def seq(self):
        e = self.plus()
        while self.tok.text == ";":
            self._advance()
            e = Seq(e, self.plus())
        return e

    def plus(self):
        e = self.times()
        while self.tok.text == "+":
            self._advance()
            e = Plus(e, self.times())
        return e

    def times(self):
        e = self.atom()
        while self.tok.text == "*":
            self._advance()
            e = Times(e, self.atom())
        return e

    def atom(self):
        tok = self.tok
        if tok.kind == "matrix":
            self._advance()
            return matrix_literal(tok.value)
        if tok.text == "(":
            self._advance()
            e = self.seq()
            self._expect(")")
            return e
        if tok.kind != "ident":
            self._error("expected a morphism")
        name = tok.text
        self._advance()
        if name in GATES:
            return Gate(name)
        if name == "dagger":
            self._expect("(")
            e = self.seq()
            self._expect(")")
            return Dagger(e)
        if name in ("discard", "id"):
            self._expect("(")
            o = self.obj()
            self._expect(")")
            return Discard(o) if name == "discard" else Identity(o)
        if name == "zero":
            self._expect("(")
            a = self.obj()
            self._expect(",")
            b = self.obj()
            self._expect(")")
            return Zero(a, b)
        if name == "measure":
            self._expect("(")
            start = self._expect("[")
            blocks = [self._nat()]
            while self.tok.text == ",":
                self._advance()
                blocks.append(self._nat())
            self._expect("]")
            self._expect(")")
            try:
                return Measure(cstarsplit.Partition(tuple(blocks)))
            except ValueError as exc:
                raise DslSyntaxError(str(exc), start.line, start.col) from None
        inverse = name.endswith("Inv")
        base = name[:-3] if inverse else name
        if base in DSL_NAMES:
            self._expect("(")
            args = [self.obj()]
            while self.tok.text == ",":
                self._advance()
                args.append(self.obj())
            self._expect(")")
            return Structural(StructuralName(DSL_NAMES[base], inverse), tuple(args))
        self._error("unknown combinator", tok)

    def _nat(self):
        if self.tok.kind != "nat":
            self._error("expected a natural number")
        return int(self._advance().text)

    # objects share the token stream

    def obj(self):
        o = self.obj_product()
        while self.tok.text == "+":
            self._advance()
            o = Oplus(o, self.obj_product())
        return o

    def obj_product(self):
        o = self.obj_atom()
        while self.tok.text == "*":
            self._advance()
            o = Otimes(o, self.obj_atom())
        return o

    def obj_atom(self):
        tok = self.tok
        if tok.text == "(":
            self._advance()
            o = self.obj()
            self._expect(")")
            return o
        if tok.kind == "nat":
            self._advance()
            return obj_of_dim(int(tok.text))
        if tok.text == "I":
            self._advance()
            return I
        if tok.text == "O":
            self._advance()
            return O
        self._error("expected an object")


def parse(text):
    """Parse program text into an AST; raises ``DslSyntaxError`` with a location."""
    return _Parser(text).program()


# Printer --------------------------------------------------------------------

_PREC = {Seq: 0, Plus: 1, Times: 2}
_OP = {Seq: ";", Plus: "+", Times: "*"}


def show(e, prec=0):
    """Render an AST back to source; ``parse(show(e)) == e``."""
    kind = type(e)
    if kind in _PREC:
        p = _PREC[kind]
        text = f"{show(e.left, p)} {_OP[kind]} {show(e.right, p + 1)}"
        return f"({text})" if p < prec else text
    if isinstance(e, Gate):
        return e.name
    if isinstance(e, MatrixLit):
        return "U[" + json.dumps(linalg.matrix_to_json(e.matrix()), separators=(",", ":")) + "]"
    if isinstance(e, Structural):
        suffix = "Inv" if e.name.inverse else ""
        args = ", ".join(str(a) for a in e.args)
        return f"{_STRUCT_DSL[e.name.name]}{suffix}({args})"
    if isinstance(e, Identity):
        return f"id({e.obj})"
    if isinstance(e, Discard):
        return f"discard({e.obj})"
    if isinstance(e, Measure):
        return f"measure({e.partition})"
    if isinstance(e, Zero):
        return f"zero({e.dom}, {e.cod})"
    if isinstance(e, Dagger):
        return f"dagger({show(e.body)})"
    raise TypeError(f"not a DSL expression: {e!r}")


# Typechecker ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TypedExpr:
    expr: Expr
    dom: Obj
    cod: Obj
    min_level: Level
    children: tuple = field(default=())

    def __repr__(self):
        return f"TypedExpr({show(self.expr)} : {self.dom} -> {self.cod} @ {self.min_level.name})"


def typecheck(e):
    if isinstance(e, Gate):
        t = GATE_TYPES[e.name]
        return TypedExpr(e, t, t, Level.U)
    if isinstance(e, MatrixLit):
        r, c = e.shape
        cls = linalg.classify_operator(e.matrix())
        if cls is OperatorClass.UNITARY:
            level = Level.U
        elif cls.is_contraction:
            level = Level.C
        else:
            raise LevelError("matrix literal is not a contraction")
        return TypedExpr(e, obj_of_dim(c), obj_of_dim(r), level)
    if isinstance(e, Structural):
        src, dst = structural_type(e.name, e.args)
        return TypedExpr(e, src, dst, Level.U)
    if isinstance(e, Identity):
        return TypedExpr(e, e.obj, e.obj, Level.U)
    if isinstance(e, Discard):
        return TypedExpr(e, e.obj, I, Level.Q)
    if isinstance(e, Measure):
        a = Dim(e.partition.total)
        return TypedExpr(e, a, a, Level.S)
    if isinstance(e, Zero):
        return TypedExpr(e, e.dom, e.cod, Level.C)
    if isinstance(e, Dagger):
        body = typecheck(e.body)
        if body.min_level > Level.C:
            raise LevelError(
                f"dagger is only available up to level C, body needs {body.min_level.name}"
            )
        return TypedExpr(e, body.cod, body.dom, body.min_level, (body,))
    if isinstance(e, (Seq, Plus, Times)):
        left, right = typecheck(e.left), typecheck(e.right)
        level = max(left.min_level, right.min_level)
        if isinstance(e, Seq):
            if left.cod != right.dom:
                raise TypeMismatch(
                    f"cannot sequence {show(e.left)} : ... -> {left.cod} "
                    f"into {show(e.right)} : {right.dom} -> ..."
                )
            return TypedExpr(e, left.dom, right.cod, level, (left, right))
        if isinstance(e, Plus):
            if level > Level.C:
                raise LevelError(
                    f"direct sum is only available up to level C, operands need {level.name}"
                )
            return TypedExpr(e, Oplus(left.dom, right.dom), Oplus(left.cod, right.cod), level, (left, right))
        return TypedExpr(e, Otimes(left.dom, right.dom), Otimes(left.cod, right.cod), level, (left, right))
    raise TypeError(f"not a DSL expression: {e!r}")


def check(text):
    return typecheck(parse(text))


# Evaluation -----------------------------------------------------------------


def _leaf_matrix(te):
    e = te.expr
    if isinstance(e, Gate):
        return GATES[e.name]
    if isinstance(e, MatrixLit):
        return e.matrix()
    if isinstance(e, Structural):
        return structural_iso(e.name, e.args)
    if isinstance(e, Identity):
        return id_matrix(e.obj)
    if isinstance(e, Zero):
        return linalg.zeros(dim(e.cod), dim(e.dom))
    raise TypeError(f"{show(e)} has no matrix")


def _eval_u(te):
    e = te.expr
    if isinstance(e, Seq):
        return _eval_u(te.children[1]) @ _eval_u(te.children[0])
    if isinstance(e, Plus):
        return linalg.direct_sum(_eval_u(te.children[0]), _eval_u(te.children[1]))
    if isinstance(e, Times):
        return linalg.kron(_eval_u(te.children[0]), _eval_u(te.children[1]))
    if isinstance(e, Dagger):
        return linalg.dagger(_eval_u(te.children[0]))
    return _leaf_matrix(te)


def _eval_c(te):
    e = te.expr
    if isinstance(e, Seq):
        return biaffine.compose(_eval_c(te.children[0]), _eval_c(te.children[1]))
    if isinstance(e, Plus):
        return biaffine.monoidal("oplus", _eval_c(te.children[0]), _eval_c(te.children[1]))
    if isinstance(e, Times):
        return biaffine.monoidal("otimes", _eval_c(te.children[0]), _eval_c(te.children[1]))
    if isinstance(e, Dagger):
        return biaffine.dagger(_eval_c(te.children[0]))
    if isinstance(e, Zero):
        return biaffine.zero_mor(e.dom, e.cod)
    mat = _leaf_matrix(te)
    if te.min_level == Level.U:
        return biaffine.lift_unitary(validate_morphism(te.dom, te.cod, mat, TowerLevel.UNITARY))
    return biaffine.halmos_dilate(validate_morphism(te.dom, te.cod, mat, TowerLevel.CONTRACTION))


def _lift_corner(te):
    return lotimes.lift_contraction(biaffine.corner(_eval_c(te)))


def _eval_q(te):
    e = te.expr
    if isinstance(e, Seq):
        return lotimes.compose(_eval_q(te.children[0]), _eval_q(te.children[1]))
    if isinstance(e, Times):
        return lotimes.tensor(_eval_q(te.children[0]), _eval_q(te.children[1]))
    if isinstance(e, Discard):
        return lotimes.discard(e.obj)
    if isinstance(e, (Plus, Dagger)):
        return _lift_corner(te)
    if isinstance(e, Measure):
        raise LevelTooLow("measure needs level S")
    return lotimes.lift_contraction(
        validate_morphism(te.dom, te.cod, _leaf_matrix(te), TowerLevel.CONTRACTION)
    )


def _split_of_channel(te, k):
    return cstarsplit.validate_split_mor(
        channels.compress(k),
        cstarsplit.trivial_object(te.dom),
        cstarsplit.trivial_object(te.cod),
    )


def _eval_s(te):
    e = te.expr
    if isinstance(e, Measure):
        obj = cstarsplit.trivial_object(te.dom)
        idem = cstarsplit.measurement_idempotent(e.partition, te.dom).idem
        return cstarsplit.validate_split_mor(idem, obj, obj)
    if te.min_level <= Level.Q:
        return _split_of_channel(te, lotimes.to_channel(_eval_q(te)))
    if isinstance(e, Seq):
        return cstarsplit.compose_split(_eval_s(te.children[0]), _eval_s(te.children[1]))
    if isinstance(e, Times):
        return cstarsplit.tensor_split(_eval_s(te.children[0]), _eval_s(te.children[1]))
    raise LevelError(f"{show(e)} has no meaning at level S")


def evaluate(te, at):
    """Semantic value of a typed program at level ``at`` (at least its min level)."""
    if not isinstance(te, TypedExpr):
        te = typecheck(te if isinstance(te, Expr) else parse(te))
    at = Level.parse(at)
    if at < te.min_level:
        raise LevelTooLow(
            f"program needs level {te.min_level.name}, asked for {at.name}"
        )
    if at == Level.U:
        return _eval_u(te)
    if at == Level.C:
        return _eval_c(te)
    if at == Level.Q:
        return lotimes.to_channel(_eval_q(te))
    return _eval_s(te)


def coerce(value, te, frm, to):
    """Push a value computed at level ``frm`` up the functor chain to ``to``."""
    frm, to = Level.parse(frm), Level.parse(to)
    if to < frm:
        raise LevelError("values can only be coerced upward")
    while frm < to:
        if frm == Level.U:
            value = biaffine.lift_unitary(validate_morphism(te.dom, te.cod, value, TowerLevel.UNITARY))
        elif frm == Level.C:
            value = lotimes.to_channel(lotimes.lift_contraction(biaffine.corner(value)))
        else:
            value = _split_of_channel(te, value)
        frm = Level(frm + 1)
    return value


def values_equal(a, b, at, tol=linalg.EPS_COMPOSED):
    at = Level.parse(at)
    if at == Level.U:
        return a.shape == b.shape and linalg.sup_norm(a - b) <= tol
    if at == Level.C:
        return biaffine.equiv(a, b, tol)
    if at == Level.Q:
        return channels.channel_equal(a, b, tol)
    return channels.channel_equal(a.f, b.f, tol)


def equal_at_level(a, b, at):
    if not isinstance(a, TypedExpr):
        a = check(a) if isinstance(a, str) else typecheck(a)
    if not isinstance(b, TypedExpr):
        b = check(b) if isinstance(b, str) else typecheck(b)
    if a.dom != b.dom or a.cod != b.cod:
        raise ObjectMismatch(
            f"programs have different types: {a.dom} -> {a.cod} vs {b.dom} -> {b.cod}"
        )
    at = Level.parse(at)
    return values_equal(evaluate(a, at), evaluate(b, at), at)
