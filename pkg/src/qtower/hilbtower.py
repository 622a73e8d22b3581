"""Validated morphisms of Unitary, Isometry, coIsometry and Contraction."""

import enum
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import LevelViolation, NotIsometry, ObjectMismatch, ShapeMismatch, SplitOutOfRange
from .linalg import OperatorClass
from .rigstruct import Dim, Obj, Oplus, Otimes, O, dim, obj_of_dim


class Level(enum.Enum):
    UNITARY = "Unitary"
    ISOMETRY = "Isometry"
    COISOMETRY = "Coisometry"
    CONTRACTION = "Contraction"

    def join(self, other):
        """Least level containing both (Unitary below Isometry/Coisometry below Contraction)."""
        if self is other:
            return self
        if self is Level.UNITARY:
            return other
        if other is Level.UNITARY:
            return self
        return Level.CONTRACTION

    def admits(self, cls):
        return cls in _ADMITS[self]


_ADMITS = {
    Level.UNITARY: {OperatorClass.UNITARY},
    Level.ISOMETRY: {OperatorClass.UNITARY, OperatorClass.ISOMETRY},
    Level.COISOMETRY: {OperatorClass.UNITARY, OperatorClass.COISOMETRY},
    Level.CONTRACTION: {
        OperatorClass.UNITARY,
        OperatorClass.ISOMETRY,
        OperatorClass.COISOMETRY,
        OperatorClass.STRICT_CONTRACTION,
    },
}


@dataclass(frozen=True, eq=False)
class TowerMor:
    dom: Obj
    cod: Obj
    mat: np.ndarray
    level: Level

    def __repr__(self):
        return f"TowerMor({self.dom} -> {self.cod}, {self.level.value})"

    def then(self, other):
        """Diagrammatic composite ``other ∘ self``."""
        return compose(self, other)

    @property
    def dagger(self):
        return dagger(self)


def validate_morphism(dom, cod, mat, level=Level.CONTRACTION):
    mat = linalg.as_matrix(mat).copy()
    if mat.shape != (dim(cod), dim(dom)):
        raise ShapeMismatch(
            f"matrix shape {mat.shape} does not match {cod} <- {dom} "
            f"({dim(cod)}x{dim(dom)})"
        )
    cls = linalg.classify_operator(mat)
    if not level.admits(cls):
        raise LevelViolation(f"operator classified as {cls.value}, not {level.value}")
    mat.setflags(write=False)
    return TowerMor(dom, cod, mat, level)


def compose(f, g):
    """``g ∘ f`` at the join of their levels, re-validated."""
    if f.cod != g.dom:
        raise ObjectMismatch(f"cannot compose {f.cod} with {g.dom}")
    return validate_morphism(f.dom, g.cod, g.mat @ f.mat, f.level.join(g.level))


_DAGGER_LEVEL = {
    Level.UNITARY: Level.UNITARY,
    Level.ISOMETRY: Level.COISOMETRY,
    Level.COISOMETRY: Level.ISOMETRY,
    Level.CONTRACTION: Level.CONTRACTION,
}


def dagger(f):
    return validate_morphism(f.cod, f.dom, linalg.dagger(f.mat), _DAGGER_LEVEL[f.level])


def oplus(f, g):
    return validate_morphism(
        Oplus(f.dom, g.dom), Oplus(f.cod, g.cod),
        linalg.direct_sum(f.mat, g.mat), f.level.join(g.level),
    )


def otimes(f, g):
    return validate_morphism(
        Otimes(f.dom, g.dom), Otimes(f.cod, g.cod),
        linalg.kron(f.mat, g.mat), f.level.join(g.level),
    )


def identity(o):
    return validate_morphism(o, o, linalg.identity(dim(o)), Level.UNITARY)


def unitary_corner_to_isometry(u, split):
    """Restrict a unitary ``A ⊕ E -> B`` to its first ``split`` input columns."""
    if not linalg.is_unitary(u.mat):
        raise LevelViolation("expected a unitary morphism")
    if not 0 <= split <= dim(u.dom):
        raise SplitOutOfRange(f"split {split} outside 0..{dim(u.dom)}")
    if isinstance(u.dom, Oplus) and dim(u.dom.left) == split:
        dom = u.dom.left
    else:
        dom = obj_of_dim(split)
    return validate_morphism(dom, u.cod, u.mat[:, :split], Level.ISOMETRY)


def isometry_to_unitary(v):
    """Complete an isometry ``A -> B`` to a unitary ``A ⊕ K -> B``."""
    if not linalg.is_isometry(v.mat):
        raise NotIsometry("expected an isometric morphism")
    k = dim(v.cod) - dim(v.dom)
    u = linalg.complete_isometry(v.mat)
    return validate_morphism(Oplus(v.dom, O if k == 0 else Dim(k)), v.cod, u, Level.UNITARY)
