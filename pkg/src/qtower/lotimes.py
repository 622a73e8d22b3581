"""Partial multiplicative affine completion of Contraction.

A morphism ``[f, G]: A -> B`` is a contraction ``f: A -> B ⊗ G``. Two pairs
are identified iff they induce the same channel ``rho -> tr_G(f rho f†)``,
compared through Choi matrices.
"""

from dataclasses import dataclass

from . import linalg
from .channels import (
    StinespringRep,
    channel_equal,
    channel_from_stinespring,
    stinespring,
)
from .errors import ObjectMismatch
from .hilbtower import Level, TowerMor, validate_morphism
from .rigstruct import I, Dim, Obj, Otimes, id_matrix, obj_of_dim, structural_iso


@dataclass(frozen=True, eq=False)
class DilationMor:
    dom: Obj
    cod: Obj
    anc: Obj
    f: TowerMor

    def __post_init__(self):
        if self.f.dom != self.dom or self.f.cod != Otimes(self.cod, self.anc):
            raise ObjectMismatch(
                f"underlying map {self.f.dom} -> {self.f.cod} does not fit "
                f"{self.dom} -> {self.cod} ⊗ {self.anc}"
            )

    @property
    def mat(self):
        return self.f.mat

    def __repr__(self):
        return f"DilationMor([f, {self.anc}]: {self.dom} -> {self.cod})"


def _make(dom, cod, anc, mat):
    return DilationMor(dom, cod, anc, validate_morphism(dom, Otimes(cod, anc), mat, Level.CONTRACTION))


def lift_contraction(t):
    """``[ρ⊗⁻¹ ∘ t, I]``."""
    if not isinstance(t, TowerMor):
        t = linalg.as_matrix(t)
        t = validate_morphism(obj_of_dim(t.shape[1]), obj_of_dim(t.shape[0]), t)
    rho_inv = structural_iso("unit_r_times", (t.cod,), inverse=True)
    return _make(t.dom, t.cod, I, rho_inv @ t.mat)


def identity(a):
    return lift_contraction(validate_morphism(a, a, id_matrix(a), Level.UNITARY))


def compose(f, g):
    """``[α⊗ ∘ (g ⊗ id_G) ∘ f, G' ⊗ G]``."""
    if f.cod != g.dom:
        raise ObjectMismatch(f"cannot compose {f.cod} with {g.dom}")
    mat = (
        structural_iso("assoc_times", (g.cod, g.anc, f.anc))
        @ linalg.kron(g.mat, id_matrix(f.anc))
        @ f.mat
    )
    return _make(f.dom, g.cod, Otimes(g.anc, f.anc), mat)


def tensor(f, g):
    """``f ⊗ g`` with the ancillas regrouped to ``(B ⊗ B') ⊗ (G ⊗ G')``."""
    b, gg, b2, g2 = f.cod, f.anc, g.cod, g.anc
    # (B⊗G)⊗(B'⊗G') -> B⊗(G⊗(B'⊗G')) -> B⊗((G⊗B')⊗G') -> B⊗((B'⊗G)⊗G')
    #   -> B⊗(B'⊗(G⊗G')) -> (B⊗B')⊗(G⊗G')
    shuffle = (
        structural_iso("assoc_times", (b, b2, Otimes(gg, g2)), inverse=True)
        @ linalg.kron(id_matrix(b), structural_iso("assoc_times", (b2, gg, g2)))
        @ linalg.kron(id_matrix(b), linalg.kron(structural_iso("swap_times", (gg, b2)), id_matrix(g2)))
        @ linalg.kron(id_matrix(b), structural_iso("assoc_times", (gg, b2, g2), inverse=True))
        @ structural_iso("assoc_times", (b, gg, Otimes(b2, g2)))
    )
    return _make(
        Otimes(f.dom, g.dom), Otimes(b, b2), Otimes(gg, g2),
        shuffle @ linalg.kron(f.mat, g.mat),
    )


def discard(a):
    """``[λ⊗⁻¹, A]: A -> I``."""
    return _make(a, I, a, structural_iso("unit_l_times", (a,), inverse=True))


def projection(which, a, b):
    """``π₁ = [id, B]: A ⊗ B -> A`` or ``π₂ = [σ⊗, A]: A ⊗ B -> B``."""
    if which == "first":
        return _make(Otimes(a, b), a, b, id_matrix(Otimes(a, b)))
    if which == "second":
        return _make(Otimes(a, b), b, a, structural_iso("swap_times", (a, b)))
    raise ValueError(f"which must be 'first' or 'second', not {which!r}")


def as_stinespring(f):
    return StinespringRep(f.f, f.anc)


def to_channel(f):
    """The channel ``rho -> tr_G(f rho f†)``."""
    return channel_from_stinespring(as_stinespring(f))


def from_channel(k, dom=None, cod=None):
    """A dilation pair realizing ``k`` (its Stinespring dilation)."""
    s = stinespring(k, dom, cod)
    return DilationMor(s.t.dom, s.t.cod.left, s.anc, s.t)


def equiv(f, g, tol=linalg.EPS_COMPOSED):
    if f.dom != g.dom or f.cod != g.cod:
        raise ObjectMismatch(f"cannot compare {f.dom} -> {f.cod} with {g.dom} -> {g.cod}")
    return channel_equal(to_channel(f), to_channel(g), tol)


def mediate(f, m):
    """``(id_B ⊗ m) ∘ f`` for an isometry ``m: G -> G'``."""
    m = linalg.as_matrix(m)
    if not linalg.is_isometry(m):
        raise ValueError("ancilla mediator must be an isometry")
    return _make(f.dom, f.cod, Dim(m.shape[0]), linalg.kron(id_matrix(f.cod), m) @ f.mat)


def factorize(f):
    """Split ``[f, E]`` as ``π₁ ∘ lift(f')``; returns ``(f', E)``."""
    return f.f, f.anc


def recompose(pure, anc):
    cod = pure.cod.left
    return compose(lift_contraction(pure), projection("first", cod, anc))


def is_total(f):
    """True when the underlying map is an isometry (a total morphism)."""
    return linalg.is_isometry(f.mat)

