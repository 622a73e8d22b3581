"""Biaffine completion of Unitary: morphisms ``[H, f, G]: A -> B`` with ``f`` a unitary
``A ⊕ H -> B ⊕ G``.

Two representatives are identified iff their corners (the ``B x A`` top-left
block) agree, so equality never searches for mediators.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import NotContraction, ObjectMismatch
from .hilbtower import Level, TowerMor, isometry_to_unitary, validate_morphism
from .rigstruct import O, Dim, Obj, Oplus, Otimes, dim, id_matrix, structural_iso


@dataclass(frozen=True, eq=False)
class BiaffineMor:
    dom: Obj
    cod: Obj
    in_anc: Obj
    out_anc: Obj
    mat: np.ndarray

    def __post_init__(self):
        mat = linalg.as_matrix(self.mat).copy()
        rows = dim(self.cod) + dim(self.out_anc)
        cols = dim(self.dom) + dim(self.in_anc)
        if mat.shape != (rows, cols):
            raise ObjectMismatch(f"matrix shape {mat.shape} is not {rows}x{cols}")
        if not linalg.is_unitary(mat):
            raise ValueError("biaffine representative must be unitary")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    def __repr__(self):
        return (
            f"BiaffineMor([{self.in_anc}, f, {self.out_anc}]: {self.dom} -> {self.cod})"
        )


def _iso(name, *args, inverse=False):
    return structural_iso(name, args, inverse=inverse)


def _chain(*mats):
    """Product of matrices listed in application order (first applied first)."""
    out = mats[0]
    for m in mats[1:]:
        out = m @ out
    return out


def lift_unitary(u):
    """``[O, u ⊕ id_O, O]``."""
    if isinstance(u, TowerMor):
        dom, cod, mat = u.dom, u.cod, u.mat
    else:
        mat = linalg.as_matrix(u)
        dom, cod = _obj(mat.shape[1]), _obj(mat.shape[0])
    return BiaffineMor(dom, cod, O, O, mat)


def _obj(n):
    return O if n == 0 else Dim(n)


def identity(a):
    return BiaffineMor(a, a, O, O, id_matrix(a))


def zero_mor(a, b):
    """Zero morphism ``A -> O -> B``: the symmetry ``A ⊕ B -> B ⊕ A`` with ``H = B``, ``G = A``."""
    return BiaffineMor(a, b, b, a, _iso("swap_plus", a, b))


def compose(f, g):
    """``g ∘ f`` with ancillas ``H ⊕ H'`` in and ``G' ⊕ G`` out."""
    if f.cod != g.dom:
        raise ObjectMismatch(f"cannot compose {f.cod} with {g.dom}")
    a, h, b, gg = f.dom, f.in_anc, f.cod, f.out_anc
    h2, c, g2 = g.in_anc, g.cod, g.out_anc
    interchange = _chain(
        _iso("assoc_plus", b, gg, h2),
        linalg.direct_sum(id_matrix(b), _iso("swap_plus", gg, h2)),
        _iso("assoc_plus", b, h2, gg, inverse=True),
    )
    mat = _chain(
        _iso("assoc_plus", a, h, h2, inverse=True),
        linalg.direct_sum(f.mat, id_matrix(h2)),
        interchange,
        linalg.direct_sum(g.mat, id_matrix(gg)),
        _iso("assoc_plus", c, g2, gg),
    )
    return BiaffineMor(a, c, Oplus(h, h2), Oplus(g2, gg), mat)


def dagger(f):
    return BiaffineMor(f.cod, f.dom, f.out_anc, f.in_anc, linalg.dagger(f.mat))


def corner(f):
    block = f.mat[: dim(f.cod), : dim(f.dom)]
    return validate_morphism(f.dom, f.cod, block, Level.CONTRACTION)


def halmos_dilate(t):
    """Julia unitary ``[[T, D*], [D, -T†]]: A ⊕ B -> B ⊕ A`` around a contraction ``T``.

    ``D = (1 - T†T)^½`` and ``D* = (1 - TT†)^½`` are the defect operators.
    """
    if isinstance(t, TowerMor):
        dom, cod, mat = t.dom, t.cod, t.mat
    else:
        mat = linalg.as_matrix(t)
        dom, cod = _obj(mat.shape[1]), _obj(mat.shape[0])
    if not linalg.is_contraction(mat):
        raise NotContraction("halmos_dilate needs a contraction")
    na, nb = mat.shape[1], mat.shape[0]
    td = linalg.dagger(mat)
    u = np.block([
        [mat, linalg.psd_sqrt(np.eye(nb) - mat @ td)],
        [linalg.psd_sqrt(np.eye(na) - td @ mat), -td],
    ])
    return BiaffineMor(dom, cod, cod, dom, u)


def equiv(f, g, tol=linalg.EPS_COMPOSED):
    if f.dom != g.dom or f.cod != g.cod:
        raise ObjectMismatch(
            f"cannot compare {f.dom} -> {f.cod} with {g.dom} -> {g.cod}"
        )
    nb, na = dim(f.cod), dim(f.dom)
    return linalg.sup_norm(f.mat[:nb, :na] - g.mat[:nb, :na]) <= tol


def _interchange_plus(a, h, a2, h2):
    """``(A ⊕ H) ⊕ (A' ⊕ H') -> (A ⊕ A') ⊕ (H ⊕ H')`` from associators and a symmetry."""
    return _chain(
        _iso("assoc_plus", a, h, Oplus(a2, h2)),
        linalg.direct_sum(id_matrix(a), _iso("assoc_plus", h, a2, h2, inverse=True)),
        linalg.direct_sum(
            id_matrix(a),
            linalg.direct_sum(_iso("swap_plus", h, a2), id_matrix(h2)),
        ),
        linalg.direct_sum(id_matrix(a), _iso("assoc_plus", a2, h, h2)),
        _iso("assoc_plus", a, a2, Oplus(h, h2), inverse=True),
    )


def _distribute(x, y, x2, y2):
    """``(X ⊕ Y) ⊗ (X' ⊕ Y') -> (X⊗X') ⊕ ((X⊗Y') ⊕ ((Y⊗X') ⊕ (Y⊗Y')))``."""
    return _chain(
        _iso("dist_r", x, y, Oplus(x2, y2)),
        linalg.direct_sum(_iso("dist_l", x, x2, y2), _iso("dist_l", y, x2, y2)),
        _iso(
            "assoc_plus",
            Otimes(x, x2), Otimes(x, y2), Oplus(Otimes(y, x2), Otimes(y, y2)),
        ),
    )


def _cross_anc(x, y, x2, y2):
    return Oplus(Otimes(x, y2), Oplus(Otimes(y, x2), Otimes(y, y2)))


def monoidal(op, f, g):
    """``f ⊕ g`` or ``f ⊗ g``; the corner of the result is the sum/product of corners."""
    if op == "oplus":
        s_in = _interchange_plus(f.dom, f.in_anc, g.dom, g.in_anc)
        s_out = _interchange_plus(f.cod, f.out_anc, g.cod, g.out_anc)
        mat = s_out @ linalg.direct_sum(f.mat, g.mat) @ linalg.dagger(s_in)
        return BiaffineMor(
            Oplus(f.dom, g.dom), Oplus(f.cod, g.cod),
            Oplus(f.in_anc, g.in_anc), Oplus(f.out_anc, g.out_anc), mat,
        )
    if op == "otimes":
        d_in = _distribute(f.dom, f.in_anc, g.dom, g.in_anc)
        d_out = _distribute(f.cod, f.out_anc, g.cod, g.out_anc)
        mat = d_out @ linalg.kron(f.mat, g.mat) @ linalg.dagger(d_in)
        return BiaffineMor(
            Otimes(f.dom, g.dom), Otimes(f.cod, g.cod),
            _cross_anc(f.dom, f.in_anc, g.dom, g.in_anc),
            _cross_anc(f.cod, f.out_anc, g.cod, g.out_anc),
            mat,
        )
    raise ValueError(f"op must be 'oplus' or 'otimes', not {op!r}")


# generators of the quotient relation, used to build equivalent representatives


def mediate_output(f, m):
    """``(id_B ⊕ m) ∘ f`` for a unitary ``m`` on the output ancilla."""
    m = linalg.as_matrix(m)
    return BiaffineMor(
        f.dom, f.cod, f.in_anc, _obj(m.shape[0]),
        linalg.direct_sum(id_matrix(f.cod), m) @ f.mat,
    )


def mediate_input(f, n):
    """``f ∘ (id_A ⊕ n)`` for a unitary ``n`` onto the input ancilla."""
    n = linalg.as_matrix(n)
    return BiaffineMor(
        f.dom, f.cod, _obj(n.shape[1]), f.out_anc,
        f.mat @ linalg.direct_sum(id_matrix(f.dom), n),
    )


def pad_ancilla(f, x):
    """``α ∘ (f ⊕ id_X) ∘ α⁻¹``, the same morphism with ``X`` added to both ancillas."""
    mat = _chain(
        _iso("assoc_plus", f.dom, f.in_anc, x, inverse=True),
        linalg.direct_sum(f.mat, id_matrix(x)),
        _iso("assoc_plus", f.cod, f.out_anc, x),
    )
    return BiaffineMor(f.dom, f.cod, Oplus(f.in_anc, x), Oplus(f.out_anc, x), mat)


def route_dilate(t):
    """Dilate in two one-sided steps: hide output, then hide input.

    First the isometric column ``[T; (1 - T†T)^½]: A -> B ⊕ A``, then its
    completion to a unitary ``A ⊕ K -> B ⊕ A``.
    """
    if isinstance(t, TowerMor):
        dom, cod, mat = t.dom, t.cod, t.mat
    else:
        mat = linalg.as_matrix(t)
        dom, cod = _obj(mat.shape[1]), _obj(mat.shape[0])
    if not linalg.is_contraction(mat):
        raise NotContraction("route_dilate needs a contraction")
    column = np.vstack([mat, linalg.psd_sqrt(np.eye(mat.shape[1]) - linalg.dagger(mat) @ mat)])
    iso = validate_morphism(dom, Oplus(cod, dom), column, Level.ISOMETRY)
    u = isometry_to_unitary(iso)
    return BiaffineMor(dom, cod, u.dom.right, dom, u.mat)
