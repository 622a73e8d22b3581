"""Completely positive trace-nonincreasing maps as Kraus families, with Choi and Stinespring views.

Choi convention: unnormalized, input factor first,
``C = sum_ij E_ij ⊗ Φ(E_ij)``. A CPTP map on ``n`` inputs has ``tr C = n``.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    AncillaOrder,
    ChannelsDiffer,
    DimensionMismatch,
    InvalidChannel,
    MatrixFormatError,
    NotContraction,
    NotPSD,
    ShapeMismatch,
)
from .hilbtower import Level, TowerMor, validate_morphism
from .rigstruct import Dim, Obj, Otimes, dim, obj_of_dim

KRAUS_DROP = 1e-10
MIXING_RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class KrausChannel:
    in_dim: int
    out_dim: int
    kraus: tuple

    def __post_init__(self):
        ops = tuple(linalg.as_matrix(m).copy() for m in self.kraus)
        if not ops:
            raise ShapeMismatch("a Kraus channel needs at least one operator")
        for k, m in enumerate(ops):
            if m.shape != (self.out_dim, self.in_dim):
                raise ShapeMismatch(
                    f"Kraus operator {k} has shape {m.shape}, "
                    f"expected {(self.out_dim, self.in_dim)}"
                )
            m.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @classmethod
    def from_ops(cls, ops):
        ops = [linalg.as_matrix(m) for m in ops]
        return cls(ops[0].shape[1], ops[0].shape[0], tuple(ops))

    @property
    def rank(self):
        return len(self.kraus)

    def __call__(self, rho):
        return apply_channel(self, rho)

    def __repr__(self):
        return f"KrausChannel({self.in_dim} -> {self.out_dim}, {self.rank} ops)"


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    in_dim: int
    out_dim: int
    mat: np.ndarray

    def __post_init__(self):
        mat = linalg.as_matrix(self.mat).copy()
        n = self.in_dim * self.out_dim
        if mat.shape != (n, n):
            raise ShapeMismatch(f"Choi matrix must be {n}x{n}, got {mat.shape}")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)


@dataclass(frozen=True, eq=False)
class StinespringRep:
    """Contraction ``t: A -> B ⊗ G`` together with its ancilla ``G``."""

    t: TowerMor
    anc: Obj

    def __post_init__(self):
        if not isinstance(self.t.cod, Otimes) or self.t.cod.right != self.anc:
            raise ShapeMismatch(f"codomain {self.t.cod} does not end in ancilla {self.anc}")

    @property
    def in_dim(self):
        return dim(self.t.dom)

    @property
    def out_dim(self):
        return dim(self.t.cod.left)

    @property
    def anc_dim(self):
        return dim(self.anc)


def kraus_sum(k):
    """``sum_i M_i† M_i``."""
    out = linalg.zeros(k.in_dim, k.in_dim)
    for m in k.kraus:
        out += linalg.dagger(m) @ m
    return out


def validate_channel(k):
    """True iff ``sum_i M_i† M_i <= 1`` (top eigenvalue at most ``1 + EPS``)."""
    for m in k.kraus:
        if m.shape != (k.out_dim, k.in_dim):
            raise ShapeMismatch("inconsistent Kraus operator shapes")
    if k.in_dim == 0:
        return True
    return linalg.lambda_max(kraus_sum(k)) <= 1.0 + linalg.EPS


def check_density(rho, dim_=None):
    """Validate a subnormalized density matrix and return it as an array."""
    rho = linalg.as_matrix(rho)
    if dim_ is not None and rho.shape != (dim_, dim_):
        raise DimensionMismatch(f"density matrix must be {dim_}x{dim_}")
    if not linalg.is_hermitian(rho):
        raise ValueError("density matrix must be Hermitian")
    evals, _ = linalg.hermitian_eig(rho)
    if evals.size and evals[0] < -linalg.EPS:
        raise NotPSD("density matrix must be positive semidefinite")
    if np.trace(rho).real > 1.0 + linalg.EPS:
        raise ValueError("density matrix trace exceeds 1")
    return rho


def apply_channel(k, rho):
    """``sum_i M_i rho M_i†``; linear, so any square input of the right size is accepted."""
    rho = linalg.as_matrix(rho)
    if rho.shape != (k.in_dim, k.in_dim):
        raise DimensionMismatch(
            f"input of shape {rho.shape} does not match channel input {k.in_dim}"
        )
    out = linalg.zeros(k.out_dim, k.out_dim)
    for m in k.kraus:
        out += m @ rho @ linalg.dagger(m)
    return out


def compose_channels(first, then):
    """``then ∘ first`` as a Kraus channel (pairwise products of Kraus operators)."""
    if first.out_dim != then.in_dim:
        raise DimensionMismatch(f"cannot feed {first.out_dim} outputs into {then.in_dim} inputs")
    ops = tuple(g @ f for f in first.kraus for g in then.kraus)
    return KrausChannel(first.in_dim, then.out_dim, ops)


def compress(k):
    """Re-derive a minimal Kraus family once the rank exceeds ``in * out``."""
    if k.rank <= max(1, k.in_dim * k.out_dim):
        return k
    return kraus_from_choi(choi(k))


def tensor_channels(a, b):
    ops = tuple(linalg.kron(x, y) for x in a.kraus for y in b.kraus)
    return KrausChannel(a.in_dim * b.in_dim, a.out_dim * b.out_dim, ops)


def identity_channel(n):
    return KrausChannel(n, n, (linalg.identity(n),))


def zero_channel(n_in, n_out):
    return KrausChannel(n_in, n_out, (linalg.zeros(n_out, n_in),))


def conjugation(t):
    """The channel ``rho -> t rho t†``."""
    t = t.mat if isinstance(t, TowerMor) else linalg.as_matrix(t)
    return KrausChannel(t.shape[1], t.shape[0], (t,))


def _vec(m):
    # |M>> = sum_i |i> ⊗ M|i>, entry (i, b) = M[b, i]
    return np.ascontiguousarray(m.T).reshape(-1)


def choi(k):
    c = linalg.zeros(k.in_dim * k.out_dim, k.in_dim * k.out_dim)
    for m in k.kraus:
        v = _vec(m)
        c += np.outer(v, v.conj())
    return ChoiMatrix(k.in_dim, k.out_dim, c)


def kraus_from_choi(c):
    """Minimal Kraus family from the eigendecomposition of a Choi matrix."""
    evals, vecs = linalg.hermitian_eig(c.mat)
    if evals.size and evals[0] < -linalg.EPS:
        raise NotPSD(f"Choi matrix has eigenvalue {evals[0]:.3e}")
    ops = []
    for lam, v in zip(evals[::-1], vecs.T[::-1]):
        if lam < KRAUS_DROP:
            break
        ops.append(np.sqrt(lam) * v.reshape(c.in_dim, c.out_dim).T)
    if not ops:
        return zero_channel(c.in_dim, c.out_dim)
    return KrausChannel(c.in_dim, c.out_dim, tuple(ops))


def channel_distance(a, b):
    if (a.in_dim, a.out_dim) != (b.in_dim, b.out_dim):
        raise DimensionMismatch(
            f"channels {a.in_dim}->{a.out_dim} and {b.in_dim}->{b.out_dim} differ in shape"
        )
    return linalg.sup_norm(choi(a).mat - choi(b).mat)


def channel_equal(a, b, tol=linalg.EPS_COMPOSED):
    return channel_distance(a, b) <= tol


def is_trace_preserving(k, tol=linalg.EPS):
    return linalg.sup_norm(kraus_sum(k) - linalg.identity(k.in_dim)) <= tol


def stinespring(k, dom=None, cod=None):
    """Dilation ``T = sum_i M_i ⊗ |i>`` into ``B ⊗ C^k``."""
    if not validate_channel(k):
        raise InvalidChannel("Kraus operators are not trace-nonincreasing")
    dom = dom if dom is not None else obj_of_dim(k.in_dim)
    cod = cod if cod is not None else obj_of_dim(k.out_dim)
    anc = Dim(k.rank)
    t = np.zeros((k.out_dim, k.rank, k.in_dim), dtype=np.complex128)
    for i, m in enumerate(k.kraus):
        t[:, i, :] = m
    t = t.reshape(k.out_dim * k.rank, k.in_dim)
    return StinespringRep(validate_morphism(dom, Otimes(cod, anc), t, Level.CONTRACTION), anc)


def _ancilla_slices(t, out_dim, anc_dim):
    """``E_i = (1 ⊗ <i|) T`` for each ancilla basis vector."""
    cube = np.asarray(t).reshape(out_dim, anc_dim, -1)
    return [np.ascontiguousarray(cube[:, i, :]) for i in range(anc_dim)]


def channel_from_stinespring(s):
    if not linalg.is_contraction(s.t.mat):
        raise NotContraction("Stinespring operator is not a contraction")
    ops = _ancilla_slices(s.t.mat, s.out_dim, s.anc_dim)
    if not ops:
        return zero_channel(s.in_dim, s.out_dim)
    return KrausChannel(s.in_dim, s.out_dim, tuple(ops))


def stinespring_apply(s, rho):
    """``tr_G(T rho T†)`` computed directly from the dilation."""
    t = s.t.mat
    return linalg.partial_trace(t @ linalg.as_matrix(rho) @ linalg.dagger(t),
                                (s.out_dim, s.anc_dim), "second")


def kraus_mixing_unitary(e, f):
    """Unitary ``U`` with ``E_i = sum_j u_ij F_j`` for two Kraus families of one channel.

    The shorter family is padded with zero operators. Writing ``K_E``, ``K_F``
    for the matrices whose rows are the vectorized operators, equal channels
    give ``K_E† K_E = K_F† K_F =: C``. For each eigenpair ``(λ, w)`` of ``C``
    with ``λ > 0`` the vectors ``K_F w / √λ`` and ``K_E w / √λ`` are
    orthonormal families; ``U`` maps one onto the other and the deterministic
    completions of their complements onto each other.
    """
    if (e.in_dim, e.out_dim) != (f.in_dim, f.out_dim):
        raise DimensionMismatch("Kraus families act between different spaces")
    if not channel_equal(e, f):
        raise ChannelsDiffer("the two Kraus families describe different channels")
    k = max(e.rank, f.rank)
    ke = _stack(e, k)
    kf = _stack(f, k)
    gram = linalg.dagger(kf) @ kf
    evals, vecs = linalg.hermitian_eig(0.5 * (gram + linalg.dagger(gram)))
    keep = evals > MIXING_RANK_TOL * max(1.0, float(evals[-1]) if evals.size else 1.0)
    w = vecs[:, keep] / np.sqrt(evals[keep])
    x = _orthonormalize(kf @ w)
    y = _orthonormalize(ke @ w)
    return np.ascontiguousarray(linalg.complete_isometry(y) @ linalg.dagger(linalg.complete_isometry(x)))


def _stack(ch, k):
    rows = [np.asarray(m).reshape(-1) for m in ch.kraus]
    rows += [np.zeros(ch.in_dim * ch.out_dim, dtype=np.complex128)] * (k - len(rows))
    return np.array(rows, dtype=np.complex128).reshape(k, -1)


def _orthonormalize(x):
    # One Gram-Schmidt clean-up pass; x is already orthonormal up to rounding.
    q = np.zeros_like(x)
    for j in range(x.shape[1]):
        r = x[:, j] - q[:, :j] @ (linalg.dagger(q[:, :j]) @ x[:, j])
        q[:, j] = r / np.linalg.norm(r)
    return q


def mediating_isometry(te, tf):
    """Isometry ``W: G -> G'`` with ``T_F = (1 ⊗ W) T_E``.

    Built from the mixing unitary ``U`` of the two ancilla-sliced Kraus
    families: ``W`` is the first ``dim G`` columns of ``U†``.
    """
    if (te.in_dim, te.out_dim) != (tf.in_dim, tf.out_dim):
        raise DimensionMismatch("dilations act between different spaces")
    if te.anc_dim > tf.anc_dim:
        raise AncillaOrder(
            f"first ancilla ({te.anc_dim}) is larger than the second ({tf.anc_dim})"
        )
    e = channel_from_stinespring(te)
    f = channel_from_stinespring(tf)
    u = kraus_mixing_unitary(e, f)
    return np.ascontiguousarray(linalg.dagger(u)[:, : te.anc_dim])


def random_cptn(in_dim, out_dim, kraus_rank, seed, slack=None):
    """Deterministic random CPTN channel from a counter-based generator.

    Complex Gaussian Kraus operators are rescaled by ``1/sqrt(s (1 + u))``
    where ``s`` is the top eigenvalue of ``sum M†M`` and ``u`` is uniform in
    ``[0, 1)`` (or ``slack`` when given).
    """
    if kraus_rank < 1:
        raise ValueError("kraus_rank must be at least 1")
    rng = np.random.Generator(np.random.Philox(seed))
    shape = (kraus_rank, out_dim, in_dim)
    ms = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    u = rng.uniform() if slack is None else float(slack)
    ops = tuple(np.ascontiguousarray(m) for m in ms)
    k = KrausChannel(in_dim, out_dim, ops)
    s = linalg.lambda_max(kraus_sum(k)) if in_dim else 1.0
    scale = 1.0 / np.sqrt(s * (1.0 + u)) if s > 0 else 1.0
    return KrausChannel(in_dim, out_dim, tuple(scale * m for m in ops))


# Channel JSON: {"in": n, "out": m, "kraus": [<matrix>, ...]}


def channel_to_json(k):
    return {
        "in": k.in_dim,
        "out": k.out_dim,
        "kraus": [linalg.matrix_to_json(m) for m in k.kraus],
    }


def channel_from_json(obj):
    try:
        n_in, n_out, ops = int(obj["in"]), int(obj["out"]), obj["kraus"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"malformed channel object: {exc}") from None
    return KrausChannel(n_in, n_out, tuple(linalg.matrix_from_json(m) for m in ops))


def choi_to_json(c):
    return {"in": c.in_dim, "out": c.out_dim, "choi": linalg.matrix_to_json(c.mat)}
