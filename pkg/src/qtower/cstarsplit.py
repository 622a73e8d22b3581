"""Splitting of causal idempotents over CPTN channels, for measurement idempotents.

A partition of ``C^n`` into consecutive index blocks gives the idempotent
that zeroes every off-diagonal block. Its splitting goes through the
block-diagonal algebra, bookkept here as the ambient space plus the partition.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .channels import (
    KrausChannel,
    apply_channel,
    channel_equal,
    compose_channels,
    compress,
    identity_channel,
    tensor_channels,
)
from .errors import (
    AbsorptionFails,
    BadPartition,
    DimensionMismatch,
    InvalidChannel,
    MatrixFormatError,
    NoKnownPartition,
    ObjectMismatch,
)
from .lotimes import _make
from .rigstruct import I, Dim, Obj, Oplus, Otimes, dim, id_matrix, structural_iso


@dataclass(frozen=True)
class Partition:
    blocks: tuple

    def __post_init__(self):
        try:
            blocks = tuple(self.blocks)
        except TypeError:
            raise BadPartition("blocks must be a sequence of naturals") from None
        if not blocks:
            raise BadPartition("a partition needs at least one block")
        for b in blocks:
            if isinstance(b, bool) or not isinstance(b, (int, np.integer)) or b < 1:
                raise BadPartition(f"block sizes must be naturals >= 1, got {b!r}")
        object.__setattr__(self, "blocks", tuple(int(b) for b in blocks))

    @property
    def total(self):
        return sum(self.blocks)

    def ranges(self):
        start = 0
        for b in self.blocks:
            yield start, start + b
            start += b

    def __str__(self):
        return "[" + ",".join(str(b) for b in self.blocks) + "]"


def partition_to_json(p):
    return {"blocks": list(p.blocks)}


def partition_from_json(obj):
    try:
        return Partition(tuple(obj["blocks"]))
    except (KeyError, TypeError) as exc:
        raise MatrixFormatError(f"malformed partition object: {exc}") from None


def block_projectors(p):
    n = p.total
    out = []
    for lo, hi in p.ranges():
        proj = linalg.zeros(n, n)
        proj[lo:hi, lo:hi] = np.eye(hi - lo)
        out.append(proj)
    return out


def extract_blocks(rho, p):
    """``m`` on matrices: the diagonal blocks ``(X, ..., W)``."""
    rho = linalg.as_matrix(rho)
    return [rho[lo:hi, lo:hi].copy() for lo, hi in p.ranges()]


def assemble_blocks(blocks):
    """``p`` on matrices: the block-diagonal matrix with the given blocks."""
    out = np.zeros((0, 0), dtype=np.complex128)
    for b in blocks:
        out = linalg.direct_sum(out, b)
    return out


def is_causal_idempotent(e):
    if e.in_dim != e.out_dim:
        return False
    if not channel_equal(compose_channels(e, e), e):
        return False
    n = e.in_dim
    for i in range(n):
        for j in range(n):
            unit = linalg.zeros(n, n)
            unit[i, j] = 1.0
            if abs(np.trace(apply_channel(e, unit)) - (1.0 if i == j else 0.0)) > linalg.EPS:
                return False
    return True


@dataclass(frozen=True, eq=False)
class SplitObject:
    ambient: Obj
    idem: KrausChannel
    partition: Partition = None

    def __post_init__(self):
        n = dim(self.ambient)
        if (self.idem.in_dim, self.idem.out_dim) != (n, n):
            raise DimensionMismatch(f"idempotent does not act on {self.ambient}")
        if not is_causal_idempotent(self.idem):
            raise InvalidChannel("object idempotent must be idempotent and trace-preserving")
        if self.partition is not None and self.partition.total != n:
            raise BadPartition(f"partition {self.partition} does not sum to {n}")

    def same_as(self, other):
        return self.ambient == other.ambient and channel_equal(self.idem, other.idem)

    def __repr__(self):
        tag = f", partition={self.partition}" if self.partition is not None else ""
        return f"SplitObject({self.ambient}{tag})"


@dataclass(frozen=True, eq=False)
class SplitMor:
    src: SplitObject
    dst: SplitObject
    f: KrausChannel

    def __repr__(self):
        return f"SplitMor({self.src!r} -> {self.dst!r})"


def trivial_object(a):
    """``(A, id)``: the image of ``A`` under the inclusion."""
    return SplitObject(a, identity_channel(dim(a)))


def measurement_idempotent(p, ambient=None):
    if not isinstance(p, Partition):
        p = Partition(tuple(p))
    ambient = ambient if ambient is not None else Dim(p.total)
    if dim(ambient) != p.total:
        raise BadPartition(f"partition {p} does not sum to dim({ambient})")
    e = KrausChannel(p.total, p.total, tuple(block_projectors(p)))
    return SplitObject(ambient, e, p)


def validate_split_mor(f, src, dst):
    if (f.in_dim, f.out_dim) != (dim(src.ambient), dim(dst.ambient)):
        raise DimensionMismatch(
            f"channel {f.in_dim}->{f.out_dim} does not fit {src.ambient} -> {dst.ambient}"
        )
    absorbed = compose_channels(compose_channels(src.idem, f), dst.idem)
    if not channel_equal(absorbed, f):
        raise AbsorptionFails("e' ∘ f ∘ e differs from f")
    return SplitMor(src, dst, compress(f))


def identity(s):
    return SplitMor(s, s, s.idem)


def coerce(f, src, dst):
    """``e' ∘ f ∘ e``, the nearest valid morphism ``src -> dst``."""
    g = compress(compose_channels(compose_channels(src.idem, f), dst.idem))
    return validate_split_mor(g, src, dst)


def compose_split(f, g):
    """``g ∘ f``."""
    if not f.dst.same_as(g.src):
        raise ObjectMismatch("target of the first morphism is not the source of the second")
    return validate_split_mor(compose_channels(f.f, g.f), f.src, g.dst)


def tensor_split(f, g):
    src = SplitObject(Otimes(f.src.ambient, g.src.ambient), compress(tensor_channels(f.src.idem, g.src.idem)))
    dst = SplitObject(Otimes(f.dst.ambient, g.dst.ambient), compress(tensor_channels(f.dst.idem, g.dst.idem)))
    return validate_split_mor(tensor_channels(f.f, g.f), src, dst)


def split_idempotent(s):
    """Split a measurement idempotent through its block algebra.

    Returns ``(m, p)`` with ``m: (A, id) -> (A, e)`` onto the block object and
    ``p: (A, e) -> (A, id)`` back. Both have underlying channel ``e``; the
    block object's identity is ``e``, so ``m ∘ p`` is its identity and
    ``p ∘ m = e``.
    """
    if s.partition is None:
        raise NoKnownPartition("only partition-built idempotents can be split")
    base = trivial_object(s.ambient)
    m = validate_split_mor(s.idem, base, s)
    p = validate_split_mor(s.idem, s, base)
    return m, p


def cotuple_candidate(a, b):
    """``δ_L⁻¹ ∘ (i₁ ⊕ i₂): A ⊕ B -> (A ⊕ B) ⊗ (I ⊕ I)``.

    The would-be cotupling of the two injections; the ancilla records which
    summand the input came from.
    """
    x = Oplus(a, b)
    na, nb = dim(a), dim(b)
    rho_inv = structural_iso("unit_r_times", (x,), inverse=True)
    inj1 = rho_inv @ id_matrix(x)[:, :na]
    inj2 = rho_inv @ id_matrix(x)[:, na:na + nb]
    mat = structural_iso("dist_l", (x, I, I), inverse=True) @ linalg.direct_sum(inj1, inj2)
    return _make(x, x, Oplus(I, I), mat)

