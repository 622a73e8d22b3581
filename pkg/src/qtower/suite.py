"""Seeded property checks, one per structural result the library relies on.

Each check draws its cases from a Philox stream keyed by ``(seed, name)`` and
returns a ``CheckResult``; ``run`` drives them for the ``qtower suite`` command.
"""

import time
import zlib
from dataclasses import dataclass

import numpy as np

from . import biaffine, channels, cstarsplit, dsl, linalg, lotimes, sampling
from .rigstruct import O, Dim, Oplus, dim, obj_of_dim


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    worst: float
    seconds: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.name:<24} cases={self.cases:<5} worst={self.worst:.2e}  {self.seconds:.2f}s{extra}"


def _stream(seed, name):
    return sampling.rng([seed, zlib.crc32(name.encode())])


def _units(n):
    for i in range(n):
        for j in range(n):
            u = linalg.zeros(n, n)
            u[i, j] = 1.0
            yield u


def check_contraction_dilation(gen, n=500):
    worst = 0.0
    for _ in range(n):
        a, b = (int(x) for x in gen.integers(1, 7, size=2))
        t = sampling.contraction(gen, b, a)
        u = biaffine.halmos_dilate(t)
        worst = max(
            worst,
            linalg.sup_norm(biaffine.corner(u).mat - t),
            linalg.sup_norm(linalg.dagger(u.mat) @ u.mat - linalg.identity(a + b)),
        )
    return worst <= 1e-8, worst


def check_contraction_criterion(gen, n=1000):
    mismatches = 0
    for _ in range(n):
        a, b = (int(x) for x in gen.integers(1, 6, size=2))
        t = sampling.with_norm(gen, b, a, gen.uniform(0.5, 1.5))
        oracle = np.linalg.eigvalsh(np.eye(a) - t.conj().T @ t).min() >= -linalg.EPS
        mismatches += linalg.is_contraction(t) != oracle
    return mismatches == 0, float(mismatches)


def check_stinespring(gen, n=200):
    worst = 0.0
    for _ in range(n):
        a, b, r = (int(x) for x in gen.integers(1, 5, size=3))
        k = channels.random_cptn(a, b, r, int(gen.integers(2**32)))
        s = channels.stinespring(k)
        for unit in _units(a):
            worst = max(worst, linalg.sup_norm(channels.stinespring_apply(s, unit) - k(unit)))
        defect = np.linalg.eigvalsh(np.eye(a) - s.t.mat.conj().T @ s.t.mat).min()
        if defect < -linalg.EPS:
            return False, float(-defect)
    return worst <= 1e-8, worst


def _dilation_pair(gen):
    a, b, r = (int(x) for x in gen.integers(1, 4, size=3))
    k = channels.random_cptn(a, b, r, int(gen.integers(2**32)))
    base = channels.stinespring(k)
    extra = int(gen.integers(0, 3))
    v = sampling.isometry(gen, r + extra, r)
    other = lotimes.as_stinespring(lotimes.mediate(lotimes.from_channel(k), v))
    return base, other


def check_kraus_mixing(gen, n=100):
    worst = 0.0
    for _ in range(n):
        te, tf = _dilation_pair(gen)
        e, f = channels.channel_from_stinespring(te), channels.channel_from_stinespring(tf)
        u = channels.kraus_mixing_unitary(e, f)
        worst = max(worst, linalg.sup_norm(linalg.dagger(u) @ u - linalg.identity(u.shape[0])))
        fs = list(f.kraus) + [np.zeros_like(f.kraus[0])] * (u.shape[0] - f.rank)
        es = list(e.kraus) + [np.zeros_like(e.kraus[0])] * (u.shape[0] - e.rank)
        for i, ei in enumerate(es):
            worst = max(worst, linalg.sup_norm(ei - sum(u[i, j] * fj for j, fj in enumerate(fs))))
    return worst <= 1e-8, worst


def check_ancilla_mediator(gen, n=100):
    worst = 0.0
    for _ in range(n):
        te, tf = _dilation_pair(gen)
        w = channels.mediating_isometry(te, tf)
        lifted = linalg.kron(np.eye(te.out_dim), w) @ te.t.mat
        worst = max(
            worst,
            linalg.sup_norm(linalg.dagger(w) @ w - linalg.identity(w.shape[1])),
            linalg.sup_norm(lifted - tf.t.mat),
        )
    return worst <= 1e-8, worst


def check_idempotent_splitting(gen, n=50):
    worst = 0.0
    for _ in range(n):
        s = cstarsplit.measurement_idempotent(sampling.partition(gen))
        m, p = cstarsplit.split_idempotent(s)
        mp = cstarsplit.compose_split(p, m)
        pm = cstarsplit.compose_split(m, p)
        worst = max(
            worst,
            channels.channel_distance(mp.f, cstarsplit.identity(s).f),
            channels.channel_distance(pm.f, s.idem),
        )
    return worst <= 1e-10, worst


def check_biaffine_dagger(gen, n=100):
    worst = 0.0
    for _ in range(n):
        f = sampling.biaffine_mor(gen)
        g = sampling.biaffine_mor(gen, dom=f.cod)
        lhs = biaffine.dagger(biaffine.compose(f, g))
        rhs = biaffine.compose(biaffine.dagger(g), biaffine.dagger(f))
        worst = max(
            worst,
            linalg.sup_norm(biaffine.corner(lhs).mat - biaffine.corner(rhs).mat),
            linalg.sup_norm(biaffine.dagger(biaffine.dagger(f)).mat - f.mat),
        )
    return worst <= 1e-8, worst


def check_zero_object(gen, n=100):
    worst = 0.0
    for _ in range(n):
        f = sampling.biaffine_mor(gen)
        a, b = f.dom, f.cod
        into_zero = [
            biaffine.zero_mor(a, O),
            biaffine.compose(f, biaffine.zero_mor(b, O)),
            biaffine.dagger(biaffine.zero_mor(O, a)),
        ]
        through_zero = [
            biaffine.zero_mor(a, b),
            biaffine.compose(biaffine.zero_mor(a, O), biaffine.zero_mor(O, b)),
            biaffine.compose(f, biaffine.zero_mor(b, b)),
        ]
        for group in (into_zero, through_zero):
            for x in group:
                if not all(biaffine.equiv(x, y) for y in group):
                    return False, float("inf")
        worst = max(worst, linalg.sup_norm(biaffine.corner(through_zero[2]).mat))
    return worst <= 1e-8, worst


def check_dilation_factorization(gen, n=100):
    worst = 0.0
    for k in range(n):
        f = sampling.dilation_mor(gen, isometric=bool(k % 2))
        pure, anc = lotimes.factorize(f)
        via = lotimes.compose(lotimes.lift_contraction(pure), lotimes.projection("first", f.cod, anc))
        worst = max(worst, channels.channel_distance(lotimes.to_channel(f), lotimes.to_channel(via)))
        if lotimes.is_total(f):
            c = channels.choi(lotimes.to_channel(f))
            worst = max(worst, abs(np.trace(c.mat).real / c.in_dim - 1.0))
    return worst <= 1e-8, worst


def check_dilation_faithful(gen, n=100):
    mismatches = 0
    for k in range(n):
        a = sampling.dilation_mor(gen)
        if k % 2:
            g = int(gen.integers(1, 3))
            b = lotimes.mediate(a, sampling.isometry(gen, dim(a.anc) + g, dim(a.anc)))
            expected = True
        else:
            b = sampling.dilation_mor(gen, dom=a.dom)
            expected = None
            if b.cod != a.cod:
                continue
        verdict = lotimes.equiv(a, b)
        sa, sb = lotimes.as_stinespring(a), lotimes.as_stinespring(b)
        oracle = max(
            linalg.sup_norm(channels.stinespring_apply(sa, u) - channels.stinespring_apply(sb, u))
            for u in _units(dim(a.dom))
        ) <= 1e-8
        if verdict != oracle or (expected is not None and verdict != expected):
            mismatches += 1
    for _ in range(n // 4):
        dims = (int(x) for x in gen.integers(1, 4, size=3))
        ch = channels.random_cptn(*dims, int(gen.integers(2**32)))
        if not channels.channel_equal(lotimes.to_channel(lotimes.from_channel(ch)), ch):
            mismatches += 1
    return mismatches == 0, float(mismatches)


def check_cotuple_failure(gen, n=None):
    worst = np.inf
    for d in (1, 2, 3):
        a = Dim(d)
        cand = lotimes.to_channel(cstarsplit.cotuple_candidate(a, a))
        e = cstarsplit.measurement_idempotent([d, d]).idem
        for _ in range(10):
            rho = linalg.direct_sum(sampling.density(gen, d), sampling.density(gen, d))
            if linalg.sup_norm(cand(rho) - e(rho)) > 1e-8:
                return False, float("inf")
        worst = min(worst, channels.channel_distance(cand, channels.identity_channel(2 * d)))
    return worst > 0.1, worst


_QUBIT_GATES = ("H", "X", "Y", "Z", "S", "T")


def random_qubit_program(gen, length):
    e = dsl.Gate(str(gen.choice(_QUBIT_GATES)))
    for _ in range(length - 1):
        g = dsl.Gate(str(gen.choice(_QUBIT_GATES)))
        e = dsl.Seq(e, dsl.Dagger(g) if gen.uniform() < 0.3 else g)
    return e


def check_level_monotonicity(gen, n=40):
    failures = 0
    for _ in range(n):
        a = random_qubit_program(gen, int(gen.integers(1, 5)))
        if gen.uniform() < 0.5:
            b = dsl.Seq(dsl.Seq(a, dsl.Gate("H")), dsl.Gate("H"))
        else:
            b = random_qubit_program(gen, 3)
        ta, tb = dsl.typecheck(a), dsl.typecheck(b)
        seen_equal = False
        for level in dsl.Level:
            eq = dsl.equal_at_level(ta, tb, level)
            if seen_equal and not eq:
                failures += 1
            seen_equal = seen_equal or eq
    minus_x = dsl.matrix_literal(-dsl.GATES["X"])
    witness = [dsl.equal_at_level(dsl.Gate("X"), minus_x, level) for level in dsl.Level]
    if witness != [False, False, True, True]:
        failures += 1
    return failures == 0, float(failures)


def random_expr(gen, depth):
    if depth == 0 or gen.uniform() < 0.3:
        pick = int(gen.integers(5))
        n = int(gen.integers(1, 4))
        if pick == 0:
            return dsl.Gate(str(gen.choice(list(dsl.GATES))))
        if pick == 1:
            return dsl.Discard(obj_of_dim(n))
        if pick == 2:
            return dsl.Measure(sampling.partition(gen, 4))
        if pick == 3:
            return dsl.Zero(obj_of_dim(n), Oplus(Dim(n), obj_of_dim(int(gen.integers(0, 3)))))
        return dsl.matrix_literal(sampling.contraction(gen, n, n))
    kind = (dsl.Seq, dsl.Plus, dsl.Times, dsl.Dagger)[int(gen.integers(4))]
    if kind is dsl.Dagger:
        return dsl.Dagger(random_expr(gen, depth - 1))
    return kind(random_expr(gen, depth - 1), random_expr(gen, depth - 1))


def check_parse_roundtrip(gen, n=200):
    failures = sum(dsl.parse(dsl.show(e)) != e for e in (random_expr(gen, 4) for _ in range(n)))
    return failures == 0, float(failures)


CHECKS = {
    "contraction-dilation": check_contraction_dilation,
    "contraction-criterion": check_contraction_criterion,
    "stinespring": check_stinespring,
    "kraus-mixing": check_kraus_mixing,
    "ancilla-mediator": check_ancilla_mediator,
    "idempotent-splitting": check_idempotent_splitting,
    "biaffine-dagger": check_biaffine_dagger,
    "zero-object": check_zero_object,
    "dilation-factorization": check_dilation_factorization,
    "dilation-faithful": check_dilation_faithful,
    "cotuple-failure": check_cotuple_failure,
    "level-monotonicity": check_level_monotonicity,
    "parse-roundtrip": check_parse_roundtrip,
}


def run_check(name, seed, n=None):
    fn = CHECKS[name]
    gen = _stream(seed, name)
    start = time.perf_counter()
    try:
        passed, worst = fn(gen) if n is None else fn(gen, n)
        detail = ""
    except Exception as exc:  # a crash is a failed check, reported with its cause
        passed, worst, detail = False, float("nan"), f"{type(exc).__name__}: {exc}"
    cases = n if n is not None else fn.__defaults__[-1] if fn.__defaults__ and fn.__defaults__[-1] else 1
    return CheckResult(name, bool(passed), cases, float(worst), time.perf_counter() - start, detail)


def run(seed, name_filter=None, n=None):
    names = [k for k in CHECKS if name_filter is None or name_filter in k]
    return [run_check(k, seed, n) for k in names]

