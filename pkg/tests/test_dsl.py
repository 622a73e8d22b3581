import math

import numpy as np
import pytest
from conftest import seeds
from hypothesis import given
from hypothesis import strategies as st

from qtower import biaffine, channels, cstarsplit, dsl, linalg, lotimes, sampling
from qtower.dsl import Level
from qtower.errors import (
    ArityMismatch,
    DslSyntaxError,
    LevelError,
    LevelTooLow,
    ObjectMismatch,
    TypeMismatch,
)
from qtower.rigstruct import (
    DSL_NAMES,
    I,
    O,
    Dim,
    Oplus,
    Otimes,
    StructuralName,
    arity,
    structural_iso,
)

R2 = 1 / math.sqrt(2)

# ASTs ---------------------------------------------------------------------

objs = st.recursive(
    st.one_of(st.just(I), st.just(O), st.integers(1, 4).map(Dim)),
    lambda inner: st.one_of(st.builds(Oplus, inner, inner), st.builds(Otimes, inner, inner)),
    max_leaves=4,
)


@st.composite
def structurals(draw):
    name = draw(st.sampled_from(sorted(DSL_NAMES.values())))
    args = tuple(draw(objs) for _ in range(arity(name)))
    return dsl.Structural(StructuralName(name, draw(st.booleans())), args)


@st.composite
def literals(draw):
    gen = sampling.rng(draw(seeds))
    r, c = draw(st.integers(1, 3)), draw(st.integers(1, 3))
    return dsl.matrix_literal(sampling.gaussian(gen, r, c))


leaf_exprs = st.one_of(
    st.sampled_from(sorted(dsl.GATES)).map(dsl.Gate),
    literals(),
    structurals(),
    objs.map(dsl.Identity),
    objs.map(dsl.Discard),
    st.lists(st.integers(1, 4), min_size=1, max_size=3).map(
        lambda b: dsl.Measure(cstarsplit.Partition(tuple(b)))
    ),
    st.builds(dsl.Zero, objs, objs),
)
exprs = st.recursive(
    leaf_exprs,
    lambda inner: st.one_of(
        st.builds(dsl.Seq, inner, inner),
        st.builds(dsl.Plus, inner, inner),
        st.builds(dsl.Times, inner, inner),
        st.builds(dsl.Dagger, inner),
    ),
    max_leaves=8,
)

qubit_programs = st.recursive(
    st.sampled_from(["H", "X", "Y", "Z", "S", "T"]).map(dsl.Gate),
    lambda inner: st.one_of(st.builds(dsl.Seq, inner, inner), st.builds(dsl.Dagger, inner)),
    max_leaves=6,
)


# Parsing ------------------------------------------------------------------


@pytest.mark.parametrize(
    "text, expr",
    [
        ("H ; H", dsl.Seq(dsl.Gate("H"), dsl.Gate("H"))),
        (
            "measure([1,1]) ; measure([1,1])",
            dsl.Seq(*(dsl.Measure(cstarsplit.Partition((1, 1))),) * 2),
        ),
        ("H;X;Z", dsl.Seq(dsl.Seq(dsl.Gate("H"), dsl.Gate("X")), dsl.Gate("Z"))),
        ("H * X + Z", dsl.Plus(dsl.Times(dsl.Gate("H"), dsl.Gate("X")), dsl.Gate("Z"))),
        ("H * (X ; Z)", dsl.Times(dsl.Gate("H"), dsl.Seq(dsl.Gate("X"), dsl.Gate("Z")))),
        ("discard(2 * 2)", dsl.Discard(Otimes(Dim(2), Dim(2)))),
        ("zero(1 + 1, O)", dsl.Zero(Oplus(Dim(1), Dim(1)), O)),
        ("distLInv(2, 1, I)", dsl.Structural(StructuralName("dist_l", True), (Dim(2), Dim(1), I))),
        ("dagger(H ; S)", dsl.Dagger(dsl.Seq(dsl.Gate("H"), dsl.Gate("S")))),
        ('U[{"rows":1,"cols":1,"data":[[[0.5,0]]]}]', dsl.matrix_literal([[0.5]])),
        ("  H\n;\n  # comment\n X ", dsl.Seq(dsl.Gate("H"), dsl.Gate("X"))),
    ],
)
def test_parse(text, expr):
    assert dsl.parse(text) == expr


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("H ;; X", 1, 4),
        ("H ;\n  ; X", 2, 3),
        ("H X", 1, 3),
        ("discard(2", 1, 10),
        ("Q", 1, 1),
        ("measure([1,0])", 1, 9),
        ("U[{\"rows\":1}]", 1, 1),
        ("H ; $", 1, 5),
        ("zero(2)", 1, 7),
    ],
)
def test_syntax_errors_have_locations(text, line, column):
    with pytest.raises(DslSyntaxError) as info:
        dsl.parse(text)
    assert (info.value.line, info.value.column) == (line, column)


@given(exprs)
def test_print_parse_round_trip(e):
    assert dsl.parse(dsl.show(e)) == e


# Typing -------------------------------------------------------------------


@pytest.mark.parametrize(
    "text, dom, cod, level",
    [
        ("H", Dim(2), Dim(2), Level.U),
        ("CX", Otimes(Dim(2), Dim(2)), Otimes(Dim(2), Dim(2)), Level.U),
        ("discard(2)", Dim(2), I, Level.Q),
        ("measure([1,2])", Dim(3), Dim(3), Level.S),
        ("zero(2, 3)", Dim(2), Dim(3), Level.C),
        ("swapP(1, 2)", Oplus(Dim(1), Dim(2)), Oplus(Dim(2), Dim(1)), Level.U),
        ("H + X", Oplus(Dim(2), Dim(2)), Oplus(Dim(2), Dim(2)), Level.U),
        (
            'U[{"rows":1,"cols":1,"data":[[[0.5,0]]]}] * H',
            Otimes(Dim(1), Dim(2)),
            Otimes(Dim(1), Dim(2)),
            Level.C,
        ),
        ("H * H ; discard(2 * 2)", Otimes(Dim(2), Dim(2)), I, Level.Q),
        ("measure([1,1]) * discard(2)", Otimes(Dim(2), Dim(2)), Otimes(Dim(2), I), Level.S),
    ],
)
def test_typecheck(text, dom, cod, level):
    te = dsl.check(text)
    assert (te.dom, te.cod, te.min_level) == (dom, cod, level)


@pytest.mark.parametrize(
    "text, error",
    [
        ("dagger(discard(2))", LevelError),
        ("dagger(discard(1) ; zero(I, 1))", LevelError),
        ("discard(2) + H", LevelError),
        ("measure([1,1]) + H", LevelError),
        ("H ; discard(2) ; H", TypeMismatch),
        ("CX ; H", TypeMismatch),
        ("swapP(1)", ArityMismatch),
        ('U[{"rows":1,"cols":1,"data":[[[1.5,0]]]}]', LevelError),
    ],
)
def test_type_errors(text, error):
    with pytest.raises(error):
        dsl.check(text)


# Evaluation ---------------------------------------------------------------


def test_hh_is_identity_at_u():
    np.testing.assert_allclose(dsl.evaluate(dsl.check("H ; H"), "U"), np.eye(2), atol=1e-15)


def test_structural_evaluates_to_permutation():
    np.testing.assert_array_equal(
        dsl.evaluate(dsl.check("swapP(1, 2)"), "U"), structural_iso("swap_plus", (Dim(1), Dim(2)))
    )


def test_unitary_then_discard_is_trace():
    k = dsl.evaluate(dsl.check("H ; discard(2)"), Level.Q)
    assert channels.channel_equal(k, lotimes.to_channel(lotimes.discard(Dim(2))))


def test_measure_is_idempotent_at_s():
    m = dsl.evaluate(dsl.check("measure([1,1])"), Level.S)
    assert isinstance(m, cstarsplit.SplitMor)
    deph = cstarsplit.measurement_idempotent([1, 1]).idem
    assert channels.channel_equal(m.f, deph)
    mm = cstarsplit.compose_split(m, m)
    assert channels.channel_equal(mm.f, m.f)


def test_bell_state_preparation():
    k = dsl.evaluate(dsl.check("H * id(2) ; CX"), Level.Q)
    out = k(np.diag([1.0, 0, 0, 0]))
    bell = np.zeros((4, 4))
    for i in (0, 3):
        for j in (0, 3):
            bell[i, j] = 0.5
    np.testing.assert_allclose(out, bell, atol=1e-12)


def test_level_results_have_the_right_types():
    te = dsl.check("H * X")
    assert isinstance(dsl.evaluate(te, "U"), np.ndarray)
    assert isinstance(dsl.evaluate(te, "C"), biaffine.BiaffineMor)
    assert isinstance(dsl.evaluate(te, "Q"), channels.KrausChannel)
    assert isinstance(dsl.evaluate(te, "S"), cstarsplit.SplitMor)


@pytest.mark.parametrize("text, level", [("discard(2)", "C"), ("measure([2])", "Q"), ("zero(1, 1)", "U")])
def test_level_too_low(text, level):
    with pytest.raises(LevelTooLow):
        dsl.evaluate(dsl.check(text), level)


def test_zero_evaluates_to_zero_everywhere():
    te = dsl.check("zero(2, 3)")
    np.testing.assert_array_equal(biaffine.corner(dsl.evaluate(te, "C")).mat, np.zeros((3, 2)))
    assert channels.channel_equal(dsl.evaluate(te, "Q"), channels.zero_channel(2, 3))


def test_plus_and_dagger_at_channel_level():
    te = dsl.check("dagger(S + T)")
    want = channels.conjugation(linalg.direct_sum(dsl.GATES["S"], dsl.GATES["T"]).conj().T)
    assert channels.channel_equal(dsl.evaluate(te, "Q"), want)


@given(qubit_programs)
def test_coercion_commutes_with_evaluation(e):
    te = dsl.typecheck(e)
    value = dsl.evaluate(te, "U")
    for level in (Level.C, Level.Q, Level.S):
        lifted = dsl.coerce(value, te, Level.U, level)
        assert dsl.values_equal(lifted, dsl.evaluate(te, level), level)


@given(qubit_programs)
def test_evaluation_is_deterministic(e):
    te = dsl.typecheck(e)
    for level in Level:
        a, b = dsl.evaluate(te, level), dsl.evaluate(te, level)
        assert dsl.values_equal(a, b, level, tol=0.0)


# Equality -----------------------------------------------------------------


@pytest.mark.parametrize(
    "a, b, level, expected",
    [
        ("X ; X", "id(2)", "U", True),
        ("measure([1,1]) ; measure([1,1])", "measure([1,1])", "S", True),
        ("X ; discard(2)", "discard(2)", "Q", True),
        ("H ; Z ; H", "X", "U", True),
        ("dagger(S)", "S ; S ; S", "U", True),
        ("CX ; CX", "id(2 * 2)", "C", True),
        ("zero(2, 2)", "H ; zero(2, 2)", "C", True),
        ("zero(2, 2)", "zero(2, 1) ; zero(1, 2)", "Q", True),
    ]
    + [("H", "X", level, False) for level in "UCQS"],
)
def test_equal_at_level(a, b, level, expected):
    assert dsl.equal_at_level(a, b, level) is expected


def test_equal_requires_matching_types():
    with pytest.raises(ObjectMismatch):
        dsl.equal_at_level("H", "discard(2)", "Q")


@given(qubit_programs, qubit_programs)
def test_level_monotonicity(a, b):
    ta, tb = dsl.typecheck(a), dsl.typecheck(b)
    seen = False
    for level in Level:
        eq = dsl.equal_at_level(ta, tb, level)
        assert eq or not seen
        seen = eq


def test_monotonicity_converse_fails():
    # a global phase is invisible to channels but not to unitaries
    minus_x = dsl.matrix_literal(-dsl.GATES["X"])
    verdicts = [dsl.equal_at_level(dsl.Gate("X"), minus_x, level) for level in Level]
    assert verdicts == [False, False, True, True]
    # two routes to the biaffine zero agree at C though neither exists at U
    a, b = dsl.check("zero(2, 2)"), dsl.check("zero(2, 1) ; zero(1, 2)")
    assert dsl.equal_at_level(a, b, "C")
    with pytest.raises(LevelTooLow):
        dsl.equal_at_level(a, b, "U")
