import pytest

from bcsys.syntax import (
    BindingSignature,
    RawExpr,
    SignatureError,
    build_syntactic_bframe,
    enumerate_raw,
    parse_signature,
    shift,
    subst,
)
from bcsys.bsys import validate_bframe
from bcsys.core import unpack_ids


UEL = "type U; type El(tm)"


def test_parse_two_type_formers():
    sig = parse_signature(UEL)
    assert [f.name for f in sig.type_formers] == ["U", "El"]
    assert sig.type_formers[1].args[0].sort == "tm"
    assert sig.type_formers[1].args[0].binders == 0
    assert sig.term_formers == ()


def test_parse_binding_into_type_argument_is_fine():
    sig = parse_signature("type Pi(ty, tm^1.ty)")
    assert sig.type_formers[0].args == (
        type(sig.type_formers[0].args[0])("ty", 0),
        type(sig.type_formers[0].args[0])("ty", 1),
    )


def test_parse_rejects_type_variable_binding():
    with pytest.raises(SignatureError):
        parse_signature("type Bad(ty^1.ty)")


def test_parse_error_carries_position():
    with pytest.raises(SignatureError) as exc:
        parse_signature("type Ok\nbogus decl")
    assert exc.value.line == 2


def test_empty_signature_is_valid():
    sig = parse_signature("  # nothing here\n")
    assert sig.type_formers == () and sig.term_formers == ()


def test_enumerate_closed_expressions():
    sig = parse_signature(UEL)
    lm0, r0 = enumerate_raw(sig, 0, 2)
    assert [e.key() for e in lm0] == ["U"]
    assert r0 == []


def test_enumerate_one_variable():
    sig = parse_signature(UEL)
    lm1, r1 = enumerate_raw(sig, 1, 2)
    assert sorted(e.key() for e in lm1) == ["El(#0)", "U"]
    assert [e.key() for e in r1] == ["#0"]


def test_enumerate_two_variables():
    sig = parse_signature(UEL)
    lm2, _ = enumerate_raw(sig, 2, 2)
    assert len(lm2) == 3  # U, El(#0), El(#1)


def test_enumeration_is_deterministic():
    sig = parse_signature(UEL)
    a = [e.key() for e in enumerate_raw(sig, 3, 2)[0]]
    b = [e.key() for e in enumerate_raw(sig, 3, 2)[0]]
    assert a == b


def test_shift_and_subst_de_bruijn():
    v0, v1 = RawExpr("tm", "#0"), RawExpr("tm", "#1")
    el0 = RawExpr("ty", "El", (v0,))
    assert shift(el0, 1, 0).key() == "El(#1)"
    assert shift(el0, 1, 1).key() == "El(#0)"
    assert subst(RawExpr("ty", "El", (v1,)), 0, v0).key() == "El(#0)"
    assert subst(el0, 0, v1).key() == "El(#1)"


def test_syntactic_bframe_level_sizes():
    # |B_n| is the product of |LM([i])| for i < n; |B~_{n+1}| multiplies in
    # |R([n])| and |LM([n])|. Independent closed forms for {U, El}:
    # |LM([i])| = 1 + i and |R([i])| = i.
    sig = parse_signature(UEL)
    sys, rep = build_syntactic_bframe(sig, 3, 2)
    assert [len(s) for s in sys.frame.B] == [1, 1, 2, 6]
    assert [len(s) for s in sys.frame.Bt] == [0, 0, 2, 12]
    assert validate_bframe(sys.frame).ok


def test_syntactic_bframe_passes_bsystem_axioms_in_bound():
    sig = parse_signature(UEL)
    sys, rep = build_syntactic_bframe(sig, 3, 2)
    assert not rep.failed_laws(), rep.format()
    assert rep.total_skipped() > 0  # the bound genuinely truncates


def test_syntactic_generic_element_shape():
    sig = parse_signature(UEL)
    sys, _ = build_syntactic_bframe(sig, 3, 2)
    # delta on the context (U): the variable #0 of the weakened type U
    (x_u,) = [x for x in sys.frame.B[1]]
    d = sys.gen[(1, x_u)]
    tele, term, ty = unpack_ids(d)
    assert term == "#0"
    assert ty == "U"
    # bd(delta) = W_X(X)
    assert sys.frame.bd[2][d] == sys.weak[(1, x_u)].H[1][x_u]


def test_weakening_is_injective_on_enumerated_sets():
    sig = parse_signature(UEL)
    sys, _ = build_syntactic_bframe(sig, 3, 2)
    for (n, X), hom in sys.weak.items():
        for lvl, table in hom.Ht.items():
            assert len(set(table.values())) == len(table)
        for lvl, table in hom.H.items():
            assert len(set(table.values())) == len(table)


def test_subst_after_weaken_is_identity():
    # the de Bruijn instance of axiom 3, checked through the validator
    sig = parse_signature(UEL)
    sys, rep = build_syntactic_bframe(sig, 3, 2)
    assert not rep.laws["axiom-3"].violations
    assert rep.laws["axiom-3"].checked > 0


def test_bigger_signature_with_binders_validates():
    sig = parse_signature("type U; type El(tm); type Pi(ty, tm^1.ty); term lam(ty, tm^1.tm)")
    sys, rep = build_syntactic_bframe(sig, 2, 2)
    assert not rep.failed_laws(), rep.format()
