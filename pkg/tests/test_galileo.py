import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dft2gspn import dft as D
from dft2gspn.galileo import (
    GalileoParseError,
    parse_galileo,
    parse_galileo_diagnostics,
    serialize_galileo,
)

import conftest as fx


def test_parse_f1_shape():
    tree = parse_galileo(fx.F1)
    z = tree.node("Z")
    assert z.kind == "pand" and z.type.inclusive
    assert [tree.node(c).name for c in z.children] == ["X", "B"]
    assert tree.node("X").kind == "or"
    assert tree.node(tree.top).name == "Z"
    assert tree.evidence == frozenset()


def test_parse_single_be_dormancy():
    tree = parse_galileo('toplevel "A";\n"A" lambda=0.5 dorm=0.3;\n')
    a = tree.node("A")
    assert a.type.active_rate == 0.5
    assert a.type.passive_rate == pytest.approx(0.15)


def test_parse_vote():
    tree = parse_galileo(fx.VOT_2OF3)
    v = tree.node("V")
    assert v.kind == "vot" and v.type.k == 2 and len(v.children) == 3


def test_parse_variants_and_spare_words():
    text = (
        'toplevel "T";\n'
        '"T" and "P1" "P2" "P3" "P4" "S1";\n'
        '"P1" pand_excl "A" "B";\n'
        '"P2" por "A" "B";\n'
        '"P3" por_excl "A" "B";\n'
        '"P4" pand "A" "B";\n'
        '"S1" hsp "A" "B";\n'
        '"A" lambda=1.0 dorm=1.0;\n'
        '"B" lambda=1.0 dorm=1.0;\n'
    )
    tree = parse_galileo(text)
    assert tree.node("P1").type.inclusive is False
    assert tree.node("P2").type.inclusive is True
    assert tree.node("P3").type.inclusive is False
    assert tree.node("P4").type.inclusive is True
    assert tree.node("S1").kind == "spare"


def test_parse_evidence_comments_unquoted():
    text = (
        "toplevel top; // the root\n"
        "top and A B;\n"
        "A lambda=1.0 dorm=1.0;\n"
        "B lambda=2e-1 dorm=0.0; // cold\n"
        "B failed;\n"
    )
    tree = parse_galileo(text)
    assert tree.node("B").type.is_cold
    assert tree.evidence == frozenset({tree.node("B").id})


def test_parse_unicode_names():
    text = 'toplevel "gâte";\n"gâte" and "ä" "b";\n"ä" lambda=1.0 dorm=1.0;\n"b" lambda=1.0 dorm=1.0;\n'
    tree = parse_galileo(text)
    assert tree.has_node("gâte") and tree.has_node("ä")


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('toplevel "T";\n"T" nand "A" "B";\n', "unknown gate type"),
        ('toplevel "T";\n"T" and "A";\n"T" or "A";\n"A" lambda=1 dorm=1;\n', "duplicate definition"),
        ('"T" and "A" "B";\n', "missing toplevel"),
        ('toplevel "T";\n"T" 4of3 "A" "B" "C";\n', "impossible"),
        ('toplevel "T";\n"T" lambda=abc dorm=1.0;\n', "malformed rate"),
        ('toplevel "T";\n"T" pdep=1.5 "A" "B";\n', "probability must lie"),
        ('toplevel "T";\n"T" and "A" "B"\n', "must end with ';'"),
        ('toplevel "T";\n"T" lambda=0.0 dorm=1.0;\n', "rate must be positive"),
        ('toplevel "T";\n"T" 2of3 "A" "B";\n', "lists 2 children"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(GalileoParseError) as err:
        parse_galileo(text)
    assert any(fragment in str(d) for d in err.value.diagnostics)


def test_diagnostics_carry_positions():
    with pytest.raises(GalileoParseError) as err:
        parse_galileo('toplevel "T";\n"T" bogus "A";\n')
    diag = err.value.diagnostics[0]
    assert diag.span.line == 2
    assert diag.span.column == 5
    assert diag.span.length == len("bogus")


def test_parser_reports_build_errors_with_spans():
    text = 'toplevel "T";\n"T" and "T";\n'
    tree, errors, _ = parse_galileo_diagnostics(text)
    assert tree is None
    assert any("cycle" in str(d) for d in errors)


def test_csp_hsp_dormancy_warnings():
    text = (
        'toplevel "S";\n'
        '"S" csp "A" "B";\n'
        '"A" lambda=1.0 dorm=0.5;\n'
        '"B" lambda=1.0 dorm=0.0;\n'
    )
    tree, errors, warnings = parse_galileo_diagnostics(text)
    assert tree is not None and not errors
    assert any("dorm=0" in str(w) and "'A'" in str(w) for w in warnings)


def _isomorphic(a, b):
    if len(a.nodes) != len(b.nodes):
        return False
    for node in a.nodes:
        if not b.has_node(node.name):
            return False
        other = b.node(node.name)
        if node.type != other.type:
            return False
        if [a.node(c).name for c in node.children] != [
            b.node(c).name for c in other.children
        ]:
            return False
    if a.node(a.top).name != b.node(b.top).name:
        return False
    return {a.node(e).name for e in a.evidence} == {
        b.node(e).name for e in b.evidence
    }


@pytest.mark.parametrize(
    "source",
    [fx.F1, fx.F2, fx.F3, fx.F4, fx.F5, fx.F6, fx.FIG1B, fx.BIKE, fx.NESTED,
     fx.SINGLE_BE, fx.VOT_2OF3, fx.SEQ_AND, fx.PDEP_08, fx.MUTEX_PAIR],
)
def test_round_trip_fixtures(source):
    tree = parse_galileo(source)
    text = serialize_galileo(tree)
    again = parse_galileo(text)
    assert _isomorphic(tree, again)
    assert serialize_galileo(again) == text


def test_serialize_pdep_keeps_probability():
    tree = parse_galileo(fx.PDEP_08)
    assert "pdep=0.8" in serialize_galileo(tree)


def test_serialize_no_evidence_no_failed_lines():
    tree = parse_galileo(fx.F1)
    assert "failed" not in serialize_galileo(tree)


def test_round_trip_exotic_names_and_rates():
    tree = D.build_dft(
        [
            ("top gate", D.OR_T, ["Ω unit", "b"]),
            ("Ω unit", D.be(3.5e-4, 1.75e-4), []),
            ("b", D.be(2.0, 0.0), []),
        ],
        top="top gate",
        evidence=["b"],
    )
    again = parse_galileo(serialize_galileo(tree))
    assert _isomorphic(tree, again)


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=200))
def test_parser_never_panics(text):
    tree, errors, warnings = parse_galileo_diagnostics(text)
    assert (tree is None) == bool(errors)
    for d in errors + warnings:
        assert d.span.line >= 1 and d.span.column >= 1
