import pytest

from dft2gspn import dft as D
from dft2gspn.dft import InvalidDftError, build_dft, check_profile_support
from dft2gspn.dft import spare_modules, validate_conventional

import conftest as fx


def test_build_pc_example():
    tree = build_dft(
        [
            ("PC", D.OR_T, ["RAM", "PSU"]),
            ("PSU", D.AND_T, ["Power", "UPS"]),
            ("RAM", D.be(1.0, 1.0), []),
            ("Power", D.be(1.0, 1.0), []),
            ("UPS", D.be(1.0, 1.0), []),
        ],
        top="PC",
    )
    assert len(tree.nodes) == 5
    assert tree.node(tree.top).name == "PC"
    assert [tree.node(c).name for c in tree.node("PSU").children] == ["Power", "UPS"]


def test_build_single_be():
    tree = build_dft([("A", D.be(0.5, 0.25), [])], top="A")
    assert len(tree.nodes) == 1
    assert tree.node("A").type.passive_rate == 0.25


def test_build_detects_cycle():
    with pytest.raises(InvalidDftError) as err:
        build_dft(
            [("A", D.AND_T, ["B"]), ("B", D.OR_T, ["A"])],
            top="A",
        )
    report = err.value.report
    assert "cycle" in report.rules()
    flagged = {i.node for i in report.errors if i.rule == "cycle"}
    assert flagged == {0, 1}


def test_build_collects_every_violation():
    with pytest.raises(InvalidDftError) as err:
        build_dft(
            [
                ("G", D.AND_T, ["missing", "B"]),
                ("B", D.be(1.0, 1.0), ["G"]),
                ("H", D.OR_T, []),
                ("D", D.FDEP_T, ["B"]),
            ],
            top="nope",
            evidence=["G", "ghost"],
        )
    rules = err.value.report.rules()
    assert {
        "dangling-child",
        "leaf-with-children",
        "childless-gate",
        "dependency-arity",
        "missing-top",
        "unknown-evidence",
        "evidence-not-be",
    } <= rules


def test_build_rejects_duplicate_names_and_children():
    with pytest.raises(InvalidDftError) as err:
        build_dft(
            [
                ("A", D.be(1.0, 1.0), []),
                ("A", D.be(1.0, 1.0), []),
                ("G", D.AND_T, ["A", "A"]),
            ],
            top="G",
        )
    assert {"duplicate-name", "duplicate-child"} <= err.value.report.rules()


def test_vote_threshold_checked():
    with pytest.raises(InvalidDftError) as err:
        build_dft(
            [
                ("V", D.vot(3), ["A", "B"]),
                ("A", D.be(1.0, 1.0), []),
                ("B", D.be(1.0, 1.0), []),
            ],
            top="V",
        )
    assert "vote-threshold" in err.value.report.rules()


def test_node_type_invariants():
    with pytest.raises(ValueError):
        D.be(0.0, 1.0)
    with pytest.raises(ValueError):
        D.be(1.0, -0.1)
    with pytest.raises(ValueError):
        D.pdep(1.5)
    assert D.be(2.0, 0.0).is_cold
    assert D.FDEP_T.forward_probability == 1.0
    assert D.pdep(0.8).forward_probability == 0.8


def test_spare_modules_nested(nested):
    modules = spare_modules(nested)
    named = {
        nested.node(rep).name: sorted(nested.node(v).name for v in members)
        for rep, members in modules.items()
    }
    assert named == {
        "A1": ["A1", "A2", "A3"],
        "B1": ["B1", "B2", "SP2"],
        "C1": ["C1"],
        "D1": ["D1"],
    }


def test_spare_modules_empty_without_spares(f1):
    assert spare_modules(f1) == {}


def test_spare_modules_bike(bike):
    modules = spare_modules(bike)
    named = {
        bike.node(rep).name: sorted(bike.node(v).name for v in members)
        for rep, members in modules.items()
    }
    assert named == {"W1": ["W1"], "W2": ["W2"], "WS": ["WS"]}


def test_module_disjointness_for_accepted_trees(nested, bike):
    for tree in (nested, bike):
        report = validate_conventional(tree)
        assert report.ok
        modules = spare_modules(tree)
        reps = sorted(modules)
        for i, a in enumerate(reps):
            assert a in modules[a]       # representative belongs to its module
            for b in reps[i + 1:]:
                assert not (modules[a] & modules[b])


def test_conventional_flags_module_overlap():
    # Both spares use gates over one common basic event: the modules of G1
    # and G2 share C without going through a representative.
    tree = build_dft(
        [
            ("T", D.AND_T, ["S1", "S2"]),
            ("S1", D.spare(), ["G1", "R1"]),
            ("S2", D.spare(), ["G2", "R2"]),
            ("G1", D.OR_T, ["C", "E1"]),
            ("G2", D.OR_T, ["C", "E2"]),
            ("C", D.be(1.0, 1.0), []),
            ("E1", D.be(1.0, 1.0), []),
            ("E2", D.be(1.0, 1.0), []),
            ("R1", D.be(1.0, 1.0), []),
            ("R2", D.be(1.0, 1.0), []),
        ],
        top="T",
    )
    report = validate_conventional(tree)
    assert "module-overlap" in report.rules()


def test_conventional_flags_outside_use_of_module_internals():
    tree = build_dft(
        [
            ("T", D.AND_T, ["S1", "Spy"]),
            ("S1", D.spare(), ["G1", "R1"]),
            ("G1", D.OR_T, ["C", "E1"]),
            ("Spy", D.OR_T, ["C"]),
            ("C", D.be(1.0, 1.0), []),
            ("E1", D.be(1.0, 1.0), []),
            ("R1", D.be(1.0, 1.0), []),
        ],
        top="T",
    )
    report = validate_conventional(tree)
    assert "module-shared-inside" in report.rules()


def test_conventional_rejects_seq_over_gate():
    tree = build_dft(
        [
            ("T", D.AND_T, ["A", "B"]),
            ("Q", D.SEQ_T, ["G", "B"]),
            ("G", D.OR_T, ["A"]),
            ("A", D.be(1.0, 1.0), []),
            ("B", D.be(1.0, 1.0), []),
        ],
        top="T",
    )
    report = validate_conventional(tree)
    assert "restrictor-over-gate" in report.rules()


def test_conventional_gate_trigger_is_warning_only(f5):
    report = validate_conventional(f5)
    assert report.ok
    assert any(i.rule == "gate-trigger" for i in report.warnings)


def test_conventional_rejects_gate_dependents():
    tree = build_dft(
        [
            ("T", D.AND_T, ["A", "G"]),
            ("G", D.OR_T, ["B"]),
            ("D", D.FDEP_T, ["A", "G"]),
            ("A", D.be(1.0, 1.0), []),
            ("B", D.be(1.0, 1.0), []),
        ],
        top="T",
    )
    assert "dependent-not-be" in validate_conventional(tree).rules()


def test_degenerate_spare_warns():
    tree = build_dft(
        [("S", D.spare(), ["A"]), ("A", D.be(1.0, 1.0), [])],
        top="S",
    )
    report = validate_conventional(tree)
    assert report.ok
    assert any(i.rule == "degenerate-spare" for i in report.warnings)


def test_profile_support_por_under_ioimc():
    tree = build_dft(
        [
            ("P", D.por(True), ["A", "B"]),
            ("A", D.be(1.0, 1.0), []),
            ("B", D.be(1.0, 1.0), []),
        ],
        top="P",
    )
    report = check_profile_support(tree, "ioimc")
    assert not report.ok
    assert any("PAND only" in i.message for i in report.errors)
    for ok_profile in ("monolithic-ma", "gspn-new"):
        assert check_profile_support(tree, ok_profile).ok


def test_profile_support_static_tree_everywhere(f1):
    static = build_dft(
        [
            ("T", D.OR_T, ["A", "G"]),
            ("G", D.AND_T, ["B", "C"]),
            ("A", D.be(1.0, 1.0), []),
            ("B", D.be(1.0, 1.0), []),
            ("C", D.be(1.0, 1.0), []),
        ],
        top="T",
    )
    for profile in fx.ALL_PROFILES:
        report = check_profile_support(static, profile)
        assert report.ok, profile


def test_profile_support_shared_spare_under_original(bike):
    report = check_profile_support(bike, "gspn-orig")
    assert not report.ok
    assert any(i.rule == "share-spares" for i in report.errors)
    assert check_profile_support(bike, "gspn-new").ok


def test_profile_support_subtree_and_pdep_gating(nested):
    report = check_profile_support(nested, "monolithic-ctmc")
    assert any(i.rule == "spare-with-subtree" for i in report.errors)
    pdep_tree = fx.parse(fx.PDEP_08)
    for rejecting in ("monolithic-ctmc", "ioimc", "gspn-orig"):
        assert not check_profile_support(pdep_tree, rejecting).ok
    for accepting in ("monolithic-ma", "gspn-new"):
        assert check_profile_support(pdep_tree, accepting).ok


def test_profile_support_downward_deps(f5):
    for profile in ("monolithic-ctmc", "ioimc", "monolithic-ma", "gspn-orig"):
        report = check_profile_support(f5, profile)
        assert any(i.rule == "downward-dependencies" for i in report.errors), profile
    assert check_profile_support(f5, "gspn-new").ok


def test_profile_support_shared_primary():
    tree = build_dft(
        [
            ("T", D.AND_T, ["S1", "S2"]),
            ("S1", D.spare(), ["P", "R1"]),
            ("S2", D.spare(), ["P", "R2"]),
            ("P", D.be(1.0, 1.0), []),
            ("R1", D.be(1.0, 1.0), []),
            ("R2", D.be(1.0, 1.0), []),
        ],
        top="T",
    )
    for rejecting in ("monolithic-ctmc", "monolithic-ma", "gspn-orig"):
        report = check_profile_support(tree, rejecting)
        assert any(i.rule == "shared-primary" for i in report.errors), rejecting
    for accepting in ("ioimc", "gspn-new"):
        assert check_profile_support(tree, accepting).ok, accepting


def test_variant_mismatch_warns_but_accepts(f1):
    report = check_profile_support(f1, "ioimc")
    assert report.ok
    assert any(i.rule == "variant-mismatch" for i in report.warnings)
