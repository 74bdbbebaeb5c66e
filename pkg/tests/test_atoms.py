import pytest
from hypothesis import given, settings, strategies as st

from contrakit.atoms.cotorsion import (
    CORPUS, UnknownCorpusEntry, cotorsion_envelope, envelope_report, flat_cover_corpus,
)
from contrakit.atoms.expr import ParseError, parse
from contrakit.atoms.matlis import (
    NotPPrimary, all_p_groups, dual_sequence_report, duality_report, matlis_dual, random_short_exact,
)
from contrakit.atoms.rules import Unknown, classify, delta_atoms, flags_atoms, hom_atoms
from contrakit.fpmod import FPModule


@pytest.mark.parametrize("a, b, expected", [
    ("Z/4", "Z/8", "Z/4"),
    ("Q", "Z/5", "0"),
    ("Zp(3)", "Z/9", "Z/9"),
    ("Prufer(2)", "Prufer(2)", "Zp(2)"),
    ("Zinv(6)", "Z/5", "Z/5"),
    ("Q", "Prufer(3)", "Qp(3)"),
    ("Z", "Z", "Z"),
])
def test_hom_table(a, b, expected):
    assert str(hom_atoms(parse(a), parse(b))) == expected


def test_unknown_propagates():
    value = hom_atoms(parse("Adele(1) + Z/2"), parse("Z"))
    assert isinstance(value, Unknown)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as info:
        parse("Z/4 +")
    assert info.value.position == 5


atom_text = st.sampled_from(["Z", "Q", "Z/8", "Z/9", "Zp(2)", "Zp(5)", "Prufer(3)", "Zinv(6)",
                             "Qp(7)", "Adele(2)"])


@given(st.lists(atom_text, min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_print_parse_round_trip(parts):
    e = parse(" + ".join(parts))
    assert parse(str(e)) == e


def test_delta_on_atoms():
    assert str(delta_atoms(parse("Z + Z/12"), 6)) == "Zp(2) + Zp(3) + Z/4 + Z/3"


@pytest.mark.parametrize("text, kind", [
    ("Z/4 + Z/3", "reduced_cotorsion"),
    ("Prod{all}[Zp^1]", "flat_cotorsion"),
    ("Zp(2)^2", "flat_cotorsion"),
    ("Q + Prufer(3)", "injective"),
    ("Z", "NotInClass"),
])
def test_classify(text, kind):
    assert classify(parse(text)).kind == kind


def test_flags_and_witnesses():
    info = flags_atoms(parse("Z"))
    assert not info["flags"]["cotorsion"] and info["flags"]["flat"]
    assert "Ext^1" in info["witnesses"]["cotorsion"]
    assert flags_atoms(parse("Q + Prufer(3)"))["flags"]["divisible"]


def test_envelope_examples():
    assert str(cotorsion_envelope(FPModule.free(1))[0]) == "Prod{all}[Zp^1]"
    assert str(cotorsion_envelope(FPModule.cyclic(12))[0]) == "Z/4 + Z/3"
    assert envelope_report(FPModule.from_invariants(2, [6])).passed


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_entries_verify(name):
    assert flat_cover_corpus(name).passed


def test_unknown_corpus_entry():
    with pytest.raises(UnknownCorpusEntry):
        flat_cover_corpus("cyclic(x)")


def test_matlis_dual():
    assert str(matlis_dual(FPModule.from_invariants(0, [4, 2]))) == "Z/2 + Z/4"
    with pytest.raises(NotPPrimary):
        matlis_dual(FPModule.cyclic(6))
    for t in all_p_groups(2, max_gens=2, max_exp=3):
        assert duality_report(t).passed


def test_dual_sequences_exact(rng):
    for _ in range(15):
        p = rng.choice([2, 3])
        incl, proj = random_short_exact(rng, p)
        assert dual_sequence_report(incl, proj, p ** 4).passed
