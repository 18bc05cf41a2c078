import re

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsarbench.chem import match_pattern, parse_smiles
from qsarbench.errors import MismatchError
from qsarbench.featurize import (
    BitFingerprint,
    descriptor_panel,
    ecfp,
    feature_matrix,
    load_or_build,
    structural_keys,
    tanimoto,
    tanimoto_matrix,
)
from qsarbench.featurize.keys import KEY_DEFS, NKEYS, UNSUPPORTED_KEYS, key_pattern

HETERO = re.compile(r"(?<![!#])#(7|8|16)(?!\d)|(?<![A-Za-z#!])[NOS](?![a-z])")


def fp(bits, n=8, tag="t"):
    return BitFingerprint(n, frozenset(bits), tag)


def test_ecfp_order_invariant():
    assert ecfp(parse_smiles("CCO")).bits == ecfp(parse_smiles("OCC")).bits


def test_ecfp_benzene_few_bits():
    # one environment per radius level: at most three identifiers
    n = ecfp(parse_smiles("c1ccccc1"), 2).count
    assert 1 <= n <= 3


def test_ecfp_methane_radius_independent():
    m = parse_smiles("C")
    assert ecfp(m, 2).bits == ecfp(m, 3).bits


def test_ecfp6_superset_of_ecfp4(corpus):
    for s in corpus[:30]:
        m = parse_smiles(s)
        assert ecfp(m, 2).bits <= ecfp(m, 3).bits


def test_ecfp_folding_width():
    f = ecfp(parse_smiles("CC(=O)Oc1ccccc1C(=O)O"), 2, 64)
    assert f.nbits == 64 and all(0 <= b < 64 for b in f.bits)


def test_keys_hydrocarbon_has_no_heteroatom_keys():
    bits = structural_keys(parse_smiles("CCCC")).bits
    hetero = {k for k, (smarts, _) in KEY_DEFS.items() if HETERO.search(smarts)}
    assert hetero, "regex should find heteroatom keys"
    assert not {b + 1 for b in bits} & hetero


def test_keys_benzene_aromatic_key_agrees_with_pattern():
    m = parse_smiles("c1ccccc1")
    pattern, count = key_pattern(162)
    assert match_pattern(m, pattern) > count
    assert 161 in structural_keys(m).bits


def test_keys_order_invariant_and_width():
    a = structural_keys(parse_smiles("CCO"))
    assert a.bits == structural_keys(parse_smiles("OCC")).bits
    assert a.nbits == NKEYS


def test_unsupported_keys_never_set(corpus):
    for s in corpus[:40]:
        bits = structural_keys(parse_smiles(s)).bits
        assert not {k - 1 for k in UNSUPPORTED_KEYS} & bits


def test_procedural_keys():
    assert 165 in structural_keys(parse_smiles("[Na+].[Cl-]")).bits
    assert 124 in structural_keys(parse_smiles("c1ccc(cc1)-c1ccccc1")).bits
    assert 124 not in structural_keys(parse_smiles("c1ccccc1")).bits


def test_ethanol_descriptors():
    d = descriptor_panel(parse_smiles("CCO"))
    # 2 x 12.011 + 6 x 1.008 + 15.999
    assert d.mol_weight == pytest.approx(46.069, abs=0.01)
    assert (d.hbd, d.hba, d.rotatable_bonds) == (1, 1, 0)
    assert d.heavy_atoms == 3


def test_benzene_descriptors():
    d = descriptor_panel(parse_smiles("c1ccccc1"))
    assert d.aromatic_rings == 1 and d.fraction_sp3 == 0


def test_ammonium_charge():
    assert descriptor_panel(parse_smiles("[NH4+]")).net_charge == 1


def test_tpsa_and_logp_plausible():
    # Ertl TPSA of acetic acid is 37.3; logP ordering hexane > ethanol > glycerol
    assert descriptor_panel(parse_smiles("CC(=O)O")).tpsa == pytest.approx(37.3, abs=0.05)
    lp = [descriptor_panel(parse_smiles(s)).logp for s in ("CCCCCC", "CCO", "OCC(O)CO")]
    assert lp[0] > lp[1] > lp[2]


def test_tanimoto_cases():
    x = fp({1, 2, 3})
    assert tanimoto(x, x) == 1.0
    assert tanimoto(fp({1}), fp({2})) == 0.0
    assert tanimoto(x, fp({2, 3, 4})) == 0.5


def test_tanimoto_mismatch():
    with pytest.raises(MismatchError):
        tanimoto(fp({1}, 8), fp({1}, 16))


@given(st.sets(st.integers(0, 31)), st.sets(st.integers(0, 31)))
def test_tanimoto_properties(a, b):
    x, y = fp(a, 32), fp(b, 32)
    t = tanimoto(x, y)
    assert 0.0 <= t <= 1.0
    assert t == tanimoto(y, x)
    M = tanimoto_matrix(x.to_array()[None, :], y.to_array()[None, :])
    if a or b:
        assert M[0, 0] == pytest.approx(t)


def test_feature_matrix_shapes(corpus):
    X = feature_matrix(corpus[:5], "ecfp4", 256)
    assert X.shape == (5, 256) and X.dtype == np.uint8
    D = feature_matrix(corpus[:5], "descriptors")
    assert D.shape == (5, 16) and D.dtype == np.float64
    with pytest.raises(ValueError):
        feature_matrix(corpus[:1], "graph")


def test_feature_cache_round_trip(tmp_path, corpus):
    a = load_or_build(tmp_path, corpus[:10], "keys")
    assert len(list(tmp_path.glob("*.npz"))) == 1
    b = load_or_build(tmp_path, corpus[:10], "keys")
    assert np.array_equal(a, b)
