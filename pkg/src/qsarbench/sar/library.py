"""Candidate rule features for train-fold induction.

Each motif has a substructure form and a regular-expression form over
canonical SMILES. The regex forms are deliberately crude, in the spirit of a
text-only rule writer; they are checked only against their exemplar.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Motif:
    name: str
    category: str
    smarts: str
    regex: str
    example: str


MOTIFS: tuple[Motif, ...] = (
    # toxicophores
    Motif("nitro", "toxicophore", "[N+](=O)[O-]", r"\[N\+\]\(\[O-\]\)=O|\[N\+\]\(=O\)\[O-\]|O=\[N\+\]", "CC[N+](=O)[O-]"),
    Motif("nitro_aromatic", "toxicophore", "c[N+](=O)[O-]", r"(c\d*|c\d?\))\[N\+\]\(\[O-\]\)=O|c\(\[N\+\]", "c1ccccc1[N+](=O)[O-]"),
    Motif("nitroso", "toxicophore", "[#6,#7][NX2]=O", r"(?<![\]+])N=O|O=N(?!\+)", "CN(C)N=O"),
    Motif("hydrazine", "toxicophore", "[NX3][NX3]", r"NN", "NNc1ccccc1"),
    Motif("azo", "toxicophore", "[#6]N=N[#6]", r"N=N", "c1ccccc1N=Nc1ccccc1"),
    Motif("azide", "toxicophore", "N=[N+]=[N-]", r"N=\[N\+\]=\[N-\]|\[N-\]=\[N\+\]=N", "CN=[N+]=[N-]"),
    Motif("epoxide", "toxicophore", "C1OC1", r"[CO](\d)[CO][CO]\1", "CC1CO1"),
    Motif("aziridine", "toxicophore", "C1NC1", r"[CN](\d)[CN][CN]\1", "CC1CN1"),
    Motif("michael_acceptor", "toxicophore", "C=CC=O", r"C=CC(\([^)]*\))?=O|C=CC=O", "C=CC(=O)C"),
    Motif("aldehyde", "toxicophore", "[CX3H1](=O)[#6]", r"C=O(\)|$)", "CCC=O"),
    Motif("acyl_halide", "toxicophore", "C(=O)[F,Cl,Br,I]", r"C\((F|Cl|Br|I)\)=O|C\(=O\)(F|Cl|Br|I)", "CC(=O)Cl"),
    Motif("alkyl_halide", "toxicophore", "[CX4][Cl,Br,I]", r"C\(?(Cl|Br|I)|(Cl|Br|I)C", "CCBr"),
    Motif("perhalo_methyl", "toxicophore", "C(F)(F)F", r"C\(F\)\(F\)F|FC\(F\)", "FC(F)(F)c1ccccc1"),
    Motif("trichloromethyl", "toxicophore", "C(Cl)(Cl)Cl", r"C\(Cl\)\(Cl\)Cl|ClC\(Cl\)", "CC(Cl)(Cl)Cl"),
    Motif("aromatic_amine", "toxicophore", "c[NH2]", r"(^|\()Nc|c\(N\)|cN($|\))|c\d?\)N($|\))", "Nc1ccccc1"),
    Motif("n_oxide", "toxicophore", "[n+][O-]", r"\[n\+\].*\[O-\]|\[O-\]\[n\+\]", "[O-][n+]1ccccc1"),
    Motif("nitroimidazole", "toxicophore", "[O-][N+](=O)c:[n;r5]", r"n.*\[N\+\]\(\[O-\]\)=O|\[N\+\]\(\[O-\]\)=O.*n", "Cn1ccnc1[N+](=O)[O-]"),
    Motif("nitrofuran", "toxicophore", "[O-][N+](=O)c:o", r"o.*\[N\+\]\(\[O-\]\)=O|\[N\+\]\(\[O-\]\)=O.*o", "O=Cc1ccc(o1)[N+](=O)[O-]"),
    Motif("peroxide", "toxicophore", "OO", r"OO", "CCOOC"),
    Motif("disulfide", "toxicophore", "SS", r"SS", "CSSC"),
    Motif("isocyanate", "toxicophore", "N=C=O", r"N=C=O|O=C=N", "CN=C=O"),
    Motif("isothiocyanate", "toxicophore", "N=C=S", r"N=C=S|S=C=N", "CN=C=S"),
    Motif("quinone", "toxicophore", "O=C1C=CC(=O)C=C1", r"C(\d)=CC\(C=CC\1=O\)=O|C(\d)=CC\(=O\)C=CC\2=O", "O=C1C=CC(=O)C=C1"),
    Motif("polycyclic_aromatic", "toxicophore", "c1ccc2cc3ccccc3cc2c1", r"c\d?c\d?c\d", "c1ccc2cc3ccccc3cc2c1"),
    # heteroaromatics
    Motif("quinoline", "heteroaromatic", "c1ccc2ncccc2c1", r"c(\d)ccc(\d)c\(c\1\)cccn\2|n(\d)cccc(\d)ccccc\3\4", "c1ccc2ncccc2c1"),
    Motif("isoquinoline", "heteroaromatic", "c1ccc2cnccc2c1", r"cncc|ccnc\d", "c1ccc2cnccc2c1"),
    Motif("indole", "heteroaromatic", "c1ccc2[nH]ccc2c1", r"\[nH\]", "c1ccc2[nH]ccc2c1"),
    Motif("azole", "heteroaromatic", "[n;r5]", r"n\d?c\d?n|\[nH\]|n\d", "Cn1ccnc1"),
    Motif("pyridine", "heteroaromatic", "[n;r6]", r"n", "c1ccncc1"),
    Motif("pyrimidine", "heteroaromatic", "[n;r6]:c:[n;r6]", r"ncn|n\d?c\d?n", "c1cncnc1"),
    Motif("thiophene", "heteroaromatic", "[s;r5]", r"s", "c1ccsc1"),
    Motif("furan", "heteroaromatic", "[o;r5]", r"o", "c1ccoc1"),
    Motif("benzene", "heteroaromatic", "c1ccccc1", r"c(\d)ccccc\1|c\d?cccc", "Cc1ccccc1"),
    Motif("biaryl", "lipophilicity", "c!@c", r"c\d?\)?c\d?c.*c\d?\(?c\d", "c1ccc(cc1)-c1ccccc1"),
    Motif("naphthalene", "lipophilicity", "c1ccc2ccccc2c1", r"c(\d)ccc(\d)ccccc\2c\1|c\d?ccc\d?c\d", "c1ccc2ccccc2c1"),
    # functional groups
    Motif("phenol", "hbond", "c[OH]", r"(^|\()Oc|c\(O\)|cO($|\))|c\d?\)O($|\))", "Oc1ccccc1"),
    Motif("catechol", "hbond", "c([OH])c[OH]", r"c\(O\)c\(?O|Oc\d?c\(?O|c\(c\d\)O\)O", "Oc1ccccc1O"),
    Motif("carboxylic_acid", "polarity", "C(=O)[OH]", r"C\(O\)=O|C\(=O\)O($|\))|OC\(=O\)(?!O)", "CC(=O)O"),
    Motif("ester", "polarity", "[#6]C(=O)O[#6]", r"C\(=O\)O[Cc]|OC\(=O\)|C\(O[Cc]\)=O|C\(=O\)OC", "CC(=O)OC"),
    Motif("amide", "hbond", "C(=O)[NX3]", r"C\(=O\)N|NC\(=O\)|C\(N\)=O|NC=O|C\(N[^)]*\)=O", "CC(=O)NC"),
    Motif("anilide", "hbond", "c[NH]C(=O)", r"cNC\(|c\(NC\(|NC\([^)]*\)=O|C\(Nc", "CC(=O)Nc1ccccc1"),
    Motif("carbamate", "polarity", "[NX3]C(=O)O", r"NC\(=O\)O|OC\(=O\)N|C\(=O\)\(O", "CNC(=O)OC"),
    Motif("urea", "hbond", "[NX3]C(=O)[NX3]", r"NC\(=O\)N|NC\(N[^)]*\)=O", "CNC(=O)NC"),
    Motif("guanidine", "hbond", "[NX3]C(=[NX2])[NX3]", r"NC\(=N\)N|NC\(N\)=N|N=C\(N\)N|C\(=N\)\(N\)N", "NC(=N)N"),
    Motif("sulfonamide", "polarity", "S(=O)(=O)[NX3]", r"S\(=O\)\(=O\)N|NS\(=O\)\(=O\)|S\(N\)\(=O\)=O|S\([^)]*\)\(=O\)=O", "CS(=O)(=O)N"),
    Motif("sulfonyl", "polarity", "S(=O)=O", r"S\(=O\)\(=O\)|S\(=O\)=O|\(=O\)=O", "CS(=O)(=O)C"),
    Motif("sulfonic_acid", "polarity", "S(=O)(=O)[OH]", r"S\(O\)\(=O\)=O|S\(=O\)\(=O\)O", "CS(=O)(=O)O"),
    Motif("thiol", "polarity", "[SX2H1]", r"S($|\))|^S[^(a-z]|\[SH\]", "CCS"),
    Motif("thioether", "lipophilicity", "[#6][SX2][#6]", r"[Cc]S[Cc]", "CSC"),
    Motif("thiocarbonyl", "polarity", "C=S", r"C=S|=S", "NC(N)=S"),
    Motif("nitrile", "polarity", "C#N", r"C#N|N#C", "CC#N"),
    Motif("ketone", "polarity", "[#6][CX3](=O)[#6]", r"C\([Cc][^)]*\)=O|C\(=O\)[Cc]", "CC(C)=O"),
    Motif("hydroxyl", "hbond", "[CX4][OH]", r"CO($|\))|\(O\)|^OC", "CCO"),
    Motif("ether", "polarity", "[CX4]O[CX4]", r"COC", "CCOC"),
    Motif("phosphate", "polarity", "P(=O)(O)O", r"P\(=O\)|P\(O\)|OP", "COP(=O)(OC)OC"),
    Motif("boronic_acid", "polarity", "B(O)O", r"B\(O\)O|B\(.*\)\(O\)O", "OB(O)c1ccccc1"),
    # amines and charge
    Motif("primary_amine", "amine", "[CX4][NH2]", r"CN($|\))|\(N\)|^NC", "CCN"),
    Motif("secondary_amine", "amine", "[CX4][NH][CX4]", r"CNC", "CNC"),
    Motif("tertiary_amine", "amine", "[CX4][NX3H0]([CX4])[CX4]", r"CN\(C\)C|N\(C\)C", "CN(C)C"),
    Motif("quaternary_ammonium", "amine", "[NX4+]", r"\[N\+\](?!\(\[O-\]\)=O)", "C[N+](C)(C)C"),
    Motif("anion", "polarity", "[-]", r"-\]", "CC(=O)[O-]"),
    # halogens and lipophilic fragments
    Motif("aryl_halide", "halogen", "c[F,Cl,Br,I]", r"c\(?(F|Cl|Br|I)|(F|Cl|Br|I)c|c\d?\)(F|Cl|Br|I)", "Clc1ccccc1"),
    Motif("fluorine", "halogen", "F", r"F", "CF"),
    Motif("chlorine", "halogen", "Cl", r"Cl", "CCl"),
    Motif("bromine", "halogen", "Br", r"Br", "CBr"),
    Motif("iodine", "halogen", "I", r"I", "CI"),
    Motif("long_alkyl_chain", "lipophilicity", "[CH2][CH2][CH2][CH2][CH2]", r"CCCCCC", "CCCCCCC"),
    Motif("alkene", "lipophilicity", "C=C", r"C=C", "CC=C"),
    Motif("alkyne", "lipophilicity", "C#C", r"C#C", "CC#C"),
)

DESCRIPTOR_CANDIDATES: tuple[tuple[str, str, str], ...] = (
    ("logp_gt_3", "logp > 3", "lipophilicity"),
    ("logp_gt_5", "logp > 5", "lipophilicity"),
    ("tpsa_lt_75", "tpsa < 75", "polarity"),
    ("tpsa_gt_140", "tpsa > 140", "polarity"),
    ("hbd_gt_5", "hbd > 5", "hbond"),
    ("hba_gt_10", "hba > 10", "hbond"),
    ("mw_gt_500", "mol_weight > 500", "size"),
    ("rotb_gt_10", "rotatable_bonds > 10", "size"),
    ("aromatic_rings_ge_3", "aromatic_rings >= 3", "lipophilicity"),
)


@dataclass(frozen=True)
class Candidate:
    name: str
    kind: str
    source: str
    category: str


def candidate_library(flavor: str = "smarts", descriptors: bool = True) -> tuple[Candidate, ...]:
    """Motif candidates in one flavor plus optional descriptor thresholds.

    Args:
        flavor: "smarts" for substructure patterns, "text" for regular
            expressions over canonical SMILES.
    """
    if flavor not in ("smarts", "text"):
        raise ValueError(f"unknown flavor {flavor!r}")
    out = [
        Candidate(m.name, flavor, m.smarts if flavor == "smarts" else m.regex, m.category) for m in MOTIFS
    ]
    if descriptors:
        out.extend(Candidate(n, "descriptor", src, cat) for n, src, cat in DESCRIPTOR_CANDIDATES)
    return tuple(out)
