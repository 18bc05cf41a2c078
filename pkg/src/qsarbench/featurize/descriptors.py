"""Sixteen-slot physicochemical descriptor panel.

TPSA uses the Ertl N/O fragment contributions. logP and molar refractivity use
a reduced Wildman-Crippen atom typing: the common aliphatic, aromatic and
heteroatom classes are typed individually and anything else falls back to the
supplemental type of its element.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..chem.elements import HALOGENS, mass
from ..chem.molecule import Molecule

SLOT_NAMES = (
    "mol_weight",
    "heavy_atoms",
    "rings",
    "aromatic_rings",
    "hbd",
    "hba",
    "rotatable_bonds",
    "tpsa",
    "logp",
    "mr",
    "fraction_sp3",
    "halogens",
    "n_count",
    "o_count",
    "s_count",
    "net_charge",
)


class DescriptorVector(NamedTuple):
    mol_weight: float
    heavy_atoms: float
    rings: float
    aromatic_rings: float
    hbd: float
    hba: float
    rotatable_bonds: float
    tpsa: float
    logp: float
    mr: float
    fraction_sp3: float
    halogens: float
    n_count: float
    o_count: float
    s_count: float
    net_charge: float

    def to_array(self) -> np.ndarray:
        return np.asarray(self, dtype=np.float64)


# (symbol, aromatic, charge, H count, sorted heavy bond codes) -> contribution
_TPSA: dict[tuple, float] = {
    ("N", False, 0, 0, (1, 1, 1)): 3.24,
    ("N", False, 0, 0, (1, 2)): 12.36,
    ("N", False, 0, 0, (3,)): 23.79,
    ("N", False, 0, 0, (1, 2, 2)): 11.68,
    ("N", False, 0, 0, (2, 3)): 13.60,
    ("N", False, 0, 1, (1, 1)): 12.03,
    ("N", False, 0, 1, (2,)): 23.85,
    ("N", False, 0, 2, (1,)): 26.02,
    ("N", False, 1, 0, (1, 1, 1, 1)): 0.00,
    ("N", False, 1, 0, (1, 1, 2)): 3.01,
    ("N", False, 1, 0, (1, 3)): 4.36,
    ("N", False, 1, 1, (1, 1, 1)): 4.44,
    ("N", False, 1, 1, (1, 2)): 13.97,
    ("N", False, 1, 2, (1, 1)): 16.61,
    ("N", False, 1, 2, (2,)): 25.59,
    ("N", False, 1, 3, (1,)): 27.64,
    ("N", True, 0, 0, (4, 4)): 12.89,
    ("N", True, 0, 0, (4, 4, 4)): 4.41,
    ("N", True, 0, 0, (1, 4, 4)): 4.93,
    ("N", True, 0, 0, (2, 4, 4)): 8.39,
    ("N", True, 0, 1, (4, 4)): 15.79,
    ("N", True, 1, 0, (4, 4, 4)): 4.10,
    ("N", True, 1, 0, (1, 4, 4)): 3.88,
    ("N", True, 1, 1, (4, 4)): 14.14,
    ("O", False, 0, 0, (1, 1)): 9.23,
    ("O", False, 0, 0, (2,)): 17.07,
    ("O", False, 0, 1, (1,)): 20.23,
    ("O", False, -1, 0, (1,)): 23.06,
    ("O", True, 0, 0, (4, 4)): 13.14,
}
_TPSA_3RING = {
    ("N", False, 0, 0, (1, 1, 1)): 3.01,
    ("N", False, 0, 1, (1, 1)): 21.94,
    ("O", False, 0, 0, (1, 1)): 12.53,
}

# Wildman-Crippen (logP, MR) by atom type
_CRIPPEN: dict[str, tuple[float, float]] = {
    "C1": (0.1441, 2.503),  # aliphatic CH3/CH2, carbon neighbours only
    "C2": (0.0000, 2.433),  # aliphatic CH/C, carbon neighbours only
    "C3": (-0.2035, 2.753),  # CH3/CH2 with a heteroatom neighbour
    "C4": (-0.2051, 2.731),  # CH/C with a heteroatom neighbour
    "C5": (-0.2783, 5.007),  # C=heteroatom
    "C6": (0.1551, 3.513),  # C=C aliphatic
    "C7": (0.0017, 3.888),  # acetylenic / nitrile
    "C8": (0.08452, 2.464),  # aliphatic attached to aromatic
    "C14": (0.0000, 3.257),  # aromatic C-halogen
    "C18": (0.1581, 3.350),  # aromatic CH
    "C19": (0.2955, 4.346),  # aromatic bridgehead
    "C20": (0.2713, 3.904),  # aromatic C-aromatic (biaryl)
    "C21": (0.1360, 3.509),  # aromatic C-C
    "C22": (0.4619, 3.067),  # aromatic C-N
    "C23": (0.5437, 3.853),  # aromatic C-O
    "C24": (0.1893, 2.673),  # aromatic C-S
    "CS": (0.08129, 3.243),
    "H1": (0.1230, 1.057),  # hydrocarbon
    "H2": (-0.2677, 1.395),  # alcohol / acid
    "H3": (0.2142, 0.9627),  # amine
    "H4": (0.2980, 1.805),  # aromatic
    "N1": (-1.0190, 2.262),  # primary aliphatic amine
    "N2": (-0.7096, 2.173),  # secondary aliphatic amine
    "N3": (-1.0270, 2.827),  # primary aromatic amine
    "N4": (-0.5188, 3.000),  # secondary aromatic amine
    "N5": (0.08387, 1.757),  # imine
    "N7": (-0.3187, 1.839),  # tertiary aliphatic amine
    "N8": (-0.4458, 2.819),  # tertiary aromatic amine
    "N9": (0.01508, 1.725),  # nitrile
    "N10": (-1.950, 0.0),  # protonated amine
    "N11": (-0.3239, 2.202),  # aromatic n
    "N12": (-1.119, 0.0),  # charged aromatic n
    "N13": (-0.3396, 0.2604),  # quaternary / nitro
    "NS": (-0.4806, 2.134),
    "O1": (0.1552, 1.080),  # aromatic o
    "O2": (-0.2893, 0.8238),  # alcohol
    "O3": (-0.0684, 1.085),  # aliphatic ether
    "O4": (-0.4195, 1.182),  # aromatic ether
    "O9": (-0.1526, 0.0),  # carbonyl aliphatic
    "O10": (0.1129, 0.2215),  # carbonyl aromatic
    "O11": (0.4833, 0.3890),  # carbonyl heteroatom
    "O12": (-1.326, 0.0),  # acid / oxide anion
    "OS": (-0.1188, 0.6865),
    "F": (0.4202, 1.108),
    "Cl": (0.6895, 5.853),
    "Br": (0.8456, 8.927),
    "I": (0.8857, 14.02),
    "S1": (0.6482, 7.591),
    "S2": (-0.0024, 7.365),
    "S3": (0.6237, 6.691),
    "P": (0.8612, 6.920),
    "Me": (-0.3808, 5.754),  # any other element
}


def _carbon_type(mol: Molecule, i: int) -> str:
    a = mol.atoms[i]
    nbrs = [(mol.atoms[j], mol.bonds[k]) for j, k in mol.adjacency[i] if mol.atoms[j].symbol != "H"]
    if a.aromatic:
        exo = [(n, b) for n, b in nbrs if not b.aromatic]
        if not exo:
            return "C19" if len(nbrs) >= 3 else "C18"
        n, _ = exo[0]
        if n.symbol in HALOGENS:
            return "C14"
        if n.aromatic:
            return "C20"
        return {"C": "C21", "N": "C22", "O": "C23", "S": "C24"}.get(n.symbol, "CS")
    if any(b.order == 3 for _, b in nbrs):
        return "C7"
    doubles = [n for n, b in nbrs if b.order == 2 and not b.aromatic]
    if doubles:
        return "C6" if all(n.symbol == "C" for n in doubles) else "C5"
    if any(n.aromatic for n, _ in nbrs):
        return "C8"
    hetero = any(n.symbol != "C" for n, _ in nbrs)
    if len(nbrs) <= 2:
        return "C3" if hetero else "C1"
    return "C4" if hetero else "C2"


def _nitrogen_type(mol: Molecule, i: int) -> str:
    a = mol.atoms[i]
    h = mol.total_h(i)
    nbrs = [(mol.atoms[j], mol.bonds[k]) for j, k in mol.adjacency[i] if mol.atoms[j].symbol != "H"]
    if a.aromatic:
        return "N12" if a.charge > 0 else "N11"
    if a.charge > 0:
        return "N10" if h else "N13"
    if any(b.order == 3 for _, b in nbrs):
        return "N9"
    if any(b.order == 2 for _, b in nbrs):
        return "N5"
    on_aromatic = any(n.aromatic for n, _ in nbrs)
    if h >= 2:
        return "N3" if on_aromatic else "N1"
    if h == 1:
        return "N4" if on_aromatic else "N2"
    return "N8" if on_aromatic else "N7"


def _oxygen_type(mol: Molecule, i: int) -> str:
    a = mol.atoms[i]
    nbrs = [(mol.atoms[j], mol.bonds[k]) for j, k in mol.adjacency[i] if mol.atoms[j].symbol != "H"]
    if a.aromatic:
        return "O1"
    if a.charge < 0:
        return "O12"
    if len(nbrs) == 1 and nbrs[0][1].order == 2:
        if nbrs[0][0].symbol != "C":
            return "O11"
        c = next(j for j, _ in mol.adjacency[i])
        others = [mol.atoms[j] for j, _ in mol.adjacency[c] if j != i]
        if any(o.symbol in ("N", "O", "S") for o in others):
            return "O11"
        if any(o.aromatic for o in others):
            return "O10"
        return "O9"
    if mol.total_h(i):
        return "O2"
    if any(n.aromatic for n, _ in nbrs):
        return "O4"
    if len(nbrs) == 2:
        return "O3"
    return "OS"


def _hydrogen_type(mol: Molecule, parent: int) -> str:
    p = mol.atoms[parent]
    if p.symbol == "C":
        return "H4" if p.aromatic else "H1"
    if p.symbol == "N":
        return "H3"
    if p.symbol == "O":
        return "H2"
    return "H1"


def atom_crippen_type(mol: Molecule, i: int) -> str:
    sym = mol.atoms[i].symbol
    if sym == "C":
        return _carbon_type(mol, i)
    if sym == "N":
        return _nitrogen_type(mol, i)
    if sym == "O":
        return _oxygen_type(mol, i)
    if sym in ("F", "Cl", "Br", "I"):
        return sym
    if sym == "S":
        a = mol.atoms[i]
        if a.aromatic:
            return "S3"
        return "S2" if a.charge else "S1"
    if sym == "P":
        return "P"
    return "Me"


def crippen(mol: Molecule) -> tuple[float, float]:
    """(logP, MR) summed over heavy atoms and their hydrogens."""
    logp = mr = 0.0
    for i, a in enumerate(mol.atoms):
        if a.symbol == "H":
            continue
        lp, m = _CRIPPEN[atom_crippen_type(mol, i)]
        logp += lp
        mr += m
        h = mol.total_h(i)
        if h:
            lp, m = _CRIPPEN[_hydrogen_type(mol, i)]
            logp += h * lp
            mr += h * m
    return logp, mr


def _in_three_ring(mol: Molecule, i: int) -> bool:
    return any(len(r) == 3 and i in r for r in mol.rings)


def tpsa(mol: Molecule) -> float:
    total = 0.0
    for i, a in enumerate(mol.atoms):
        if a.symbol not in ("N", "O"):
            continue
        h = mol.total_h(i)
        codes = tuple(sorted(mol.bonds[k].code for j, k in mol.adjacency[i] if mol.atoms[j].symbol != "H"))
        key = (a.symbol, a.aromatic, a.charge, h, codes)
        if _in_three_ring(mol, i) and key in _TPSA_3RING:
            total += _TPSA_3RING[key]
        elif key in _TPSA:
            total += _TPSA[key]
        elif a.symbol == "N":
            total += max(0.0, 30.5 - 8.2 * len(codes) + 1.5 * h)
        else:
            total += max(0.0, 28.5 - 8.6 * len(codes) + 1.5 * h)
    return total


def _is_acceptor(mol: Molecule, i: int) -> bool:
    a = mol.atoms[i]
    if a.symbol == "O":
        return a.charge <= 0
    if a.symbol != "N" or a.charge > 0:
        return False
    nbrs = [(mol.atoms[j], mol.bonds[k]) for j, k in mol.adjacency[i] if mol.atoms[j].symbol != "H"]
    if a.aromatic:
        # pyridine-type only, pyrrole-type n has its lone pair in the ring
        return mol.total_h(i) == 0 and len(nbrs) == 2
    # amide and aniline nitrogens are not counted
    if any(n.aromatic and b.order == 1 and not b.aromatic for n, b in nbrs):
        return False
    for j, k in mol.adjacency[i]:
        if mol.bonds[k].order != 1 or mol.atoms[j].symbol != "C":
            continue
        for m, kk in mol.adjacency[j]:
            if m != i and mol.bonds[kk].order == 2 and mol.atoms[m].symbol in ("O", "S"):
                return False
    return True


def _rotatable(mol: Molecule, k: int) -> bool:
    b = mol.bonds[k]
    if b.order != 1 or b.aromatic or k in mol.ring_bonds:
        return False
    for end in (b.a, b.b):
        if mol.atoms[end].symbol == "H" or mol.heavy_degree(end) < 2:
            return False
        if any(mol.bonds[kk].order == 3 for _, kk in mol.adjacency[end]):
            return False
    return True


def descriptor_panel(mol: Molecule) -> DescriptorVector:
    heavy = [i for i, a in enumerate(mol.atoms) if a.symbol != "H"]
    mw = sum(mass(mol.atoms[i].symbol) + mol.atoms[i].hcount * mass("H") for i in range(mol.num_atoms))
    aromatic_rings = sum(1 for r in mol.rings if all(mol.atoms[i].aromatic for i in r))
    hbd = sum(1 for i in heavy if mol.atoms[i].symbol in ("N", "O") and mol.total_h(i) > 0)
    hba = sum(1 for i in heavy if _is_acceptor(mol, i))
    rot = sum(1 for k in range(mol.num_bonds) if _rotatable(mol, k))
    logp, mr = crippen(mol)
    carbons = [i for i in heavy if mol.atoms[i].symbol == "C"]
    sp3 = sum(
        1
        for i in carbons
        if not mol.atoms[i].aromatic and all(mol.bonds[k].order == 1 for _, k in mol.adjacency[i])
    )
    counts = {s: sum(1 for i in heavy if mol.atoms[i].symbol == s) for s in ("N", "O", "S")}
    return DescriptorVector(
        mol_weight=mw,
        heavy_atoms=float(len(heavy)),
        rings=float(len(mol.rings)),
        aromatic_rings=float(aromatic_rings),
        hbd=float(hbd),
        hba=float(hba),
        rotatable_bonds=float(rot),
        tpsa=tpsa(mol),
        logp=logp,
        mr=mr,
        fraction_sp3=sp3 / len(carbons) if carbons else 0.0,
        halogens=float(sum(1 for i in heavy if mol.atoms[i].symbol in HALOGENS)),
        n_count=float(counts["N"]),
        o_count=float(counts["O"]),
        s_count=float(counts["S"]),
        net_charge=float(sum(a.charge for a in mol.atoms)),
    )
