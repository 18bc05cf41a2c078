"""SMILES reader.

Supported: organic subset, bracket atoms (isotope, H count, charge, atom class),
ring closures (digits and %nn), branches, bond symbols ``- = # :`` and the dot
disconnection. Stereo marks (``/ \\ @``) are accepted and dropped.
"""

from __future__ import annotations

from ..errors import ParseError
from .elements import AROMATIC_SYMBOLS, ATOMIC_NUMBER, ORGANIC_VALENCE
from .molecule import Atom, Bond, Molecule, build_molecule, find_ring_bonds, implicit_hydrogens

_BOND_SYMBOLS = {"-": 1, "=": 2, "#": 3, ":": 4, "/": None, "\\": None}


class _RawAtom:
    __slots__ = ("symbol", "aromatic", "charge", "hcount", "isotope", "bracket", "offset")

    def __init__(self, symbol, aromatic, charge=0, hcount=None, isotope=None, bracket=False, offset=0):
        self.symbol = symbol
        self.aromatic = aromatic
        self.charge = charge
        self.hcount = hcount
        self.isotope = isotope
        self.bracket = bracket
        self.offset = offset


def _parse_bracket(text: str, pos: int) -> tuple[_RawAtom, int]:
    start = pos
    end = text.find("]", pos)
    if end < 0:
        raise ParseError("unterminated bracket atom", start, text)
    body = text[pos + 1 : end]
    i = 0
    isotope = None
    j = i
    while j < len(body) and body[j].isdigit():
        j += 1
    if j > i:
        isotope = int(body[i:j])
    i = j
    symbol = None
    aromatic = False
    for width in (2, 1):
        tok = body[i : i + width]
        if len(tok) != width:
            continue
        if tok in AROMATIC_SYMBOLS:
            symbol, aromatic = AROMATIC_SYMBOLS[tok], True
        elif tok in ATOMIC_NUMBER:
            symbol = tok
        if symbol:
            i += width
            break
    if symbol is None:
        raise ParseError(f"unknown element in [{body}]", start, text)
    while i < len(body) and body[i] == "@":
        i += 1
    for tag in ("TH", "AL", "SP", "TB", "OH"):
        if body.startswith(tag, i):
            i += 2
            while i < len(body) and body[i].isdigit():
                i += 1
    hcount = 0
    if i < len(body) and body[i] == "H":
        i += 1
        j = i
        while j < len(body) and body[j].isdigit():
            j += 1
        hcount = int(body[i:j]) if j > i else 1
        i = j
    charge = 0
    if i < len(body) and body[i] in "+-":
        sign = 1 if body[i] == "+" else -1
        j = i + 1
        while j < len(body) and body[j] == body[i]:
            j += 1
        if j > i + 1:
            charge = sign * (j - i)
            i = j
        else:
            k = j
            while k < len(body) and body[k].isdigit():
                k += 1
            charge = sign * (int(body[j:k]) if k > j else 1)
            i = k
    if i < len(body) and body[i] == ":":
        j = i + 1
        while j < len(body) and body[j].isdigit():
            j += 1
        i = j
    if i != len(body):
        raise ParseError(f"unexpected characters in bracket atom [{body}]", start + 1 + i, text)
    return _RawAtom(symbol, aromatic, charge, hcount, isotope, True, start), end + 1


def parse_smiles(text: str) -> Molecule:
    """Parse a SMILES string into a Molecule.

    Raises:
        ParseError: with the byte offset of the offending token.
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty SMILES", 0, str(text))
    text = text.strip()
    atoms: list[_RawAtom] = []
    edges: dict[tuple[int, int], int | None] = {}
    edge_offsets: dict[tuple[int, int], int] = {}
    branch_stack: list[int] = []
    open_rings: dict[int, tuple[int, int | None, int]] = {}
    prev: int | None = None
    pending_bond: int | None = None
    bond_set = False
    bond_offset = 0
    n = len(text)
    pos = 0

    def add_edge(a: int, b: int, order: int | None, offset: int) -> None:
        if a == b:
            raise ParseError("atom bonded to itself", offset, text)
        key = (min(a, b), max(a, b))
        if key in edges:
            raise ParseError("duplicate bond", offset, text)
        edges[key] = order
        edge_offsets[key] = offset

    while pos < n:
        ch = text[pos]
        if ch == "[" or ch.isalpha() or ch == "*":
            if ch == "[":
                atom, nxt = _parse_bracket(text, pos)
            else:
                two = text[pos : pos + 2]
                if two in ("Cl", "Br"):
                    atom, nxt = _RawAtom(two, False, offset=pos), pos + 2
                elif ch in ORGANIC_VALENCE:
                    atom, nxt = _RawAtom(ch, False, offset=pos), pos + 1
                elif ch in AROMATIC_SYMBOLS:
                    atom, nxt = _RawAtom(AROMATIC_SYMBOLS[ch], True, offset=pos), pos + 1
                else:
                    raise ParseError(f"unknown element {ch!r}", pos, text)
            idx = len(atoms)
            atoms.append(atom)
            if prev is not None:
                add_edge(prev, idx, pending_bond, bond_offset if bond_set else pos)
            elif bond_set:
                raise ParseError("bond without preceding atom", bond_offset, text)
            prev = idx
            pending_bond, bond_set = None, False
            pos = nxt
        elif ch in _BOND_SYMBOLS:
            if bond_set:
                raise ParseError("consecutive bond symbols", pos, text)
            pending_bond, bond_set, bond_offset = _BOND_SYMBOLS[ch], True, pos
            pos += 1
        elif ch.isdigit() or ch == "%":
            if ch == "%":
                digits = text[pos + 1 : pos + 3]
                if len(digits) != 2 or not digits.isdigit():
                    raise ParseError("malformed %nn ring closure", pos, text)
                num, nxt = int(digits), pos + 3
            else:
                num, nxt = int(ch), pos + 1
            if prev is None:
                raise ParseError("ring closure without atom", pos, text)
            if num in open_rings:
                other, order, _ = open_rings.pop(num)
                if bond_set and order is not None and pending_bond is not None and order != pending_bond:
                    raise ParseError("conflicting ring-closure bond symbols", pos, text)
                add_edge(other, prev, pending_bond if bond_set and pending_bond is not None else order, pos)
            else:
                open_rings[num] = (prev, pending_bond if bond_set else None, pos)
            pending_bond, bond_set = None, False
            pos = nxt
        elif ch == "(":
            if prev is None:
                raise ParseError("branch without atom", pos, text)
            branch_stack.append(prev)
            pos += 1
        elif ch == ")":
            if not branch_stack:
                raise ParseError("unbalanced ')'", pos, text)
            if bond_set:
                raise ParseError("dangling bond", bond_offset, text)
            prev = branch_stack.pop()
            pos += 1
        elif ch == ".":
            if bond_set or branch_stack:
                raise ParseError("misplaced '.'", pos, text)
            prev = None
            pos += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", pos, text)

    if bond_set:
        raise ParseError("dangling bond", bond_offset, text)
    if branch_stack:
        raise ParseError("unbalanced '('", n, text)
    if open_rings:
        _, _, off = min(open_rings.values(), key=lambda t: t[2])
        raise ParseError("unclosed ring", off, text)

    keys = list(edges)
    ring_edge_ids = find_ring_bonds(len(atoms), keys)
    bonds: list[Bond] = []
    for k, (a, b) in enumerate(keys):
        order = edges[(a, b)]
        both_ar = atoms[a].aromatic and atoms[b].aromatic
        if order is None:
            aromatic = both_ar and k in ring_edge_ids
            bonds.append(Bond(a, b, 1, aromatic))
        elif order == 4:
            if not both_ar:
                raise ParseError("aromatic bond between non-aromatic atoms", edge_offsets[(a, b)], text)
            bonds.append(Bond(a, b, 1, True))
        else:
            bonds.append(Bond(a, b, order, False))

    ring_atom = set()
    for k in ring_edge_ids:
        ring_atom.update(keys[k])
    codes: list[list[int]] = [[] for _ in atoms]
    for bond in bonds:
        codes[bond.a].append(bond.code)
        codes[bond.b].append(bond.code)

    final: list[Atom] = []
    for i, raw in enumerate(atoms):
        if raw.aromatic and i not in ring_atom:
            raise ParseError("aromatic atom outside a ring", raw.offset, text)
        if raw.bracket:
            h = raw.hcount
        else:
            h = implicit_hydrogens(raw.symbol, raw.aromatic, codes[i])
            if h is None:
                raise ParseError(f"valence violation on {raw.symbol}", raw.offset, text)
        final.append(Atom(raw.symbol, raw.charge, h, raw.aromatic, raw.isotope))
    return build_molecule(final, bonds)
