"""Canonical SMILES writer.

Atoms are ranked by iterative neighbourhood refinement over the invariant
(atomic number, isotope, charge, degree, total H, ring flag, aromatic flag).
Remaining ties are broken by branching over the members of the lowest tied
class and keeping the lexicographically smallest output string. The branch
search is bounded; past the bound the first member is taken, which is exact
whenever the tied atoms are symmetry-equivalent (the usual case).
"""

from __future__ import annotations

from .elements import ORGANIC_VALENCE
from .molecule import Molecule, implicit_hydrogens

MAX_TIE_LEAVES = 24


def _initial_ranks(mol: Molecule) -> list[int]:
    inv = []
    for i, a in enumerate(mol.atoms):
        inv.append((a.atomic_number, a.isotope or 0, a.charge, mol.degree(i), mol.total_h(i), a.in_ring, a.aromatic))
    return _spaced_ranks(inv)


def _spaced_ranks(keys: list) -> list[int]:
    """Rank = number of atoms with a strictly smaller key."""
    order = sorted(range(len(keys)), key=lambda i: keys[i])
    ranks = [0] * len(keys)
    for pos, i in enumerate(order):
        if pos > 0 and keys[i] == keys[order[pos - 1]]:
            ranks[i] = ranks[order[pos - 1]]
        else:
            ranks[i] = pos
    return ranks


def _refine(mol: Molecule, ranks: list[int]) -> list[int]:
    bonds = mol.bonds
    adj = mol.adjacency
    n_classes = len(set(ranks))
    while True:
        keys = [
            (ranks[i], tuple(sorted((bonds[k].code, ranks[j]) for j, k in adj[i])))
            for i in range(len(ranks))
        ]
        new = _spaced_ranks(keys)
        n_new = len(set(new))
        if n_new == n_classes:
            return new
        ranks, n_classes = new, n_new


def _atom_token(mol: Molecule, i: int) -> str:
    a = mol.atoms[i]
    sym = a.symbol.lower() if a.aromatic else a.symbol
    if a.symbol in ORGANIC_VALENCE and a.charge == 0 and a.isotope is None:
        codes = [mol.bonds[k].code for _, k in mol.adjacency[i]]
        if implicit_hydrogens(a.symbol, a.aromatic, codes) == a.hcount:
            return sym
    out = ["[", str(a.isotope) if a.isotope is not None else "", sym]
    if a.hcount:
        out.append("H" if a.hcount == 1 else f"H{a.hcount}")
    if a.charge:
        sign = "+" if a.charge > 0 else "-"
        out.append(sign if abs(a.charge) == 1 else f"{sign}{abs(a.charge)}")
    out.append("]")
    return "".join(out)


def _bond_token(mol: Molecule, k: int) -> str:
    b = mol.bonds[k]
    if b.aromatic:
        return ""
    if b.order == 2:
        return "="
    if b.order == 3:
        return "#"
    if mol.atoms[b.a].aromatic and mol.atoms[b.b].aromatic:
        return "-"
    return ""


def _ring_label(d: int) -> str:
    return str(d) if d < 10 else f"%{d:02d}"


def _write(mol: Molecule, ranks: list[int]) -> str:
    n = mol.num_atoms
    adj = [sorted(mol.adjacency[i], key=lambda jk: ranks[jk[0]]) for i in range(n)]
    visited = [False] * n
    children: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    openings: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # (partner, bond)
    closings: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    seen_bonds: set[int] = set()

    parts = []
    for comp in sorted(mol.components, key=lambda c: min(ranks[i] for i in c)):
        start = min(comp, key=lambda i: ranks[i])
        # discovery pass: spanning tree plus ring-closure bonds
        visited[start] = True
        stack = [(start, -1, iter(adj[start]))]
        while stack:
            u, pb, it = stack[-1]
            for v, k in it:
                if k == pb or k in seen_bonds:
                    continue
                seen_bonds.add(k)
                if visited[v]:
                    openings[v].append((u, k))
                    closings[u].append((v, k))
                else:
                    visited[v] = True
                    children[u].append((v, k))
                    stack.append((v, k, iter(adj[v])))
                    break
            else:
                stack.pop()

        out: list[str] = []
        free = list(range(1, 100))
        digit_of: dict[int, int] = {}

        def emit(u: int) -> None:
            out.append(_atom_token(mol, u))
            released = []
            for _v, k in closings[u]:
                d = digit_of.pop(k)
                out.append(_ring_label(d))
                released.append(d)
            for _v, k in openings[u]:
                free.sort()
                d = free.pop(0)
                digit_of[k] = d
                out.append(_bond_token(mol, k) + _ring_label(d))
            free.extend(released)
            kids = children[u]
            for idx, (v, k) in enumerate(kids):
                last = idx == len(kids) - 1
                if not last:
                    out.append("(")
                out.append(_bond_token(mol, k))
                emit(v)
                if not last:
                    out.append(")")

        emit(start)
        parts.append("".join(out))
    return ".".join(sorted(parts))


def canonical_ranks(mol: Molecule) -> list[int]:
    """A complete canonical ordering (ties broken), matching canonical_smiles."""
    return _search(mol)[1]


def _search(mol: Molecule) -> tuple[str, list[int]]:
    if mol.num_atoms == 0:
        return "", []
    base = _refine(mol, _initial_ranks(mol))
    best: list = [None, None]
    leaves = [0]

    def visit(ranks: list[int]) -> None:
        counts: dict[int, list[int]] = {}
        for i, r in enumerate(ranks):
            counts.setdefault(r, []).append(i)
        tied = [r for r, members in counts.items() if len(members) > 1]
        if not tied:
            leaves[0] += 1
            s = _write(mol, ranks)
            if best[0] is None or s < best[0]:
                best[0], best[1] = s, ranks
            return
        r = min(tied)
        members = counts[r]
        for pos, atom in enumerate(members):
            if pos > 0 and leaves[0] >= MAX_TIE_LEAVES:
                break
            broken = [x + 1 if (x == r and i != atom) else x for i, x in enumerate(ranks)]
            visit(_refine(mol, broken))

    visit(base)
    return best[0], best[1]


def canonical_smiles(mol: Molecule) -> str:
    """Deterministic SMILES invariant under atom renumbering."""
    return _search(mol)[0]
