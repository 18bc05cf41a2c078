"""Immutable molecular graph plus ring perception."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .elements import ORGANIC_VALENCE, atomic_number


@dataclass(frozen=True)
class Atom:
    symbol: str
    charge: int = 0
    hcount: int = 0
    aromatic: bool = False
    isotope: int | None = None
    in_ring: bool = False

    @property
    def atomic_number(self) -> int:
        return atomic_number(self.symbol)


@dataclass(frozen=True)
class Bond:
    a: int
    b: int
    order: int = 1
    aromatic: bool = False

    @property
    def code(self) -> int:
        """Bond order with aromatic bonds mapped to 4."""
        return 4 if self.aromatic else self.order

    def other(self, i: int) -> int:
        return self.b if i == self.a else self.a


@dataclass(frozen=True)
class Molecule:
    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    rings: tuple[tuple[int, ...], ...] = ()

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per atom, a tuple of (neighbor index, bond index)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
        for k, bond in enumerate(self.bonds):
            adj[bond.a].append((bond.b, k))
            adj[bond.b].append((bond.a, k))
        return tuple(tuple(x) for x in adj)

    @cached_property
    def ring_bonds(self) -> frozenset[int]:
        out = set()
        for ring in self.rings:
            for i in range(len(ring)):
                out.add(self.bond_index(ring[i], ring[(i + 1) % len(ring)]))
        return frozenset(out)

    @cached_property
    def _bond_lookup(self) -> dict[tuple[int, int], int]:
        return {(min(b.a, b.b), max(b.a, b.b)): k for k, b in enumerate(self.bonds)}

    def bond_index(self, i: int, j: int) -> int:
        return self._bond_lookup[(min(i, j), max(i, j))]

    def bond_between(self, i: int, j: int) -> Bond | None:
        k = self._bond_lookup.get((min(i, j), max(i, j)))
        return None if k is None else self.bonds[k]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def heavy_degree(self, i: int) -> int:
        return sum(1 for j, _ in self.adjacency[i] if self.atoms[j].symbol != "H")

    def total_h(self, i: int) -> int:
        return self.atoms[i].hcount + sum(1 for j, _ in self.adjacency[i] if self.atoms[j].symbol == "H")

    @cached_property
    def ring_membership(self) -> tuple[int, ...]:
        """Number of SSSR rings each atom belongs to."""
        counts = [0] * len(self.atoms)
        for ring in self.rings:
            for i in ring:
                counts[i] += 1
        return tuple(counts)

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        seen = [False] * len(self.atoms)
        comps = []
        for start in range(len(self.atoms)):
            if seen[start]:
                continue
            stack, comp = [start], []
            seen[start] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                for v, _ in self.adjacency[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(tuple(sorted(comp)))
        return tuple(comps)

    @cached_property
    def smiles(self) -> str:
        """Canonical SMILES (computed once per molecule)."""
        from .canon import canonical_smiles

        return canonical_smiles(self)

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    @property
    def num_bonds(self) -> int:
        return len(self.bonds)

    def permute(self, order: list[int]) -> "Molecule":
        """Return the same molecule with atoms renumbered so new atom i is old atom order[i]."""
        inv = {old: new for new, old in enumerate(order)}
        atoms = tuple(self.atoms[old] for old in order)
        bonds = tuple(
            Bond(min(inv[b.a], inv[b.b]), max(inv[b.a], inv[b.b]), b.order, b.aromatic) for b in self.bonds
        )
        return build_molecule(list(atoms), list(bonds))


def implicit_hydrogens(symbol: str, aromatic: bool, bond_codes: list[int]) -> int | None:
    """Implicit H count for an unbracketed atom, or None on a valence violation.

    Aromatic bonds contribute 1 and an aromatic atom reserves one extra valence unit;
    aromatic atoms are clamped at zero instead of failing because their valence is
    ambiguous without a Kekule assignment.
    """
    valences = ORGANIC_VALENCE[symbol]
    if aromatic:
        used = sum(1 if c == 4 else c for c in bond_codes) + 1
        return max(0, valences[0] - used)
    used = sum(bond_codes)
    for v in valences:
        if v >= used:
            return v - used
    return None


def find_ring_bonds(n_atoms: int, edges: list[tuple[int, int]]) -> set[int]:
    """Indices of edges that are not bridges (iterative Tarjan)."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_atoms)]
    for k, (a, b) in enumerate(edges):
        adj[a].append((b, k))
        adj[b].append((a, k))
    disc = [-1] * n_atoms
    low = [0] * n_atoms
    bridges = set()
    timer = 0
    for root in range(n_atoms):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            u, parent_edge, it = stack[-1]
            advanced = False
            for v, k in it:
                if k == parent_edge:
                    continue
                if disc[v] == -1:
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, k, iter(adj[v])))
                    advanced = True
                    break
                low[u] = min(low[u], disc[v])
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if low[u] > disc[p]:
                        bridges.add(parent_edge)
    return set(range(len(edges))) - bridges


def perceive_sssr(n_atoms: int, edges: list[tuple[int, int]]) -> tuple[tuple[int, ...], ...]:
    """Smallest set of smallest rings via Horton candidates and GF(2) elimination."""
    ring_edges = sorted(find_ring_bonds(n_atoms, edges))
    if not ring_edges:
        return ()
    adj: dict[int, list[tuple[int, int]]] = {}
    for k in ring_edges:
        a, b = edges[k]
        adj.setdefault(a, []).append((b, k))
        adj.setdefault(b, []).append((a, k))
    verts = sorted(adj)
    # cycle rank of the ring subgraph
    seen: set[int] = set()
    n_comp = 0
    for v in verts:
        if v in seen:
            continue
        n_comp += 1
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            for w, _ in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    rank = len(ring_edges) - len(verts) + n_comp

    candidates: dict[int, tuple[int, ...]] = {}
    for root in verts:
        parent: dict[int, tuple[int, int] | None] = {root: None}
        dist = {root: 0}
        queue = [root]
        for u in queue:
            for w, k in sorted(adj[u]):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = (u, k)
                    queue.append(w)

        def path(x: int) -> tuple[list[int], list[int]]:
            atoms_, bonds_ = [x], []
            while parent[x] is not None:
                x, k = parent[x]
                atoms_.append(x)
                bonds_.append(k)
            return atoms_[::-1], bonds_

        for k in ring_edges:
            x, y = edges[k]
            if x not in dist or y not in dist:
                continue
            px, bx = path(x)
            py, by = path(y)
            if k in bx or k in by or set(px) & set(py) != {root}:
                continue
            mask = 1 << k
            for e in bx + by:
                mask |= 1 << e
            if mask in candidates:
                continue
            candidates[mask] = tuple(px + py[::-1][:-1])

    ordered = sorted(candidates.items(), key=lambda kv: (len(kv[1]), sorted(kv[1])))
    basis: dict[int, int] = {}  # pivot bit -> reduced vector
    chosen = []
    for mask, cycle in ordered:
        vec = mask
        while vec:
            pivot = vec.bit_length() - 1
            if pivot in basis:
                vec ^= basis[pivot]
            else:
                basis[pivot] = vec
                chosen.append(cycle)
                break
        if len(chosen) == rank:
            break
    return tuple(chosen)


def _promote_kekule_benzenoids(atoms: list[Atom], bonds: list[Bond], rings) -> bool:
    """Mark alternating six-membered carbocycles aromatic. Returns True if anything changed."""
    lookup = {(min(b.a, b.b), max(b.a, b.b)): k for k, b in enumerate(bonds)}
    changed = False
    progress = True
    while progress:
        progress = False
        for ring in rings:
            if len(ring) != 6 or any(atoms[i].symbol != "C" for i in ring):
                continue
            ks = [lookup[(min(ring[i], ring[(i + 1) % 6]), max(ring[i], ring[(i + 1) % 6]))] for i in range(6)]
            if all(bonds[k].aromatic for k in ks):
                continue
            ok = False
            for phase in (0, 1):
                want = [2 if (i + phase) % 2 == 0 else 1 for i in range(6)]
                if all(bonds[k].aromatic or bonds[k].order == w for k, w in zip(ks, want)):
                    ok = True
                    break
            if not ok:
                continue
            for i in ring:
                if not atoms[i].aromatic:
                    atoms[i] = Atom(atoms[i].symbol, atoms[i].charge, atoms[i].hcount, True, atoms[i].isotope, True)
            for k in ks:
                b = bonds[k]
                bonds[k] = Bond(b.a, b.b, 1, True)
            changed = progress = True
    return changed


def build_molecule(atoms: list[Atom], bonds: list[Bond], promote: bool = True) -> Molecule:
    """Assemble a Molecule, perceiving rings and ring flags."""
    edges = [(b.a, b.b) for b in bonds]
    rings = perceive_sssr(len(atoms), edges)
    in_ring = set(i for r in rings for i in r)
    atoms = [
        a if a.in_ring == (i in in_ring) else Atom(a.symbol, a.charge, a.hcount, a.aromatic, a.isotope, i in in_ring)
        for i, a in enumerate(atoms)
    ]
    bonds = list(bonds)
    if promote:
        _promote_kekule_benzenoids(atoms, bonds, rings)
    return Molecule(tuple(atoms), tuple(bonds), rings)
