"""Substructure patterns.

Two pattern kinds share one interface:

* ``smarts``: a SMARTS subset. Atom primitives are element symbols (aliphatic
  uppercase, aromatic lowercase), ``*``, ``a``, ``A``, ``#n``, isotope, charge,
  ``D``, ``H``, ``X``, ``R``, ``r``; operators ``! & , ;``. Bond primitives are
  ``- = # : ~ @`` with the same operators. Recursive SMARTS is rejected.
* ``text``: a regular expression counted against the canonical SMILES.

Patterns compile eagerly, so a bad pattern fails when it is loaded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from ..errors import PatternError
from .elements import AROMATIC_SYMBOLS, ATOMIC_NUMBER
from .molecule import Bond, Molecule

AtomPred = Callable[["_AtomProps"], bool]
BondPred = Callable[[Bond, bool], bool]


class _AtomProps:
    __slots__ = ("z", "aromatic", "charge", "degree", "total_h", "connectivity", "ring_count", "ring_sizes", "isotope")

    def __init__(self, mol: Molecule, i: int):
        a = mol.atoms[i]
        self.z = a.atomic_number
        self.aromatic = a.aromatic
        self.charge = a.charge
        self.degree = mol.degree(i)
        self.total_h = mol.total_h(i)
        self.connectivity = self.degree + a.hcount
        self.ring_count = mol.ring_membership[i]
        self.ring_sizes = frozenset(len(r) for r in mol.rings if i in r)
        self.isotope = a.isotope


def _atom_props(mol: Molecule) -> list[_AtomProps]:
    cache = mol.__dict__.get("_smarts_props")
    if cache is None:
        cache = [_AtomProps(mol, i) for i in range(mol.num_atoms)]
        mol.__dict__["_smarts_props"] = cache
    return cache


# -- expression parsing -------------------------------------------------------


class _Cursor:
    def __init__(self, text: str, pos: int = 0):
        self.text = text
        self.pos = pos

    def peek(self, k: int = 0) -> str:
        p = self.pos + k
        return self.text[p] if p < len(self.text) else ""

    def take_int(self) -> int | None:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        return int(self.text[start : self.pos]) if self.pos > start else None


def _and(fs):
    return lambda x, *r: all(f(x, *r) for f in fs)


def _or(fs):
    return lambda x, *r: any(f(x, *r) for f in fs)


def _not(f):
    return lambda x, *r: not f(x, *r)


def _parse_logic(cur: _Cursor, primitive, stop: str) -> Callable:
    """Precedence: ';' (low and) < ',' (or) < '&'/implicit (high and) < '!'."""

    def not_expr():
        neg = 0
        while cur.peek() == "!":
            neg += 1
            cur.pos += 1
        f = primitive(cur)
        return _not(f) if neg % 2 else f

    def high_and():
        fs = [not_expr()]
        while True:
            ch = cur.peek()
            if ch == "&":
                cur.pos += 1
                fs.append(not_expr())
            elif ch and ch not in ",;" and ch not in stop:
                fs.append(not_expr())
            else:
                break
        return fs[0] if len(fs) == 1 else _and(fs)

    def or_expr():
        fs = [high_and()]
        while cur.peek() == ",":
            cur.pos += 1
            fs.append(high_and())
        return fs[0] if len(fs) == 1 else _or(fs)

    fs = [or_expr()]
    while cur.peek() == ";":
        cur.pos += 1
        fs.append(or_expr())
    return fs[0] if len(fs) == 1 else _and(fs)


def _element_pred(z: int, aromatic: bool | None) -> AtomPred:
    if aromatic is None:
        return lambda p: p.z == z
    return lambda p: p.z == z and p.aromatic == aromatic


def _atom_primitive(cur: _Cursor) -> AtomPred:
    ch = cur.peek()
    start = cur.pos
    if ch == "":
        raise PatternError("unexpected end of atom expression")
    if ch == "$":
        raise PatternError("recursive SMARTS is not supported")
    if ch == "*":
        cur.pos += 1
        return lambda p: True
    if ch.isdigit():
        iso = cur.take_int()
        return lambda p: p.isotope == iso
    if ch == "#":
        cur.pos += 1
        z = cur.take_int()
        if z is None:
            raise PatternError("'#' needs an atomic number")
        return lambda p: p.z == z
    if ch in "+-":
        sign = 1 if ch == "+" else -1
        cur.pos += 1
        count = 1
        while cur.peek() == ch:
            count += 1
            cur.pos += 1
        mag = cur.take_int()
        value = sign * (mag if mag is not None else count)
        return lambda p: p.charge == value
    if ch == "@":
        while cur.peek() == "@":
            cur.pos += 1
        return lambda p: True
    two = cur.text[cur.pos : cur.pos + 2]
    if two in ("se", "as"):
        cur.pos += 2
        return _element_pred(ATOMIC_NUMBER[AROMATIC_SYMBOLS[two]], True)
    if len(two) == 2 and two[0].isupper() and two[1].islower() and two in ATOMIC_NUMBER:
        cur.pos += 2
        return _element_pred(ATOMIC_NUMBER[two], False)
    if ch == "H":
        nxt = cur.peek(1)
        at_start = start > 0 and cur.text[start - 1] == "["
        if at_start and (nxt in ("]", "+", "-", "")):
            cur.pos += 1
            return _element_pred(1, None)
        cur.pos += 1
        n = cur.take_int()
        n = 1 if n is None else n
        return lambda p: p.total_h == n
    if ch in "DXRr":
        cur.pos += 1
        n = cur.take_int()
        if ch == "D":
            n = 1 if n is None else n
            return lambda p: p.degree == n
        if ch == "X":
            n = 1 if n is None else n
            return lambda p: p.connectivity == n
        if ch == "R":
            if n is None:
                return lambda p: p.ring_count > 0
            return lambda p: p.ring_count == n
        if n is None:
            return lambda p: p.ring_count > 0
        return lambda p: n in p.ring_sizes
    if ch == "a":
        cur.pos += 1
        return lambda p: p.aromatic
    if ch == "A":
        cur.pos += 1
        return lambda p: not p.aromatic
    if ch in AROMATIC_SYMBOLS:
        cur.pos += 1
        return _element_pred(ATOMIC_NUMBER[AROMATIC_SYMBOLS[ch]], True)
    if ch.isupper() and ch in ATOMIC_NUMBER:
        cur.pos += 1
        return _element_pred(ATOMIC_NUMBER[ch], False)
    raise PatternError(f"unknown atom primitive {ch!r} at offset {start}")


def _bond_primitive(cur: _Cursor) -> BondPred:
    ch = cur.peek()
    cur.pos += 1
    if ch == "-" or ch in "/\\":
        return lambda b, ring: b.order == 1 and not b.aromatic
    if ch == "=":
        return lambda b, ring: b.order == 2 and not b.aromatic
    if ch == "#":
        return lambda b, ring: b.order == 3
    if ch == ":":
        return lambda b, ring: b.aromatic
    if ch == "~":
        return lambda b, ring: True
    if ch == "@":
        return lambda b, ring: ring
    raise PatternError(f"unknown bond primitive {ch!r}")


def _default_bond(b: Bond, ring: bool) -> bool:
    return b.aromatic or b.order == 1


_BOND_CHARS = set("-=#:~@!&;,/\\")
_ORGANIC_BARE = {"Cl": 17, "Br": 35, "B": 5, "C": 6, "N": 7, "O": 8, "P": 15, "S": 16, "F": 9, "I": 53}


@dataclass
class _Query:
    atoms: list[AtomPred] = field(default_factory=list)
    bonds: list[tuple[int, int, BondPred]] = field(default_factory=list)


def _compile_smarts(text: str) -> _Query:
    q = _Query()
    cur = _Cursor(text)
    prev: int | None = None
    pending: BondPred | None = None
    branches: list[int] = []
    rings: dict[int, tuple[int, BondPred | None]] = {}
    while cur.pos < len(text):
        ch = cur.peek()
        if ch == "[":
            end = text.find("]", cur.pos)
            if end < 0:
                raise PatternError("unterminated bracket")
            inner = _Cursor(text[: end], cur.pos + 1)
            pred = _parse_logic(inner, _atom_primitive, "]")
            if inner.pos != end:
                raise PatternError(f"cannot parse atom expression near offset {inner.pos}")
            cur.pos = end + 1
        elif ch in _BOND_CHARS:
            if pending is not None:
                raise PatternError(f"consecutive bond expressions at offset {cur.pos}")
            start = cur.pos
            end = start
            while end < len(text) and text[end] in _BOND_CHARS:
                end += 1
            sub = _Cursor(text[:end], start)
            pending = _parse_logic(sub, _bond_primitive, "")
            cur.pos = end
            continue
        elif ch.isdigit() or ch == "%":
            if prev is None:
                raise PatternError("ring closure without atom")
            if ch == "%":
                num = int(text[cur.pos + 1 : cur.pos + 3])
                cur.pos += 3
            else:
                num = int(ch)
                cur.pos += 1
            if num in rings:
                other, bp = rings.pop(num)
                q.bonds.append((other, prev, pending or bp or _default_bond))
            else:
                rings[num] = (prev, pending)
            pending = None
            continue
        elif ch == "(":
            if prev is None:
                raise PatternError("branch without atom")
            branches.append(prev)
            cur.pos += 1
            continue
        elif ch == ")":
            if not branches:
                raise PatternError("unbalanced ')'")
            prev = branches.pop()
            cur.pos += 1
            continue
        elif ch == ".":
            prev, pending = None, None
            cur.pos += 1
            continue
        else:
            two = text[cur.pos : cur.pos + 2]
            if two in ("Cl", "Br"):
                pred = _element_pred(_ORGANIC_BARE[two], False)
                cur.pos += 2
            elif ch in _ORGANIC_BARE:
                pred = _element_pred(_ORGANIC_BARE[ch], False)
                cur.pos += 1
            elif ch in "bcnops":
                pred = _element_pred(ATOMIC_NUMBER[AROMATIC_SYMBOLS[ch]], True)
                cur.pos += 1
            elif ch == "*":
                pred = lambda p: True  # noqa: E731
                cur.pos += 1
            elif ch == "a":
                pred = lambda p: p.aromatic  # noqa: E731
                cur.pos += 1
            elif ch == "A":
                pred = lambda p: not p.aromatic  # noqa: E731
                cur.pos += 1
            else:
                raise PatternError(f"unexpected character {ch!r} at offset {cur.pos}")
        idx = len(q.atoms)
        q.atoms.append(pred)
        if prev is not None:
            q.bonds.append((prev, idx, pending or _default_bond))
        elif pending is not None:
            raise PatternError("bond without preceding atom")
        prev, pending = idx, None
    if branches:
        raise PatternError("unbalanced '('")
    if rings:
        raise PatternError("unclosed ring in pattern")
    if pending is not None:
        raise PatternError("dangling bond")
    if not q.atoms:
        raise PatternError("empty pattern")
    return q


@dataclass(frozen=True)
class Pattern:
    source: str
    kind: str
    compiled: object = field(compare=False, repr=False)


def compile_pattern(source: str, kind: str = "smarts") -> Pattern:
    """Compile a pattern; raises PatternError on any syntax problem."""
    if kind == "smarts":
        try:
            return Pattern(source, kind, _compile_smarts(source))
        except PatternError as exc:
            raise PatternError(f"{source!r}: {exc}") from None
        except (ValueError, IndexError) as exc:
            raise PatternError(f"{source!r}: {exc}") from None
    if kind == "text":
        try:
            return Pattern(source, kind, re.compile(source))
        except re.error as exc:
            raise PatternError(f"{source!r}: {exc}") from None
    raise PatternError(f"unknown pattern kind {kind!r}")


def _plan(q: _Query) -> list[tuple[int, int | None, list[tuple[int, BondPred]]]]:
    """Order pattern atoms so each one after a component start touches an earlier one."""
    n = len(q.atoms)
    nbrs: list[list[tuple[int, BondPred]]] = [[] for _ in range(n)]
    for a, b, bp in q.bonds:
        nbrs[a].append((b, bp))
        nbrs[b].append((a, bp))
    order: list[int] = []
    placed = [False] * n
    anchor: dict[int, int | None] = {}
    for root in range(n):
        if placed[root]:
            continue
        placed[root] = True
        anchor[root] = None
        queue = [root]
        for u in queue:
            order.append(u)
            for v, _ in nbrs[u]:
                if not placed[v]:
                    placed[v] = True
                    anchor[v] = u
                    queue.append(v)
    pos = {u: k for k, u in enumerate(order)}
    plan = []
    for u in order:
        checks = [(v, bp) for v, bp in nbrs[u] if pos[v] < pos[u]]
        plan.append((u, anchor[u], checks))
    return plan


def _embeddings(mol: Molecule, q: _Query, limit: int | None):
    props = _atom_props(mol)
    allowed = [set(i for i in range(mol.num_atoms) if pred(props[i])) for pred in q.atoms]
    if any(not s for s in allowed):
        return set()
    plan = _plan(q)
    ring_bonds = mol.ring_bonds
    lookup = mol._bond_lookup
    adjacency = mol.adjacency
    mapping: dict[int, int] = {}
    used: set[int] = set()
    found: set[frozenset[int]] = set()

    def extend(depth: int) -> bool:
        if depth == len(plan):
            found.add(frozenset(used))
            return limit is not None and len(found) > limit
        u, anc, checks = plan[depth]
        if anc is None:
            cands = sorted(allowed[u])
        else:
            cands = [j for j, _ in adjacency[mapping[anc]] if j in allowed[u]]
        for t in cands:
            if t in used:
                continue
            ok = True
            for v, bp in checks:
                k = lookup.get((min(t, mapping[v]), max(t, mapping[v])))
                if k is None or not bp(mol.bonds[k], k in ring_bonds):
                    ok = False
                    break
            if not ok:
                continue
            mapping[u] = t
            used.add(t)
            stop = extend(depth + 1)
            used.discard(t)
            del mapping[u]
            if stop:
                return True
        return False

    extend(0)
    return found


def match_pattern(mol: Molecule, pattern: Pattern, limit: int | None = None) -> int:
    """Number of matches of ``pattern`` in ``mol``.

    Substructure patterns count distinct matched atom sets, so symmetric
    re-mappings of the same atoms count once. Text patterns count
    non-overlapping regex hits in the canonical SMILES. ``limit`` stops the
    search once more than ``limit`` matches are known.
    """
    if pattern.kind == "text":
        return sum(1 for _ in pattern.compiled.finditer(mol.smiles))
    return len(_embeddings(mol, pattern.compiled, limit))


def has_match(mol: Molecule, pattern: Pattern) -> bool:
    return match_pattern(mol, pattern, limit=0) > 0
