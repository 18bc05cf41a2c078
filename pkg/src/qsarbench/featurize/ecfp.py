"""Extended-connectivity (Morgan) fingerprints folded to a fixed length."""

from __future__ import annotations

import hashlib
import struct

from ..chem.molecule import Molecule
from .fingerprint import BitFingerprint

DEFAULT_NBITS = 2048


def _h64(values: tuple[int, ...]) -> int:
    data = struct.pack(f"<{len(values)}q", *[v if v < 2**63 else v - 2**64 for v in values])
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def atom_invariants(mol: Molecule) -> list[int]:
    out = []
    for i, a in enumerate(mol.atoms):
        out.append(
            _h64(
                (
                    a.atomic_number,
                    mol.heavy_degree(i),
                    mol.total_h(i),
                    a.charge,
                    int(a.in_ring),
                    int(a.aromatic),
                )
            )
        )
    return out


def ecfp_identifiers(mol: Molecule, radius: int) -> set[int]:
    """Unfolded 64-bit environment identifiers up to ``radius``.

    An environment whose bond set was already produced (at a lower radius, or
    by a smaller identifier at the same radius) is a structural duplicate and
    is dropped.
    """
    ids = atom_invariants(mol)
    features = set(ids)
    envs: list[frozenset[int]] = [frozenset() for _ in mol.atoms]
    seen_envs: set[frozenset[int]] = {frozenset()}
    adj = mol.adjacency
    for it in range(1, radius + 1):
        new_ids = []
        new_envs = []
        for i in range(mol.num_atoms):
            nb = sorted((mol.bonds[k].code, ids[j]) for j, k in adj[i])
            flat = [it, ids[i]]
            for code, nid in nb:
                flat.extend((code, nid))
            new_ids.append(_h64(tuple(flat)))
            env = set(envs[i])
            for j, k in adj[i]:
                env.add(k)
                env |= envs[j]
            new_envs.append(frozenset(env))
        for i in sorted(range(mol.num_atoms), key=lambda i: new_ids[i]):
            env = new_envs[i]
            if env in seen_envs:
                continue
            seen_envs.add(env)
            features.add(new_ids[i])
        ids, envs = new_ids, new_envs
    return features


def ecfp(mol: Molecule, radius: int = 2, nbits: int = DEFAULT_NBITS) -> BitFingerprint:
    """Folded circular fingerprint; radius 2 is ECFP4, radius 3 is ECFP6."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    bits = frozenset(h % nbits for h in ecfp_identifiers(mol, radius))
    return BitFingerprint(nbits, bits, f"ecfp-r{radius}")
