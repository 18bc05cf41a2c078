from .canon import canonical_smiles
from .molecule import Atom, Bond, Molecule
from .smarts import Pattern, compile_pattern, match_pattern
from .smiles import parse_smiles


def canonicalize(text: str) -> str:
    """Parse then canonicalize a SMILES string."""
    return canonical_smiles(parse_smiles(text))


__all__ = [
    "Atom",
    "Bond",
    "Molecule",
    "Pattern",
    "canonical_smiles",
    "canonicalize",
    "compile_pattern",
    "match_pattern",
    "parse_smiles",
]
