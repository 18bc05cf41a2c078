"""Seeded scaffold/substituent series for tests and the bundled toy benchmark."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Each scaffold is a SMILES template; "[Rk]" marks a substitutable position and
# becomes either "" (hydrogen) or "(<substituent>)".
SCAFFOLDS = {
    "quinoline": "c1c[R1]cc2nc[R2]cc[R3]c2c1",
    "benzimidazole": "c1c[R1]cc2[nH]c[R2]nc2c1",
    "arylpiperazine": "c1cc[R1]c[R2]cc1N2CCN(C[R3])CC2",
    "sulfonamide": "c1cc[R1]ccc1S(=O)(=O)Nc1cc[R2]cc[R3]c1",
    "thiophene_amide": "O=C(Nc1cc[R1]ccc1)c1cc[R2]c[R3]s1",
    "biphenyl": "c1cc[R1]ccc1-c1cc[R2]cc[R3]c1",
    "cyclohexyl_amide": "C1CC[R1]CCC1C(=O)NC[R2]C[R3]",
    "pyridyl_ether": "c1cc[R1]cnc1OCc1cc[R2]c[R3]cc1",
    "imidazole": "c1nc[R1]c[R2]n1Cc1ccc[R3]cc1",
}

SUBSTITUENTS = (
    "C", "CC", "CCC", "C(C)C", "OC", "OCC", "F", "Cl", "Br", "O", "N", "NC", "N(C)C",
    "C(F)(F)F", "C#N", "C(=O)O", "C(=O)N", "NC(C)=O", "S(C)(=O)=O", "C9CC9", "N9CCOCC9",
    "N9CCCC9", "c9ccccc9", "CO", "CCN", "[N+](=O)[O-]",
)
NITRO = "[N+](=O)[O-]"


@dataclass(frozen=True)
class SyntheticMolecule:
    smiles: str
    series: str
    substituents: tuple[str, ...]

    @property
    def has_nitro(self) -> bool:
        return NITRO in self.substituents

    @property
    def has_aromatic_amine(self) -> bool:
        # primary amine slots on aromatic scaffolds
        return "N" in self.substituents and self.series != "cyclohexyl_amide"


def fill_template(template: str, subs: tuple[str, ...]) -> str:
    out = template
    for k, s in enumerate(subs, start=1):
        out = out.replace(f"[R{k}]", f"({s})" if s else "")
    return out


def n_slots(template: str) -> int:
    return sum(1 for k in range(1, 10) if f"[R{k}]" in template)


def generate_series(
    n: int,
    seed: int,
    series: tuple[str, ...] | None = None,
    p_empty: float = 0.35,
) -> list[SyntheticMolecule]:
    """Draw ``n`` distinct molecules spread evenly over the chosen scaffolds.

    Molecules are deduplicated on the generated SMILES string; the output is in
    draw order, so the same seed always yields the same list.
    """
    from ..chem import parse_smiles

    names = tuple(series or SCAFFOLDS)
    rng = np.random.default_rng(seed)
    seen: set[str] = set()
    out: list[SyntheticMolecule] = []
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 50 * n + 1000:
            raise RuntimeError(f"could not draw {n} distinct molecules from {len(names)} series")
        name = names[len(out) % len(names)]
        tpl = SCAFFOLDS[name]
        subs = tuple(
            "" if rng.random() < p_empty else SUBSTITUENTS[rng.integers(len(SUBSTITUENTS))]
            for _ in range(n_slots(tpl))
        )
        smi = parse_smiles(fill_template(tpl, subs)).smiles
        if smi in seen:
            continue
        seen.add(smi)
        out.append(SyntheticMolecule(smi, name, subs))
    return out


def ames_like_labels(mols: list[SyntheticMolecule], seed: int, p_alert: float = 0.85, p_base: float = 0.12) -> np.ndarray:
    """Labels where nitro or aromatic-amine substituents raise the active rate."""
    rng = np.random.default_rng(seed)
    p = np.array([p_alert if (m.has_nitro or m.has_aromatic_amine) else p_base for m in mols])
    return (rng.random(len(mols)) < p).astype(int)


def potency_values(mols: list[SyntheticMolecule], seed: int, active_series: str = "quinoline") -> list[tuple[float, str]]:
    """EC50-like potencies in mixed units: the active series sits mostly below 100 nM."""
    rng = np.random.default_rng(seed)
    out = []
    for m in mols:
        log_nm = rng.normal(1.4, 0.5) if m.series == active_series else rng.normal(2.8, 0.6)
        nm = float(10**log_nm)
        if rng.random() < 0.5:
            out.append((round(nm / 1000.0, 6), "uM"))
        else:
            out.append((round(nm, 3), "nM"))
    return out


def write_toy_benchmark(directory: Path, n: int = 240, seed: int = 11) -> list[Path]:
    """Write the two toy task CSVs shipped with the package."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    mols = generate_series(n, seed)
    labels = ames_like_labels(mols, seed + 1)
    ames = directory / "toy_ames.csv"
    with open(ames, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["smiles", "label"])
        for m, y in zip(mols, labels):
            w.writerow([m.smiles, int(y)])
    mols2 = generate_series(n, seed + 2)
    pots = potency_values(mols2, seed + 3)
    mal = directory / "toy_antimalaria.csv"
    with open(mal, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["smiles", "ec50", "unit"])
        for m, (v, u) in zip(mols2, pots):
            w.writerow([m.smiles, repr(v), u])
    return [ames, mal]
