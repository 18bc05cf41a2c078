"""SAR rules, rule sets and the line-oriented rule-pack format.

Pack grammar::

    pack      := line*
    line      := comment | directive | rule | blank
    comment   := "#" text
    directive := "@endpoint" name | "@task" ("classification" | "regression")
               | "@intercept" number
    rule      := id "|" kind "|" predicate "|" direction "|" weight "|" category
    kind      := "smarts" | "text" | "descriptor"
    direction := "activating" | "deactivating" | "+" | "-"
    predicate := SMARTS | regular expression | slot comparator number

The predicate is everything between the second and the third-from-last bar, so
regular expressions may contain ``|``.
"""

from __future__ import annotations

import math
import operator
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..chem import Molecule, Pattern, compile_pattern, match_pattern
from ..errors import PackError, PatternError
from ..featurize.descriptors import SLOT_NAMES, DescriptorVector

RULE_KINDS = ("smarts", "text", "descriptor")
MODES = ("priors_only", "with_knowledge")
_OPS = {">": operator.gt, ">=": operator.ge, "<": operator.lt, "<=": operator.le}
_COND = re.compile(r"^\s*([a-z_0-9]+)\s*(>=|<=|>|<)\s*(-?[0-9.]+(?:[eE]-?\d+)?)\s*$")
_DIRECTIONS = {"activating": "activating", "+": "activating", "deactivating": "deactivating", "-": "deactivating"}


@dataclass(frozen=True)
class DescriptorCondition:
    slot: str
    op: str
    threshold: float

    @classmethod
    def parse(cls, text: str) -> "DescriptorCondition":
        m = _COND.match(text)
        if not m or m.group(1) not in SLOT_NAMES:
            raise PatternError(f"bad descriptor condition {text!r}; slots: {', '.join(SLOT_NAMES)}")
        return cls(m.group(1), m.group(2), float(m.group(3)))

    def holds(self, desc: DescriptorVector) -> bool:
        return _OPS[self.op](getattr(desc, self.slot), self.threshold)

    @property
    def source(self) -> str:
        return f"{self.slot} {self.op} {self.threshold:g}"


@dataclass(frozen=True)
class SarRule:
    rule_id: str
    kind: str
    source: str
    direction: str
    weight: float
    category: str = ""
    origin: str = "prior"
    delta: float | None = None
    support: float | None = None
    fold: int | None = None
    predicate: Pattern | DescriptorCondition | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise PatternError(f"unknown rule kind {self.kind!r}")
        if self.direction not in ("activating", "deactivating"):
            raise ValueError(f"bad direction {self.direction!r}")
        if (self.direction == "activating" and self.weight < 0) or (
            self.direction == "deactivating" and self.weight > 0
        ):
            raise ValueError(f"rule {self.rule_id}: weight sign disagrees with direction")
        if self.support is not None and not 0 <= self.support <= 1:
            raise ValueError("support must be in [0, 1]")
        if self.predicate is None:
            object.__setattr__(self, "predicate", compile_predicate(self.kind, self.source))

    def fires(self, mol: Molecule, desc: DescriptorVector | None = None) -> bool:
        if isinstance(self.predicate, DescriptorCondition):
            if desc is None:
                from ..featurize.descriptors import descriptor_panel

                desc = descriptor_panel(mol)
            return self.predicate.holds(desc)
        return match_pattern(mol, self.predicate, limit=1) > 0

    def renamed(self, rule_id: str) -> "SarRule":
        return replace(self, rule_id=rule_id)


def compile_predicate(kind: str, source: str) -> Pattern | DescriptorCondition:
    if kind == "descriptor":
        return DescriptorCondition.parse(source)
    return compile_pattern(source, "smarts" if kind == "smarts" else "text")


@dataclass(frozen=True)
class RuleSet:
    endpoint: str
    mode: str = "priors_only"
    rules: tuple[SarRule, ...] = ()
    intercept: float = 0.0
    task: str = "classification"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        ids = [r.rule_id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise ValueError("rule ids must be unique within a rule set")

    def with_intercept(self, value: float) -> "RuleSet":
        return replace(self, intercept=float(value))

    def category_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rules:
            out[r.category] = out.get(r.category, 0) + 1
        return out


def _parse_rule_line(line: str, lineno: int) -> tuple[str, str, str, str, str, str]:
    parts = [p.strip() for p in line.split("|")]
    if len(parts) < 6:
        raise ValueError(f"line {lineno}: expected 6 '|'-separated fields, got {len(parts)}")
    rid, kind = parts[0], parts[1]
    direction, weight, category = parts[-3], parts[-2], parts[-1]
    pattern = "|".join(p for p in line.split("|")[2:-3]).strip()
    return rid, kind, pattern, direction, weight, category


def parse_rule_pack(text: str, name: str = "pack") -> RuleSet:
    """Parse pack text; every bad rule is collected before raising.

    Raises:
        PackError: listing the ids (or line numbers) of every rule that fails.
    """
    endpoint, task, intercept = name, "classification", 0.0
    rules: list[SarRule] = []
    bad: list[str] = []
    messages: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@"):
            key, _, value = line.partition(" ")
            value = value.strip()
            if key == "@endpoint":
                endpoint = value
            elif key == "@task":
                task = value
            elif key == "@intercept":
                intercept = float(value)
            else:
                bad.append(f"line{lineno}")
                messages.append(f"line {lineno}: unknown directive {key}")
            continue
        try:
            rid, kind, pattern, direction, weight, category = _parse_rule_line(line, lineno)
        except ValueError as exc:
            bad.append(f"line{lineno}")
            messages.append(str(exc))
            continue
        try:
            d = _DIRECTIONS.get(direction)
            if d is None:
                raise ValueError(f"bad direction {direction!r}")
            rules.append(SarRule(rid, kind, pattern, d, float(weight), category, "prior"))
        except (PatternError, ValueError) as exc:
            bad.append(rid)
            messages.append(f"{rid}: {exc}")
    ids = [r.rule_id for r in rules]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        bad.extend(dup)
        messages.append(f"duplicate rule ids: {', '.join(dup)}")
    if bad:
        raise PackError(f"pack {name}: " + "; ".join(messages), bad)
    return RuleSet(endpoint, "priors_only", tuple(rules), intercept, task)


def load_rule_pack(path: str | Path) -> RuleSet:
    """Load a pack file, or a bundled pack by bare name (e.g. ``"ames_smarts"``)."""
    p = Path(path)
    if not p.exists():
        bundled = Path(__file__).parent / "packs" / f"{path}.pack"
        if bundled.exists():
            p = bundled
        else:
            raise FileNotFoundError(f"rule pack not found: {path}")
    return parse_rule_pack(p.read_text(), p.stem)


def bundled_packs() -> list[str]:
    return sorted(p.stem for p in (Path(__file__).parent / "packs").glob("*.pack"))


def logit(p: float, eps: float = 1e-6) -> float:
    p = min(max(p, eps), 1 - eps)
    return math.log(p / (1 - p))
