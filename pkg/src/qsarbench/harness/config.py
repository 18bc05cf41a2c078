"""Run configuration: tasks, models and the learner registry."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

from ..errors import ConfigError
from ..featurize import FEATURE_KINDS
from ..metrics import FAMILIES

TOY_CONFIG = Path(__file__).resolve().parent.parent / "data" / "toy" / "config.json"
BUILTIN = {"builtin:toy": TOY_CONFIG}
DEFAULT_OUT = "qsarbench-run"

OPS = ("<=", "<", ">=", ">")
# multiplier to nanomolar
UNIT_TO_NM = {"pM": 1e-3, "nM": 1.0, "uM": 1e3, "µM": 1e3, "μM": 1e3, "mM": 1e6, "M": 1e9}


@dataclass(frozen=True)
class Binarization:
    """Threshold rule turning a value column into 0/1 labels.

    ``op`` names the comparison that makes a row active, e.g. ``<=`` for
    potency endpoints. Values are converted to ``unit`` before comparing when
    ``unit_column`` or ``value_unit`` says they were recorded differently.
    """

    column: str
    op: str
    threshold: float
    unit: str | None = None
    unit_column: str | None = None
    value_unit: str | None = None

    def __post_init__(self):
        if self.op not in OPS:
            raise ConfigError(f"binarize.op must be one of {OPS}, got {self.op!r}")
        for u in (self.unit, self.value_unit):
            if u is not None and u not in UNIT_TO_NM:
                raise ConfigError(f"unknown concentration unit {u!r}")
        if self.unit_column and not self.unit:
            raise ConfigError("binarize.unit is required when unit_column is set")

    def convert(self, value: float, unit: str | None) -> float:
        src = unit or self.value_unit or self.unit
        if self.unit is None or src is None:
            return value
        if src not in UNIT_TO_NM:
            raise ValueError(f"unknown concentration unit {src!r}")
        return value * UNIT_TO_NM[src] / UNIT_TO_NM[self.unit]

    def active(self, value: float) -> int:
        t = self.threshold
        return int({"<=": value <= t, "<": value < t, ">=": value >= t, ">": value > t}[self.op])


@dataclass(frozen=True)
class TaskSpec:
    name: str
    file: Path
    kind: str
    group: str
    smiles_column: str = "smiles"
    label_column: str | None = None
    binarize: Binarization | None = None


@dataclass(frozen=True)
class ModelSpec:
    id: str
    family: str
    learner: str
    features: str | None = None
    params: Mapping[str, Any] = field(default_factory=dict)
    packs: Mapping[str, str] = field(default_factory=dict)  # task name or "default" -> pack
    flavor: str = "smarts"
    mode: str = "priors_only"

    def pack_for(self, task: str) -> str:
        if task in self.packs:
            return self.packs[task]
        if "default" in self.packs:
            return self.packs["default"]
        raise ConfigError(f"model {self.id}: no rule pack for task {task!r} and no default")


@dataclass(frozen=True)
class LearnerSpec:
    """Registry entry: which task kinds a learner supports and how it runs a cell."""

    name: str
    kinds: tuple[str, ...]
    needs_features: bool
    run: Callable  # (CellInput) -> CellOutput
    check: Callable | None = None  # (ModelSpec, kind) -> None, raises ConfigError


_REGISTRY: dict[str, LearnerSpec] = {}


def register_learner(spec: LearnerSpec, replace: bool = False) -> None:
    if spec.name in _REGISTRY and not replace:
        raise ConfigError(f"learner {spec.name!r} already registered")
    _REGISTRY[spec.name] = spec


def unregister_learner(name: str) -> None:
    _REGISTRY.pop(name, None)


def learner_spec(name: str) -> LearnerSpec:
    from . import learners  # noqa: F401  registers the built-ins

    try:
        return _REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown learner {name!r}; known: {sorted(_REGISTRY)}") from None


@dataclass(frozen=True)
class RunConfig:
    tasks: tuple[TaskSpec, ...]
    models: tuple[ModelSpec, ...]
    seed: int = 0
    out: Path = Path(DEFAULT_OUT)
    jobs: int = 1
    nbits: int = 2048
    split: Mapping[str, Any] = field(default_factory=dict)
    source: Path | None = None

    def task(self, name: str) -> TaskSpec:
        for t in self.tasks:
            if t.name == name:
                return t
        raise KeyError(name)

    def model(self, model_id: str) -> ModelSpec:
        for m in self.models:
            if m.id == model_id:
                return m
        raise KeyError(model_id)

    @property
    def groups(self) -> dict[str, str]:
        return {t.name: t.group for t in self.tasks}

    @property
    def family_map(self) -> dict[str, str]:
        return {m.id: m.family for m in self.models}

    def to_dict(self) -> dict:
        """Resolved configuration with paths as strings (the run's identity)."""

        def conv(o):
            if isinstance(o, Path):
                return str(o)
            if isinstance(o, dict):
                return {k: conv(v) for k, v in o.items()}
            if isinstance(o, (list, tuple)):
                return [conv(v) for v in o]
            return o

        d = conv(asdict(self))
        d.pop("source", None)
        return d

    def config_hash(self) -> str:
        """Hash of everything that affects results (output dir and worker count excluded)."""
        d = self.to_dict()
        d.pop("out")
        d.pop("jobs")
        for t in d["tasks"]:
            t["file"] = Path(t["file"]).name
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


def _require(d: Mapping, key: str, where: str):
    if key not in d:
        raise ConfigError(f"{where}: missing required field {key!r}")
    return d[key]


def _check_keys(d: Mapping, allowed: set[str], where: str) -> None:
    extra = sorted(set(d) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown field(s) {extra}")


def _parse_task(d: Mapping, base: Path, i: int) -> TaskSpec:
    where = f"tasks[{i}]"
    if not isinstance(d, Mapping):
        raise ConfigError(f"{where}: expected an object")
    _check_keys(d, {"name", "file", "kind", "group", "smiles_column", "label_column", "binarize"}, where)
    kind = _require(d, "kind", where)
    if kind not in ("classification", "regression"):
        raise ConfigError(f"{where}: kind must be classification or regression")
    binz = None
    if d.get("binarize") is not None:
        b = d["binarize"]
        _check_keys(b, {"column", "op", "threshold", "unit", "unit_column", "value_unit"}, f"{where}.binarize")
        if kind != "classification":
            raise ConfigError(f"{where}: binarize only applies to classification tasks")
        try:
            binz = Binarization(
                _require(b, "column", f"{where}.binarize"),
                _require(b, "op", f"{where}.binarize"),
                float(_require(b, "threshold", f"{where}.binarize")),
                b.get("unit"),
                b.get("unit_column"),
                b.get("value_unit"),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}.binarize: {exc}") from None
    label = d.get("label_column")
    if label is None and binz is None:
        label = "label" if kind == "classification" else "value"
    path = Path(_require(d, "file", where))
    name = str(_require(d, "name", where))
    if not name or any(c in name for c in "/\\"):
        raise ConfigError(f"{where}: task name {name!r} is not a valid file stem")
    return TaskSpec(
        name=name,
        file=path if path.is_absolute() else (base / path),
        kind=kind,
        group=str(d.get("group", "Other")),
        smiles_column=d.get("smiles_column", "smiles"),
        label_column=label,
        binarize=binz,
    )


def _parse_model(d: Mapping, i: int) -> ModelSpec:
    where = f"models[{i}]"
    if not isinstance(d, Mapping):
        raise ConfigError(f"{where}: expected an object")
    _check_keys(d, {"id", "family", "learner", "features", "params", "pack", "packs", "flavor", "mode"}, where)
    family = _require(d, "family", where)
    if family not in FAMILIES:
        raise ConfigError(f"{where}: family must be one of {FAMILIES}")
    learner = _require(d, "learner", where)
    packs = dict(d.get("packs") or {})
    if d.get("pack"):
        packs.setdefault("default", d["pack"])
    mode = d.get("mode", "priors_only")
    if mode not in ("priors_only", "with_knowledge"):
        raise ConfigError(f"{where}: mode must be priors_only or with_knowledge")
    flavor = d.get("flavor", "smarts")
    if flavor not in ("smarts", "text"):
        raise ConfigError(f"{where}: flavor must be smarts or text")
    return ModelSpec(
        id=str(_require(d, "id", where)),
        family=family,
        learner=learner,
        features=d.get("features"),
        params=dict(d.get("params") or {}),
        packs=packs,
        flavor=flavor,
        mode=mode,
    )


def validate(cfg: RunConfig) -> None:
    """Cross-field checks: unique names and every (task, model) pair runnable.

    Raises:
        ConfigError: on the first incompatibility found.
    """
    names = [t.name for t in cfg.tasks]
    if len(set(names)) != len(names):
        raise ConfigError("task names must be unique")
    ids = [m.id for m in cfg.models]
    if len(set(ids)) != len(ids):
        raise ConfigError("model ids must be unique")
    if not cfg.tasks or not cfg.models:
        raise ConfigError("config needs at least one task and one model")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be >= 1")
    for m in cfg.models:
        spec = learner_spec(m.learner)
        if spec.needs_features:
            if m.features not in FEATURE_KINDS:
                raise ConfigError(f"model {m.id}: features must be one of {FEATURE_KINDS}, got {m.features!r}")
        elif m.features is not None:
            raise ConfigError(f"model {m.id}: learner {m.learner!r} does not take features")
        for t in cfg.tasks:
            if t.kind not in spec.kinds:
                raise ConfigError(f"model {m.id}: learner {m.learner!r} cannot run {t.kind} task {t.name!r}")
            if spec.check is not None:
                spec.check(m, t.kind)
            if m.learner == "sar":
                _check_pack(m, t, cfg.source)
    from ..datasplit import SplitConfig

    bad = sorted(set(cfg.split) - (set(SplitConfig.__dataclass_fields__) - {"seed", "nbits"}))
    if bad:
        raise ConfigError(f"split: unknown field(s) {bad}")


def _check_pack(m: ModelSpec, t: TaskSpec, source: Path | None) -> None:
    from ..errors import PackError
    from .learners import resolve_pack

    try:
        rs = resolve_pack(m.pack_for(t.name), source)
    except (PackError, OSError) as exc:
        raise ConfigError(f"model {m.id}, task {t.name}: {exc}") from None
    if rs.task != t.kind:
        raise ConfigError(f"model {m.id}: pack {rs.endpoint!r} is for {rs.task} tasks, {t.name!r} is {t.kind}")


def parse_config(data: Mapping, base: Path = Path("."), source: Path | None = None) -> RunConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a JSON object")
    _check_keys(data, {"seed", "out", "jobs", "nbits", "split", "tasks", "models", "description"}, "config")
    tasks = tuple(_parse_task(t, base, i) for i, t in enumerate(_require(data, "tasks", "config")))
    models = tuple(_parse_model(m, i) for i, m in enumerate(_require(data, "models", "config")))
    # an explicit relative "out" is relative to the config file; the default is the working directory
    out = Path(data["out"]) if "out" in data else Path.cwd() / DEFAULT_OUT
    try:
        cfg = RunConfig(
            tasks=tasks,
            models=models,
            seed=int(data.get("seed", 0)),
            out=out if out.is_absolute() else base / out,
            jobs=int(data.get("jobs", 1)),
            nbits=int(data.get("nbits", 2048)),
            split=dict(data.get("split") or {}),
            source=source,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: {exc}") from None
    validate(cfg)
    return cfg


def load_config(path: str | Path) -> RunConfig:
    """Read a JSON run config; relative paths resolve against the file's directory.

    ``builtin:toy`` names the bundled toy benchmark.
    """
    path = BUILTIN.get(str(path), Path(path))
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    base = Path(path).resolve().parent
    return parse_config(data, base, base)
