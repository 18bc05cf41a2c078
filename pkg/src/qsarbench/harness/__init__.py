"""Dataset ingestion, run configuration and deterministic orchestration."""

from .config import (
    Binarization,
    LearnerSpec,
    ModelSpec,
    RunConfig,
    TaskSpec,
    learner_spec,
    load_config,
    parse_config,
    register_learner,
    unregister_learner,
)
from .ingest import ingest_dataset, ingest_summary
from .learners import CellInput, CellOutput
from .run import (
    STAGES,
    LeakageError,
    StageResult,
    leakage_guard,
    manifest_dict,
    run_benchmark,
    run_stage,
    sha256_file,
)
from .seeds import derive_seed, seed_collisions, split_seed

__all__ = [
    "STAGES",
    "Binarization",
    "CellInput",
    "CellOutput",
    "LeakageError",
    "LearnerSpec",
    "ModelSpec",
    "RunConfig",
    "StageResult",
    "TaskSpec",
    "derive_seed",
    "ingest_dataset",
    "ingest_summary",
    "leakage_guard",
    "learner_spec",
    "load_config",
    "manifest_dict",
    "parse_config",
    "register_learner",
    "run_benchmark",
    "run_stage",
    "seed_collisions",
    "sha256_file",
    "split_seed",
    "unregister_learner",
]
