"""CSV and markdown emission of matrices, the winner table and the rule table."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..metrics import FAMILIES
from .aggregate import AggregatedCell, TieNote, family_precedence
from .winners import METRIC_LABELS, PAPER_TASK_GROUPS, WinnerTable

FORMATS = ("csv", "markdown")
MISSING = "NA"
TOX21_GROUP = "Tox21 classification"

DEFAULT_HEADER = (
    "PR-AUC is average precision with tie-group averaging",
    "values are fold means over defined folds, ranked at full precision and rounded to 3 decimals for display",
)


@dataclass
class Block:
    """One model-by-task matrix."""

    key: str
    title: str
    metrics: tuple[str, ...]
    tasks: list[str] = field(default_factory=list)


def fmt3(v: float) -> str:
    return MISSING if v != v else f"{v:.3f}"


def _block_of(task: str, metrics: set[str], groups: Mapping[str, str]) -> str:
    if metrics & {"mae", "pearson"}:
        return "regression"
    return "tox21" if groups.get(task) == TOX21_GROUP else "admet_anti"


def build_blocks(cells: Sequence[AggregatedCell], groups: Mapping[str, str] | None = None) -> dict[str, list[Block]]:
    """Lay tasks out as the published matrices do: ADMET with anti-infective, Tox21 apart, regression combined."""
    groups = PAPER_TASK_GROUPS if groups is None else groups
    task_metrics: dict[str, set[str]] = {}
    for c in cells:
        task_metrics.setdefault(c.task, set()).add(c.metric)
    blocks = {
        "admet_anti": [
            Block("admet_anti_pr_auc", "ADMET and anti-infective classification, PR-AUC", ("pr_auc",)),
            Block("admet_anti_roc_auc", "ADMET and anti-infective classification, ROC-AUC", ("roc_auc",)),
        ],
        "tox21": [
            Block("tox21_pr_auc", "Tox21 classification, PR-AUC", ("pr_auc",)),
            Block("tox21_roc_auc", "Tox21 classification, ROC-AUC", ("roc_auc",)),
        ],
        "regression": [Block("regression", "Regression, MAE / Pearson", ("mae", "pearson"))],
    }
    for task, ms in task_metrics.items():
        for b in blocks[_block_of(task, ms, groups)]:
            b.tasks.append(task)
    return blocks


def _model_order(cells: Sequence[AggregatedCell]) -> list[tuple[str, str]]:
    seen: dict[str, tuple[int, int, str]] = {}
    for i, c in enumerate(cells):
        seen.setdefault(c.model, (family_precedence(c.family), i, c.family))
    return [(fam, m) for m, (_, _, fam) in sorted(seen.items(), key=lambda kv: kv[1][:2])]


def _md_value(c: AggregatedCell | None) -> str:
    if c is None or c.missing:
        return MISSING
    s = fmt3(c.value)
    if c.winner:
        return f"**{s}**"
    if c.rank is not None and c.rank <= 3:
        return f"_{s}_"
    return s


def matrix_rows(block: Block, cells: Sequence[AggregatedCell], fmt: str) -> tuple[list[str], list[list[str]]]:
    index = {(c.task, c.model, c.metric): c for c in cells}
    header = ["family", "model"]
    for t in block.tasks:
        if fmt == "csv":
            for m in block.metrics:
                suffix = f"_{m}" if len(block.metrics) > 1 else ""
                header += [f"{t}{suffix}", f"{t}{suffix}_rank"]
        else:
            header.append(t if len(block.metrics) == 1 else f"{t} ({' / '.join(METRIC_LABELS[m] for m in block.metrics)})")
    rows = []
    for fam, model in _model_order(cells):
        if not any((t, model, m) in index for t in block.tasks for m in block.metrics):
            continue
        row = [fam, model]
        for t in block.tasks:
            got = [index.get((t, model, m)) for m in block.metrics]
            if fmt == "csv":
                for c in got:
                    row += [MISSING, ""] if c is None or c.missing else [fmt3(c.value), str(c.rank)]
            else:
                row.append(" / ".join(_md_value(c) for c in got))
        rows.append(row)
    return header, rows


def winner_rows(table: WinnerTable) -> tuple[list[str], list[list[str]]]:
    header = ["task_group", "metric", "n", *FAMILIES, "leading_family"]
    rows = [[r.group, METRIC_LABELS.get(r.metric, r.metric), str(r.n), *map(str, r.wins), r.leading] for r in table.rows]
    return header, rows


def render(header: Sequence[str], rows: Sequence[Sequence[str]], fmt: str, title: str, notes: Iterable[str]) -> str:
    notes = list(notes)
    if fmt == "csv":
        buf = io.StringIO()
        for n in [title, *notes]:
            buf.write(f"# {n}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    if fmt != "markdown":
        raise ValueError(f"format must be one of {FORMATS}")
    lines = [f"## {title}", ""]
    lines += [f"> {n}" for n in notes]
    if notes:
        lines.append("")
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "|".join("---" for _ in header) + "|")
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def read_table_csv(text: str) -> list[list[str]]:
    """Parse an emitted CSV table, skipping its ``#`` header notes."""
    return list(csv.reader(line for line in text.splitlines() if not line.startswith("#")))


def emit_tables(
    cells: Sequence[AggregatedCell],
    winners: WinnerTable,
    out_dir: Path,
    fmt: str = "csv",
    groups: Mapping[str, str] | None = None,
    ties: Sequence[TieNote] = (),
    sar_rows: Sequence[Mapping[str, str]] | None = None,
    header: Sequence[str] = DEFAULT_HEADER,
) -> list[Path]:
    """Write all report tables into ``out_dir`` and return the written paths.

    Empty blocks are skipped and mentioned in ``notes.txt``, together with
    tie notes and excluded-fold counts.
    """
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = "csv" if fmt == "csv" else "md"
    written = []
    notes = []

    def put(name: str, text: str) -> None:
        p = out_dir / f"{name}.{ext}"
        p.write_text(text)
        written.append(p)

    h, rows = winner_rows(winners)
    put("winners", render(h, rows, fmt, "Family winner counts per task group and metric", header))
    for group in build_blocks(cells, groups).values():
        for b in group:
            if not b.tasks:
                notes.append(f"{b.title}: no tasks in this run, table omitted")
                continue
            h, rows = matrix_rows(b, cells, fmt)
            put(f"matrix_{b.key}", render(h, rows, fmt, b.title, header))
    if sar_rows:
        cols = list(sar_rows[0].keys())
        put("induced_rules", render(cols, [[str(r[c]) for c in cols] for r in sar_rows], fmt, "Train-fold induced SAR rules", ()))
    excluded = [c for c in cells if c.excluded]
    notes += [f"tie: {t.message()}" for t in ties]
    notes += [
        f"{c.task}/{c.model}/{c.metric}: "
        + ("all folds undefined, cell missing" if c.missing else f"{c.excluded} undefined fold(s) excluded from the mean")
        for c in excluded
    ]
    notes_path = out_dir / "notes.txt"
    notes_path.write_text("".join(f"{n}\n" for n in [*header, *notes]))
    written.append(notes_path)
    return written
