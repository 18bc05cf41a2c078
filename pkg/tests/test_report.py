import math
import re
import warnings

import numpy as np
import pytest

from qsarbench.errors import UnmappedModelError
from qsarbench.metrics import MetricRecord, read_records
from qsarbench.report import (
    PAPER_FIXTURE,
    RankTieWarning,
    build_report,
    dense_ranks,
    emit_tables,
    fold_mean,
    leading_label,
    paper_report,
    rank_annotate,
    read_table_csv,
    winner_counts,
)

# Published family winner counts, frozen: (columns, ML, GNN, Sequence, LLM-SAR, leading)
TABLE_ONE = {
    ("ADMET classification", "pr_auc"): (5, 2, 2, 1, 0, "ML/GNN"),
    ("ADMET classification", "roc_auc"): (5, 1, 3, 1, 0, "GNN"),
    ("ADMET regression", "mae"): (3, 2, 1, 0, 0, "ML"),
    ("ADMET regression", "pearson"): (3, 2, 1, 0, 0, "ML"),
    ("Tox21 classification", "pr_auc"): (12, 9, 2, 0, 1, "ML"),
    ("Tox21 classification", "roc_auc"): (12, 6, 4, 2, 0, "ML"),
    ("Anti-infective classification", "pr_auc"): (2, 1, 1, 0, 0, "ML/GNN"),
    ("Anti-infective classification", "roc_auc"): (2, 1, 1, 0, 0, "ML/GNN"),
}


def rec(task, model, metric, value, fold="0", family="ML"):
    return MetricRecord(task, model, family, str(fold), metric, value)


@pytest.fixture(scope="module")
def paper():
    return paper_report(figures=False)


# fold means ----------------------------------------------------------------


def test_constant_folds():
    cells = fold_mean([rec("t", "m", "roc_auc", 0.8, k) for k in range(5)])
    assert len(cells) == 1 and cells[0].value == pytest.approx(0.8) and cells[0].n_folds == 5


def test_undefined_fold_excluded():
    vals = [1, 0, float("nan"), 1, 0]
    (cell,) = fold_mean([rec("t", "m", "roc_auc", v, k) for k, v in enumerate(vals)])
    assert cell.value == 0.5 and cell.excluded == 1 and cell.n_folds == 4


def test_all_folds_undefined_is_missing():
    (cell,) = fold_mean([rec("t", "m", "pr_auc", float("nan"), k) for k in range(5)])
    assert cell.missing and math.isnan(cell.value)


def test_fold_mean_matches_fsum_oracle():
    rng = np.random.default_rng(0)
    for _ in range(50):
        vals = rng.random(5)
        (cell,) = fold_mean([rec("t", "m", "roc_auc", float(v), k) for k, v in enumerate(vals)])
        assert abs(cell.value - math.fsum(vals) / 5) <= 1e-12


# ranks ---------------------------------------------------------------------


def _column(values, metric="roc_auc", families=None):
    families = families or ["ML"] * len(values)
    return [rec("t", f"m{i}", metric, v, family=f) for i, (v, f) in enumerate(zip(values, families))]


def test_maximized_ranks():
    cells, ties = rank_annotate(fold_mean(_column([0.9, 0.8, 0.7])))
    assert [c.rank for c in cells] == [1, 2, 3] and ties == []
    assert [c.winner for c in cells] == [True, False, False]


def test_mae_minimized():
    cells, _ = rank_annotate(fold_mean(_column([0.4, 0.5], "mae")))
    assert [c.rank for c in cells] == [1, 2]


def test_tie_shares_rank_and_warns():
    recs = _column([0.8, 0.8, 0.7], families=["GNN", "ML", "ML"])
    with pytest.warns(RankTieWarning):
        cells, ties = rank_annotate(fold_mean(recs))
    assert [c.rank for c in cells] == [1, 1, 2]
    # ML precedes GNN in the documented tie-break
    assert [c.winner for c in cells] == [False, True, False]
    assert ties[0].models == ("m1", "m0") and ties[0].winner == "m1"


def test_tie_break_by_model_id_within_family():
    cells, ties = rank_annotate(fold_mean(_column([0.8, 0.8])[::-1]), emit_warnings=False)
    assert next(c for c in cells if c.winner).model == "m0"


def test_dense_ranks():
    assert dense_ranks([3.0, 1.0, 3.0, 2.0], minimize=False) == [1, 3, 1, 2]
    assert dense_ranks([3.0, 1.0, 3.0, 2.0], minimize=True) == [3, 1, 3, 2]


def test_missing_cells_unranked():
    recs = _column([0.9, 0.8]) + [rec("t", "m9", "roc_auc", float("nan"))]
    cells, _ = rank_annotate(fold_mean(recs))
    assert cells[-1].rank is None and not cells[-1].winner


# winner counts -------------------------------------------------------------


def test_leading_label():
    assert leading_label((2, 2, 1, 0)) == "ML/GNN"
    assert leading_label((0, 3, 0, 0)) == "GNN"
    assert leading_label((0, 0, 0, 0)) == ""


def test_single_model_wins_everything():
    recs = [rec(t, "solo", m, 0.7, family="Sequence") for t in ("AMES", "BBB") for m in ("pr_auc", "roc_auc")]
    cells, _ = rank_annotate(fold_mean(recs))
    table = winner_counts(cells)
    for metric in ("pr_auc", "roc_auc"):
        row = table.row("ADMET classification", metric)
        assert row.wins == (0, 0, 2, 0) and row.leading == "Sequence"


def test_unmapped_model():
    cells, _ = rank_annotate(fold_mean(_column([0.9])))
    with pytest.raises(UnmappedModelError):
        winner_counts(cells, family_map={})
    with pytest.raises(UnmappedModelError):
        winner_counts(cells, family_map={"m0": "Kernel"})


def test_fixture_shape():
    recs = read_records(PAPER_FIXTURE)
    assert len(recs) == 1188
    assert len({r.model for r in recs}) == 31 and len({r.task for r in recs}) == 22


@pytest.mark.parametrize("key", sorted(TABLE_ONE))
def test_table_one_rows(paper, key):
    row = paper.winners.row(*key)
    assert (row.n, *row.wins, row.leading) == TABLE_ONE[key]


def test_fixture_ties_reported(paper):
    tied = {(t.task, t.metric) for t in paper.ties}
    assert ("anti-TB", "pr_auc") in tied and ("SR-ATAD5", "roc_auc") in tied


# emission ------------------------------------------------------------------


def test_regression_cell_format(paper, tmp_path):
    emit_tables(paper.cells, paper.winners, tmp_path, "markdown", ties=paper.ties)
    text = (tmp_path / "matrix_regression.md").read_text()
    line = next(ln for ln in text.splitlines() if "ExtraTrees(RDKit desc.)" in ln)
    caco2 = [c.strip() for c in line.strip("|").split("|")][2]
    assert re.sub(r"[*_]", "", caco2) == "0.401 / 0.661"


def test_empty_tox21_omitted(tmp_path):
    recs = [rec("AMES", "rf", m, 0.7) for m in ("pr_auc", "roc_auc")]
    rep = build_report(recs, tmp_path, figures=False)
    names = {p.name for p in rep.written}
    assert "matrix_tox21_pr_auc.csv" not in names and "matrix_admet_anti_pr_auc.csv" in names
    assert "Tox21 classification, PR-AUC: no tasks in this run, table omitted" in (tmp_path / "notes.txt").read_text()


def _numbers(text):
    return sorted(re.findall(r"-?\d+\.\d{3}", text))


def test_markdown_and_csv_carry_same_numbers(paper, tmp_path):
    emit_tables(paper.cells, paper.winners, tmp_path / "c", "csv")
    emit_tables(paper.cells, paper.winners, tmp_path / "m", "markdown")
    for key in ("admet_anti_pr_auc", "admet_anti_roc_auc", "tox21_pr_auc", "tox21_roc_auc", "regression"):
        csv_rows = read_table_csv((tmp_path / "c" / f"matrix_{key}.csv").read_text())
        csv_vals = sorted(v for row in csv_rows[1:] for v in row[2:] if re.fullmatch(r"-?\d+\.\d{3}", v))
        md_body = "\n".join(
            ln for ln in (tmp_path / "m" / f"matrix_{key}.md").read_text().splitlines() if ln.startswith("|")
        )
        assert csv_vals == _numbers(md_body)


def test_winner_csv_round_trip(paper, tmp_path):
    emit_tables(paper.cells, paper.winners, tmp_path, "csv")
    rows = read_table_csv((tmp_path / "winners.csv").read_text())
    assert rows[0] == ["task_group", "metric", "n", "ML", "GNN", "Sequence", "LLM-SAR", "leading_family"]
    tox_pr = next(r for r in rows if r[0] == "Tox21 classification" and r[1] == "PR-AUC")
    assert tox_pr[2:] == ["12", "9", "2", "0", "1", "ML"]


def test_figure_written(tmp_path):
    recs = [rec("AMES", "rf", m, 0.7) for m in ("pr_auc", "roc_auc")]
    rep = build_report(recs, tmp_path)
    png = tmp_path / "figures" / "family_winners.png"
    assert png in rep.written and png.read_bytes()[:4] == b"\x89PNG"


def test_report_quiet_on_ties():
    with warnings.catch_warnings():
        warnings.simplefilter("error", RankTieWarning)
        paper_report(figures=False)
