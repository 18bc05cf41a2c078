"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary under "acceptance criteria". Run directly with
``python tests/test_acceptance.py`` or ``pytest tests/test_acceptance.py``.
"""

import random
import time

import numpy as np
import pytest

from conftest import (
    atom_multiset,
    bond_multiset,
    brute_force_delta,
    cross_fold_nn_similarity,
    expected_ap_over_tie_orders,
    planted_labels,
    random_smiles,
    staircase_ap,
)
from qsarbench.chem import parse_smiles
from qsarbench.cli import main
from qsarbench.datasplit import SplitConfig, assign_folds, deduplicate, random_folds, write_folds
from qsarbench.featurize import feature_matrix
from qsarbench.harness.run import sha256_file
from qsarbench.harness.synthetic import ames_like_labels, generate_series
from qsarbench.learners import LearnerConfig, balanced_weights, fit, fit_logistic, fit_ridge, logistic_gradient, predict
from qsarbench.metrics import class_precision_recall, pr_auc, read_records, regression_metrics, roc_auc
from qsarbench.report import PAPER_FIXTURE, fold_mean, rank_annotate, winner_counts
from qsarbench.sar import (
    InductionConfig,
    RuleSet,
    SarRule,
    candidate_library,
    fold_ruleset,
    induce_rules,
    load_rule_pack,
    match_matrix,
    score_molecule,
)

from test_learners import own_objective, ridge_oracle
from test_metrics import naive_pearson
from test_report import TABLE_ONE


def numpy_pair_count_auc(scores, labels) -> float:
    """All positive/negative pairs by broadcasting; ties count one half, result is an exact ratio."""
    s = np.asarray(scores)
    y = np.asarray(labels)
    pos, neg = s[y == 1], s[y == 0]
    gt = (pos[:, None] > neg[None, :]).sum()
    eq = (pos[:, None] == neg[None, :]).sum()
    return (2 * int(gt) + int(eq)) / (2 * len(pos) * len(neg))


# 1 -------------------------------------------------------------------------


def test_criterion_1_family_winner_table(criterion):
    with criterion(1, "family winner table from the published fixture") as note:
        start = time.perf_counter()
        cells, _ = rank_annotate(fold_mean(read_records(PAPER_FIXTURE)), emit_warnings=False)
        table = winner_counts(cells)
        elapsed = time.perf_counter() - start
        mismatched = []
        for key, expected in TABLE_ONE.items():
            row = table.row(*key)
            if (row.n, *row.wins, row.leading) != expected:
                mismatched.append(key)
        note.append(f"{len(TABLE_ONE) - len(mismatched)}/{len(TABLE_ONE)} rows match")
        assert not mismatched, mismatched
        assert elapsed < 1.0, f"{elapsed:.2f}s"


# 2 -------------------------------------------------------------------------


def test_criterion_2_metric_oracles(criterion):
    with criterion(2, "ROC/PR/regression metrics agree with independent oracles") as note:
        start = time.perf_counter()
        rng = np.random.default_rng(20)
        roc_bad = 0
        for i in range(1000):
            n = int(rng.integers(2, 501))
            y = rng.integers(0, 2, n)
            y[0], y[1] = 0, 1
            # half the instances use a coarse grid so ties are frequent
            s = rng.integers(0, 10, n) / 10 if i % 2 else rng.random(n)
            if roc_auc(s, y) != numpy_pair_count_auc(s, y):
                roc_bad += 1
        note.append(f"ROC 1000 instances, {roc_bad} mismatches")

        pr_err = 0.0
        for _ in range(100):
            n = int(rng.integers(5, 301))
            y = rng.integers(0, 2, n)
            y[0] = 1
            s = rng.permutation(n) / n
            pr_err = max(pr_err, abs(pr_auc(s, y) - staircase_ap(s.tolist(), y.tolist())))
        tie_err = 0.0
        for _ in range(40):
            n = int(rng.integers(3, 9))
            y = rng.integers(0, 2, n)
            y[0] = 1
            s = rng.integers(0, 3, n).tolist()
            tie_err = max(tie_err, abs(pr_auc(s, y) - expected_ap_over_tie_orders(s, y.tolist())))
        note.append(f"PR max error {max(pr_err, tie_err):.1e}")

        reg_err = 0.0
        for _ in range(100):
            a, b = rng.normal(size=200), rng.normal(size=200)
            r = regression_metrics(a, b)
            mae = sum(abs(x - z) for x, z in zip(a, b)) / len(a)
            reg_err = max(reg_err, abs(r.mae - mae), abs(r.pearson - naive_pearson(list(a), list(b))))
        note.append(f"regression max error {reg_err:.1e}")
        elapsed = time.perf_counter() - start

        assert roc_bad == 0
        assert pr_err <= 1e-12 and tie_err <= 1e-12
        assert reg_err <= 1e-12
        assert elapsed < 30, f"{elapsed:.1f}s"


# 3 -------------------------------------------------------------------------


def test_criterion_3_random_pr_auc(criterion):
    with criterion(3, "random-score PR-AUC tracks prevalence") as note:
        off = []
        for prevalence in (0.03, 0.10, 0.17):
            values = []
            for seed in range(50):
                rng = np.random.default_rng(seed)
                y = (rng.random(10_000) < prevalence).astype(int)
                values.append(pr_auc(rng.random(10_000), y))
            mean = float(np.mean(values))
            note.append(f"pi {prevalence:.2f} mean {mean:.4f}")
            if abs(mean - prevalence) > 0.02:
                off.append(prevalence)
        assert not off, off


# 4 -------------------------------------------------------------------------


def test_criterion_4_structure_split_reduces_leakage(criterion, tmp_path):
    with criterion(4, "structure split leaks less than random and is reproducible") as note:
        start = time.perf_counter()
        worse = []
        medians = []
        differing = []
        for i in range(20):
            mols = generate_series(1000, seed=100 + i)
            labels = ames_like_labels(mols, seed=100 + i)
            ds = deduplicate([(m.smiles, int(y)) for m, y in zip(mols, labels)], "classification", f"synthetic{i}")
            assert len({m.series for m in mols}) >= 5 and len(ds) >= 1000
            cfg = SplitConfig(seed=i)
            fa = assign_folds(ds, cfg)
            bits = feature_matrix(ds.smiles, "ecfp4")
            structured = float(np.median(cross_fold_nn_similarity(bits, fa.folds)))
            rand = float(np.median(cross_fold_nn_similarity(bits, random_folds(len(ds), 5, seed=i))))
            medians.append((structured, rand))
            if structured > rand:
                worse.append(i)
            a = write_folds(fa, tmp_path / f"a{i}")
            b = write_folds(assign_folds(ds, cfg), tmp_path / f"b{i}")
            if a.read_bytes() != b.read_bytes() or a.with_suffix(".json").read_bytes() != b.with_suffix(".json").read_bytes():
                differing.append(i)
        elapsed = time.perf_counter() - start
        s_med = np.median([m[0] for m in medians])
        r_med = np.median([m[1] for m in medians])
        note.append(f"median NN similarity {s_med:.3f} structure vs {r_med:.3f} random over 20 datasets")
        assert not worse, worse
        assert not differing, differing
        assert elapsed < 300, f"{elapsed:.0f}s"


# 5 -------------------------------------------------------------------------


def test_criterion_5_canonical_smiles(criterion, corpus):
    with criterion(5, "canonical SMILES invariant to atom order") as note:
        rng = random.Random(5)
        not_unique = []
        changed = []
        for smi in corpus:
            mol = parse_smiles(smi)
            forms = {parse_smiles(random_smiles(mol, rng)).smiles for _ in range(50)}
            if len(forms) != 1:
                not_unique.append(smi)
            back = parse_smiles(mol.smiles)
            if atom_multiset(back) != atom_multiset(mol) or bond_multiset(back) != bond_multiset(mol):
                changed.append(smi)
        note.append(f"{len(corpus)} molecules x 50 orders, {len(not_unique)} non-unique, {len(changed)} round-trip changes")
        assert len(corpus) == 100
        assert not not_unique and not changed


# 6 -------------------------------------------------------------------------


def test_criterion_6_learners(criterion):
    with criterion(6, "learners fit planted signal, match closed forms, weighting helps recall") as note:
        rng = np.random.default_rng(0)
        X = rng.random((500, 12))
        y = (X[:, 7] > 0.5).astype(float)
        aucs = {}
        for family in ("rf", "extratrees", "gbdt"):
            model = fit(LearnerConfig(family, n_estimators=100, seed=1), X[:400], y[:400])
            aucs[family] = numpy_pair_count_auc(predict(model, X[400:]), y[400:])
        note.append("ROC " + ", ".join(f"{k} {v:.3f}" for k, v in aucs.items()))

        rng = np.random.default_rng(9)
        Xr = rng.normal(size=(200, 10))
        yr = Xr @ rng.normal(size=10) + rng.normal(size=200)
        wr = rng.random(200) + 0.5
        res = fit_ridge(Xr, yr, wr, 1.5)
        coef, b = ridge_oracle(Xr, yr, wr, 1.5)
        ridge_err = max(np.max(np.abs(res.coef - coef)), abs(res.intercept - b))

        Xl = rng.normal(size=(300, 6))
        yl = (rng.random(300) < 1 / (1 + np.exp(-(Xl @ rng.normal(size=6))))).astype(float)
        wl, _ = balanced_weights(yl)
        lf = fit_logistic(Xl, yl, wl, 1.0)
        grad_norm = float(np.linalg.norm(logistic_gradient(lf.coef, lf.intercept, Xl, yl, wl, 1.0)))
        fd_rel = 0.0
        for _ in range(5):
            theta = rng.normal(size=7)
            g = logistic_gradient(theta[:-1], theta[-1], Xl, yl, wl, 1.0)
            fd = np.array(
                [
                    (own_objective(theta + 1e-6 * e, Xl, yl, wl, 1.0) - own_objective(theta - 1e-6 * e, Xl, yl, wl, 1.0))
                    / 2e-6
                    for e in np.eye(7)
                ]
            )
            fd_rel = max(fd_rel, float(np.linalg.norm(g - fd) / np.linalg.norm(fd)))
        note.append(f"ridge error {ridge_err:.1e}, logistic gradient {grad_norm:.1e}, FD relative {fd_rel:.1e}")

        rng = np.random.default_rng(8)
        Xi = rng.normal(size=(2000, 5))
        yi = (rng.random(2000) < 1 / (1 + np.exp(-(2.0 * Xi[:, 0] + Xi[:, 1] - 4.5)))).astype(float)
        recall = {}
        for weighting in ("balanced", "none"):
            model = fit(LearnerConfig("gbdt", n_estimators=50, weighting=weighting), Xi[:1500], yi[:1500])
            recall[weighting] = class_precision_recall(predict(model, Xi[1500:]), yi[1500:]).r1
        note.append(f"positives {yi.mean():.3f}, recall(1) balanced {recall['balanced']:.2f} vs none {recall['none']:.2f}")

        assert all(v >= 0.95 for v in aucs.values())
        assert ridge_err <= 1e-8
        assert grad_norm <= 1e-5 and fd_rel <= 1e-4
        assert 0.03 <= yi.mean() <= 0.08
        assert recall["balanced"] > recall["none"]


# 7 -------------------------------------------------------------------------


def test_criterion_7_sar_induction_and_scoring(criterion):
    with criterion(7, "rule induction matches brute force, scores are monotone, induced rules add recall") as note:
        lib = candidate_library()
        names = [c.name for c in lib]
        exact = 0
        for seed, motif, attr in [
            (1, "nitro", "has_nitro"),
            (2, "nitro", "has_nitro"),
            (3, "quinoline", None),
            (4, "quinoline", None),
        ]:
            mols = generate_series(400, seed=seed)
            flags = [getattr(m, attr) if attr else m.series == motif for m in mols]
            y = planted_labels(flags, 0.7, 0.15, seed=seed)
            F = match_matrix([m.smiles for m in mols], lib)
            assert F[:, names.index(motif)].tolist() == flags
            ind = induce_rules(None, y, lib, matrix=F)
            stats = {s.name: s for s in ind.stats}
            for j, name in enumerate(names):
                col = F[:, j]
                if 0 < col.sum() < len(col):
                    delta, support = brute_force_delta(col, y)
                    assert stats[name].delta == delta and stats[name].support == support, name
                    exact += 1
            assert motif in [r.rule_id for r in ind.rules]
        note.append(f"{exact} candidate statistics equal brute force")

        rng = random.Random(7)
        smarts = [c for c in lib if c.kind == "smarts"]
        pool = [parse_smiles(m.smiles) for m in generate_series(200, seed=7)]
        checked = 0
        violations = 0
        while checked < 1000:
            mol = rng.choice(pool)
            base = tuple(
                SarRule(f"r{j}", c.kind, c.source, *(("activating", w) if w > 0 else ("deactivating", w)))
                for j, (c, w) in enumerate((c, rng.uniform(-2, 2)) for c in rng.sample(smarts, rng.randint(0, 6)))
            )
            extra = rng.choice(smarts)
            new = SarRule("extra", extra.kind, extra.source, "activating", rng.uniform(0.01, 2))
            if not new.fires(mol, None):
                continue
            rs = RuleSet("x", rules=base, intercept=rng.uniform(-3, 3))
            grown = RuleSet("x", rules=base + (new,), intercept=rs.intercept)
            if score_molecule(grown, mol) < score_molecule(rs, mol):
                violations += 1
            checked += 1
        note.append(f"{checked} monotonicity cases, {violations} violations")

        mols = generate_series(900, seed=11)
        parsed = [parse_smiles(m.smiles) for m in mols]
        flags = [m.series == "quinoline" for m in mols]
        y = planted_labels(flags, 0.9, 0.1, seed=11)
        priors = load_rule_pack("generic_smarts")
        assert "quinoline" not in [r.rule_id for r in priors.rules]
        F = match_matrix(parsed, lib)
        folds = np.arange(len(mols)) % 5
        recall = {}
        for mode in ("priors_only", "with_knowledge"):
            p = np.zeros(len(mols))
            for k in range(5):
                tr, te = folds != k, folds == k
                rs, _ = fold_ruleset(
                    priors, y[tr], mode, [parsed[i] for i in np.flatnonzero(tr)], lib, InductionConfig(), k, F[tr]
                )
                p[te] = [score_molecule(rs, parsed[i]) for i in np.flatnonzero(te)]
            recall[mode] = class_precision_recall(p, y).r1
        note.append(f"recall(1) priors-only {recall['priors_only']:.2f} vs with knowledge {recall['with_knowledge']:.2f}")

        assert violations == 0
        assert recall["with_knowledge"] >= recall["priors_only"] + 0.25


# 8 -------------------------------------------------------------------------


def test_criterion_8_run_all_reproducible(criterion, tmp_path, capsys):
    with criterion(8, "run-all on the bundled toy benchmark is reproducible") as note:
        digests = []
        times = []
        for name in ("first", "second"):
            start = time.perf_counter()
            code = main(["run-all", "--config", "builtin:toy", "--out", str(tmp_path / name)])
            times.append(time.perf_counter() - start)
            capsys.readouterr()
            assert code == 0
            digests.append(sha256_file(tmp_path / name / "metrics.csv"))
        note.append(f"runs {times[0]:.1f}s and {times[1]:.1f}s, digest {digests[0][:12]}")
        assert digests[0] == digests[1]
        assert max(times) < 60


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
