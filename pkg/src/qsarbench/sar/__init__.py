"""Rule-based SAR baselines: prior packs, train-fold induction, scoring and export."""

from .export import RULE_TABLE_COLUMNS, export_rule_table, rule_table_text, summarize_row, write_rule_table
from .induce import CandidateStats, Induction, InductionConfig, induce_rules, log_odds_weight, match_matrix
from .library import DESCRIPTOR_CANDIDATES, MOTIFS, Candidate, Motif, candidate_library
from .rules import (
    DescriptorCondition,
    RuleSet,
    SarRule,
    bundled_packs,
    load_rule_pack,
    logit,
    parse_rule_pack,
)
from .score import compose, fired_matrix, fold_ruleset, raw_score, score_many, score_molecule, train_intercept

__all__ = [
    "DESCRIPTOR_CANDIDATES",
    "MOTIFS",
    "RULE_TABLE_COLUMNS",
    "Candidate",
    "CandidateStats",
    "DescriptorCondition",
    "Induction",
    "InductionConfig",
    "Motif",
    "RuleSet",
    "SarRule",
    "bundled_packs",
    "candidate_library",
    "compose",
    "export_rule_table",
    "fired_matrix",
    "fold_ruleset",
    "induce_rules",
    "load_rule_pack",
    "log_odds_weight",
    "logit",
    "match_matrix",
    "rule_table_text",
    "parse_rule_pack",
    "raw_score",
    "score_many",
    "score_molecule",
    "summarize_row",
    "train_intercept",
    "write_rule_table",
]
