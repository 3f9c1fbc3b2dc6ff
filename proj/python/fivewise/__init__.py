"""Sampler and verification harness for a five-wise independent, six-wise dependent sign process."""

import json
from fractions import Fraction

from . import _fivewise
from ._fivewise import BudgetExceeded, campaign_catalog, sample_level, sample_path

__all__ = [
    "BudgetExceeded",
    "UNKNOWN_POSITION",
    "block_audit",
    "campaign_catalog",
    "exact_distribution",
    "identity_pattern_probability",
    "run_campaign",
    "sample_level",
    "sample_path",
    "sum_distribution",
    "transition_matrix",
]

UNKNOWN_POSITION = _fivewise.unknown_position()


def transition_matrix():
    """6x6 list of Fractions, row i = law of the next state from state i + 1."""
    return [[Fraction(x) for x in row] for row in json.loads(_fivewise.transition_matrix_json())]


def identity_pattern_probability():
    return Fraction(_fivewise.identity_pattern_probability())


def exact_distribution(n, kind):
    """Mapping from '+'/'-' strings to exact probabilities."""
    rows = json.loads(_fivewise.exact_distribution_json(n, kind))
    return {r["vector"]: Fraction(int(r["prob_num"]), int(r["prob_den"])) for r in rows}


def sum_distribution(n, kind):
    rows = json.loads(_fivewise.sum_distribution_json(n, kind))
    return {r["sum"]: Fraction(int(r["prob_num"]), int(r["prob_den"])) for r in rows}


def block_audit(a, b, seed, min_depth=0):
    return json.loads(_fivewise.block_audit_json(a, b, seed, min_depth))


def run_campaign(name, seed=1, replicates=-1, positions=-1, nmax=6, significance=1e-3, threads=0):
    """Runs a catalog campaign; negative sizes select the acceptance-scale defaults."""
    return json.loads(
        _fivewise.run_campaign_json(name, seed, replicates, positions, nmax, significance, threads)
    )
