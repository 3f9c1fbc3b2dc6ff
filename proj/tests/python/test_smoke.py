from fractions import Fraction

import numpy as np
import pytest

import fivewise


def test_transition_matrix_is_cyclic():
    m = fivewise.transition_matrix()
    for i in range(6):
        for j in range(6):
            want = Fraction(5, 8) if i == j else Fraction(3, 8) if j == (i + 1) % 6 else 0
            assert m[i][j] == want


def test_pattern_probability():
    assert fivewise.identity_pattern_probability() == (Fraction(5, 8) ** 5 * Fraction(3, 8)) ** 6


def test_level_one_laws():
    ord_law = fivewise.exact_distribution(1, "ord")
    assert len(ord_law) == 32
    assert set(ord_law.values()) == {Fraction(1, 32)}
    assert fivewise.sum_distribution(2, "ord") == {-16: Fraction(3, 16), 0: Fraction(5, 8), 16: Fraction(3, 16)}
    with pytest.raises(Exception):
        fivewise.exact_distribution(0, "cen")


def test_sample_level_constraints():
    for seed in range(20):
        v = fivewise.sample_level(2, "cen", seed)
        assert v.shape == (36,)
        assert v.sum() == 0
        assert np.prod(v.astype(np.int64)) == 1


def test_sample_path_shape_and_determinism():
    p = fivewise.sample_path(0, 999, 1)
    q = fivewise.sample_path(0, 999, 1)
    assert p["x"].shape == (1000,)
    assert set(np.unique(p["x"])) <= {-1, 1}
    assert np.array_equal(p["x"], q["x"])
    assert np.all(p["j"] >= 0)
    assert np.all(p["j"] < 6 ** p["n"].astype(np.int64))


def test_block_audit_passes():
    report = fivewise.block_audit(0, 20000, 3, 2)
    assert report["pass"]
    assert report["structure_violations"] == []


def test_small_campaign():
    assert "tails" in fivewise.campaign_catalog()
    r = fivewise.run_campaign("tails", seed=2, replicates=10, positions=100000, nmax=3)
    assert r["campaign"] == "tails"
    assert {e["verdict"] for e in r["estimates"]} <= {"pass", "fail"}
    assert r["estimates"][0]["value"] == 1.0
