import json

import numpy as np
import pytest

from opmeans import means, suite


def test_smoke_scalar_seed_zero():
    report = suite.run_suite({"seed": 0, "trials": 1, "dims": [1]})
    assert report["total_failures"] == 0
    assert {e["property"] for e in report["properties"]} == set(suite.REGISTRY)


def test_smoke_two_by_two():
    report = suite.run_suite({"seed": 0, "trials": 2, "dims": [2]})
    assert report["total_failures"] == 0


def test_empty_property_list():
    report = suite.run_suite({"properties": []})
    assert report["properties"] == [] and report["total_failures"] == 0


def test_unknown_keys_and_properties():
    with pytest.raises(ValueError):
        suite.run_suite({"trails": 3})
    with pytest.raises(ValueError):
        suite.run_suite({"properties": ["no_such_property"]})


def test_deterministic_under_seed():
    cfg = {"seed": 7, "trials": 3, "properties": ["contraction", "eig_power", "negative_power_exploration"]}
    assert suite.report_json(suite.run_suite(cfg)) == suite.report_json(suite.run_suite(cfg))


def test_threads_do_not_change_report(monkeypatch):
    cfg = {"seed": 3, "trials": 4, "properties": ["monotonicity", "ky_fan"]}
    one = suite.report_json(suite.run_suite(cfg))
    monkeypatch.setenv("OPMEANS_THREADS", "3")
    assert suite.report_json(suite.run_suite(cfg)) == one


def test_trials_per_property():
    report = suite.run_suite({"trials": 1, "properties": ["ky_fan", "parallel_sum"], "trials_per_property": {"ky_fan": 5}})
    assert [e["trials"] for e in report["properties"]] == [5, 1]


def test_injected_bug_is_caught(monkeypatch):
    real = means.arithmetic_mean
    monkeypatch.setattr(means, "arithmetic_mean", lambda mu: -real(mu))
    report = suite.run_suite({"trials": 3, "properties": ["amh_sandwich", "homogeneity", "barycentric"]})
    assert report["total_failures"] > 0
    bad = [e for e in report["properties"] if e["failures"]]
    assert all(e["witnesses"] for e in bad)


def test_witness_is_replayable(monkeypatch):
    real = means.harmonic_mean
    monkeypatch.setattr(means, "harmonic_mean", lambda mu: 1.5 * real(mu))
    report = suite.run_suite({"trials": 4, "properties": ["amh_sandwich"], "max_witnesses": 2})
    entry = report["properties"][0]
    assert entry["failures"] > 0 and len(entry["witnesses"]) <= 2
    w = entry["witnesses"][0]
    assert "measure" in w["witness"] and w["failed_checks"]
    json.loads(suite.report_json(report))


def test_exploration_never_fails():
    report = suite.run_suite({"trials": 6, "properties": ["negative_power_exploration"]})
    entry = report["properties"][0]
    assert entry["exploratory"] and entry["failures"] == 0
