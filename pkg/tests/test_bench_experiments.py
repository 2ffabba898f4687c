"""Harness tests: noiseless exactness, record plumbing, aggregation purity."""

import csv
import json

import pytest

from icesim.bench import aggregate, noise_model, run_experiment
from icesim.bench.experiments import KINDS, ExperimentRecord
from icesim.noise import NoiseModel

P0 = NoiseModel.depolarizing(0.0)

SMALL_CONFIGS = {
    "spam": {"k": 2},
    "memory": {"k2": 2, "k1": 2, "cycles": [1], "basis": "Z"},
    "ghz": {"k2": 2, "k1": 2},
    "cb": {"k": 4, "gate": "intra_uzz", "depths": (2, 4), "paulis": 3},
    "xy_mirror": {"dims": (2, 2, 2), "theta": 0.5, "steps": [2, 4],
                  "encoding": "unencoded"},
    "lookup_scaling": {"k2": 2, "k1": 2, "p_grid": [1e-3],
                       "table_samples": 2000},
}


def run_small(kind, noise=P0, shots=200, seed=0):
    return run_experiment(kind, dict(SMALL_CONFIGS[kind]), noise=noise,
                          shots=shots, seed=seed)


class TestNoiseModelFactory:
    def test_uniform(self):
        nm = noise_model(1e-3, "uniform")
        assert nm.p_2q == 1e-3 and nm.p_init == 1e-3 and nm.p_meas == 1e-3

    def test_zz_differs_from_uniform(self):
        import numpy as np
        assert not np.allclose(noise_model(1e-3, "zz").weights,
                               noise_model(1e-3, "uniform").weights)

    def test_unknown_bias_rejected(self):
        with pytest.raises(ValueError):
            noise_model(1e-3, "amplitude")


class TestNoiselessExactness:
    @pytest.mark.parametrize("kind", KINDS)
    def test_acceptance_one_and_no_errors(self, kind):
        rec = run_small(kind)
        cols = {c: i for i, c in enumerate(rec.columns)}
        for row in rec.rows:
            shots = row[cols["shots"]]
            accepted = row[cols["accepted"]]
            if "reruns" in cols:
                shots -= row[cols["reruns"]]
            if "flagged" in cols:
                shots -= row[cols["flagged"]]
                shots -= row[cols["post_discards"]]
            assert accepted == shots
            for err_col, good in (("errors", 0), ("survivors", accepted),
                                  ("stabilizers_ok", accepted),
                                  ("matches", accepted)):
                if err_col in cols:
                    assert row[cols[err_col]] == good


class TestRecordPlumbing:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            run_experiment("teleportation")

    def test_csv_round_trip_and_aggregation_purity(self, tmp_path):
        rec = run_small("spam", noise=noise_model(1e-2, "uniform"),
                        shots=2000)
        path = tmp_path / "spam.csv"
        rec.to_csv(path)
        config_lines = []
        with open(path) as fh:
            rows = []
            for line in fh:
                if line.startswith("#"):
                    config_lines.append(line)
                    continue
                rows.append(line)
        parsed = list(csv.reader(rows))
        assert tuple(parsed[0]) == rec.columns
        back = [tuple(int(v) for v in r) for r in parsed[1:]]
        assert back == [tuple(r) for r in rec.rows]
        assert any("kind=spam" in ln for ln in config_lines)
        again = aggregate(rec.kind, rec.columns, back)
        assert again == rec.aggregates

    def test_json_round_trip(self, tmp_path):
        rec = run_small("memory", noise=noise_model(3e-3, "uniform"),
                        shots=500)
        path = tmp_path / "mem.json"
        rec.to_json(path)
        payload = json.loads(path.read_text())
        assert payload["kind"] == "memory"
        assert [tuple(r) for r in payload["rows"]] == \
            [tuple(r) for r in rec.rows]
        assert "acceptance" in payload["aggregates"]

    def test_seed_determinism(self):
        nm = noise_model(1e-2, "uniform")
        a = run_small("spam", noise=nm, shots=5000, seed=7)
        b = run_small("spam", noise=nm, shots=5000, seed=7)
        assert a.rows == b.rows
        c = run_small("spam", noise=nm, shots=5000, seed=8)
        assert c.rows != a.rows


class TestNoisyBehavior:
    def test_spam_acceptance_decreases_with_p(self):
        lo = run_small("spam", noise=noise_model(1e-3, "uniform"),
                       shots=4000)
        hi = run_small("spam", noise=noise_model(2e-2, "uniform"),
                       shots=4000)
        assert hi.aggregates["acceptance"] < lo.aggregates["acceptance"]

    def test_memory_acceptance_decreases_with_cycles(self):
        rec = run_experiment(
            "memory", {"k2": 2, "k1": 2, "cycles": [1, 4], "basis": "Z"},
            noise=noise_model(3e-3, "uniform"), shots=3000, seed=1)
        acc = rec.aggregates["acceptance"]
        assert acc[4] < acc[1]

    def test_ghz_aggregates_expose_fidelity(self):
        rec = run_small("ghz", noise=noise_model(3e-3, "uniform"),
                        shots=3000)
        fid = rec.aggregates["fidelity"]
        assert 0.9 < fid.estimate <= 1.0
        assert rec.aggregates["acceptance"] < 1.0

    def test_cb_decay_with_depth(self):
        rec = run_experiment(
            "cb", {"k": 4, "gate": "intra_uzz", "depths": (4, 16),
                   "paulis": 6}, noise=noise_model(5e-3, "uniform"),
            shots=1500, seed=3)
        assert 0.5 < rec.aggregates["f_pro"] < 1.0

    def test_lookup_scaling_counts_partition(self):
        rec = run_experiment(
            "lookup_scaling", {"k2": 2, "k1": 2, "p_grid": [1e-2],
                               "table_samples": 20000},
            shots=20000, seed=4)
        cols = {c: i for i, c in enumerate(rec.columns)}
        row = rec.rows[0]
        assert row[cols["flagged"]] + row[cols["post_discards"]] + \
            row[cols["accepted"]] == row[cols["shots"]]
        assert row[cols["errors"]] <= row[cols["accepted"]]

    def test_invalid_cycles_rejected(self):
        with pytest.raises(ValueError):
            run_experiment("memory", {"k2": 2, "k1": 2, "cycles": [0]})

    def test_cb_too_many_paulis_rejected(self):
        with pytest.raises(ValueError):
            run_experiment("cb", {"k": 1, "paulis": 99, "depths": (2, 4)})


class TestAggregatesSerializable:
    @pytest.mark.parametrize("kind", KINDS)
    def test_json_serializable(self, kind):
        rec = run_small(kind, noise=noise_model(3e-3, "uniform"), shots=300)
        text = rec.to_json()
        assert json.loads(text)["kind"] == kind
