"""Command surface and bundle round-trips on a reduced campaign."""

import json
import os
import shutil
import subprocess
import sys

import numpy as np
import pytest

from semscore.cli import main
from semscore.engine import EquivalenceConfig, run_campaign
from semscore.lrca import LrcaConfig, annotate_campaign
from semscore.reporting import (
    CAMPAIGN_FILE,
    LRCA_FILE,
    MR_MANIFEST_FILE,
    MUTANT_MANIFEST_FILE,
    STATS_FILE,
    build_lrca_report,
    build_stats_report,
    campaign_from_payload,
    campaign_to_payload,
    load_campaign,
    read_json,
    render_heatmap_csv,
    write_bundle,
)

FAST_FLAGS = ["--keq", "120", "--replicates", "2"]


@pytest.fixture(scope="module")
def bundle_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle")
    rc = main(["run", "--seed", "5", *FAST_FLAGS, "--out", str(out)])
    assert rc == 0
    return out


def test_bundle_files_exist(bundle_dir):
    for name in (CAMPAIGN_FILE, LRCA_FILE, STATS_FILE,
                 MUTANT_MANIFEST_FILE, MR_MANIFEST_FILE):
        assert (bundle_dir / name).exists()


def test_bundle_round_trip(bundle_dir):
    campaign = load_campaign(str(bundle_dir))
    payload = campaign_to_payload(campaign)
    again = campaign_from_payload(payload)
    assert campaign_to_payload(again) == payload
    assert len(campaign.matrix) == 60
    assert len(campaign.tensor) == 300
    assert sum(1 for c in campaign.matrix if c.aligned) == 12
    assert sum(1 for c in campaign.matrix if not c.aligned) == 48


def test_no_raw_nan_in_files(bundle_dir):
    for name in (CAMPAIGN_FILE, LRCA_FILE, STATS_FILE):
        text = (bundle_dir / name).read_text()
        assert "NaN" not in text
        assert "Infinity" not in text
        json.loads(text)  # strict parse


def test_stats_file_cell_count_matches_campaign(bundle_dir):
    stats = read_json(str(bundle_dir / STATS_FILE))
    campaign = read_json(str(bundle_dir / CAMPAIGN_FILE))
    assert stats["cells"] == len(campaign["matrix"])


def test_config_echo_self_describes(bundle_dir):
    for name in (CAMPAIGN_FILE, LRCA_FILE, STATS_FILE):
        payload = read_json(str(bundle_dir / name))
        echo = payload["config"]
        assert echo["seed"] == 5
        assert echo["k_eq"] == 120
        assert echo["replicates"] == 2


def test_stats_and_power_commands(bundle_dir):
    assert main(["stats", "--in", str(bundle_dir)]) == 0
    assert main(["power", "--in", str(bundle_dir), "--mode", "plugin",
                 "--nsim", "300"]) == 0
    payload = read_json(str(bundle_dir / "power_report.json"))
    thresholds = [row["threshold"] for row in payload["thresholds"]]
    assert thresholds == [0.0, 0.147, 0.330, 0.474]
    powers = [row["power"] for row in payload["thresholds"]]
    assert all(powers[i] >= powers[i + 1] for i in range(len(powers) - 1))


def test_report_command(bundle_dir, capsys):
    assert main(["report", "--in", str(bundle_dir), "--csv"]) == 0
    out = capsys.readouterr().out
    assert "heatmap" in out
    assert "H1" in out and "H4" in out
    csv_text = (bundle_dir / "heatmap.csv").read_text()
    assert len(csv_text.strip().splitlines()) == 13  # header + 12 programs


def test_missing_inputs_exit_code(tmp_path):
    assert main(["stats", "--in", str(tmp_path / "nowhere")]) == 3
    assert main(["report", "--in", str(tmp_path / "nowhere")]) == 3


def test_invalid_config_exit_code(tmp_path):
    assert main(["run", "--seed", "1", "--replicates", "0",
                 "--out", str(tmp_path / "x")]) == 2
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert main(["run", "--config", str(cfg),
                 "--out", str(tmp_path / "y")]) == 2


def test_config_file_round_trip(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "seed": 9, "k_eq": 100, "replicates": 2,
        "equivalence_mode": "e1e2",
        "lrca": {"ood_band": 0.02, "tolerance_multiplier": 3.0},
    }))
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    echo = read_json(str(out / CAMPAIGN_FILE))["config"]
    assert echo["seed"] == 9 and echo["k_eq"] == 100


def test_unreachable_power_target_exit_code(bundle_dir):
    rc = main(["power", "--in", str(bundle_dir), "--mode", "stipulated",
               "--target", "-0.9", "--nsim", "200"])
    assert rc == 2


def test_heatmap_csv_shape(bundle_dir):
    campaign = load_campaign(str(bundle_dir))
    csv_text = render_heatmap_csv(campaign)
    rows = csv_text.strip().splitlines()
    assert rows[0].startswith("put,MP1,MP2,MP3,MP4,MP5")
    assert len(rows) == 13


def test_power_command_is_deterministic(bundle_dir):
    first = (bundle_dir / "power_report.json")
    assert main(["power", "--in", str(bundle_dir), "--mode", "plugin",
                 "--nsim", "300"]) == 0
    ref = first.read_bytes()
    assert main(["power", "--in", str(bundle_dir), "--mode", "plugin",
                 "--nsim", "300"]) == 0
    assert first.read_bytes() == ref


def test_degenerate_check_mismatch_exit_code(monkeypatch, tmp_path):
    # a corrupted score computation must surface as the mismatch exit code
    import semscore.degeneration as degeneration

    real = degeneration.classic_ms

    def corrupted(put, mutants, k_eq, seed):
        ms, killed, equiv, states = real(put, mutants, k_eq, seed)
        return ms * 0.5, killed, equiv, states

    monkeypatch.setattr(degeneration, "classic_ms", corrupted)
    rc = main(["degenerate-check", "--seed", "1", "--keq", "10000"])
    assert rc == 4
