"""End-to-end CLI behaviour: exit codes, output shapes, determinism."""

from __future__ import annotations

import json

import pytest

from fenrank.cli import EXIT_DATA, EXIT_GUARD, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from fenrank.store import Label, Store
from fenrank.synth import SynthConfig, install_stores

from .conftest import FEN_A, FEN_B, synth_fens

RELAXED_CONFIG = """
# scoring configuration for small test stores
first_size_min = 2
first_size_max = 4
increment_min = 0
increment_max = 1
size_cap = 5
cycles = 2
alpha = 0.05
"""

SYNTH = SynthConfig(liked_size=16, disliked_size=20, candidates_per_side=4, seed=5)


@pytest.fixture
def populated(tmp_path):
    """A store pair plus a candidates file and a relaxed config file."""
    root = tmp_path / "store"
    result = install_stores(Store(root), SYNTH)
    candidates = tmp_path / "candidates.fen"
    fens = [f.text for f in result.liked_candidates + result.disliked_candidates]
    candidates.write_text("\n".join(fens) + "\n", encoding="utf-8")
    config = tmp_path / "relaxed.cfg"
    config.write_text(RELAXED_CONFIG, encoding="utf-8")
    return root, candidates, config


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestIngest:
    def test_ingest_reports_counts(self, tmp_path, capsys):
        pgn = tmp_path / "in.pgn"
        pgn.write_text(
            f'[Date "2021.03.05"]\n[SetUp "1"]\n[FEN "{FEN_A}"]\n\n*\n\n'
            f'[Date "2021.03.06"]\n[SetUp "1"]\n[FEN "{FEN_B}"]\n\n*\n',
            encoding="utf-8",
        )
        root = tmp_path / "store"
        code, out, err = run(
            capsys, ["--store", str(root), "ingest", str(pgn), "--label", "liked"]
        )
        assert code == EXIT_OK
        assert "2 ingested, 0 skipped" in out
        assert "liked database now holds 2 records" in out
        assert err == ""

    def test_ingest_missing_file(self, tmp_path, capsys):
        code, _, err = run(
            capsys,
            ["--store", str(tmp_path), "ingest", str(tmp_path / "no.pgn"), "--label", "liked"],
        )
        assert code == EXIT_IO
        assert "error" in err

    def test_ingest_unusable_file(self, tmp_path, capsys):
        pgn = tmp_path / "bad.pgn"
        pgn.write_text('[Date "2021.03.05"]\n\n*\n', encoding="utf-8")
        code, _, err = run(
            capsys, ["--store", str(tmp_path / "s"), "ingest", str(pgn), "--label", "liked"]
        )
        assert code == EXIT_DATA


class TestRank:
    def test_csv_shape(self, populated, capsys):
        root, candidates, config = populated
        code, out, err = run(
            capsys,
            [
                "--store", str(root),
                "rank", str(candidates),
                "--seed", "7",
                "--workers", "1",
                "--config", str(config),
            ],
        )
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "rank,fen,rp1,rp2,arp"
        assert len(lines) == 9
        first = lines[1].split(",")
        assert first[0] == "1"
        assert first[1].startswith('"') and first[1].endswith('"')
        for cell in first[2:]:
            assert len(cell.split(".")[1]) == 2  # two decimals

    def test_arp_sorted_descending(self, populated, capsys):
        root, candidates, config = populated
        _, out, _ = run(
            capsys,
            ["--store", str(root), "rank", str(candidates), "--seed", "7",
             "--workers", "1", "--config", str(config)],
        )
        arps = [float(line.rsplit(",", 1)[1]) for line in out.strip().splitlines()[1:]]
        assert arps == sorted(arps, reverse=True)

    def test_output_reproducible_across_runs_and_workers(self, populated, capsys):
        root, candidates, config = populated
        base = ["--store", str(root), "rank", str(candidates), "--seed", "11",
                "--config", str(config)]
        _, first, _ = run(capsys, base + ["--workers", "1"])
        _, second, _ = run(capsys, base + ["--workers", "1"])
        _, parallel, _ = run(capsys, base + ["--workers", "2"])
        assert first == second
        assert first == parallel

    def test_json_format(self, populated, capsys):
        root, candidates, config = populated
        code, out, _ = run(
            capsys,
            ["--store", str(root), "rank", str(candidates), "--seed", "3",
             "--workers", "1", "--config", str(config), "--format", "json"],
        )
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["seed"] == 3
        assert len(payload["results"]) == 8
        first = payload["results"][0]
        assert set(first) == {"rank", "fen", "arp", "cycles"}
        assert all(set(c) == {"size", "pos", "neg", "rp", "neutral"} for c in first["cycles"])

    def test_guard_exit_on_small_store_with_default_config(self, populated, capsys):
        root, candidates, _ = populated
        code, _, err = run(
            capsys, ["--store", str(root), "rank", str(candidates), "--workers", "1"]
        )
        assert code == EXIT_GUARD
        assert "need at least" in err

    def test_bad_candidate_file(self, populated, tmp_path, capsys):
        root, _, config = populated
        bad = tmp_path / "bad.fen"
        bad.write_text("this is not a fen\n", encoding="utf-8")
        code, _, err = run(
            capsys,
            ["--store", str(root), "rank", str(bad), "--workers", "1", "--config", str(config)],
        )
        assert code == EXIT_DATA

    def test_empty_candidate_file(self, populated, tmp_path, capsys):
        root, _, config = populated
        empty = tmp_path / "empty.fen"
        empty.write_text("# nothing here\n", encoding="utf-8")
        code, _, _ = run(
            capsys,
            ["--store", str(root), "rank", str(empty), "--workers", "1", "--config", str(config)],
        )
        assert code == EXIT_DATA

    def test_missing_candidate_file(self, populated, capsys):
        root, _, config = populated
        code, _, _ = run(
            capsys,
            ["--store", str(root), "rank", "nope.fen", "--workers", "1", "--config", str(config)],
        )
        assert code == EXIT_IO

    def test_pgn_candidates_accepted(self, populated, tmp_path, capsys):
        root, _, config = populated
        texts = synth_fens(777, 2)
        pgn = tmp_path / "cand.pgn"
        pgn.write_text(
            f'[Date "2021.04.01"]\n[SetUp "1"]\n[FEN "{texts[0]}"]\n\n*\n\n'
            f'[Date "2021.04.02"]\n[SetUp "1"]\n[FEN "{texts[1]}"]\n\n*\n',
            encoding="utf-8",
        )
        code, out, _ = run(
            capsys,
            ["--store", str(root), "rank", str(pgn), "--seed", "1",
             "--workers", "1", "--config", str(config)],
        )
        assert code == EXIT_OK
        assert len(out.strip().splitlines()) == 3


class TestEvaluate:
    def test_fixture_text_mode(self, capsys):
        code, out, _ = run(capsys, ["evaluate", "--fixture"])
        assert code == EXIT_OK
        for label in ("A", "B", "C"):
            assert f"target vs {label}:" in out
        assert "mean top-half fraction" in out

    def test_fixture_json_mode(self, capsys):
        code, out, _ = run(capsys, ["evaluate", "--fixture", "--format", "json"])
        assert code == EXIT_OK
        payload = json.loads(out)
        assert len(payload["target"]["arps"]) == 20
        assert [g["label"] for g in payload["groups"]] == ["A", "B", "C"]

    def test_protocol_mode_with_out_file(self, populated, tmp_path, capsys):
        root, _, config = populated
        out_path = tmp_path / "report.json"
        code, out, _ = run(
            capsys,
            ["--store", str(root), "evaluate", "--holdout", "3", "--baseline", "6",
             "--groups", "2", "--seed", "2", "--workers", "1",
             "--config", str(config), "--out", str(out_path)],
        )
        assert code == EXIT_OK
        assert "target vs A:" in out
        written = json.loads(out_path.read_text(encoding="utf-8"))
        assert len(written["target"]["arps"]) == 3
        assert len(written["groups"]) == 2
        assert "scores" in written["groups"][0]

    def test_protocol_guard(self, populated, capsys):
        root, _, config = populated
        # more baseline records than the post-cutoff pool can provide
        code, _, err = run(
            capsys,
            ["--store", str(root), "evaluate", "--holdout", "3", "--baseline", "60",
             "--groups", "3", "--workers", "1", "--config", str(config)],
        )
        assert code == EXIT_GUARD


class TestStats:
    def test_stats_ok(self, populated, capsys):
        root, _, _ = populated
        code, out, _ = run(capsys, ["--store", str(root), "stats", "--db", "liked"])
        assert code == EXIT_OK
        assert "liked: 16 records" in out
        assert "quantization: OK" in out
        assert "ordinal\ttimestamp\tcv" in out

    def test_stats_missing_store(self, tmp_path, capsys):
        code, _, err = run(capsys, ["--store", str(tmp_path), "stats", "--db", "liked"])
        assert code == EXIT_IO


class TestUsage:
    def test_unknown_subcommand(self, capsys):
        code, _, _ = run(capsys, ["frobnicate"])
        assert code == EXIT_USAGE

    def test_no_subcommand(self, capsys):
        code, _, _ = run(capsys, [])
        assert code == EXIT_USAGE

    def test_bad_worker_count(self, populated, capsys):
        root, candidates, config = populated
        code, _, _ = run(
            capsys,
            ["--store", str(root), "rank", str(candidates), "--workers", "0",
             "--config", str(config)],
        )
        assert code == EXIT_USAGE

    def test_bad_config_key(self, populated, tmp_path, capsys):
        root, candidates, _ = populated
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("no_such_setting = 5\n", encoding="utf-8")
        code, _, err = run(
            capsys,
            ["--store", str(root), "rank", str(candidates), "--workers", "1",
             "--config", str(cfg)],
        )
        assert code == EXIT_USAGE
        assert "unknown setting" in err

    def test_bad_config_value(self, populated, tmp_path, capsys):
        root, candidates, _ = populated
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("cycles = many\n", encoding="utf-8")
        code, _, _ = run(
            capsys,
            ["--store", str(root), "rank", str(candidates), "--workers", "1",
             "--config", str(cfg)],
        )
        assert code == EXIT_USAGE

    def test_inconsistent_config_rejected(self, populated, tmp_path, capsys):
        root, candidates, _ = populated
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("first_size_min = 50\nfirst_size_max = 40\n", encoding="utf-8")
        code, _, err = run(
            capsys,
            ["--store", str(root), "rank", str(candidates), "--workers", "1",
             "--config", str(cfg)],
        )
        assert code == EXIT_USAGE
        assert "bad configuration" in err


class TestStoreEnv:
    def test_env_fallback(self, populated, capsys, monkeypatch):
        root, _, _ = populated
        monkeypatch.setenv("FENRANK_STORE", str(root))
        code, out, _ = run(capsys, ["stats", "--db", "disliked"])
        assert code == EXIT_OK
        assert "disliked: 20 records" in out
