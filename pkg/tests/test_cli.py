from __future__ import annotations

import csv
import io
import json

from padbench.cli import main


def test_cases_command(capsys):
    assert main(["cases"]) == 0
    out = capsys.readouterr().out
    assert "Case-1: train {photo_paper, playdoh, woodglue} -> test ecoflex" in out
    assert "Case-4" in out


def test_cases_json(capsys):
    assert main(["cases", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["cases"]) == 4


def test_summarize(capsys, toy_run_env):
    manifest_path, _ = toy_run_env
    assert main(["summarize", "--manifest", str(manifest_path)]) == 0
    out = capsys.readouterr().out
    assert "bona_fide    8" in out
    assert "ecoflex      2" in out


def test_summarize_missing_file(capsys):
    assert main(["summarize", "--manifest", "no/such/file.csv"]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_summarize_invalid_manifest(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("sample_id,image_path,label,species,device\nx,a,attack,gelatin,d\n")
    assert main(["summarize", "--manifest", str(bad)]) == 2
    assert "gelatin" in capsys.readouterr().err


def _run_args(manifest_path, emb_dir, out_dir, extra=()):
    return [
        "run",
        "--manifest", str(manifest_path),
        "--embeddings-dir", str(emb_dir),
        "--backbones", "nasnet",
        "--svm-max-iter", "150",
        "--out-dir", str(out_dir),
        *extra,
    ]


def test_run_and_report_and_metrics(capsys, toy_run_env, tmp_path):
    manifest_path, emb_dir = toy_run_env
    out_dir = tmp_path / "cli_out"
    assert main(_run_args(manifest_path, emb_dir, out_dir)) == 0
    out = capsys.readouterr().out
    assert "NasNet" in out
    assert f"outputs written to {out_dir}" in out
    assert (out_dir / "report.json").is_file()

    assert main(["report", "--run-dir", str(out_dir)]) == 0
    assert "Average D-EER" in capsys.readouterr().out

    assert main(["metrics", "--run-dir", str(out_dir)]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4
    assert rows[0]["backbone"] == "nasnet"

    # metrics recomputation agrees with the stored summary
    summary = {
        (r["backbone"], r["case"]): r
        for r in csv.DictReader(io.StringIO((out_dir / "summary.csv").read_text()))
    }
    for row in rows:
        stored = summary[(row["backbone"], row["case"])]
        assert float(row["d_eer"]) == float(stored["d_eer"])
        assert float(row["bpcer_at_5"]) == float(stored["bpcer_at_5"])
        assert float(row["bpcer_at_10"]) == float(stored["bpcer_at_10"])


def test_run_twice_is_byte_identical(capsys, toy_run_env, tmp_path):
    manifest_path, emb_dir = toy_run_env
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(_run_args(manifest_path, emb_dir, out_a)) == 0
    assert main(_run_args(manifest_path, emb_dir, out_b)) == 0
    capsys.readouterr()
    for name in ("report.json", "summary.csv", "boxplot.csv", "table.txt"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    assert (
        (out_a / "nasnet" / "case1" / "scores.csv").read_bytes()
        == (out_b / "nasnet" / "case1" / "scores.csv").read_bytes()
    )


def test_run_unknown_backbone(capsys, toy_run_env, tmp_path):
    manifest_path, emb_dir = toy_run_env
    rc = main([
        "run", "--manifest", str(manifest_path), "--embeddings-dir", str(emb_dir),
        "--backbones", "resnet51", "--out-dir", str(tmp_path / "x"),
    ])
    assert rc == 2
    assert "resnet51" in capsys.readouterr().err


def test_run_missing_embedding_file(capsys, toy_run_env, tmp_path):
    manifest_path, emb_dir = toy_run_env
    rc = main([
        "run", "--manifest", str(manifest_path), "--embeddings-dir", str(emb_dir),
        "--backbones", "alexnet", "--out-dir", str(tmp_path / "x"),
    ])
    assert rc == 2
    assert "alexnet" in capsys.readouterr().err


def test_metrics_single_scores_file(capsys, toy_run_env, tmp_path):
    manifest_path, emb_dir = toy_run_env
    out_dir = tmp_path / "one"
    assert main(_run_args(manifest_path, emb_dir, out_dir)) == 0
    capsys.readouterr()
    scores = out_dir / "nasnet" / "case2" / "scores.csv"
    assert main(["metrics", "--scores", str(scores), "--targets", "5,10,20"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 1
    assert set(rows[0]) == {"backbone", "case", "d_eer", "bpcer_at_5", "bpcer_at_10",
                            "bpcer_at_20"}


def test_metrics_bad_targets(capsys, tmp_path):
    assert main(["metrics", "--run-dir", str(tmp_path), "--targets", "abc"]) == 2


def test_metrics_empty_run_dir(capsys, tmp_path):
    assert main(["metrics", "--run-dir", str(tmp_path)]) == 2
    assert "scores.csv" in capsys.readouterr().err


def test_report_malformed_json(capsys, tmp_path):
    bad = tmp_path / "report.json"
    bad.write_text("{not json")
    assert main(["report", "--report", str(bad)]) == 2


def test_server_error_maps_to_exit_three(capsys, toy_run_env, tmp_path, monkeypatch):
    import importlib

    service_app = importlib.import_module("padbench.service.app")

    def boom(*args, **kwargs):
        raise RuntimeError("backend exploded")

    monkeypatch.setattr(service_app, "run_benchmark", boom)
    manifest_path, emb_dir = toy_run_env
    rc = main(_run_args(manifest_path, emb_dir, tmp_path / "x"))
    assert rc == 3


def test_unreachable_server_maps_to_exit_three(capsys):
    rc = main(["--server", "http://127.0.0.1:1", "cases"])
    assert rc == 3
    assert "cannot reach server" in capsys.readouterr().err
