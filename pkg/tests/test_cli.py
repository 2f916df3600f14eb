import json
import shutil
from pathlib import Path

import pytest

from twomatrix.cli import main

CORPUS = Path(__file__).parent / "corpus"


def _copy(tmp_path, *names):
    for n in names:
        for suffix in (".job.json", ".expected.json"):
            shutil.copy(CORPUS / (n + suffix), tmp_path / (n + suffix))
    return tmp_path


def test_corpus_passes(capsys):
    assert main(["--corpus", str(CORPUS)]) == 0
    out = capsys.readouterr().out
    assert "0 failed" in out


def test_perturbed_golden_fails_exactly_one_job(tmp_path, capsys):
    d = _copy(tmp_path, "gue-planar", "inline-curve")
    g = d / "inline-curve.expected.json"
    doc = json.loads(g.read_text())
    doc["results"][0]["result"]["poles"][0]["coeff"] = "12345/1"
    g.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    assert main(["--corpus", str(d)]) == 1
    lines = capsys.readouterr().out.splitlines()
    assert [ln.split()[0] for ln in lines if " fail " in ln] == ["inline-curve"]
    assert any(ln.startswith("gue-planar") and " pass " in ln for ln in lines)


def test_empty_corpus(tmp_path, capsys):
    assert main(["--corpus", str(tmp_path)]) == 0
    assert "0 jobs" in capsys.readouterr().out


def test_missing_golden_is_reported_not_failed(tmp_path, capsys):
    shutil.copy(CORPUS / "gue-planar.job.json", tmp_path)
    assert main(["--corpus", str(tmp_path)]) == 0
    assert "missing-golden" in capsys.readouterr().out


def test_malformed_curve_exits_2_naming_the_field(tmp_path, capsys):
    job = tmp_path / "bad.job.json"
    job.write_text(json.dumps({"curve": {"x": {"num": [1, 2], "den": ["1"]}, "y": {"num": ["0", "1"], "den": ["1"]}},
                               "requests": [{"type": "w", "h": 0, "k": 3}]}))
    assert main(["--job", str(job)]) == 2
    assert "curve.x" in capsys.readouterr().err


def test_unknown_catalog_curve_exits_2(tmp_path, capsys):
    job = tmp_path / "bad.job.json"
    job.write_text(json.dumps({"curve": "no-such-curve", "requests": []}))
    assert main(["--job", str(job)]) == 2
    assert "curve" in capsys.readouterr().err


def test_usage_error_exits_2():
    assert main(["--job", "a", "--corpus", "b"]) == 2
    assert main([]) == 2


def test_verify_job_and_determinism(tmp_path):
    job = tmp_path / "v.job.json"
    job.write_text(json.dumps({"curve": "cubic-quadratic",
                               "requests": [{"type": "verify", "checks": ["free1", "hx_b"], "h": 2},
                                            {"type": "w", "h": 1, "k": 2}]}))
    outs = []
    for i in range(2):
        out = tmp_path / f"out{i}.json"
        assert main(["--job", str(job), "--emit", str(out)]) == 0
        outs.append(out.read_text())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert all(c["result"] == "pass" for r in doc["results"] if r["request"]["type"] == "verify"
               for c in r["result"]["checks"])


@pytest.mark.parametrize("backend", ["float"])
def test_backend_override(tmp_path, backend):
    job = tmp_path / "v.job.json"
    job.write_text(json.dumps({"curve": "cubic-quadratic",
                               "requests": [{"type": "w", "h": 0, "k": 3, "points": ["2", "3", "5"]}]}))
    out = tmp_path / "o.json"
    assert main(["--job", str(job), "--backend", backend, "--precision", "128", "--emit", str(out)]) == 0
    assert json.loads(out.read_text())["backend"].startswith("float")
