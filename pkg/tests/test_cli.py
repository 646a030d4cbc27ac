from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from app.core.signature import builtin_signature
from app.core.textio import format_signature
from app.main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main

ROOT = Path(__file__).resolve().parents[1]


def _run(capsys, *argv: str) -> tuple[int, dict]:
    code = main([*argv, "--format", "structured"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else {}


def test_validate_files_and_builtins(capsys, data_dir):
    code, out = _run(capsys, "validate", str(data_dir / "walking_arrow.dbl"), str(data_dir / "one_loop.psh"), "--builtin", "SqI")
    assert code == EXIT_OK
    assert out["verdicts"]["builtin:SqI"]["format"] == "dblcat"
    assert out["verdicts"][str(data_dir / "one_loop.psh")]["details"]["l_structure"] is True


def test_validate_reports_broken_laws(capsys, data_dir):
    code, out = _run(capsys, "validate", str(data_dir / "broken_unit.dbl"))
    assert code == EXIT_FAILED
    assert out["ok"] is False
    assert out["witnesses"]


def test_missing_inputs_is_a_usage_error(capsys):
    assert main(["validate"]) == EXIT_USAGE


def test_unknown_builtin_is_a_usage_error(capsys):
    assert main(["classify", "--builtin", "nope->1"]) == EXIT_USAGE


def test_negative_seed_is_a_usage_error(capsys):
    assert main(["invariance", "--builtin", "SqI->1", "--seed", "-1"]) == EXIT_USAGE


def test_bad_output_format_exits_through_argparse():
    with pytest.raises(SystemExit) as exc:
        main(["validate", "--builtin", "H2", "--format", "yaml"])
    assert exc.value.code == 2


def test_eval_formula_file(capsys, data_dir):
    code, out = _run(
        capsys, "eval", str(data_dir / "one_loop.psh"), "--formula-file", str(data_dir / "loops.fml")
    )
    assert code == EXIT_OK
    assert out["verdicts"]["satisfied"] is True


def test_eval_with_assignment(capsys, data_dir):
    code, out = _run(
        capsys,
        "eval",
        str(data_dir / "one_loop.psh"),
        "--formula",
        "x:O, a:A(x,x) |- I(a)",
        "--assign",
        "x=x",
        "--assign",
        "a=m",
    )
    assert code == EXIT_OK
    assert out["verdicts"]["satisfied"] is False
    assert out["verdicts"]["context"] == ["x:O", "a:A"]


def test_eval_through_a_nerve(capsys):
    code, out = _run(capsys, "eval", "--builtin", "H2", "--diagram", "cat", "--formula", "forall x:O. exists f:A(x,x). I'(f)")
    assert code == EXIT_OK
    assert out["verdicts"]["satisfied"] is True


def test_eval_rejects_ill_formed_formula(capsys, data_dir):
    assert main(["eval", str(data_dir / "one_loop.psh"), "--formula", "forall x:O. forall x:O. true"]) == EXIT_USAGE


def test_nerve_writes_a_presheaf(capsys, tmp_path):
    target = tmp_path / "h2.psh"
    code, out = _run(capsys, "nerve", "--builtin", "H2", "--diagram", "cat", "--out", str(target))
    assert code == EXIT_OK
    assert out["verdicts"]["builtin:H2"]["carrier_sizes"] == {"O": 2, "A": 3, "I'": 2, "T'": 4, "E'": 3}
    assert target.exists()
    code, _ = _run(capsys, "validate", str(target))
    assert code == EXIT_OK


def test_nerve_latching_table(capsys):
    code, out = _run(capsys, "nerve", "--builtin", "H2", "--builtin", "V2", "--latching")
    assert code == EXIT_OK
    assert out["verdicts"]["latching_table"]["ok"] is True


def test_classify_table(capsys):
    code, out = _run(capsys, "classify", "--builtin", "V2->1", "--with-lifting")
    assert code == EXIT_OK
    verdicts = out["verdicts"]["builtin:V2->1"]["verdicts"]
    assert verdicts["trivial_fibration"]["failing"] == "full_horizontal"
    assert verdicts["naive_fibration"] is False
    assert verdicts["f2"]["ok"] is False
    assert verdicts["rlp_I"]["i_hpoints"]["ok"] is False


def test_lift_against_generating_cofibrations(capsys):
    code, out = _run(capsys, "lift", "--builtin", "V2->1")
    assert code == EXIT_FAILED
    assert any(w["inclusion"] == "i_hpoints" for w in out["witnesses"])
    code, _ = _run(capsys, "lift", "--builtin", "SqI->1", "--against", "I")
    assert code == EXIT_OK


def test_invariance_along_a_span_file(capsys, data_dir):
    code, out = _run(capsys, "invariance", str(data_dir / "sqi_to_point.span"), "--count", "10", "--depth", "2")
    assert code == EXIT_OK
    assert out["verdicts"]["status"] == "agree"
    assert out["verdicts"]["sentences"] == 10
    assert sum(out["verdicts"]["depth_histogram"]) == 10


def test_invariance_needs_a_trivial_fibration(capsys):
    code, out = _run(capsys, "invariance", "--builtin", "V2->1", "--count", "5")
    assert code == EXIT_FAILED
    assert out["verdicts"]["status"] == "NotApplicable"


def test_persisted_defaults(capsys, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"count": 4, "depth": 1}), encoding="utf-8")
    code, out = _run(capsys, "invariance", "--builtin", "SqI->1", "--config", str(config))
    assert code == EXIT_OK
    assert out["config"]["count"] == 4
    assert out["verdicts"]["sentences"] == 4


def test_log_file(capsys, tmp_path):
    log = tmp_path / "run.log"
    assert main(["validate", "--builtin", "H2", "--log-file", str(log)]) == EXIT_OK
    assert "validate finished" in log.read_text(encoding="utf-8")


def test_text_output(capsys):
    assert main(["validate", "--builtin", "H2"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("doublefold ")


def test_verify_corpus_cli_smoke(tmp_path: Path):
    out = tmp_path / "verify.json"
    proc = subprocess.run(
        [
            sys.executable,
            str(ROOT / "tools" / "verify_corpus.py"),
            "--out",
            str(out),
            "--count",
            "5",
            "--depth",
            "2",
            "--mutations",
            "5",
        ],
        cwd=ROOT,
        check=False,
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "Wrote" in proc.stdout
    summary = json.loads(out.read_text(encoding="utf-8"))
    assert summary["ok"]
    failed = [name for name, sweep in summary["sweeps"].items() if not sweep["ok"]]
    assert failed == []
    assert set(summary["sweeps"]) >= {"trivial_fibrations", "equipments", "companion_lifting", "equipment_reduction", "nerve_lemma", "invariance"}
    assert summary["runtime"]["doublefold"]


def test_double_category_without_units_fails_validation(capsys, tmp_path):
    path = tmp_path / "no_units.dbl"
    path.write_text("name: X\nobjects: a b\nhmor: f: a -> b\n", encoding="utf-8")
    code, out = _run(capsys, "validate", str(path))
    assert code == EXIT_FAILED
    assert out["verdicts"][str(path)]["format"] == "dblcat"


def test_undecodable_input_is_a_usage_error(capsys, tmp_path):
    path = tmp_path / "garbage.dbl"
    path.write_bytes(b"\xff\xfe")
    assert main(["validate", str(path)]) == EXIT_USAGE
    assert "UTF-8" in capsys.readouterr().err


def test_validate_cross_checks_signature_relations(capsys, tmp_path):
    path = tmp_path / "dblcat.sig"
    path.write_text(format_signature(builtin_signature("dblcat")) + "  S: u . s = r . s\n", encoding="utf-8")
    code, out = _run(capsys, "validate", str(path))
    assert code == EXIT_FAILED
    assert [w["code"] for w in out["witnesses"]] == ["RelationViolated"]
    code, out = _run(capsys, "validate", "--builtin", "dblcat")
    assert code == EXIT_OK
    assert out["verdicts"]["builtin:dblcat"]["details"]["diagram"] == "dblcat"
