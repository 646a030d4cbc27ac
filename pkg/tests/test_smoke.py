"""Basic smoke test to ensure the package imports cleanly."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def test_import_main():
    import app.main as app_main

    assert app_main.COMMANDS.keys() == {"validate", "eval", "nerve", "classify", "lift", "invariance"}


def test_run_script_prints_version():
    proc = subprocess.run(
        [sys.executable, str(ROOT / "run.py"), "--version"],
        capture_output=True,
        text=True,
        cwd=ROOT,
        timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip().startswith("doublefold ")
