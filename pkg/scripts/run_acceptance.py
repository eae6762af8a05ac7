"""Run the acceptance suite and print one pass/fail line per criterion."""

import subprocess
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pytest", "tests/test_acceptance.py", "-q", "-rN"],
                          cwd=ROOT, capture_output=True, text=True)
    lines = proc.stdout.splitlines()
    verdicts = [ln for ln in lines if ln.startswith("[PASS]") or ln.startswith("[FAIL]")]
    print("\n".join(verdicts) if verdicts else proc.stdout)
    print(f"elapsed {time.perf_counter() - start:.1f} s; pytest exit code {proc.returncode}")
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
