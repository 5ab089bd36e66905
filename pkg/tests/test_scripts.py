import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


@pytest.mark.parametrize("name,needle", [("run_d61.py", "verdict mod 43: collinear"),
                                         ("run_d89.py", "verdict mod 29: collinear")])
def test_script_runs(name, needle):
    r = subprocess.run([sys.executable, str(SCRIPTS / name)], capture_output=True, text=True, timeout=600)
    assert r.returncode == 0, r.stderr
    assert needle in r.stdout
