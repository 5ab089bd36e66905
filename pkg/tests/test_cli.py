import json
import subprocess
import sys

import pytest

from quinary.cli import RunConfig, main, run_command
from quinary.errors import InvalidInput

EXPECTED_CHARPOLY = "x^8 - 37*x^7 + 449*x^6 - 1245*x^5 - 15627*x^4 + 138997*x^3 - 425789*x^2 + 530317*x - 212730"


def run(cache, command, **params):
    code, text = run_command(RunConfig(command, params, str(cache)))
    return code, text


@pytest.fixture(scope="module")
def cache(tmp_path_factory):
    return tmp_path_factory.mktemp("cache")


def test_seed(cache):
    code, text = run(cache, "seed", dminus=61)
    assert code == 0
    doc = json.loads(text)
    assert doc["det"] == 122
    assert doc["hasse_witt"]["61"] == -1


def test_no_genus(cache):
    code, text = run(cache, "seed", dminus=1, dplus=7)
    assert code == 3
    assert json.loads(text)["error"] == "NoGenus"


def test_invalid(cache):
    assert run(cache, "seed")[0] == 2
    assert run(cache, "space", dminus=61, weight="1,0")[0] == 2
    with pytest.raises(InvalidInput):
        RunConfig("seed", {"colour": 1})
    with pytest.raises(InvalidInput):
        RunConfig("launch")
    with pytest.raises(InvalidInput):
        RunConfig.from_json({"command": "seed", "extra": 1})


def test_genus_and_space(cache):
    code, text = run(cache, "genus", dminus=61)
    assert code == 0 and json.loads(text)["classes"] == 8
    code, text = run(cache, "space", dminus=61, weight="1,1", char=61)
    assert code == 0 and json.loads(text)["dim"] == 16


def test_hecke_charpoly(cache):
    code, text = run(cache, "hecke", dminus=61, p=2)
    assert code == 0
    path = json.loads(text)["file"]
    code, text = run(cache, "charpoly", op=path,
                     factors="x-15,x+7,x^6-29*x^5+322*x^4-1714*x^3+4471*x^2-5205*x+2026")
    doc = json.loads(text)
    assert code == 0
    assert doc["charpoly"] == EXPECTED_CHARPOLY
    assert doc["factors_verified"] and doc["rational_roots"] == [-7, 15]


def test_congruence(cache):
    path = json.loads(run(cache, "hecke", dminus=61, p=2)[1])["file"]
    path3 = json.loads(run(cache, "hecke", dminus=61, p=3)[1])["file"]
    code, text = run(cache, "congruence", ell=43, op=[path], blocks="x+7,deg6")
    doc = json.loads(text)
    assert code == 0 and doc["verdict"] == "collinear"
    assert doc["adic_roots"][0] == "-7"
    code, text = run(cache, "congruence", ell=43, op=[path, path3], blocks="x+7,deg6")
    assert json.loads(text)["verdict"] == "collinear"


def test_warm_rerun_identical(cache):
    first = [run(cache, c, dminus=61, p=3) for c in ("hecke", "charpoly")]
    second = [run(cache, c, dminus=61, p=3) for c in ("hecke", "charpoly")]
    assert first == second


def test_corrupted_operator(cache):
    path = json.loads(run(cache, "hecke", dminus=61, p=5)[1])["file"]
    with open(path) as fh:
        doc = json.load(fh)
    doc["matrix"][0][0] += 1
    with open(path, "w") as fh:
        json.dump(doc, fh)
    assert run(cache, "hecke", dminus=61, p=5)[0] == 4
    assert run(cache, "charpoly", op=path)[0] == 4


def test_corrupted_genus(tmp_path):
    assert run(tmp_path, "genus", dminus=5)[0] == 0
    (g,) = (tmp_path / "genera").iterdir()
    doc = json.loads(g.read_text())
    doc["classes"][0][4][4] += 2
    g.write_text(json.dumps(doc))
    assert run(tmp_path, "genus", dminus=5)[0] == 4


def test_dims_csv(cache):
    code, text = run_command(RunConfig("dims", {"max_a": 2}, str(cache), format="csv"))
    assert code == 0
    assert text.splitlines() == ["a,b,dim", "0,0,1", "1,1,5", "2,0,10", "2,2,14"]


def test_main_and_entry_point(cache, tmp_path, capsys):
    out = tmp_path / "d.json"
    assert main(["--cache-dir", str(cache), "-o", str(out), "--threads", "4", "dims", "--weight", "4,0"]) == 0
    assert json.loads(out.read_text())["dims"] == [{"a": 4, "b": 0, "dim": 35}]
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(RunConfig("seed", {"dminus": 1, "dplus": 7}, str(cache)).to_json()))
    assert main(["--config", str(cfg)]) == 3
    r = subprocess.run([sys.executable, "-m", "quinary.cli", "--cache-dir", str(cache), "seed",
                        "--dminus", "61"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["det"] == 122
