"""Hecke eigenvalues of classical newforms and the lift eigenvalue formulas.

Fixture files are JSON documents with keys label, level, weight, ap,
optional ap_mod = {"ell", "values"}, al_signs and source.  Primes are JSON
object keys, so they are strings on disk and ints after loading.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import InvalidInput, NotFound
from .forms import is_prime


class FixtureMissing(NotFound):
    pass


class FixtureSchemaError(InvalidInput):
    pass


class RamanujanViolation(InvalidInput):
    pass


_REQUIRED = ("label", "level", "weight", "ap", "al_signs", "source")
_ALLOWED = set(_REQUIRED) | {"ap_mod"}


@dataclass(frozen=True)
class NewformFixture:
    label: str
    level: int
    weight: int
    ap: dict[int, int]
    al_signs: dict[int, int]
    source: str
    ap_mod: tuple[int, dict[int, int]] | None = None

    def residue(self, p: int, ell: int) -> int:
        """a_p mod ell, from the exact value or the stored residue."""
        if p in self.ap:
            return self.ap[p] % ell
        if self.ap_mod and self.ap_mod[0] == ell and p in self.ap_mod[1]:
            return self.ap_mod[1][p]
        raise NotFound(f"{self.label}: no a_{p} mod {ell}")


def _prime_map(doc, what: str) -> dict[int, int]:
    if not isinstance(doc, dict):
        raise FixtureSchemaError(f"{what} must be an object")
    out = {}
    for k, v in doc.items():
        try:
            p, x = int(k), int(v)
        except (TypeError, ValueError):
            raise FixtureSchemaError(f"{what}: bad entry {k!r}: {v!r}") from None
        if not is_prime(p):
            raise FixtureSchemaError(f"{what}: {p} is not prime")
        out[p] = x
    return out


def parse_fixture(doc: dict) -> NewformFixture:
    if not isinstance(doc, dict):
        raise FixtureSchemaError("fixture must be a JSON object")
    missing = [k for k in _REQUIRED if k not in doc]
    unknown = sorted(set(doc) - _ALLOWED)
    if missing or unknown:
        raise FixtureSchemaError(f"missing keys {missing}, unknown keys {unknown}")
    level, weight = doc["level"], doc["weight"]
    if not (isinstance(level, int) and level > 0 and isinstance(weight, int) and weight >= 2):
        raise FixtureSchemaError("level and weight must be positive integers (weight >= 2)")
    ap = _prime_map(doc["ap"], "ap")
    signs = _prime_map(doc["al_signs"], "al_signs")
    for q, s in signs.items():
        if level % q or s not in (1, -1):
            raise FixtureSchemaError(f"al_signs: bad sign {s} at {q}")
    ap_mod = None
    if "ap_mod" in doc:
        m = doc["ap_mod"]
        if not isinstance(m, dict) or set(m) != {"ell", "values"} or not is_prime(int(m["ell"])):
            raise FixtureSchemaError("ap_mod must be {ell: prime, values: {...}}")
        ell = int(m["ell"])
        ap_mod = (ell, {p: x % ell for p, x in _prime_map(m["values"], "ap_mod").items()})
    for p, a in ap.items():
        if level % p == 0:
            continue
        # |a_p| <= 2 p^((k-1)/2), compared after squaring
        if a * a > 4 * p ** (weight - 1):
            raise RamanujanViolation(f"{doc['label']}: a_{p} = {a} breaks the Ramanujan bound")
    return NewformFixture(str(doc["label"]), level, weight, ap, signs, str(doc["source"]), ap_mod)


def load_fixture(path) -> NewformFixture:
    """Load a fixture from a path, or by label from the bundled data."""
    p = Path(path)
    if not p.exists() and "/" not in str(path):
        bundled = resources.files("quinary") / "data" / "fixtures" / f"{path}.json"
        if bundled.is_file():
            return parse_fixture(json.loads(bundled.read_text()))
    if not p.is_file():
        raise FixtureMissing(f"no fixture at {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise FixtureSchemaError(f"{path}: {e}") from None
    return parse_fixture(doc)


def bundled_labels() -> list[str]:
    root = resources.files("quinary") / "data" / "fixtures"
    return sorted(f.name[:-5] for f in root.iterdir() if f.name.endswith(".json"))


def sk_eigenvalue(p: int, ap: int, k: int, j: int = 0) -> int:
    """T(p) eigenvalue a_p + p^(k-2) + p^(j+k-1) of the shape seen in lift congruences."""
    return ap + p ** (k - 2) + p ** (j + k - 1)


def yoshida_eigenvalue(p: int, ap_g: int, ap_h: int, b: int) -> int:
    """T(p) eigenvalue a_p(h) + p^(b+1) a_p(g) of a Yoshida lift.

    g has weight 2 + a - b and h has weight 4 + a + b.
    """
    return ap_h + p ** (b + 1) * ap_g


def eisenstein_congruent(fix: NewformFixture, ell: int) -> bool:
    """a_p = 1 + p^(k-1) mod ell at every stored prime p not dividing level * ell."""
    return all((a - 1 - p ** (fix.weight - 1)) % ell == 0
               for p, a in fix.ap.items() if fix.level % p and p != ell)
