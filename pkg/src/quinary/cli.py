"""Command-line entry point: seed, genus, space, hecke, charpoly, congruence, dims.

Every command is reproducible from its RunConfig.  Genera and Hecke
operators are cached as JSON under the cache directory ($QUINARY_CACHE, or
~/.cache/quinary), keyed by content hashes that include the format versions,
so a change to the math invalidates old files instead of reusing them.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import flint

from . import __version__
from .eigen import (adic_eigenvector, charpoly, congruence_report, format_poly,
                    operator_charpoly, padic_roots, parse_poly, verify_factor_product)
from .errors import Inconsistency, InvalidInput, QuinaryError
from .forms import (INFINITY, GenusDescriptor, QuinaryForm, eichler_invariant, hasse_witt,
                    prime_divisors, seed_search)
from .hecke import KINDS, HeckeOperator, build_space, hecke_matrix
from .neighbours import GenusData, default_prime, enumerate_genus, seed_hash
from .weights import WEIGHT_CAP, weight_dimension

COMMANDS = ("seed", "genus", "space", "hecke", "charpoly", "congruence", "dims")
OPERATOR_FORMAT_VERSION = 1
_FORMATS = ("json", "csv")


def default_cache_dir() -> Path:
    return Path(os.environ.get("QUINARY_CACHE", Path.home() / ".cache" / "quinary"))


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    cache_dir: str = ""
    output: str = "-"
    format: str = "json"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidInput(f"unknown command {self.command!r}")
        if self.format not in _FORMATS:
            raise InvalidInput(f"format must be one of {_FORMATS}")
        allowed = _PARAMETERS[self.command]
        unknown = sorted(set(self.parameters) - set(allowed))
        if unknown:
            raise InvalidInput(f"unknown parameters for {self.command}: {unknown}")
        self.parameters = {**allowed, **self.parameters}
        if not self.cache_dir:
            self.cache_dir = str(default_cache_dir())

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        unknown = sorted(set(doc) - {"command", "parameters", "cache_dir", "output", "format"})
        if unknown:
            raise InvalidInput(f"unknown config keys {unknown}")
        return cls(**doc)


_GENUS_ARGS = {"dminus": None, "dplus": 1, "bound": 16, "prime": None, "check_prime": None,
               "lattice": None}
_SPACE_ARGS = {**_GENUS_ARGS, "weight": "0,0", "char": 1}
_PARAMETERS = {
    "seed": {"dminus": None, "dplus": 1, "bound": 16},
    "genus": _GENUS_ARGS,
    "space": _SPACE_ARGS,
    "hecke": {**_SPACE_ARGS, "p": 2, "kind": "T"},
    "charpoly": {**_SPACE_ARGS, "p": 2, "kind": "T", "op": None, "factors": None},
    "congruence": {"ell": None, "op": [], "blocks": None, "residue": None, "precision": 12},
    "dims": {"weight": None, "max_a": WEIGHT_CAP},
}


# --- cache ---------------------------------------------------------------

def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def _write(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(doc, sort_keys=True) + "\n")
    tmp.replace(path)


def _read(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise Inconsistency(f"corrupt cache file {path}: {e}") from None


def _descriptor(params: dict) -> GenusDescriptor:
    if params.get("dminus") is None:
        raise InvalidInput("--dminus is required")
    return GenusDescriptor(int(params["dminus"]), int(params["dplus"]))


def get_seed(params: dict, cache: Path) -> QuinaryForm:
    if params.get("lattice"):
        return QuinaryForm.load(params["lattice"])
    desc = _descriptor(params)
    desc.check_parity()
    path = cache / "seeds" / f"seed-{desc.d_minus}-{desc.d_plus}.json"
    if path.exists():
        doc = _read(path)
        q = QuinaryForm.from_json(doc)
        if doc.get("digest") != _digest(q.matrix) or not desc.matches(q):
            raise Inconsistency(f"cached seed {path} does not match its descriptor")
        return q
    q = seed_search(desc, int(params["bound"]))
    _write(path, {**q.to_json(), "digest": _digest(q.matrix)})
    return q


def get_genus(params: dict, cache: Path) -> GenusData:
    seed = get_seed(params, cache)
    p = int(params["prime"]) if params.get("prime") else default_prime(seed)
    key = seed_hash(seed, p)
    path = cache / "genera" / f"genus-{key}.json"
    if path.exists():
        doc = _read(path)
        if doc.get("seed_hash") != key:
            raise Inconsistency(f"genus cache {path} has a mismatched hash")
        genus = GenusData.from_json(doc)
    else:
        genus = enumerate_genus(seed, p)
        _write(path, genus.to_json())
    if params.get("check_prime"):
        genus.verify_closed(int(params["check_prime"]))
    return genus


def _weight(text) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in str(text).split(","))
    except ValueError:
        raise InvalidInput(f"weight must look like a,b; got {text!r}") from None
    return a, b


def get_operator(params: dict, cache: Path) -> tuple[HeckeOperator, Path]:
    a, b = _weight(params["weight"])
    kind = params["kind"]
    if kind not in KINDS:
        raise InvalidInput(f"kind must be one of {KINDS}")
    genus = get_genus(params, cache)
    key = _digest({"genus": genus.cache_key(), "a": a, "b": b, "d": int(params["char"]),
                   "p": int(params["p"]), "kind": kind, "v": OPERATOR_FORMAT_VERSION})
    path = cache / "operators" / f"op-{key}.json"
    if path.exists():
        return load_operator(path), path
    space = build_space(genus, a, b, int(params["char"]))
    op = hecke_matrix(space, int(params["p"]), kind)
    _write(path, {**op.to_json(), "hash": op.content_hash()})
    return op, path


def load_operator(path) -> HeckeOperator:
    path = Path(path)
    if not path.is_file():
        raise InvalidInput(f"no operator file at {path}")
    doc = _read(path)
    stored = doc.pop("hash", None)
    op = HeckeOperator.from_json(doc)
    if stored is not None and stored != op.content_hash():
        raise Inconsistency(f"operator file {path} fails its hash check")
    return op


# --- commands ---------------------------------------------------------------

def _local_table(q: QuinaryForm) -> dict:
    places = [2] + [p for p in prime_divisors(q.D) if p != 2]
    hw = {str(p): hasse_witt(q, p) for p in places}
    hw["infinity"] = hasse_witt(q, INFINITY)
    return {"hasse_witt": hw,
            "eichler": {str(p): eichler_invariant(q, p) for p in prime_divisors(q.D)}}


def cmd_seed(cfg: RunConfig, cache: Path) -> dict:
    q = get_seed(cfg.parameters, cache)
    return {**q.to_json(), "det": q.det, "D": q.D, **_local_table(q),
            "coefficients": q.coefficients()}


def cmd_genus(cfg: RunConfig, cache: Path) -> dict:
    g = get_genus(cfg.parameters, cache)
    m = g.mass()
    return {"seed": g.seed.matrix, "cache_key": g.cache_key(), "traversal_prime": g.traversal_prime,
            "classes": len(g), "aut_orders": [a.order for a in g.auts],
            "mass": f"{m.numerator}/{m.denominator}"}


def cmd_space(cfg: RunConfig, cache: Path) -> dict:
    a, b = _weight(cfg.parameters["weight"])
    g = get_genus(cfg.parameters, cache)
    s = build_space(g, a, b, int(cfg.parameters["char"]))
    return {"descriptor": s.descriptor(), "dim": s.dim, "class_dims": s.class_dims()}


def cmd_hecke(cfg: RunConfig, cache: Path) -> dict:
    op, path = get_operator(cfg.parameters, cache)
    return {**op.to_json(), "file": str(path)}


def _resolve_operator(params: dict, cache: Path) -> HeckeOperator:
    if params.get("op"):
        ref = params["op"]
        return load_operator(ref[0] if isinstance(ref, list) else ref)
    return get_operator(params, cache)[0]


def cmd_charpoly(cfg: RunConfig, cache: Path) -> dict:
    op = _resolve_operator(cfg.parameters, cache)
    cp = operator_charpoly(op.matrix, op.descriptor)
    out = {"descriptor": op.descriptor, "charpoly": str(cp),
           "coefficients": [str(c) for c in cp.coefficients]}
    if cfg.parameters.get("factors"):
        facs = [parse_poly(t) for t in str(cfg.parameters["factors"]).split(",")]
        chk = verify_factor_product(cp, facs)
        out["factors"] = [format_poly(f) for f in facs]
        out["factors_verified"] = chk.ok
        out["rational_roots"] = chk.rational_roots
    return out


def _block_polys(spec: str, cp) -> list[list[int]]:
    factors = None
    out = []
    for item in spec.split(","):
        item = item.strip()
        if item.startswith("deg"):
            if factors is None:
                factors = [[int(c) for c in f.coeffs()] for f, _ in
                           flint.fmpz_poly(cp.coefficients).factor()[1]]
            n = int(item[3:])
            hits = [f for f in factors if len(f) - 1 == n]
            if len(hits) != 1:
                raise InvalidInput(f"{item}: {len(hits)} irreducible factors of degree {n}")
            out.append(hits[0])
        else:
            out.append(parse_poly(item))
    return out


def cmd_congruence(cfg: RunConfig, cache: Path) -> dict:
    prm = cfg.parameters
    if prm.get("ell") is None or not prm.get("op") or not prm.get("blocks"):
        raise InvalidInput("congruence needs --ell, --op and --blocks")
    ell, prec = int(prm["ell"]), int(prm["precision"])
    refs = prm["op"] if isinstance(prm["op"], list) else [prm["op"]]
    ops = [load_operator(r) for r in refs]
    main = ops[0]
    s = main.scale
    mint = main.integral()
    cp = charpoly(mint, main.descriptor)  # of s * T
    blocks = _block_polys(prm["blocks"], operator_charpoly(main.matrix))
    if prm.get("residue") is not None:
        c = int(prm["residue"]) % ell
    else:
        lin = next((f for f in blocks if len(f) == 2), None)
        if lin is None:
            raise InvalidInput("give --residue when no block is linear")
        c = -lin[0] % ell
    vectors, block_ids, roots_out = [], [], []
    for k, f in enumerate(blocks):
        # roots of f(x) correspond to roots of f(x / s) for the integral model
        fs = [coef * s ** (len(f) - 1 - i) for i, coef in enumerate(f)]
        for r in padic_roots(fs, ell, prec, residue=c * s % ell):
            vectors.append(adic_eigenvector(mint, cp, r, ell, prec))
            block_ids.append(k)
            mod = ell ** prec
            r = r * pow(s, -1, mod) % mod
            roots_out.append(r - mod if 2 * r > mod else r)
    if not vectors:
        raise InvalidInput(f"no eigenvalue = {c} mod {ell} in the given blocks")
    labels = {f"{o.kind}({o.p})#{i}": o.matrix for i, o in enumerate(ops)}
    rep = congruence_report(vectors, ell, labels, reduced=True)
    doc = rep.to_json()
    doc.update({"descriptor": main.descriptor, "residue": c, "blocks": [format_poly(f) for f in blocks],
                "block_of_vector": block_ids, "adic_roots": [str(r) for r in roots_out],
                "precision": prec})
    return doc


def cmd_dims(cfg: RunConfig, cache: Path) -> dict:
    if cfg.parameters.get("weight"):
        pairs = [_weight(cfg.parameters["weight"])]
    else:
        top = int(cfg.parameters["max_a"])
        pairs = [(a, b) for a in range(top + 1) for b in range(a % 2, a + 1, 2)]
    return {"dims": [{"a": a, "b": b, "dim": weight_dimension(a, b)} for a, b in pairs]}


_HANDLERS = {"seed": cmd_seed, "genus": cmd_genus, "space": cmd_space, "hecke": cmd_hecke,
             "charpoly": cmd_charpoly, "congruence": cmd_congruence, "dims": cmd_dims}


def _to_csv(command: str, doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "dims":
        w.writerow(["a", "b", "dim"])
        for r in doc["dims"]:
            w.writerow([r["a"], r["b"], r["dim"]])
    elif command == "congruence":
        w.writerow(["p", "eigenvalue-or-residue", "block"])
        for name, vals in doc["eigenvalues"].items():
            for blk, x in zip(doc["block_of_vector"], vals):
                w.writerow([name, "" if x is None else x, blk])
    elif command == "charpoly":
        w.writerow(["degree", "coefficient"])
        for k, c in enumerate(doc["coefficients"]):
            w.writerow([k, c])
    else:
        raise InvalidInput(f"csv output is not available for {command}")
    return buf.getvalue()


def run_command(cfg: RunConfig) -> tuple[int, str]:
    """Run one command; returns (exit code, output text)."""
    try:
        doc = _HANDLERS[cfg.command](cfg, Path(cfg.cache_dir))
        doc = {"command": cfg.command, "version": __version__, "parameters": cfg.parameters, **doc}
        text = _to_csv(cfg.command, doc) if cfg.format == "csv" else \
            json.dumps(doc, sort_keys=True, indent=1) + "\n"
        return 0, text
    except QuinaryError as e:
        return e.exit_code, json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n"


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quinary", description=__doc__.splitlines()[0])
    ap.add_argument("--cache-dir", default="")
    ap.add_argument("--output", "-o", default="-")
    ap.add_argument("--format", choices=_FORMATS, default="json")
    ap.add_argument("--threads", type=int, default=1, help="accepted for compatibility; runs are serial")
    ap.add_argument("--config", help="run a serialized RunConfig instead of a subcommand")
    sub = ap.add_subparsers(dest="command")

    def genus_args(p, lattice=True):
        p.add_argument("--dminus", type=int)
        p.add_argument("--dplus", type=int, default=1)
        p.add_argument("--bound", type=int, default=16)
        if lattice:
            p.add_argument("--lattice", help="JSON lattice file instead of a seed search")
            p.add_argument("--prime", type=int, help="traversal prime for the genus")
            p.add_argument("--check-prime", type=int, help="second prime to confirm closure")

    def space_args(p):
        genus_args(p)
        p.add_argument("--weight", default="0,0")
        p.add_argument("--char", type=int, default=1)

    genus_args(sub.add_parser("seed"), lattice=False)
    genus_args(sub.add_parser("genus"))
    space_args(sub.add_parser("space"))
    for name in ("hecke", "charpoly"):
        p = sub.add_parser(name)
        space_args(p)
        p.add_argument("-p", type=int, default=2)
        p.add_argument("--kind", choices=KINDS, default="T")
        if name == "charpoly":
            p.add_argument("--op", help="operator file written by the hecke command")
            p.add_argument("--factors", help="comma-separated factors to verify")
    p = sub.add_parser("congruence")
    p.add_argument("--ell", type=int)
    p.add_argument("--op", action="append", default=[])
    p.add_argument("--blocks")
    p.add_argument("--residue", type=int)
    p.add_argument("--precision", type=int, default=12)
    p = sub.add_parser("dims")
    p.add_argument("--weight")
    p.add_argument("--max-a", type=int, default=WEIGHT_CAP)
    return ap


_GLOBAL = {"cache_dir", "output", "format", "threads", "config", "command"}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.config:
            cfg = RunConfig.from_json(json.loads(Path(args.config).read_text()))
        elif args.command:
            params = {k: v for k, v in vars(args).items() if k not in _GLOBAL and v is not None}
            cfg = RunConfig(args.command, params, args.cache_dir, args.output, args.format)
        else:
            _parser().print_help()
            return 2
    except QuinaryError as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return e.exit_code
    code, text = run_command(cfg)
    if code:
        sys.stderr.write(text)
    elif cfg.output == "-":
        sys.stdout.write(text)
    else:
        Path(cfg.output).write_text(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
