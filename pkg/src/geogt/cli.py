"""Command-line front end: generate, verify, simulate, cover, stats, embed.

All output is byte-deterministic for a given invocation. Random choices come
from numpy's PCG64 seeded with the 64-bit ``--seed``.
"""
from __future__ import annotations

import argparse
import csv
import glob
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import constructions as cons
from . import patterns
from .geometry import Config, induce
from .setsystem import (
    AT_MOST,
    DEFAULT_BUDGET,
    EXACTLY,
    BudgetExceeded,
    DecodeError,
    DisjunctCover,
    SeparabilityCollision,
    SetSystem,
    decode_by_signature,
    decode_disjunct,
    run_tests,
    verify_disjunct,
    verify_separable,
)

RNG_ALGORITHM = "numpy.random.PCG64"

EXIT_OK, EXIT_WITNESS, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _hard_instance_config(k: int) -> Config:
    pts = patterns.hard_instance(k)
    return Config(2, tuple(pts), point_labels=tuple(f"v{i}" for i in range(len(pts))),
                  claims={"construction": "hard_instance", "params": {"k": k}})


def _long_rect(a) -> Config:
    if a.base == "grid2d":
        base = cons.single_defective_grid(_need(a, "n"))
    else:
        base = _load_config(a.base)
    return cons.long_rect_step(base, _need(a, "k"), a.t)


# name -> (builder, required params)
REGISTRY = {
    "grid-lines": (lambda a: cons.grid_lines(a.n, a.d), ("n", "d")),
    "grid-lines-2d": (lambda a: cons.embed_grid_lines_2d(a.n, a.d), ("n", "d")),
    "hyperplanes": (lambda a: cons.hyperplane_config(a.k, a.t, a.m), ("k", "t", "m")),
    "long-rect": (_long_rect, ("k",)),
    "long-rect-tower": (lambda a: cons.long_rect_tower(a.d, a.t, a.m, a.k), ("d", "t", "m")),
    "subspaces": (lambda a: cons.subspace_config(a.k, a.d, a.m), ("k", "d", "m")),
    "subspaces-projected": (lambda a: cons.project_subspace_config(a.k, a.d, a.m), ("k", "d", "m")),
    "single-defective": (lambda a: cons.single_defective_grid(a.n), ("n",)),
    "disjoint": (lambda a: cons.disjoint_boxes(a.m, a.d), ("m", "d")),
    "hard-instance": (lambda a: _hard_instance_config(a.k), ("k",)),
}

# parameter that varies along a sweep; the rest identify the family
SIZE_PARAM = {
    "grid_lines": "n", "grid_lines_2d": "n", "hyperplanes": "m", "long_rect": "k",
    "long_rect_tower": "m", "subspaces": "m", "subspaces_projected": "m",
    "single_defective_grid": "n", "disjoint": "m", "hard_instance": "k",
}


def _need(a, name):
    v = getattr(a, name)
    if v is None:
        raise CliError(f"--{name} is required")
    return v


def _load_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read {path}: {e}") from e


def _load_config(path: str) -> Config:
    data = _load_json(path)
    try:
        return Config.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(f"{path} is not a configuration file: {e}") from e


def _load_system(path: str) -> tuple[SetSystem, Config | None]:
    data = _load_json(path)
    try:
        if "rows" in data:
            return SetSystem.from_json(data), None
        c = Config.from_json(data)
        return induce(c), c
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(f"{path} is neither a configuration nor a set system: {e}") from e


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def _labels(sys_: SetSystem, idx) -> list[str]:
    return [sys_.item_label(i) for i in idx]


# --- subcommands ------------------------------------------------------------

def cmd_generate(a) -> int:
    builder, required = REGISTRY[a.name]
    for p in required:
        _need(a, p)
    try:
        c = builder(a)
    except (TypeError, ValueError) as e:
        raise CliError(f"bad parameters for {a.name}: {e}") from e
    _emit(c.dumps(), a.output)
    if a.assert_claims:
        failed = 0
        for chk in cons.verify_claims(c, budget=a.budget, n_jobs=a.threads):
            status = "ok" if chk.ok else "FAILED"
            expect = "holds" if chk.expected else "fails"
            print(f"claim {chk.prop} t={chk.t} {expect}: {status}", file=sys.stderr)
            failed += not chk.ok
        if failed:
            return EXIT_WITNESS
    return EXIT_OK


def _witness_json(sys_: SetSystem, w) -> dict | None:
    if w is None:
        return None
    if isinstance(w, SeparabilityCollision):
        return {"kind": w.kind, "first": _labels(sys_, w.first), "second": _labels(sys_, w.second)}
    if isinstance(w, DisjunctCover):
        return {"kind": w.kind, "item": sys_.item_label(w.item), "cover": _labels(sys_, w.cover)}
    return {"kind": w.kind}


def cmd_verify(a) -> int:
    sys_, _ = _load_system(a.input)
    if a.disjunct is not None:
        prop, t = "disjunct", a.disjunct
        v = verify_disjunct(sys_, t, budget=a.budget, n_jobs=a.threads)
    else:
        bar = a.bar_separable is not None
        prop, t = ("bar-separable", a.bar_separable) if bar else ("separable", a.separable)
        v = verify_separable(sys_, t, AT_MOST if bar else EXACTLY,
                             include_empty=not a.no_empty, budget=a.budget)
    w = _witness_json(sys_, v.witness)
    if a.format == "json":
        sys.stdout.write(_dump({"property": prop, "t": t, "holds": v.holds, "witness": w}))
    else:
        print(f"{t}-{prop}: {'holds' if v.holds else 'fails'}")
        if w and w["kind"] == SeparabilityCollision.kind:
            print("first: " + " ".join(w["first"]))
            print("second: " + " ".join(w["second"]))
        elif w:
            print("item: " + w["item"])
            print("cover: " + " ".join(w["cover"]))
    return EXIT_OK if v.holds else EXIT_WITNESS


def cmd_simulate(a) -> int:
    sys_, _ = _load_system(a.input)
    rng_id = None
    if a.random is not None:
        if not 0 <= a.random < sys_.m:
            raise CliError(f"--random must lie in [0, {sys_.m})")
        rng = np.random.Generator(np.random.PCG64(a.seed))
        defectives = sorted(int(i) for i in rng.choice(sys_.m, size=a.random, replace=False))
        rng_id = f"{RNG_ALGORITHM} seed={a.seed}"
    else:
        index = {sys_.item_label(i): i for i in range(sys_.m)}
        missing = [lab for lab in a.defectives or [] if lab not in index]
        if missing:
            raise CliError(f"unknown item labels: {', '.join(missing)}")
        defectives = sorted({index[lab] for lab in a.defectives or []})
    t = len(defectives) if a.t is None else a.t
    outcome = run_tests(sys_, defectives)
    error = None
    try:
        if a.decoder == "disjunct":
            decoded = decode_disjunct(sys_, outcome, t)
        else:
            decoded = decode_by_signature(sys_, outcome, t, a.mode,
                                          include_empty=not a.no_empty, budget=a.budget)
    except DecodeError as e:
        decoded, error = None, str(e)
    match = decoded is not None and list(decoded) == defectives
    report = {
        "rng": rng_id,
        "decoder": a.decoder,
        "t": t,
        "defectives": _labels(sys_, defectives),
        "outcome": "".join("1" if b else "0" for b in outcome),
        "positive_tests": [sys_.test_label(j) for j, b in enumerate(outcome) if b],
        "decoded": None if decoded is None else _labels(sys_, decoded),
        "error": error,
        "match": match,
    }
    if a.format == "json":
        sys.stdout.write(_dump(report))
    else:
        if rng_id:
            print("rng: " + rng_id)
        print("defectives: " + " ".join(report["defectives"]))
        print("outcome: " + report["outcome"])
        print("positive tests: " + " ".join(report["positive_tests"]))
        print("decoded: " + ("error: " + error if error else " ".join(report["decoded"])))
        print("match: " + ("yes" if match else "no"))
    return EXIT_OK if match else EXIT_WITNESS


def _load_points(path: str | None, d: int) -> list[tuple[int, ...]]:
    if path is None:
        return []
    data = _load_json(path)
    try:
        if isinstance(data, dict):
            pts = list(Config.from_json(data).points)
        else:
            pts = [tuple(int(v) for v in p) for p in data]
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(f"{path} holds no point set: {e}") from e
    if any(len(p) != d for p in pts):
        raise CliError(f"points in {path} are not {d}-dimensional")
    return pts


def cmd_cover(a) -> int:
    V = _load_points(a.points, a.d)
    if a.clip:
        V = [v for v in V if max(v) <= a.n]
    try:
        cov = patterns.cover(a.n, a.d, V, a.scheme, split_axis=a.split_axis, density=a.density)
    except ValueError as e:
        raise CliError(str(e)) from e
    res = patterns.covering_check(cov, V)
    if not isinstance(res, patterns.WeightReport):
        print(f"invalid covering: {res}", file=sys.stderr)
        return EXIT_WITNESS
    bound = cov.bound()
    doc = cov.to_json()
    doc["total_weight"] = res.total
    doc["bound"] = str(bound)
    if a.output:
        _emit(_dump(doc), a.output)
    if a.report:
        _emit(res.to_csv(), a.report)
    if a.format == "csv":
        sys.stdout.write(res.to_csv())
    elif not a.output:
        sys.stdout.write(_dump(doc))
    return EXIT_OK if res.total <= bound else EXIT_WITNESS


def _family(name: str, params: dict) -> str:
    size = SIZE_PARAM.get(name)
    rest = {k: v for k, v in sorted(params.items()) if k != size}
    return name + (json.dumps(rest, sort_keys=True, separators=(",", ":")) if rest else "")


def cmd_stats(a) -> int:
    files = sorted({f for pat in a.files for f in (glob.glob(pat) or [pat])})
    rows = []
    for f in files:
        c = _load_config(f)
        name = c.claims.get("construction", "")
        params = c.claims.get("params", {})
        m, n = len(c.points), len(c.boxes)
        ratio = math.log(m) / math.log(n) if m > 0 and n > 1 else None
        rows.append({
            "file": f,
            "name": name,
            "params": json.dumps(params, sort_keys=True, separators=(",", ":")),
            "family": _family(name, params),
            "m": m, "n": n, "d": c.dim,
            "disjunct": " ".join(map(str, (c.claims.get("disjunct") or {}).get("holds", []))),
            "separable": " ".join(map(str, (c.claims.get("separable") or {}).get("holds", []))),
            "log_m_over_log_n": ratio,
        })
    slopes = {}
    for fam in {r["family"] for r in rows}:
        pts = {(r["n"], r["m"]) for r in rows if r["family"] == fam and r["m"] > 0 and r["n"] > 0}
        if len({n for n, _ in pts}) >= 2:
            xs, ys = zip(*sorted(pts))
            slopes[fam] = float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
    buf = io.StringIO()
    cols = ["file", "name", "params", "family", "m", "n", "d", "disjunct", "separable",
            "log_m_over_log_n", "slope"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        r["slope"] = slopes.get(r["family"])
        w.writerow(["" if r[c] is None else (f"{r[c]:.6f}" if isinstance(r[c], float) else r[c])
                    for c in cols])
    if a.format == "json":
        sys.stdout.write(_dump(rows))
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_embed(a) -> int:
    c = _load_config(a.input)
    name = c.claims.get("construction")
    p = c.claims.get("params", {})
    if name == "grid_lines":
        out = cons.embed_grid_lines_2d(p["n"], p["d"])
    elif name == "subspaces":
        out = cons.project_subspace_config(p["k"], p["d"], p["m"])
    else:
        raise CliError(f"no embedding known for construction {name!r}")
    _emit(out.dumps(), a.output)
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    glob_opts = argparse.ArgumentParser(add_help=False)
    glob_opts.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                           help=f"search budget (default {DEFAULT_BUDGET})")
    glob_opts.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                           help="worker processes for disjunctness checks (default 1)")
    glob_opts.add_argument("--seed", type=_seed, default=argparse.SUPPRESS,
                           help="64-bit seed for random choices (default 0)")
    glob_opts.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="geogt", parents=[glob_opts],
                                description="Geometric group testing: constructions, verifiers, coverings.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[glob_opts], help="write a construction as Config JSON")
    g.add_argument("name", choices=sorted(REGISTRY))
    for flag in ("n", "d", "k", "t", "m"):
        g.add_argument(f"--{flag}", type=int)
    g.add_argument("--base", default="grid2d", help="long-rect base: grid2d or a Config file")
    g.add_argument("-o", "--output")
    g.add_argument("--assert-claims", action="store_true",
                   help="verify every attached claim; exit 1 if one fails")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", parents=[glob_opts], help="check separability or disjunctness")
    v.add_argument("input")
    grp = v.add_mutually_exclusive_group(required=True)
    grp.add_argument("--separable", type=int)
    grp.add_argument("--disjunct", type=int)
    grp.add_argument("--bar-separable", type=int)
    v.add_argument("--no-empty", action="store_true", help="exclude the empty set in at-most checks")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", parents=[glob_opts], help="run tests on defectives and decode")
    s.add_argument("input")
    grp = s.add_mutually_exclusive_group(required=True)
    grp.add_argument("--defectives", nargs="*", metavar="LABEL")
    grp.add_argument("--random", type=int, metavar="T")
    s.add_argument("--decoder", choices=("disjunct", "signature"), default="disjunct")
    s.add_argument("--t", type=int, help="decoder set size (default: number of defectives)")
    s.add_argument("--mode", choices=(EXACTLY, AT_MOST), default=AT_MOST)
    s.add_argument("--no-empty", action="store_true")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("cover", parents=[glob_opts], help="build and check a grid covering")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--scheme", choices=sorted(patterns.SCHEMES), required=True)
    c.add_argument("--points", help="point set: Config JSON or a JSON list of coordinates")
    c.add_argument("--clip", action="store_true", help="drop points outside [1, n]^d")
    c.add_argument("--split-axis", type=int, default=0)
    c.add_argument("--density", type=int)
    c.add_argument("-o", "--output", help="covering JSON path")
    c.add_argument("--report", help="weight report CSV path")
    c.set_defaults(func=cmd_cover)

    st = sub.add_parser("stats", parents=[glob_opts], help="size table over Config files")
    st.add_argument("files", nargs="+")
    st.set_defaults(func=cmd_stats)

    e = sub.add_parser("embed", parents=[glob_opts], help="lower-dimensional equivalent of a Config")
    e.add_argument("input")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_embed)
    return p


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    # unset --format means each command's natural output: text, JSON or CSV
    for k, val in {"budget": DEFAULT_BUDGET, "threads": 1, "seed": 0, "format": None}.items():
        if not hasattr(a, k):
            setattr(a, k, val)
    try:
        return a.func(a)
    except (CliError, BudgetExceeded, DecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
