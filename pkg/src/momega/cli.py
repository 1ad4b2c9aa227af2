"""Command line front end: ``momega <command> [flags]``.

Every flag may also be given through the environment as ``MOMEGA_<FLAG>``
(upper case, dashes as underscores); an explicit flag wins.  Results go to
``--out DIR`` (one file per command) or to standard output.  Failures print a
JSON error object on standard error and exit with 2 (bad input), 3 (size cap)
or 4 (a checked property does not hold).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import analysis, catalog, properties
from .bitset import MAX_N
from .catalog import CatalogError
from .geometry import GeometryError
from .lp import LPError
from .matroid import MatroidError, SizeCapError, read_matroids
from .schubert import (
    SamplingPlan,
    enumerate_profiles,
    expansion_labelled,
    symmetrize,
    verify_indicator_identity,
)

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_PROPERTY = 0, 2, 3, 4
TABLE_MAX_N = 8


class PropertyFailure(Exception):
    def __init__(self, message: str, payload=None):
        super().__init__(message)
        self.payload = payload


class Budget:
    def __init__(self, seconds: float | None):
        self.deadline = None if seconds is None else time.monotonic() + seconds
        self.truncated: list[str] = []

    def expired(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline

    def skip(self, what: str) -> bool:
        if self.expired():
            self.truncated.append(what)
            return True
        return False


# -- argument handling ------------------------------------------------------------------

def _env(name: str, cast=str, default=None):
    raw = os.environ.get("MOMEGA_" + name.upper().replace("-", "_"))
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise MatroidError(f"environment variable MOMEGA_{name.upper()} has invalid value {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=int, default=_env("r", int))
    common.add_argument("--n", type=int, default=_env("n", int))
    common.add_argument("--catalog", action="append", default=None,
                        help="revlex census file (repeatable); replaces built-in generation for its (n, r)")
    common.add_argument("--named", default=_env("named"), help="uniform | minimal | thickening2 | fano")
    common.add_argument("--matroid", default=_env("matroid"), help="file of matroids, one '<n> <r> <bases>' per line")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--labeled", dest="labeled", action="store_true", default=_env("labeled", _flag, False))
    mode.add_argument("--symmetrized", dest="labeled", action="store_false")
    common.add_argument("--family", default=_env("family"), help="comma-separated families, or 'all'")
    common.add_argument("--max-n", type=int, default=_env("max_n", int))
    common.add_argument("--square", default=_env("square"), help="file with a 6x6 Latin square")
    common.add_argument("--seed", type=int, default=_env("seed", int, 0))
    common.add_argument("--jobs", type=int, default=_env("jobs", int, 1))
    common.add_argument("--budget-seconds", type=float, default=_env("budget_seconds", float))
    common.add_argument("--out", default=_env("out"), help="output directory (default: standard output)")

    p = argparse.ArgumentParser(prog="momega", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in [
        ("expand", "Schubert expansion of matroids (TSV)"),
        ("cloud", "point cloud of all classes for (r, n) (TSV)"),
        ("vertices", "vertex certificates and counts (JSON)"),
        ("faces", "facial tests for matroid families (JSON)"),
        ("lattice", "integer points of the polytope that no matroid occupies (JSON)"),
        ("table1", "vertex and extremal-class counts for all computable (r, n) (TSV + JSON)"),
        ("latin19", "19-element rank-3 matroids from order-6 Latin squares (JSON)"),
        ("census", "write a revlex census built from rank-3 extensions (n <= 8)"),
        ("check", "run the property suite over all classes up to --max-n (JSON)"),
    ]:
        sub.add_parser(name, parents=[common], help=text, description=text)
    return p


def _flag(raw: str) -> bool:
    if raw.lower() in ("1", "true", "yes", "on"):
        return True
    if raw.lower() in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(raw)


def _need_rn(args):
    if args.r is None or args.n is None:
        raise MatroidError("--r and --n are required")
    if not 0 <= args.r <= args.n <= MAX_N:
        raise MatroidError(f"need 0 <= r <= n <= {MAX_N}")
    return args.r, args.n


def _catalog_files(args) -> list[str]:
    files = list(args.catalog or [])
    env = _env("catalog")
    if not files and env:
        files = env.split(os.pathsep)
    return files


def _ingested(args) -> dict[tuple[int, int], list]:
    out = {}
    for path in _catalog_files(args):
        with open(path) as fh:
            entries = catalog.ingest_revlex(fh)
        if entries:
            m = entries[0].matroid
            out[(m.r, m.n)] = entries
    return out


def _classes(args, r, n):
    ing = _ingested(args)
    if (r, n) in ing:
        return ing[(r, n)], "ingested"
    return catalog.generate_all(r, n), "generated"


def _instance(args):
    r, n = _need_rn(args)
    if args.labeled:
        return analysis.instance_for(r, n, labelled=True, jobs=args.jobs), "generated"
    cls, src = _classes(args, r, n)
    return analysis.build_instance(cls, jobs=args.jobs), src


# -- commands ------------------------------------------------------------------------

def cmd_expand(args, budget):
    if args.named:
        if args.named == "fano":
            ms = [catalog.fano()]
        else:
            r, n = _need_rn(args)
            ms = [catalog.construct_named(args.named, r, n)]
    elif args.matroid:
        ms = read_matroids(Path(args.matroid).read_text().splitlines())
    elif _catalog_files(args):
        ms = [e.matroid for es in _ingested(args).values() for e in es]
    else:
        raise MatroidError("expand needs --named, --matroid or --catalog")
    if not ms:
        raise MatroidError("no matroids to expand")
    from .matroid import CANONICAL_CAP, canonical_key, format_matroid

    def row_key(m):
        # beyond the canonicalization cap the revlex string of the given labelling stands in
        return canonical_key(m) if m.n <= CANONICAL_CAP else f"{m.n}:{m.r}:{catalog.revlex_string(m)}"

    lines = []
    plan = SamplingPlan(seed=args.seed)
    groups: dict[tuple[int, int], list] = {}
    for m in ms:
        groups.setdefault((m.r, m.n), []).append(m)
    for (r, n), group in sorted(groups.items()):
        order = enumerate_profiles(r, n)
        if args.labeled:
            lines.append("matroid\texpansion")
        else:
            lines.append("\t".join(["matroid"] + [str(p) for p in order]))
        for m in group:
            if budget.skip(format_matroid(m)):
                continue
            e = expansion_labelled(m, check=True)
            if m.n <= 12:
                res = verify_indicator_identity(m, e, plan)
                if not res.ok:
                    raise PropertyFailure("indicator identity fails", {"matroid": format_matroid(m), "detail": res.detail})
            if args.labeled:
                lines.append("\t".join([row_key(m)] + [f"{c}={v}" for c, v in e.sorted_items()]))
            else:
                s = symmetrize(e).coefficients
                lines.append("\t".join([row_key(m)] + [str(s.get(p, 0)) for p in order]))
    return {"expansion.tsv": "\n".join(lines) + "\n"}


def cmd_cloud(args, budget):
    inst, src = _instance(args)
    header = ["point", "classes"] + inst.coord_labels()
    rows = ["\t".join(header)]
    for i, (p, occ) in enumerate(zip(inst.points, inst.occupancy)):
        rows.append("\t".join([str(i), ",".join(occ)] + [str(v) for v in p]))
    return {"cloud.tsv": "\n".join(rows) + "\n"}


def cmd_vertices(args, budget):
    inst, src = _instance(args)
    rep = analysis.extremality_report(inst, jobs=args.jobs)
    meta = {"source": src}
    return {"vertices.json": analysis.instance_json(inst, rep, meta=meta)}


def cmd_faces(args, budget):
    inst, src = _instance(args)
    fams = (args.family or "all").split(",")
    if fams == ["all"]:
        fams = ["disconnected", "paving", "copaving", "sparsePaving", "elementarySplit", "modular"] + [
            f"girth:{m}" for m in range(2, inst.r + 1)]
    faces = []
    for f in fams:
        if budget.skip(f"family {f}"):
            continue
        faces.append(analysis.face_family_report(inst, f))
    return {"faces.json": analysis.instance_json(inst, None, faces=faces, meta={"source": src})}


def cmd_lattice(args, budget):
    inst, src = _instance(args)
    extras, search = analysis.non_matroid_lattice_points(inst)
    meta = {"source": src, "latticePoints": len(search.points), "searchNodes": search.nodes, "lps": search.lps}
    return {"lattice.json": analysis.instance_json(inst, None, extras=extras, meta=meta)}


def table_cells(max_n: int, ingested) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Cells computable with built-in generators or supplied censuses, and the rest."""
    doable, missing = [], []
    for n in range(1, max_n + 1):
        for r in range(n + 1):
            low = min(r, n - r)
            ok = n <= catalog.DFS_CAP or low <= 2 or (low == 3 and n <= catalog.RANK3_CAP) or (r, n) in ingested
            (doable if ok else missing).append((r, n))
    return doable, missing


def _cell_classes(r, n, ingested):
    if (r, n) in ingested:
        return ingested[(r, n)], "ingested"
    if n - r == 3 and n > catalog.DFS_CAP and (n - r, n) in ingested:
        return [catalog.CatalogEntry.of(e.matroid.dual(), "ingested") for e in ingested[(n - r, n)]], "ingested"
    if min(r, n - r) == 3 and n > catalog.DFS_CAP:
        ents = catalog.generate_rank3(n)
        if r != 3:
            ents = catalog.dedupe_classes([catalog.CatalogEntry.of(e.matroid.dual(), "generated") for e in ents])
        return ents, "generated"
    return catalog.generate_all(r, n), "generated"


def cmd_table1(args, budget):
    max_n = 6 if args.max_n is None else args.max_n
    if not 1 <= max_n <= TABLE_MAX_N:
        raise SizeCapError(f"table1 covers 1 <= n <= {TABLE_MAX_N}")
    ingested = _ingested(args)
    doable, missing = table_cells(max_n, ingested)
    cells, sources = {}, {}
    for r, n in doable:
        if budget.skip(f"{r},{n}"):
            continue
        cls, src = _cell_classes(r, n, ingested)
        rep = analysis.extremality_report(analysis.build_instance(cls, jobs=args.jobs), jobs=args.jobs)
        cells[(r, n)] = (rep.vertex_count, rep.extremal_class_count, len(cls))
        sources[(r, n)] = src
    lines = []
    for panel, idx in (("vertices", 0), ("extremal_classes", 1), ("classes", 2)):
        lines.append(f"# {panel}")
        lines.append("\t".join(["r\\n"] + [str(n) for n in range(1, max_n + 1)]))
        for r in range(max_n + 1):
            row = [str(r)]
            for n in range(1, max_n + 1):
                row.append("" if r > n else (str(cells[(r, n)][idx]) if (r, n) in cells else "?"))
            lines.append("\t".join(row))
    js = {
        "parameters": {"maxN": max_n},
        "cells": [{"r": r, "n": n, "vertexCount": v, "extremalClassCount": e, "classCount": c,
                   "source": sources[(r, n)]} for (r, n), (v, e, c) in sorted(cells.items(), key=lambda kv: (kv[0][1], kv[0][0]))],
        "uncomputed": [{"r": r, "n": n} for r, n in missing],
    }
    return {"table1.tsv": "\n".join(lines) + "\n", "table1.json": js}


def _read_square(path: str) -> list[list[int]]:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.replace(",", " ").strip()
        if line and not line.startswith("#"):
            rows.append([int(t) for t in line.split()])
    return rows


def cmd_latin19(args, budget):
    squares = {"cyclic": catalog.cyclic_square(), "s3": catalog.s3_square()}
    if args.square:
        squares = {Path(args.square).name: _read_square(args.square)}
    results = []
    points = set()
    for name, sq in squares.items():
        m = catalog.latin_square_matroid(sq)
        e = symmetrize(expansion_labelled(m))
        lines = catalog.latin_square_lines(sq)
        sizes = sorted(ln.bit_count() for ln in lines)
        exp = {str(p): v for p, v in e.sorted_items()}
        points.add(tuple(sorted(exp.items())))
        results.append({
            "square": name, "intercalates": catalog.intercalates(sq), "bases": len(m.bases),
            "girth": m.girth, "simple": m.girth >= 3, "paving": m.girth >= m.r,
            "lines7": sizes.count(7), "lines3": sizes.count(3), "otherLines": len(sizes) - sizes.count(7) - sizes.count(3),
            "expansion": exp, "coefficientSum": e.total(),
        })
    ok = all(r["lines7"] == 3 and r["lines3"] == 36 and r["otherLines"] == 0 and r["simple"] and r["paving"]
             and r["coefficientSum"] == 1 for r in results)
    js = {"squares": results, "identicalPoints": len(points) == 1, "ok": ok}
    if not ok:
        raise PropertyFailure("Latin-square matroid checks failed", js)
    return {"latin19.json": js}


def cmd_census(args, budget):
    r, n = _need_rn(args)
    if r == 3 and n <= catalog.RANK3_CAP:
        ents = catalog.generate_rank3(n)
    elif n - r == 3 and n <= catalog.RANK3_CAP and n >= 3:
        ents = catalog.dedupe_classes([catalog.CatalogEntry.of(e.matroid.dual(), "generated")
                                       for e in catalog.generate_rank3(n)])
    else:
        ents = catalog.generate_all(r, n)
    return {f"census_r{r}_n{n}.txt": catalog.write_revlex(ents, n, r)}


def cmd_check(args, budget):
    max_n = 6 if args.max_n is None else args.max_n
    if max_n > 6:
        raise SizeCapError("the property suite covers n <= 6")
    report = {"maxN": max_n, "seed": args.seed, "classes": 0, "failures": {}, "instances": {}}
    fails = report["failures"]
    for n in range(0, max_n + 1):
        for r in range(n + 1):
            if budget.skip(f"{r},{n}"):
                continue
            for msg in properties.check_profiles(r, n):
                fails.setdefault("schubertSelfExpansion", []).append(msg)
            ents = catalog.generate_all(r, n)
            for e in ents:
                report["classes"] += 1
                for name, msgs in properties.check_matroid(e.matroid, seed=args.seed).items():
                    for msg in msgs:
                        fails.setdefault(name, []).append(f"{e.key}: {msg}")
            if n == 0:
                continue
            inst = analysis.build_instance(ents)
            sub = {
                "modular": analysis.modular_face_check(inst),
                "colocation": analysis.colocation_check(inst),
            }
            for name, rec in sub.items():
                if not rec["ok"]:
                    fails.setdefault(name, []).append(f"({r},{n}): {rec['violations']}")
            report["instances"][f"{r},{n}"] = {"classes": len(ents), "points": len(inst.points)}
    ds = analysis.direct_sum_extremality_check(max_n, jobs=args.jobs) if max_n >= 1 else None
    if ds and not ds["ok"]:
        fails["directSum"] = ds["theoremViolations"] + ds["converseViolations"]
    report["directSum"] = ds
    report["ok"] = not fails
    if fails:
        raise PropertyFailure("property suite failed", report)
    return {"check.json": report}


COMMANDS = {
    "expand": cmd_expand, "cloud": cmd_cloud, "vertices": cmd_vertices, "faces": cmd_faces,
    "lattice": cmd_lattice, "table1": cmd_table1, "latin19": cmd_latin19, "census": cmd_census, "check": cmd_check,
}


# -- output ---------------------------------------------------------------------------

def _render(payload, meta: dict) -> str:
    if isinstance(payload, str):
        if meta.get("truncated"):
            payload = f"# truncated: {';'.join(meta['truncated'])}\n" + payload
        return payload
    payload = dict(payload)
    payload["meta"] = meta
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _error(code: int, kind: str, message: str, payload=None) -> int:
    err = {"error": kind, "message": message, "exitCode": code}
    if payload is not None:
        err["detail"] = payload
    sys.stderr.write(json.dumps(err, sort_keys=True, default=str) + "\n")
    return code


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except MatroidError as exc:
        return _error(EXIT_INPUT, "input", str(exc))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if args.jobs < 1:
        return _error(EXIT_INPUT, "input", "--jobs must be at least 1")
    budget = Budget(args.budget_seconds)
    try:
        files = COMMANDS[args.command](args, budget)
    except PropertyFailure as exc:
        return _error(EXIT_PROPERTY, "property", str(exc), exc.payload)
    except SizeCapError as exc:
        return _error(EXIT_CAP, "size-cap", str(exc))
    except (MatroidError, CatalogError, GeometryError, LPError, ValueError, OSError) as exc:
        return _error(EXIT_INPUT, "input", str(exc))
    meta = {"command": args.command, "seed": args.seed, "truncated": budget.truncated}
    rendered = {name: _render(payload, meta) for name, payload in files.items()}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in rendered.items():
            (out / name).write_text(text)
    else:
        for name, text in rendered.items():
            if len(rendered) > 1:
                sys.stdout.write(f"==> {name} <==\n")
            sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
