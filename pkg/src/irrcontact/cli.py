"""Command-line front end.

Subcommands::

    enumerate   irreducible contact graphs for one n
    candidates  the candidate list (count, text, planar code or JSON)
    check       psi, contacts and rigidity of a configuration file
    bounds      Fejes Toth bound and 3n - 6 for a range of n
    render      SVG drawing of a configuration or an enumerated record

Exit codes: 0 success, 1 usage error, 2 data error, 3 undecided
candidates present.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .extremal import ExtremalReport, bounds_table, contact_upper_bound, fejes_toth_bound
from .graph_gen import generate_candidates, read_planar_code, to_json, to_planar_code, to_text
from .pipeline import GraphRecord, RunManifest, enumerate_records, load_records
from .render import render_svg
from .rigidity import rigidity_flags
from .sphere_geom import SphericalConfig, from_spherical

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_UNDECIDED = 0, 1, 2, 3
UNIT_TOL = 1e-6


class DataError(ValueError):
    """Unreadable or inconsistent input file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def read_config(path, spherical: bool = False) -> SphericalConfig:
    """Points from a text file: three floats per line, or ``theta phi``
    per line when the file starts with ``format spherical`` (or
    ``spherical`` is passed).  ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(str(exc)) from exc
    pts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        if line.lower().startswith("format"):
            kind = line.split()[-1].lower()
            if kind not in ("spherical", "cartesian"):
                raise DataError(f"line {lineno}: unknown format {kind!r}")
            spherical = kind == "spherical"
            continue
        try:
            vals = [float(v) for v in line.replace(",", " ").split()]
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from exc
        want = 2 if spherical else 3
        if len(vals) != want:
            raise DataError(f"line {lineno}: expected {want} numbers")
        if spherical:
            pts.append(from_spherical(*vals))
        else:
            v = np.array(vals)
            if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
                raise DataError(f"line {lineno}: not a unit vector")
            pts.append(v)
    if len(pts) < 2:
        raise DataError("need at least two points")
    return SphericalConfig.from_points(np.array(pts))


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _records_table(records: list[GraphRecord], fmt: str) -> str:
    cols = ["key", "edges", "faces", "d_min", "d_max", "status", "irr", "dirr", "max"]
    rows = []
    for r in records:
        f = r.flags or {}
        rows.append([
            r.canonical_key[:16], str(r.edge_count), "".join(map(str, r.face_sizes)),
            "-" if r.d_min is None else f"{r.d_min:.5f}",
            "-" if r.d_max is None else f"{r.d_max:.5f}",
            r.status, str(f.get("irr", "")), str(f.get("dirr", "")), str(f.get("max", "")),
        ])
    if fmt == "csv":
        return "".join(",".join(x) + "\n" for x in [cols] + rows)
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    return "\n".join(lines + ["| " + " | ".join(r) + " |" for r in rows]) + "\n"


def cmd_enumerate(args) -> int:
    if not 6 <= args.n <= 11:
        print("enumerate supports 6 <= n <= 11", file=sys.stderr)
        return EXIT_USAGE
    manifest = RunManifest(
        n=args.n,
        max_face_size=args.max_face,
        d_lower=args.d_lower,
        starts=args.starts,
        tol=args.tol,
    )
    records = enumerate_records(manifest, jobs=args.jobs, cache_dir=args.cache_dir)
    undecided = sum(r.status == "undecided" for r in records)
    if args.format == "json":
        _emit("".join(r.to_json() + "\n" for r in records), args.out)
    else:
        _emit(_records_table(records, args.format), args.out)
    feasible = [r for r in records if r.status == "feasible"]
    if feasible:
        rep = ExtremalReport.from_records(args.n, records)
        print(
            f"n={args.n} I_n={rep.count} d_n={rep.d_n:.5f} k_star={rep.k_star} "
            f"kappa={rep.kappa} undecided={undecided}",
            file=sys.stderr,
        )
        if args.report:
            Path(args.report).write_text(json.dumps(rep.to_dict(), indent=1, sort_keys=True) + "\n")
    else:
        print(f"n={args.n} I_n=0 undecided={undecided}", file=sys.stderr)
    if undecided:
        print(f"warning: {undecided} undecided candidates", file=sys.stderr)
        return EXIT_UNDECIDED
    return EXIT_OK


def cmd_candidates(args) -> int:
    if args.read:
        try:
            cands = read_planar_code(Path(args.read).read_bytes())
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
    else:
        if args.n is None:
            print("candidates needs --n or --read", file=sys.stderr)
            return EXIT_USAGE
        try:
            cands = list(generate_candidates(
                args.n, max_face_size=args.max_face, allow_isolated=args.isolated,
                max_degree=5 if args.max_degree5 else None,
            ))
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if args.emit == "count":
        _emit(f"{len(cands)}\n", args.out)
    elif args.emit == "text":
        _emit("\n".join(to_text(g) for g in cands) + "\n", args.out)
    elif args.emit == "json":
        _emit("".join(to_json(g) + "\n" for g in cands), args.out)
    else:
        data = b">>planar_code<<" + b"".join(to_planar_code(g) for g in cands)
        if args.out:
            Path(args.out).write_bytes(data)
        else:
            sys.stdout.buffer.write(data)
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        cfg = read_config(args.config, args.spherical)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    flags = rigidity_flags(cfg)
    report = {
        "n": len(cfg.points),
        "psi": cfg.psi,
        "edges": len(cfg.edges),
        "degrees": cfg.degrees(),
        "irreducible": flags.irreducible,
        "d_irreducible": flags.d_irreducible,
        "shift_witness": flags.to_dict().get("shift"),
        "reflection_witness": flags.to_dict().get("reflect"),
    }
    if args.format == "json":
        _emit(json.dumps(report, sort_keys=True) + "\n", args.out)
    else:
        _emit("".join(f"{k}: {v}\n" for k, v in report.items()), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    lo, hi = args.n
    if lo < 3 or hi < lo:
        print("bounds needs 3 <= N_MIN <= N_MAX", file=sys.stderr)
        return EXIT_USAGE
    ns = range(lo, hi + 1)
    if args.format == "json":
        rows = [{"n": n, "ft_bound": fejes_toth_bound(n), "contact_bound": contact_upper_bound(n)} for n in ns]
        _emit(json.dumps(rows) + "\n", args.out)
    else:
        _emit(bounds_table(ns, args.format), args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        if args.record is not None:
            records = load_records(args.input)
            rec = records[args.record]
            if rec.coords_at_dmax is None:
                raise DataError("record has no coordinates")
            cfg = SphericalConfig.from_points(np.array(rec.coords_at_dmax))
            title = f"n={rec.n} d_max={rec.d_max:.5f}"
        else:
            cfg = read_config(args.input, args.spherical)
            title = Path(args.input).name
    except (DataError, OSError, IndexError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    svg = render_svg(cfg, title)
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="irrcontact", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", help="irreducible contact graphs for one n")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--d-lower", type=float, default=None)
    e.add_argument("--max-face", type=int, default=None)
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--starts", type=int, default=64)
    e.add_argument("--tol", type=float, default=1e-12)
    e.add_argument("--cache-dir", default=None)
    e.add_argument("--format", choices=["json", "csv", "md"], default="json")
    e.add_argument("--out", default=None)
    e.add_argument("--report", default=None, help="write the per-n summary as JSON")
    e.set_defaults(func=cmd_enumerate)

    c = sub.add_parser("candidates", help="candidate list")
    c.add_argument("--n", type=int, default=None)
    c.add_argument("--max-face", type=int, default=None)
    c.add_argument("--isolated", action="store_true", help="add isolated-vertex variants")
    c.add_argument("--max-degree5", action="store_true", help="keep degrees 3..5 only")
    c.add_argument("--read", default=None, help="planar-code file to read instead")
    c.add_argument("--emit", choices=["count", "text", "json", "planar"], default="count")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_candidates)

    k = sub.add_parser("check", help="analyse a configuration file")
    k.add_argument("config")
    k.add_argument("--spherical", action="store_true", help="lines are theta phi")
    k.add_argument("--format", choices=["json", "md", "csv"], default="md")
    k.add_argument("--out", default=None)
    k.set_defaults(func=cmd_check)

    b = sub.add_parser("bounds", help="Fejes Toth bound and 3n-6")
    b.add_argument("--n", type=int, nargs=2, metavar=("N_MIN", "N_MAX"), default=(3, 12))
    b.add_argument("--format", choices=["json", "csv", "md"], default="csv")
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bounds)

    r = sub.add_parser("render", help="SVG drawing")
    r.add_argument("input", help="configuration file, or records file with --record")
    r.add_argument("--record", type=int, default=None, help="index into a records file")
    r.add_argument("--spherical", action="store_true")
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
