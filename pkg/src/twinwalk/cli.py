"""Command-line front end: ``twinwalk {analyze,trace,catalog,twins,spectrum}``.

Exit codes: 0 success, 2 unreadable or malformed input, 3 when ``--strict``
is given and some verdict is inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .families import FAMILIES, generate_family
from .dynamics import sweep_trace
from .graph import GraphFormatError, HamiltonianKind, WeightedGraph, build_hamiltonian, load_graph, theta_of, twin_sets
from .numberfield import Unrecognized
from .spectral import decompose, residuals
from .transfer import INCONCLUSIVE, AnalysisOptions, PairReport, TransferVerdict, analyze_pair, periodicity, twin_pairs

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 2, 3


class InputError(Exception):
    """Bad graph source or target; reported with exit code 2."""


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _add_source(p: argparse.ArgumentParser):
    src = p.add_argument_group("graph source (exactly one)")
    src.add_argument("--file", help="graph file ('n', 'e u v w', 'l u w' lines)")
    src.add_argument("--family", choices=sorted(FAMILIES), help="named family")
    for name in ("m", "n"):
        src.add_argument(f"--{name}", type=int)
    src.add_argument("--omega", help="loop weight, e.g. -1 or 1/2")
    src.add_argument("--eta", help="twin edge weight")
    src.add_argument("--sizes", help="part sizes for complete_multipartite, e.g. 2,3")
    src.add_argument("--left", help="join: left family spec, e.g. complete:m=2")
    src.add_argument("--right", help="join: right family spec")


def _add_kind(p: argparse.ArgumentParser, both: bool = True):
    choices = ["adjacency", "laplacian", "both"] if both else ["adjacency", "laplacian"]
    p.add_argument("--kind", choices=choices, default="adjacency")


def _add_options(p: argparse.ArgumentParser):
    p.add_argument("--tol", type=float, default=1e-8, help="probability tolerance")
    p.add_argument("--qmax", type=int, default=10**6, help="largest denominator for numeric ratio probes")
    p.add_argument("--relation-bound", type=int, default=20, help="coefficient bound B for numeric PGST search")
    p.add_argument("--horizon", type=float, default=200.0, help="time horizon for numeric scans")


def _add_output(p: argparse.ArgumentParser, formats=("text", "json", "csv")):
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twinwalk", description="Quantum walk state transfer between twin vertices.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="verdicts for a pair, all twin pairs, or one vertex")
    _add_source(p)
    _add_kind(p)
    tgt = p.add_mutually_exclusive_group(required=True)
    tgt.add_argument("--pair", nargs=2, type=int, metavar=("U", "V"))
    tgt.add_argument("--all-twins", action="store_true")
    tgt.add_argument("--vertex", type=int, help="periodicity of a single vertex")
    _add_options(p)
    _add_output(p)
    p.add_argument("--strict", action="store_true", help="exit 3 if any verdict is inconclusive")

    p = sub.add_parser("trace", help="|U(t)_uv|^2 and |U(t)_uu|^2 over a time range")
    _add_source(p)
    _add_kind(p, both=False)
    p.add_argument("--pair", nargs=2, type=int, metavar=("U", "V"), required=True)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=2 * math.pi)
    p.add_argument("--steps", type=int, default=1001)
    _add_output(p, ("csv", "json"))

    p = sub.add_parser("catalog", help="one summary row per family member")
    p.add_argument("--family", choices=sorted(FAMILIES), required=True)
    p.add_argument("--param", help="parameter to vary (default: the family's first)")
    p.add_argument("--range", dest="prange", required=True, help="inclusive range A:B")
    for name in ("m", "n"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--omega")
    p.add_argument("--eta")
    _add_kind(p)
    _add_options(p)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: up to 4)")
    _add_output(p)

    p = sub.add_parser("twins", help="list twin sets")
    _add_source(p)
    _add_output(p, ("text", "json"))

    p = sub.add_parser("spectrum", help="distinct eigenvalues, multiplicities and exact forms")
    _add_source(p)
    _add_kind(p)
    _add_output(p, ("text", "json"))
    return ap


def load_source(args) -> WeightedGraph:
    if bool(args.file) == bool(args.family):
        raise InputError("give exactly one of --file or --family")
    if args.file:
        try:
            return load_graph(args.file)
        except FileNotFoundError:
            raise InputError(f"file not found: {args.file}") from None
        except GraphFormatError as exc:
            raise InputError(f"{args.file}: {exc}") from None
    params = {k: getattr(args, k, None) for k in ("m", "n", "omega", "eta", "sizes", "left", "right")}
    try:
        return generate_family(args.family, **params)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None


def _kinds(kind: str) -> list[str]:
    return ["adjacency", "laplacian"] if kind == "both" else [kind]


def _options(args) -> AnalysisOptions:
    return AnalysisOptions(tol=args.tol, qmax=args.qmax, bound=args.relation_bound, horizon=args.horizon)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _time(v: TransferVerdict) -> str:
    if v.time is None:
        return ""
    dec = f"{v.time:.12f}"
    return f"{v.exact_time} ({dec})" if v.exact_time is not None else dec


def _line(label: str, v: TransferVerdict, timename: str) -> str:
    parts = [f"  {label}: {v.status}"]
    if v.time is not None:
        parts.append(f"{timename} = {_time(v)}")
    parts.append(f"[{v.confidence}]")
    if v.verified is not None:
        parts.append("verified" if v.verified else "NOT verified numerically")
    return "  ".join(parts)


def render_pair_text(r: PairReport) -> str:
    out = [f"pair ({r.pair[0]}, {r.pair[1]})  kind={r.kind}"]
    if r.twin:
        t = r.twin
        out.append(f"  {t['type']} twins: omega={t['omega']} eta={t['eta']} theta={t['theta']} (twin set size {t['set_size']})")
    sp = ", ".join(r.sigma_plus) or "-"
    sm = ", ".join(r.sigma_minus) or "-"
    out.append(f"  strongly cospectral: {'yes' if r.strongly_cospectral else 'no'}  sigma+ = {{{sp}}}  sigma- = {{{sm}}}")
    if r.delta is not None:
        out.append(f"  delta = {r.delta}  b = [{', '.join(r.b_list)}]")
    v = r.verdicts
    out.append(_line("periodic", v["periodic"], "rho"))
    out.append(_line("PST", v["pst"], "tau"))
    out.append(_line("PGST", v["pgst"], "tau"))
    fr = v["fr"]
    out.append(_line("FR", fr, "tau"))
    if fr.fr is not None:
        p = fr.fr
        g = f"gamma/pi = {p.gamma_over_pi}" if p.gamma_over_pi else f"gamma = {p.gamma:.12f}"
        flags = [("proper" if p.proper else "not proper"), ("balanced" if p.balanced else "unbalanced")]
        if p.gamma_rational is False:
            flags.append("gamma irrational multiple of pi")
        out.append(f"    {g}  zeta = {p.zeta:.12f}  {', '.join(flags)}")
        out.append(f"    alpha = {p.alpha:.6f}  beta = {p.beta:.6f}  => {p.downstream}")
    for name in ("periodic", "pst", "pgst", "fr"):
        c = v[name].certificate
        for key in ("witness", "relation", "reason"):
            if key in c:
                out.append(f"    {name} {key}: {c[key]}")
    for note in r.notes:
        out.append(f"  note: {note}")
    out.append(f"  confidence: {r.confidence}")
    return "\n".join(out)


CSV_FIELDS = [
    "u", "v", "kind", "twin_type", "theta", "strongly_cospectral",
    "periodic", "rho", "rho_exact", "pst", "pst_tau", "pst_tau_exact",
    "pgst", "fr", "fr_tau", "fr_tau_exact", "fr_proper", "fr_balanced", "confidence",
]


def _csv_row(r: PairReport) -> dict:
    v = r.verdicts

    def t(x: TransferVerdict):
        return ("" if x.time is None else repr(x.time)), ("" if x.exact_time is None else str(x.exact_time))

    rho, rho_e = t(v["periodic"])
    pt, pt_e = t(v["pst"])
    ft, ft_e = t(v["fr"])
    p = v["fr"].fr
    return {
        "u": r.pair[0], "v": r.pair[1], "kind": r.kind,
        "twin_type": r.twin["type"] if r.twin else "",
        "theta": r.twin["theta"] if r.twin else "",
        "strongly_cospectral": r.strongly_cospectral,
        "periodic": v["periodic"].status, "rho": rho, "rho_exact": rho_e,
        "pst": v["pst"].status, "pst_tau": pt, "pst_tau_exact": pt_e,
        "pgst": v["pgst"].status,
        "fr": v["fr"].status, "fr_tau": ft, "fr_tau_exact": ft_e,
        "fr_proper": "" if p is None else p.proper,
        "fr_balanced": "" if p is None else p.balanced,
        "confidence": r.confidence,
    }


def _csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def run_analysis(g: WeightedGraph, kinds, pairs, opts: AnalysisOptions) -> list[PairReport]:
    return [analyze_pair(g, k, u, v, opts) for k in kinds for (u, v) in pairs]


def cmd_analyze(args) -> int:
    g = load_source(args)
    opts = _options(args)
    kinds = _kinds(args.kind)
    if args.vertex is not None:
        if not 0 <= args.vertex < g.n:
            raise InputError(f"vertex {args.vertex} out of range for n={g.n}")
        verdicts = [(k, periodicity(g, k, args.vertex, opts)) for k in kinds]
        if args.format == "json":
            data = {
                "graph": g.name, "n": g.n, "vertex": args.vertex,
                "periodic": [{"kind": k, "status": v.status, "confidence": v.confidence, "rho": v.time,
                              "rho_exact": None if v.exact_time is None else str(v.exact_time)} for k, v in verdicts],
            }
            _emit(_dumps(data), args.out)
        elif args.format == "csv":
            rows = [{"vertex": args.vertex, "kind": k, "periodic": v.status, "rho": "" if v.time is None else repr(v.time),
                     "rho_exact": "" if v.exact_time is None else str(v.exact_time), "confidence": v.confidence} for k, v in verdicts]
            _emit(_csv(rows, list(rows[0])), args.out)
        else:
            lines = [f"graph {g.name or '(unnamed)'}  n={g.n}"]
            lines += [f"vertex {args.vertex}  kind={k}\n" + _line("periodic", v, "rho") for k, v in verdicts]
            _emit("\n".join(lines) + "\n", args.out)
        inconclusive = any(v.confidence == INCONCLUSIVE for _, v in verdicts)
        return EXIT_INCONCLUSIVE if args.strict and inconclusive else EXIT_OK
    if args.all_twins:
        pairs = twin_pairs(g)
    else:
        u, v = args.pair
        if u == v or not (0 <= u < g.n and 0 <= v < g.n):
            raise InputError(f"bad pair ({u}, {v}) for n={g.n}")
        pairs = [(u, v)]
    reports = run_analysis(g, kinds, pairs, opts)
    if args.format == "json":
        data = {"graph": g.name, "n": g.n, "reports": [r.to_dict() for r in reports]}
        _emit(_dumps(data), args.out)
    elif args.format == "csv":
        _emit(_csv([_csv_row(r) for r in reports], CSV_FIELDS), args.out)
    else:
        head = f"graph {g.name or '(unnamed)'}  n={g.n}  twin pairs analysed: {len(pairs)}"
        body = "\n\n".join(render_pair_text(r) for r in reports) if reports else "no twin pairs"
        _emit(head + "\n\n" + body + "\n", args.out)
    inconclusive = any(v.confidence == INCONCLUSIVE for r in reports for v in r.verdicts.values())
    return EXIT_INCONCLUSIVE if args.strict and inconclusive else EXIT_OK


def cmd_trace(args) -> int:
    g = load_source(args)
    u, v = args.pair
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise InputError(f"bad pair ({u}, {v}) for n={g.n}")
    sd = decompose(build_hamiltonian(g, args.kind), exact=False)
    try:
        tr = sweep_trace(sd, u, v, args.t0, args.t1, args.steps)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(tr.to_csv() if args.format == "csv" else tr.to_json() + "\n", args.out)
    return EXIT_OK


def _catalog_row(job) -> list[dict]:
    family, param, value, fixed, kinds, opts = job
    params = dict(fixed, **{param: value})
    g = generate_family(family, **params)
    pairs = twin_pairs(g)
    rows = []
    for k in kinds:
        reps = [analyze_pair(g, k, u, v, opts) for u, v in pairs]
        sc = [r for r in reps if r.strongly_cospectral]

        def hits(name):
            return [r for r in reps if r.verdicts[name].holds]

        pst = hits("pst")
        times = sorted({str(r.verdicts["pst"].exact_time or f"{r.verdicts['pst'].time:.12g}") for r in pst})
        fr_times = sorted({str(r.verdicts["fr"].exact_time) for r in hits("fr") if r.verdicts["fr"].exact_time})
        per = {r.verdicts["periodic"].time_text for r in reps if r.verdicts["periodic"].holds}
        conf = sorted({r.confidence for r in reps})
        rows.append({
            "family": family, param: value, "kind": k, "n_vertices": g.n,
            "twin_pairs": len(pairs), "strongly_cospectral": len(sc),
            "pst_pairs": len(pst), "pst_tau": ";".join(times),
            "periodic_rho": ";".join(sorted(x for x in per if x)),
            "pgst_pairs": len(hits("pgst")), "fr_pairs": len(hits("fr")), "fr_tau": ";".join(fr_times),
            "confidence": ";".join(conf),
        })
    return rows


def cmd_catalog(args) -> int:
    fn, required, optional = FAMILIES[args.family]
    param = args.param or (required[0] if required else None)
    if param is None or param not in (*required, *optional):
        raise InputError(f"family {args.family!r} has no parameter {param!r}")
    try:
        a, _, b = args.prange.partition(":")
        lo, hi = int(a), int(b or a)
    except ValueError:
        raise InputError(f"bad range {args.prange!r}; use A:B") from None
    if lo > hi:
        raise InputError(f"empty range {args.prange!r}")
    fixed = {k: getattr(args, k) for k in ("m", "n", "omega", "eta") if getattr(args, k, None) is not None and k != param}
    opts = _options(args)
    jobs = [(args.family, param, x, fixed, _kinds(args.kind), opts) for x in range(lo, hi + 1)]
    workers = args.jobs if args.jobs is not None else min(4, os.cpu_count() or 1, len(jobs))
    try:
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                chunks = list(pool.map(_catalog_row, jobs))
        else:
            chunks = [_catalog_row(j) for j in jobs]
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    rows = [r for c in chunks for r in c]
    fields = list(rows[0]) if rows else ["family"]
    if args.format == "json":
        _emit(_dumps(rows), args.out)
    elif args.format == "csv":
        _emit(_csv(rows, fields), args.out)
    else:
        widths = {f: max(len(f), *(len(str(r[f])) for r in rows)) for f in fields}
        lines = ["  ".join(f.ljust(widths[f]) for f in fields)]
        lines += ["  ".join(str(r[f]).ljust(widths[f]) for f in fields) for r in rows]
        _emit("\n".join(x.rstrip() for x in lines) + "\n", args.out)
    return EXIT_OK


def cmd_twins(args) -> int:
    g = load_source(args)
    sets = twin_sets(g)
    data = [
        {
            "vertices": list(ts.vertices), "type": ts.kind, "omega": str(ts.omega), "eta": str(ts.eta),
            "theta_adjacency": str(theta_of(ts, g, "adjacency")), "theta_laplacian": str(theta_of(ts, g, "laplacian")),
        }
        for ts in sets
    ]
    if args.format == "json":
        _emit(_dumps({"graph": g.name, "n": g.n, "twin_sets": data}), args.out)
    else:
        lines = [f"graph {g.name or '(unnamed)'}  n={g.n}  twin sets: {len(sets)}"]
        for d in data:
            lines.append(
                f"  {{{', '.join(map(str, d['vertices']))}}}  {d['type']} twins  omega={d['omega']} eta={d['eta']}"
                f"  theta_A={d['theta_adjacency']} theta_L={d['theta_laplacian']}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    g = load_source(args)
    out = []
    for k in _kinds(args.kind):
        sd = decompose(build_hamiltonian(g, k))
        res = residuals(sd)
        vals = []
        for j, lam in enumerate(sd.eigenvalues):
            ex = sd.exact_value(j)
            vals.append({
                "value": float(lam),
                "exact": None if ex is None or isinstance(ex, Unrecognized) else str(ex),
                "multiplicity": sd.multiplicities[j],
            })
        out.append({
            "kind": HamiltonianKind.parse(k).value,
            "char_poly": None if sd.char_poly is None else str(sd.char_poly),
            "exact_consistent": sd.exact_consistent,
            "eigenvalues": vals,
            "residuals": res,
            "notes": list(sd.notes),
        })
    if args.format == "json":
        _emit(_dumps({"graph": g.name, "n": g.n, "spectra": out}), args.out)
    else:
        lines = [f"graph {g.name or '(unnamed)'}  n={g.n}"]
        for s in out:
            lines.append(f"{s['kind']}: char poly {s['char_poly']}  exact consistent: {s['exact_consistent']}")
            for e in s["eigenvalues"]:
                ex = f"  = {e['exact']}" if e["exact"] else ""
                lines.append(f"  {e['value']: .12f}  x{e['multiplicity']}{ex}")
            worst = max(s["residuals"].values())
            lines.append(f"  max projector residual {worst:.2e}")
            lines += [f"  note: {n}" for n in s["notes"]]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "trace": cmd_trace,
    "catalog": cmd_catalog,
    "twins": cmd_twins,
    "spectrum": cmd_spectrum,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"twinwalk: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
