"""Command-line entry point: ``sparse-ramsey <group> <command> ...``; all reports are JSON."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import density as dens
from . import ensemble as ens
from .graph import EdgeColouring, read_colouring, read_graph, write_graph


def _ints(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(t) for t in text.replace(",", " ").split()]


def _frac(x: Fraction) -> dict:
    return {"value_num": x.numerator, "value_den": x.denominator}


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_density(a) -> int:
    g = read_graph(a.graph)
    if a.what == "d2":
        _emit({**_frac(dens.d2(g)), "witness": None})
    elif a.what == "m2":
        rep = dens.m2(g)
        _emit({**_frac(rep.value), "witness": list(rep.witness)})
    else:
        rep = dens.spencer_density(dens.RootedPattern(g, frozenset(_ints(a.roots))))
        _emit({**_frac(rep.value), "witness": list(rep.witness)})
    return 0


def cmd_ensemble(a) -> int:
    if a.command == "sample":
        g = ens.sample_gnp(ens.EnsembleSpec(a.n, a.p, a.seed))
        write_graph(a.out, g)
        _emit({"n": g.n, "m": g.m, "out": a.out})
        return 0
    if a.command == "check":
        g = read_graph(a.graph)
        if a.property == "neigh":
            v = ens.check_neighbourhood_property(g, a.d, a.eps, a.p, samples=a.samples, seed=a.seed)
        elif a.property == "star":
            v = ens.check_star_property(g, a.d, a.eps, a.p, families=a.samples, seed=a.seed)
        else:
            v = ens.check_upper_regular(g, a.eps, a.p, samples=a.samples, seed=a.seed)
        _emit(v.to_json())
        return 0 if v.holds else 1
    host = read_graph(a.graph)
    pattern = read_graph(a.pattern)
    roots = _ints(a.roots)
    pi = _ints(a.pi)
    if len(roots) != len(pi):
        raise SystemExit("--roots and --pi must have the same length")
    rp = dens.RootedPattern(pattern, frozenset(roots))
    count = ens.count_extensions(host, rp, dict(zip(roots, pi)))
    expected = ens.expected_extensions(rp, host.n, 2 * host.m / max(1, host.n * (host.n - 1)))
    _emit({"count": count, "expected_at_host_density": expected})
    return 0


def cmd_reg(a) -> int:
    from .regularity import strengthened_srl

    graphs = [read_graph(f) for f in a.graphs]
    n = graphs[0].n
    if any(g.n != n for g in graphs):
        raise SystemExit("colour graphs must share a vertex set")
    p = a.p
    if p is None:
        m = sum(g.m for g in graphs)
        p = Fraction(2 * m, n * (n - 1))
    eps = Fraction(a.eps)
    decomp = strengthened_srl(graphs, eps, lambda k: eps, a.k0, p, fine_split=a.fine_split,
                              max_iterations=a.budget, seed=a.seed)
    _emit(decomp.to_json(), a.out)
    return 0


def cmd_embed(a) -> int:
    from .embedder import ConstantsPack, RegularityConfig, embed_monochromatic

    og_graph = read_graph(a.target)
    host = read_graph(a.host)
    colouring: EdgeColouring = read_colouring(a.colouring)
    if colouring.graph != host:
        raise SystemExit("colouring does not match the host edge set")
    text = a.constants
    cp = ConstantsPack.from_json(Path(text).read_text() if Path(text).exists() else text)
    p = a.p if a.p is not None else 2 * host.m / (host.n * (host.n - 1))
    reg = RegularityConfig(eps=a.eps, k0=a.k0, fine_split=a.fine_split)
    rep = embed_monochromatic(og_graph, host, colouring, cp, p, mode=a.mode, seed=a.seed,
                              regularity=reg, audit=a.audit,
                              method="exact" if a.audit else "estimate")
    out = rep.to_json()
    out.pop("diagnostics", None)
    _emit(out, a.out)
    return 0 if rep.success else 1


def cmd_campaign(a) -> int:
    from .experiments import ExperimentConfig, run_campaign, sweep, verify_result

    if a.command == "verify":
        rep = verify_result(a.result)
        _emit(rep.to_json())
        return 0 if rep.ok else 1
    config = ExperimentConfig.load(a.config)
    if a.command == "run":
        res = run_campaign(config, a.out or config.output)
        _emit(res.to_json())
        return 0
    grid = [float(t) if a.param in ("p", "mu") else int(t) for t in a.grid.split(",") if t.strip()]
    rows = sweep(config, a.param, grid, out_dir=a.out_dir, csv_path=a.csv)
    _emit(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sparse-ramsey", description=__doc__)
    sub = ap.add_subparsers(dest="group", required=True)

    d = sub.add_parser("density", help="exact density oracles")
    d.add_argument("what", choices=("d2", "m2", "spencer"))
    d.add_argument("--graph", required=True)
    d.add_argument("--roots", help="comma-separated root vertices (spencer)")
    d.set_defaults(func=cmd_density)

    e = sub.add_parser("ensemble", help="random graphs and typicality checks")
    es = e.add_subparsers(dest="command", required=True)
    s = es.add_parser("sample")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    c = es.add_parser("check")
    c.add_argument("property", choices=("neigh", "star", "upreg"))
    c.add_argument("--graph", required=True)
    c.add_argument("--d", type=int, default=1, help="set size bound D")
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--samples", type=int, default=500)
    c.add_argument("--seed", type=int, default=0)
    x = es.add_parser("extensions")
    x.add_argument("--graph", required=True)
    x.add_argument("--pattern", required=True)
    x.add_argument("--roots", default="")
    x.add_argument("--pi", default="")
    e.set_defaults(func=cmd_ensemble)

    r = sub.add_parser("reg", help="sparse regularity")
    rs = r.add_subparsers(dest="command", required=True)
    dc = rs.add_parser("decompose")
    dc.add_argument("--graphs", nargs="+", required=True, help="one edge list per colour")
    dc.add_argument("--eps", default="3/10")
    dc.add_argument("--k0", type=int, default=4)
    dc.add_argument("--budget", type=int, default=6, help="iteration budget")
    dc.add_argument("--fine-split", type=int, default=4)
    dc.add_argument("--p", type=Fraction, default=None)
    dc.add_argument("--seed", type=int, default=0)
    dc.add_argument("--out")
    r.set_defaults(func=cmd_reg)

    m = sub.add_parser("embed", help="monochromatic embedding")
    ms = m.add_subparsers(dest="command", required=True)
    run = ms.add_parser("run")
    run.add_argument("--target", required=True)
    run.add_argument("--host", required=True)
    run.add_argument("--colouring", required=True)
    run.add_argument("--constants", required=True, help="JSON text or file")
    run.add_argument("--mode", choices=("degenerate", "maxdegree"), default="degenerate")
    run.add_argument("--audit", action="store_true")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--p", type=float, default=None)
    run.add_argument("--eps", type=float, default=0.3)
    run.add_argument("--k0", type=int, default=5)
    run.add_argument("--fine-split", type=int, default=4)
    run.add_argument("--out")
    m.set_defaults(func=cmd_embed)

    cg = sub.add_parser("campaign", help="seeded experiment campaigns")
    cs = cg.add_subparsers(dest="command", required=True)
    cr = cs.add_parser("run")
    cr.add_argument("--config", required=True)
    cr.add_argument("--out")
    sw = cs.add_parser("sweep")
    sw.add_argument("--config", required=True)
    sw.add_argument("--param", choices=("p", "N", "r", "mu"), required=True)
    sw.add_argument("--grid", required=True)
    sw.add_argument("--out-dir")
    sw.add_argument("--csv")
    vf = cs.add_parser("verify")
    vf.add_argument("--result", required=True)
    cg.set_defaults(func=cmd_campaign)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
