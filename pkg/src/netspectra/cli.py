"""netspectra command line: a pipeline of files.

    extract -> spectrum -> weyl
               spectrum -> eigenstates
    dimension, pagerank and generate work on edge lists directly.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .callgraph import ExtractOptions, extract_pcn
from .eigenstates import DEFAULT_CELLS, DEFAULT_MAX_STATES, coarse_grain, par_profile, zoom_grid
from .errors import NetSpectraError, ParameterError
from .fracdim import DEFAULT_LMAX, DEFAULT_WINDOW, average_mass, dimension_fit, undirected_dimension
from .gmatrix import DEFAULT_ALPHA, build_operator, order_by_pagerank, pagerank
from .graph import (
    DirectedGraph,
    generate_chain,
    generate_cycle,
    generate_grid,
    generate_preferential,
    invert_links,
    read_graph,
    write_graph,
)
from .spectral import DENSE_LIMIT, SpectrumResult, arnoldi_spectrum, dense_spectrum, load_spectrum, save_spectrum
from .weyl import DEFAULT_THRESHOLDS, count_eigenvalues, degeneracy_census, integrated_density, weyl_fit

log = logging.getLogger("netspectra")


@dataclass
class RunConfig:
    alpha: float = DEFAULT_ALPHA
    lambda_min: float = 0.1
    krylov_dim: int = 600
    tol: float = 1e-8
    seed: int = 0
    max_restarts: int = 64

    def validate(self):
        if not 0 < self.alpha < 1:
            raise ParameterError(f"--alpha must lie in (0, 1), got {self.alpha}")
        if not 0 < self.lambda_min < 1:
            raise ParameterError(f"--lambda-min must lie in (0, 1), got {self.lambda_min}")
        if self.krylov_dim < 2:
            raise ParameterError("--krylov must be >= 2")
        if self.tol <= 0:
            raise ParameterError("--tol must be positive")
        if self.max_restarts < 0:
            raise ParameterError("--max-restarts must be >= 0")
        return self


def _fit_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if lo < 1 or hi <= lo:
        raise argparse.ArgumentTypeError(f"need 1 <= lo < hi, got {text!r}")
    return lo, hi


def _thresholds(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("no thresholds given")
    return values


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def _load_graph(args) -> DirectedGraph:
    g = read_graph(args.edges, getattr(args, "labels", None))
    if getattr(args, "inverted", False):
        g = invert_links(g)
    return g


def _config(args) -> RunConfig:
    return RunConfig(
        alpha=args.alpha,
        lambda_min=getattr(args, "lambda_min", 0.1),
        krylov_dim=getattr(args, "krylov", 600),
        tol=getattr(args, "tol", 1e-8),
        seed=args.seed,
        max_restarts=getattr(args, "max_restarts", 64),
    ).validate()


# ----------------------------------------------------------------- commands


def cmd_extract(args) -> int:
    g, report = extract_pcn(args.root, ExtractOptions(workers=args.workers))
    prefix = args.out
    write_graph(g, f"{prefix}.edges", f"{prefix}.labels")
    payload = report.to_dict()
    payload["config"] = {"root": str(args.root), "extensions": list(ExtractOptions().extensions)}
    _write_json(f"{prefix}.report.json", payload)
    log.info("%d procedures, %d calls, %d files skipped", report.n_procedures, report.n_calls,
             len(report.skipped_files))
    return 0


def cmd_generate(args) -> int:
    if args.kind == "chain":
        g = generate_chain(args.n)
    elif args.kind == "cycle":
        g = generate_cycle(args.n)
    elif args.kind == "grid":
        g = generate_grid(args.w, args.h)
    else:
        g = generate_preferential(args.n, args.m, args.seed)
    write_graph(g, args.out)
    return 0


def compute_spectrum(g: DirectedGraph, cfg: RunConfig, dense: bool = False, source: str = "") -> SpectrumResult:
    krylov = min(cfg.krylov_dim, g.n_nodes)
    if dense or krylov < 2:
        if g.n_nodes > DENSE_LIMIT:
            raise ParameterError(f"--dense is limited to n <= {DENSE_LIMIT}, graph has {g.n_nodes} nodes")
        full = dense_spectrum(g, cfg.alpha, source=source)
        keep = full.moduli >= cfg.lambda_min
        spec = SpectrumResult(
            full.eigenvalues[keep], full.residuals[keep], full.vectors[:, keep], cfg.lambda_min,
            g.n_nodes, cfg.alpha, None, source,
        )
    else:
        spec = arnoldi_spectrum(
            build_operator(g, cfg.alpha), cfg.lambda_min, krylov, cfg.tol, cfg.max_restarts, cfg.seed, source
        )
    spec.config = {**asdict(cfg), "method": "dense" if dense or krylov < 2 else "arnoldi",
                   "krylov_dim_used": krylov, **{k: v for k, v in spec.config.items() if k in
                                                  ("restarts", "cycles", "matvecs")}}
    return spec


def cmd_spectrum(args) -> int:
    cfg = _config(args)
    g = _load_graph(args)
    source = args.source or Path(args.edges).stem + ("*" if args.inverted else "")
    spec = compute_spectrum(g, cfg, dense=args.dense, source=source)
    spec.config["inverted"] = bool(args.inverted)
    spec.config["edges"] = str(args.edges)
    save_spectrum(spec, args.out, args.vectors)
    log.info("%d eigenvalues with |lambda| >= %g (complete=%s)", len(spec), cfg.lambda_min, spec.complete)
    return 0


def cmd_pagerank(args) -> int:
    g = _load_graph(args)
    op = build_operator(g, args.alpha)
    pr = pagerank(op, args.tol)
    order = order_by_pagerank(pr)
    labels = g.node_map().labels()
    with open(f"{args.out}.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "node", "label", "probability"])
        for rank, node in enumerate(order.tolist()):
            writer.writerow([rank, node, labels[node], repr(float(pr.probabilities[node]))])
    _write_json(f"{args.out}.json", {
        "n": g.n_nodes,
        "residual": pr.residual,
        "iterations": pr.iterations,
        "config": {"alpha": args.alpha, "tol": args.tol, "inverted": bool(args.inverted), "edges": str(args.edges)},
    })
    return 0


def cmd_weyl(args) -> int:
    specs = [(path, load_spectrum(path)) for path in args.spectra]
    thresholds = args.thresholds
    rows = []
    fits = []
    for thr in thresholds:
        points = []
        for path, spec in specs:
            c = count_eigenvalues(spec, thr)
            points.append((spec.n, c))
            rows.append([str(path), spec.n, thr, c])
        fits.append(weyl_fit(points, thr))
    with open(f"{args.out}.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "N", "threshold", "N_lambda"])
        writer.writerows(rows)
    with open(f"{args.out}.density.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "gamma", "W"])
        for path, spec in specs:
            curve = integrated_density(spec)
            for g_, w in zip(curve.gammas.tolist(), curve.W.tolist()):
                writer.writerow([str(path), repr(g_), repr(w)])
    _write_json(f"{args.out}.json", {
        "fits": [f.to_dict() for f in fits],
        "census": {
            str(path): [{"m": m, "count": c} for m, c in degeneracy_census(spec, m_max=6)]
            for path, spec in specs
        },
        "incomplete_inputs": [str(p) for p, s in specs if not s.complete],
        "config": {"thresholds": thresholds, "inputs": [str(p) for p, _ in specs]},
    })
    for f in fits:
        log.info("|lambda| > %g: nu = %.4f +- %.4f", f.threshold, f.nu, f.stderr)
    return 0


def cmd_dimension(args) -> int:
    g = _load_graph(args)
    lo, hi = args.fit_range
    if hi > args.lmax:
        raise ParameterError(f"--fit-range upper end {hi} exceeds --lmax {args.lmax}")
    if args.undirected:
        curve, fit = undirected_dimension(g, args.lmax, lo, hi)
        extra = {}
    else:
        curve = average_mass(g, args.lmax)
        fit = dimension_fit(curve, lo, hi)
        inverted = average_mass(invert_links(g), args.lmax)
        diff = inverted.masses - curve.masses
        extra = {
            "inverted_mean_mass": inverted.masses.tolist(),
            "inverted_fit": dimension_fit(inverted, lo, hi).to_dict(),
            "max_inversion_discrepancy": float(np.max(np.abs(diff))),
        }
    for w in fit.warnings:
        warnings.warn(w, RuntimeWarning, stacklevel=1)
    with open(f"{args.out}.csv", "w", encoding="utf-8", newline="") as fh:
        curve.write_csv(fh)
    _write_json(f"{args.out}.json", {
        **fit.to_dict(),
        "n_seeds": curve.n_seeds,
        "n_nodes": curve.n_nodes,
        "saturation_mass": curve.saturation_mass,
        "mean_mass": curve.masses.tolist(),
        **extra,
        "config": {"lmax": args.lmax, "fit_range": [lo, hi], "undirected": bool(args.undirected),
                   "edges": str(args.edges)},
    })
    log.info("d = %.4f +- %.4f over l in [%d, %d]", fit.d, fit.stderr, lo, hi)
    return 0


def _read_order(path, n) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        ranked = sorted(((int(r["rank"]), int(r["node"])) for r in reader))
    order = np.array([node for _, node in ranked], dtype=np.int64)
    if order.size != n:
        raise ParameterError(f"order file lists {order.size} nodes, spectrum has n={n}")
    return order


def cmd_eigenstates(args) -> int:
    spec = load_spectrum(args.spectrum, args.vectors)
    if args.order:
        order = _read_order(args.order, spec.n)
    elif args.edges:
        g = read_graph(args.edges)
        if spec.config.get("inverted"):
            g = invert_links(g)
        order = order_by_pagerank(pagerank(build_operator(g, spec.alpha)))
    else:
        raise ParameterError("give --order (pagerank CSV) or --edges to fix the node order")
    profile = par_profile(spec)
    with open(f"{args.out}.par.csv", "w", encoding="utf-8", newline="") as fh:
        profile.write_csv(fh, spec.eigenvalues)
    cells = min(args.cells, spec.n)
    grid = coarse_grain(spec, order, cells, args.max_states)
    with open(f"{args.out}.grid.csv", "w", encoding="utf-8", newline="") as fh:
        grid.write_csv(fh)
    sidecar = {
        "grid": grid.sidecar(),
        "mean_xi_all": profile.mean_all,
        "mean_xi_representatives": profile.mean_representatives,
        "config": {"cells": cells, "max_states": args.max_states, "zoom_cells": args.zoom_cells,
                   "cell_size": args.cell_size, "spectrum": str(args.spectrum)},
    }
    if args.zoom_cells * args.cell_size <= spec.n:
        zoom = zoom_grid(spec, order, args.zoom_cells, args.cell_size, args.max_states)
        with open(f"{args.out}.zoom.csv", "w", encoding="utf-8", newline="") as fh:
            zoom.write_csv(fh)
        sidecar["zoom"] = zoom.sidecar()
    else:
        warnings.warn("zoom window exceeds the network size; zoom grid skipped", RuntimeWarning, stacklevel=1)
    _write_json(f"{args.out}.grid.json", sidecar)
    log.info("<xi> = %.3f over %d states", profile.mean_all, len(spec))
    return 0


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netspectra", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_input(p, inverted=True):
        p.add_argument("edges", help="edge-list file")
        p.add_argument("--labels", help="companion index<TAB>label file")
        if inverted:
            p.add_argument("--inverted", action="store_true", help="reverse every link first (G*)")

    p = sub.add_parser("extract", help="procedure-call network from a C source tree")
    p.add_argument("root")
    p.add_argument("-o", "--out", required=True, help="output prefix")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("generate", help="synthetic test graphs")
    p.add_argument("kind", choices=["chain", "cycle", "grid", "preferential"])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--w", type=int, default=10)
    p.add_argument("--h", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("spectrum", help="eigenvalues of G with |lambda| >= lambda_min")
    graph_input(p)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--lambda-min", type=float, default=0.1)
    p.add_argument("--krylov", type=int, default=600)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-restarts", type=int, default=64)
    p.add_argument("--dense", action="store_true", help="use the dense eigensolver (n <= 2000)")
    p.add_argument("--source", help="label stored in the output metadata")
    p.add_argument("--vectors", help="also write eigenvectors (.npy, one column per eigenvalue)")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("pagerank", help="PageRank vector and ranking")
    graph_input(p)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_pagerank)

    p = sub.add_parser("weyl", help="fractal Weyl exponent from several spectra")
    p.add_argument("spectra", nargs="+")
    p.add_argument("--thresholds", type=_thresholds, default=list(DEFAULT_THRESHOLDS))
    p.add_argument("-o", "--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("dimension", help="cluster-growing dimension")
    graph_input(p)
    p.add_argument("--lmax", type=int, default=DEFAULT_LMAX)
    p.add_argument("--fit-range", type=_fit_range, default=DEFAULT_WINDOW)
    p.add_argument("--undirected", action="store_true")
    p.add_argument("-o", "--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_dimension)

    p = sub.add_parser("eigenstates", help="participation ratios and coarse-grained eigenstates")
    p.add_argument("spectrum")
    p.add_argument("--vectors", required=True)
    p.add_argument("--order", help="pagerank CSV fixing the node order")
    p.add_argument("--edges", help="edge list; PageRank order is computed from it")
    p.add_argument("--cells", type=int, default=DEFAULT_CELLS)
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    p.add_argument("--zoom-cells", type=int, default=300)
    p.add_argument("--cell-size", type=int, default=62)
    p.add_argument("-o", "--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_eigenstates)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (NetSpectraError, OSError) as exc:
        print(f"netspectra {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
