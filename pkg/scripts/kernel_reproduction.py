#!/usr/bin/env python3
"""Reproduce the Linux kernel results from unpacked source trees.

Not part of the test suite: it needs the kernel sources (about 1-2 GB
unpacked for ten versions) and several hours of eigensolver time for the
2.6 tree.  Fetch the tarballs from https://cdn.kernel.org/pub/linux/kernel/
and unpack them, then run:

    python3 scripts/kernel_reproduction.py --kernels KERNEL_DIR --work WORK_DIR

KERNEL_DIR must hold one directory per version named linux-<version>,
for example linux-1.0, linux-2.0.40, linux-2.4.37.6, linux-2.6.32.  Versions
that are missing are reported and skipped.  Intermediate graphs and
spectra are cached in WORK_DIR, so an interrupted run resumes.

Checks (tolerances are loose because the original extraction rules were
never published):
  * node counts within a factor 2 of 14079, 85756 and 285509 for
    2.0.40, 2.4.37.6 and 2.6.32
  * Weyl exponent over the version family: nu = 0.63 +- 0.07 for G and
    0.65 +- 0.07 for G* (cutoff |lambda| > 0.1)
  * directed dimension 1.3 <= d <= 1.45 for versions up to 2.3
  * degeneracy at lambda = alpha of order 10^2 for 2.6 (reference 116)
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from netspectra.callgraph import ExtractOptions, extract_pcn
from netspectra.fracdim import average_mass, dimension_fit
from netspectra.gmatrix import build_operator
from netspectra.graph import invert_links, read_graph, write_graph
from netspectra.spectral import arnoldi_spectrum, load_spectrum, save_spectrum
from netspectra.weyl import count_eigenvalues, degeneracy_census, weyl_fit

FAMILY = ["1.0", "1.1.95", "1.2.13", "1.3.100", "2.0.40", "2.1.132", "2.2.26", "2.3.99-pre9", "2.4.37.6", "2.6.32"]
REFERENCE_N = {"2.0.40": 14079, "2.4.37.6": 85756, "2.6.32": 285509}
ALPHA = 0.85
LAMBDA_MIN = 0.1

log = logging.getLogger("kernel_reproduction")


def graph_for(version, kernels: Path, work: Path, workers: int):
    edges, labels = work / f"{version}.edges", work / f"{version}.labels"
    if not edges.exists():
        g, report = extract_pcn(kernels / f"linux-{version}", ExtractOptions(workers=workers))
        write_graph(g, edges, labels)
        (work / f"{version}.report.json").write_text(json.dumps(report.to_dict(), indent=1))
    return read_graph(edges, labels)


def spectrum_for(g, tag, work: Path, krylov: int):
    path = work / f"{tag}.spectrum.json"
    if path.exists():
        return load_spectrum(path)
    spec = arnoldi_spectrum(build_operator(g, ALPHA), LAMBDA_MIN, min(krylov, g.n_nodes), source=tag,
                            keep_vectors=False)
    save_spectrum(spec, path)
    return spec


def check(name, ok, detail, results):
    results.append(ok)
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kernels", type=Path, required=True)
    ap.add_argument("--work", type=Path, required=True)
    ap.add_argument("--krylov", type=int, default=600)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--skip-spectra", action="store_true", help="only extraction and dimension checks")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.work.mkdir(parents=True, exist_ok=True)

    versions = [v for v in FAMILY if (args.kernels / f"linux-{v}").is_dir()]
    missing = sorted(set(FAMILY) - set(versions))
    if missing:
        log.warning("missing source trees: %s", ", ".join(missing))
    if not versions:
        return 2

    results = []
    graphs = {}
    for v in versions:
        graphs[v] = graph_for(v, args.kernels, args.work, args.workers)
        log.info("%s: N=%d, edges=%d", v, graphs[v].n_nodes, graphs[v].n_edges)

    for v, ref in REFERENCE_N.items():
        if v in graphs:
            n = graphs[v].n_nodes
            check(f"node count {v}", ref / 2 <= n <= 2 * ref, f"N={n} (reference {ref})", results)

    for v in versions:
        if v < "2.4":
            fit = dimension_fit(average_mass(graphs[v], 30), 1, 10)
            check(f"dimension {v}", 1.3 <= fit.d <= 1.45, f"d={fit.d:.3f} +- {fit.stderr:.3f}", results)

    if not args.skip_spectra and len(versions) >= 2:
        for label, transform, target in (("G", lambda g: g, 0.63), ("G*", invert_links, 0.65)):
            points = []
            for v in versions:
                tag = v if label == "G" else f"{v}.inverted"
                spec = spectrum_for(transform(graphs[v]), tag, args.work, args.krylov)
                points.append((spec.n, count_eigenvalues(spec, LAMBDA_MIN)))
                if label == "G" and v.startswith("2.6"):
                    deg = dict(degeneracy_census(spec, m_max=1))[1]
                    check(f"degeneracy at alpha, {v}", 30 <= deg <= 300, f"{deg} (reference 116)", results)
            fit = weyl_fit(points, LAMBDA_MIN)
            check(f"Weyl exponent {label}", abs(fit.nu - target) <= 0.07,
                  f"nu={fit.nu:.3f} +- {fit.stderr:.3f} (target {target} +- 0.07)", results)

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
