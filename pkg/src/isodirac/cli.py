"""Command line interface.

    isodirac build    --builtin octahedron
    isodirac spectrum --builtin cycle:4 --refine 6 --operator kirchhoff --output out/
    isodirac deform   --builtin octahedron --g 0,1 --t 0.1,0.5,1 --steps 2000
    isodirac levelset --join octahedron,cycle:7 --values 3 --seed 1
    isodirac stats    --join cycle:4,cycle:4 --values 2 --samples 100 --seed 0
    isodirac verify   --builtin octahedron --claim sphere:2

Reports go to standard output as JSON lines, preceded by one ``{"meta": ...}``
line unless ``--no-meta`` is given. Errors go to standard error as a single
JSON line. ``verify`` exits 0 (claim holds), 1 (refuted) or 2 (search budget
exhausted); other commands exit 1 when a check fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import builtin
from .complex import Complex, ComplexError, barycentric_refine, euler_characteristic, f_vector, join, skeleton_graph, stirling_refinement_matrix
from .deform import GSpec, deformation_report, qr_deform
from .io import complex_to_json, read_complex, write_matrix_csv, write_spectrum_csv
from .potts import betti_statistics, interface_record, random_coloring
from .spectral import DEFAULT_TOL, dirac, hodge, ids_sup_distance, l1_distance, spectrum, supertrace
from .topology import DEFAULT_BUDGET, TopologySearch, UndecidedError, _deep

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would print usage text
        _emit_error("usage", message)
        sys.exit(EXIT_ERROR)


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


@dataclass
class RunConfig:
    command: str
    builtin: str | None = None
    input: str | None = None
    join: str | None = None
    dim: int | None = None
    close: bool = False
    output: str | None = None
    refine: int = 0
    operator: str = "kirchhoff"
    max_size: int = 6000
    g: tuple[float, ...] = (0.0, 1.0)
    t: tuple[float, ...] = (1.0,)
    steps: int | None = None
    values: int = 2
    samples: int = 1
    seed: int | None = 0
    tol: float = DEFAULT_TOL
    threads: int = 1
    budget: int = DEFAULT_BUDGET
    claim: str | None = None
    manifold_dim: int | None = None
    no_meta: bool = False

    def validate(self) -> None:
        sources = [s for s in (self.builtin, self.input, self.join) if s]
        if len(sources) != 1:
            raise CLIError("give exactly one of --builtin, --input, --join")
        if self.refine < 0:
            raise CLIError("--refine must be >= 0")
        if self.operator not in ("kirchhoff", "hodge", "dirac"):
            raise CLIError(f"unknown operator {self.operator!r}")
        if self.steps is not None and self.steps < 1:
            raise CLIError("--steps must be >= 1")
        if self.values < 1:
            raise CLIError("--values must be >= 1")
        if self.samples < 1:
            raise CLIError("--samples must be >= 1")
        if self.tol <= 0:
            raise CLIError("--tol must be positive")
        if self.threads < 1:
            raise CLIError("--threads must be >= 1")

    def load(self) -> Complex:
        if self.builtin:
            return builtin(self.builtin, self.dim)
        if self.join:
            parts = [builtin(p, self.dim) for p in self.join.split(",")]
            out = parts[0]
            for p in parts[1:]:
                out = join(out, p)
            return out
        return read_complex(self.input, close=self.close)


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("source")
    src.add_argument("--builtin", help="octahedron, icosahedron, cross-polytope[:d], cycle:n, complete:n, point, sphere0, A*B")
    src.add_argument("--input", help="complex JSON (.json) or graph edge list")
    src.add_argument("--join", help="comma-separated builtins to join, e.g. octahedron,cycle:7")
    src.add_argument("--dim", type=int, help="dimension for cross-polytope")
    src.add_argument("--close", action="store_true", help="take the downward closure of JSON input")
    common.add_argument("--output", help="output file (build) or directory (spectrum, deform)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="topology search node budget")
    common.add_argument("--no-meta", action="store_true", help="omit the timestamped header line")

    p = _Parser(prog="isodirac", description="Dirac deformations, refinement spectra and level-set manifolds")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("build", parents=[common], help="print a complex with its f-vector and Euler characteristic")

    for name in ("spectrum", "dos"):
        s = sub.add_parser(name, parents=[common], help="spectra along Barycentric refinements")
        s.add_argument("--refine", type=int, default=0)
        s.add_argument("--operator", default="kirchhoff", choices=["kirchhoff", "hodge", "dirac"])
        s.add_argument("--max-size", type=int, default=6000, help="refuse dense eigensolves above this size")

    d = sub.add_parser("deform", parents=[common], help="isospectral QR deformation report")
    d.add_argument("--g", type=_floats, default=(0.0, 1.0), help="polynomial coefficients c0,c1,...")
    d.add_argument("--t", type=_floats, default=(1.0,), help="comma-separated times")
    d.add_argument("--steps", type=int, help="also integrate the Lax ODE with this many RK4 steps")

    for name in ("levelset", "stats"):
        s = sub.add_parser(name, parents=[common], help="level-set interfaces of random colourings")
        s.add_argument("--values", type=int, default=2, help="number of colour values (codimension values-1)")
        s.add_argument("--manifold-dim", type=int, help="host manifold dimension (default: complex dimension)")
        if name == "stats":
            s.add_argument("--samples", type=int, default=1)

    v = sub.add_parser("verify", parents=[common], help="check manifold:m, sphere:d or contractible")
    v.add_argument("--claim", required=True)
    return p


def _config(args: argparse.Namespace) -> RunConfig:
    known = {f for f in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in known})
    cfg.validate()
    return cfg


class _Out:
    def __init__(self, cfg: RunConfig, stream=None):
        self.stream = stream or sys.stdout
        self.meta = None
        if not cfg.no_meta:
            self.meta = {"tool": "isodirac", "version": __version__, "command": cfg.command,
                         "time": time.strftime("%Y-%m-%dT%H:%M:%S%z")}

    def line(self, record: dict) -> None:
        # the header goes out with the first report line, so failed runs print nothing
        if self.meta is not None:
            self.stream.write(json.dumps({"meta": self.meta}) + "\n")
            self.meta = None
        self.stream.write(json.dumps(record) + "\n")


def cmd_build(cfg: RunConfig, out: _Out) -> int:
    c = cfg.load()
    record = complex_to_json(c) | {"f_vector": list(f_vector(c)), "chi": euler_characteristic(c)}
    if cfg.output:
        Path(cfg.output).write_text(json.dumps(complex_to_json(c)) + "\n")
    out.line(record)
    return EXIT_OK


def _operator_matrix(c: Complex, operator: str) -> np.ndarray:
    if operator == "kirchhoff":
        return skeleton_graph(c)[0].kirchhoff()
    if operator == "dirac":
        return dirac(c).entries
    D = dirac(c).entries
    return D @ D


def _operator_size(c_f: list[int], operator: str) -> int:
    return c_f[0] if operator == "kirchhoff" else sum(c_f)


def cmd_spectrum(cfg: RunConfig, out: _Out) -> int:
    c = cfg.load()
    q = c.dim
    outdir = Path(cfg.output) if cfg.output else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    spectra = []
    for gen in range(cfg.refine + 1):
        size = _operator_size(list(f_vector(c)), cfg.operator)
        if size > cfg.max_size:
            raise CLIError(f"generation {gen} needs a {size}x{size} eigensolve, above --max-size {cfg.max_size}")
        vals = spectrum(_operator_matrix(c, cfg.operator))
        if outdir:
            write_spectrum_csv(outdir / f"gen_{gen}.csv", vals)
        record = {"generation": gen, "n": len(vals), "f_vector": list(f_vector(c)), "chi": euler_characteristic(c),
                  "lambda_max": float(vals[-1])}
        if spectra:
            record["l1_to_previous"] = l1_distance(spectra[-1], vals)
        if q == 1 and cfg.operator == "kirchhoff":
            record["sup_arcsin"] = ids_sup_distance(vals)
        if cfg.operator == "hodge":
            record["supertrace_t1"] = _hodge_supertrace(c)
        spectra.append(vals)
        out.line(record)
        if gen < cfg.refine:
            predicted = (stirling_refinement_matrix(q) @ np.array(f_vector(c))).tolist()
            if _operator_size(predicted, cfg.operator) > cfg.max_size:
                raise CLIError(f"generation {gen + 1} would need size {_operator_size(predicted, cfg.operator)}, above --max-size {cfg.max_size}")
            c = barycentric_refine(c)
    dists = [l1_distance(a, b) for a, b in zip(spectra[:-1], spectra[1:])]
    summary = {"l1_distances": dists, "ratios": [b / a if a else None for a, b in zip(dists[:-1], dists[1:])]}
    out.line({"summary": summary})
    return EXIT_OK


def _hodge_supertrace(c: Complex) -> float:
    return supertrace(hodge(c), 1.0)


def cmd_deform(cfg: RunConfig, out: _Out) -> int:
    c = cfg.load()
    D0 = dirac(c)
    g = GSpec(cfg.g)
    outdir = Path(cfg.output) if cfg.output else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    chi = euler_characteristic(c)
    status = EXIT_OK
    for t in cfg.t:
        record = deformation_report(D0, g, t, steps=cfg.steps, tol=cfg.tol)
        record["chi"] = chi
        record["ok"] = bool(
            record["spectral_drift"] <= 1e-8
            and record["band_leakage"] <= 1e-9
            and record["cc_max"] <= 1e-8
            and record["betti_ok"] is not False
            and abs(record["mckean_singer"] - chi) <= 1e-8
        )
        if not record["ok"]:
            status = EXIT_FAIL
        if outdir:
            write_matrix_csv(outdir / f"D_t{t!r}.csv", qr_deform(D0, g, t).D)
        out.line(record)
    return status


def _host_dim(cfg: RunConfig, c: Complex) -> int:
    return cfg.manifold_dim if cfg.manifold_dim is not None else c.dim


def cmd_levelset(cfg: RunConfig, out: _Out) -> int:
    c = cfg.load()
    k = cfg.values - 1
    f = random_coloring(c, k, cfg.seed)
    rec = interface_record(c, f, cfg.tol, _host_dim(cfg, c))
    rec["codimension"] = k
    out.line(rec)
    return EXIT_FAIL if rec["status"] == "violation" or not rec["gauss_bonnet_ok"] else EXIT_OK


def cmd_stats(cfg: RunConfig, out: _Out) -> int:
    c = cfg.load()
    k = cfg.values - 1
    stats = betti_statistics(c, k, cfg.samples, cfg.seed, cfg.tol, cfg.threads, _host_dim(cfg, c))
    for rec in stats.records:
        out.line(rec)
    violations = sum(r["status"] == "violation" for r in stats.records)
    gb_fail = sum(not r["gauss_bonnet_ok"] for r in stats.records)
    out.line({"summary": {"samples": cfg.samples, "codimension": k, "mean_betti": list(stats.mean),
                          "empty": stats.empty_count, "violations": violations, "gauss_bonnet_failures": gb_fail}})
    return EXIT_FAIL if violations or gb_fail else EXIT_OK


def cmd_verify(cfg: RunConfig, out: _Out) -> int:
    c = cfg.load()
    g, _ = skeleton_graph(c)
    kind, _, arg = cfg.claim.partition(":")
    search = TopologySearch(g, cfg.budget)
    V = frozenset(range(g.n))
    if kind == "manifold":
        fn = lambda: search.manifold(V, int(arg))  # noqa: E731
    elif kind == "sphere":
        fn = lambda: search.sphere(V, int(arg))  # noqa: E731
    elif kind == "contractible":
        fn = lambda: search.contractible(V)  # noqa: E731
    else:
        raise CLIError(f"unknown claim {cfg.claim!r}")
    try:
        holds = _deep(fn, g.n)
    except UndecidedError as exc:
        out.line({"claim": cfg.claim, "result": "undecided", "nodes": search.nodes, "message": str(exc)})
        return EXIT_ERROR
    out.line({"claim": cfg.claim, "result": "verified" if holds else "refuted", "nodes": search.nodes})
    return EXIT_OK if holds else EXIT_FAIL


COMMANDS = {
    "build": cmd_build,
    "spectrum": cmd_spectrum,
    "dos": cmd_spectrum,
    "deform": cmd_deform,
    "levelset": cmd_levelset,
    "stats": cmd_stats,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        out = _Out(cfg)
        return COMMANDS[cfg.command](cfg, out)
    except (CLIError, ComplexError, ValueError, OSError, np.linalg.LinAlgError, UndecidedError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
