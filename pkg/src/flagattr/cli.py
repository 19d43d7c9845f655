"""Command-line entry point: ``flagattr {projective,flag,bruhat,network,verify}``.

Exit status is 0 on success, 1 when the input is rejected and 2 when a
verification check fails.  Output is deterministic for a given configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .attractors import (
    FlagContext,
    ProjectiveContext,
    attractor_lattice,
    lattice_isomorphism_check,
    partition_check,
)
from .coxeter import DimensionSignature, coset_poset, length
from .errors import FlagAttrError
from .flag import (
    DEFAULT_BUDGET,
    DEFAULT_SEED,
    bruhat_report,
    cell_partition_check,
    default_diag,
    fixed_flags,
    flag_height,
    smale_relation,
    validate_special,
)
from .numerics import DEFAULT_RANK_TOL, hermitian_eigendecompose
from .poset import format_label, hasse_export, to_json_dict
from .projective import component_smale_order, fixed_components, projective_attractor_pairs

COMMANDS = ("projective", "flag", "bruhat", "network", "verify")
EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int
    dims: tuple[int, ...]
    diag: tuple[float, ...]
    seed: int = DEFAULT_SEED
    budget: int = DEFAULT_BUDGET
    samples: int = 1000
    tol: float = DEFAULT_RANK_TOL
    format: str = "text"
    space: str = "flag"
    output: str | None = None

    @property
    def signature(self) -> DimensionSignature:
        return DimensionSignature(self.dims, self.n)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flagattr", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--n", type=int, help="ambient dimension (default: length of --diag)")
    parser.add_argument("--dims", type=_int_list, help="flag signature d_1<...<d_k (default: full flag)")
    parser.add_argument("--diag", type=_float_list,
                        help="flow generator diagonal, or eigenvalues for projective (default: 1,2,4,...)")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="witness candidates per pair")
    parser.add_argument("--samples", type=int, default=1000, help="random flags for cell statistics")
    parser.add_argument("--tol", type=float, default=DEFAULT_RANK_TOL, help="relative rank tolerance")
    parser.add_argument("--format", choices=("text", "json", "dot"), default="text")
    parser.add_argument("--space", choices=("flag", "projective"), default="flag",
                        help="fixed-point data used by the network command")
    parser.add_argument("--output", help="write the report here instead of stdout")
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    a = build_parser().parse_args(argv)
    n = a.n if a.n is not None else (len(a.diag) if a.diag else None)
    if n is None:
        raise UsageError("give --n or --diag")
    if n < 1:
        raise UsageError("--n must be positive")
    if a.diag is not None and len(a.diag) != n:
        raise UsageError(f"--diag has {len(a.diag)} entries but n = {n}")
    dims = a.dims if a.dims is not None else tuple(range(1, n))
    diag = a.diag if a.diag is not None else default_diag(n)
    if a.budget <= 0 or a.samples <= 0 or a.tol <= 0:
        raise UsageError("--budget, --samples and --tol must be positive")
    cfg = RunConfig(a.command, n, dims, diag, a.seed, a.budget, a.samples, a.tol, a.format, a.space, a.output)
    cfg.signature  # validates dims
    return cfg


# --- commands --------------------------------------------------------------


def _labels(xs) -> list[str]:
    return [format_label(x) for x in xs]


def _run_projective(cfg: RunConfig) -> tuple[str, int]:
    phi = hermitian_eigendecompose(np.diag(cfg.diag))
    order = component_smale_order(phi)
    if cfg.format == "dot":
        return hasse_export(order, "dot"), EXIT_OK
    comps = [{"eigenvalue": c.eigenvalue, "dim": c.dim, "height": c.height} for c in fixed_components(phi)]
    pairs = [{"eigenvalue": nu, "attractor_dim": a.shape[1], "repellor_dim": r.shape[1]}
             for nu, a, r in projective_attractor_pairs(phi)]
    lattice = attractor_lattice(ProjectiveContext(phi))
    if cfg.format == "json":
        return _json({
            "components": comps,
            "component_order": to_json_dict(order),
            "attractor_pairs": pairs,
            "attractor_lattice_size": len(lattice),
        }), EXIT_OK
    lines = [f"fixed components: {len(comps)}"]
    lines += [f"  eigenvalue {c['eigenvalue']:g}: dim {c['dim']}, height {c['height']:g}" for c in comps]
    chain = " < ".join(_labels(order.elements))
    lines.append(f"component order (orbits run from larger to smaller label): {chain}")
    lines.append(f"attractor pairs: {len(pairs)}")
    lines += [f"  nu={p['eigenvalue']:g}: dim V+ {p['attractor_dim']}, dim V- {p['repellor_dim']}" for p in pairs]
    lines.append(f"attractor lattice: {len(lattice)} elements")
    return _text(lines), EXIT_OK


def _run_bruhat(cfg: RunConfig) -> tuple[str, int]:
    p = coset_poset(cfg.signature)
    if cfg.format in ("dot", "json"):
        return hasse_export(p, cfg.format) + ("\n" if cfg.format == "json" else ""), EXIT_OK
    lines = [f"coset representatives: {len(p)}", f"order pairs: {len(p.pairs())}",
             f"covers: {len(p.covers())}"]
    lines += [f"  {format_label(w)} (length {length(w)})" for w in p.elements]
    lines.append("cover relations:")
    lines += [f"  {format_label(a)} < {format_label(b)}" for a, b in
              sorted(p.covers(), key=lambda c: (p.index(c[0]), p.index(c[1])))]
    return _text(lines), EXIT_OK


def _run_flag(cfg: RunConfig) -> tuple[str, int]:
    X = validate_special(cfg.diag, cfg.signature)
    cells = cell_partition_check(X, cfg.samples, cfg.seed, cfg.tol)
    rel = smale_relation(X, cfg.budget, cfg.seed, tol=cfg.tol)
    if cfg.format == "dot":
        return hasse_export(rel.closure, "dot"), EXIT_OK
    fixed = [{"rep": format_label(f.rep), "length": length(f.rep), "height": flag_height(X, f.point)}
             for f in fixed_flags(cfg.signature)]
    order = {w: i for i, w in enumerate(rel.fixed)}
    witnesses = [rel.witnesses[p] for p in sorted(rel.witnesses, key=lambda p: (order[p[0]], order[p[1]]))]
    if cfg.format == "json":
        return _json({
            "fixed_flags": fixed,
            "cell_statistics": cells.to_dict(),
            "witnesses": [w.to_dict() for w in witnesses],
            "search": rel.stats,
        }), EXIT_OK
    lines = [f"fixed flags: {len(fixed)}"]
    lines += [f"  {f['rep']}: length {f['length']}, height {f['height']:.6g}" for f in fixed]
    lines += cells.summary_lines()
    lines += [f"  {format_label(a)} -> {format_label(b)}: {c}" for (a, b), c in sorted(cells.counts.items())]
    lines.append(f"witnesses: {len(witnesses)} direct pairs")
    for w in witnesses:
        c = w.construction
        lines.append(f"  {format_label(w.alpha_cell)} -> {format_label(w.omega_cell)}: "
                     f"candidate {c['candidate']} ({c['phase']}, {len(c['entries'])} entries)")
    return _text(lines), EXIT_OK


def _run_network(cfg: RunConfig) -> tuple[str, int]:
    if cfg.space == "projective":
        ctx = ProjectiveContext(hermitian_eigendecompose(np.diag(cfg.diag)))
    else:
        ctx = FlagContext(validate_special(cfg.diag, cfg.signature), cfg.tol)
    lattice = attractor_lattice(ctx)
    if cfg.format == "dot":
        return hasse_export(lattice, "dot"), EXIT_OK
    nodes = list(lattice.nodes)
    index = {u: i for i, u in enumerate(nodes)}
    names = [format_label(u) for u in nodes]
    if cfg.format == "json":
        return _json({
            "fixed_point_order": to_json_dict(ctx.poset),
            "nodes": names,
            "join": [[index[a | b] for b in nodes] for a in nodes],
            "meet": [[index[a & b] for b in nodes] for a in nodes],
            "hasse": to_json_dict(lattice),
        }), EXIT_OK
    lines = [f"attractor lattice: {len(nodes)} upper sets over {len(ctx.poset)} fixed points"]
    lines += [f"  [{i}] {name}" for i, name in enumerate(names)]
    lines.append("hasse diagram:")
    lines += ["  " + line for line in hasse_export(lattice, "dot").splitlines()]
    return _text(lines), EXIT_OK


def _run_verify(cfg: RunConfig) -> tuple[str, int]:
    X = validate_special(cfg.diag, cfg.signature)
    ctx = FlagContext(X, cfg.tol)
    smale = bruhat_report(cfg.signature, smale_relation(X, cfg.budget, cfg.seed, tol=cfg.tol))
    cells = cell_partition_check(X, cfg.samples, cfg.seed, cfg.tol)
    parts = partition_check(ctx, cfg.samples, cfg.seed)
    iso = lattice_isomorphism_check(ctx.poset, ctx)
    reports = [smale, cells, parts, iso]
    ok = all(r.passed for r in reports)
    status = EXIT_OK if ok else EXIT_CHECK
    if cfg.format == "json":
        return _json({
            "passed": ok,
            "smale_bruhat": smale.to_dict(),
            "cell_partition": cells.to_dict(),
            "three_way_partition": parts.to_dict(),
            "lattice_isomorphism": iso.to_dict(),
        }), status
    if cfg.format == "dot":
        raise UsageError("verify has no DOT output")
    lines = [line for r in reports for line in r.summary_lines()]
    lines.append(f"overall: {'PASS' if ok else 'FAIL'}")
    return _text(lines), status


RUNNERS = {
    "projective": _run_projective,
    "flag": _run_flag,
    "bruhat": _run_bruhat,
    "network": _run_network,
    "verify": _run_verify,
}


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _text(lines: list[str]) -> str:
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig) -> tuple[str, int]:
    """Produce the report text and exit status for a validated configuration."""
    return RUNNERS[cfg.command](cfg)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        text, status = run(cfg)
    except (UsageError, FlagAttrError, ValueError) as exc:
        print(f"flagattr: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if status == EXIT_CHECK:
        print("flagattr: verification failed", file=sys.stderr)
    return status
