"""Command-line front door.

Exit status taxonomy: 0 success, 2 usage error, 3 resource cap exceeded,
4 forced-identity failure (mirror antisymmetry or kernel mirror stability).
The nilpotency audit is informational and never gates the exit status.
"""

from __future__ import annotations

import json
import sys

import click

from .cartan import CartanDatum, CartanError
from .chevalley import algebra, killing_determinant_sign, serialize_table
from .kernels import (
    kernel_of_constrained,
    mirror_stability_check,
    tension_report,
)
from .operators import (
    delta_classical,
    delta_constrained,
    generator_formula_agreement,
    nilpotency_audit,
    verify_mirror,
)
from .presets import describe_lambda, parse_lambda_spec
from .reports import RunManifest, build_report, write_csv, write_report
from .sym import ResourceCapExceeded
from .torus import CellComplex, degenerate_cohomology
from .varsolve import (
    FieldConfig,
    LatticeBundle,
    SolverConfig,
    Weights,
    cartan_residual,
    certify_compatible_pair,
    minimize,
    random_bundle_and_config,
)

EXIT_RESOURCE_CAP = 3
EXIT_FORCED_IDENTITY = 4


def _load_algebra(label: str):
    try:
        CartanDatum.from_label(label)
    except CartanError as exc:
        raise click.UsageError(str(exc)) from exc
    return algebra(label)


@click.group()
@click.option("--max-dim", type=int, default=10_000_000, show_default=True,
              help="Cap on symmetric-power basis sizes.")
@click.option("--threads", type=int, default=1, show_default=True,
              help="Worker count; results are identical for any value.")
@click.pass_context
def main(ctx: click.Context, max_dim: int, threads: int) -> None:
    """Spencer operator computations over exact rationals."""
    ctx.obj = {"max_dim": max_dim, "threads": threads}


@main.group()
def lie() -> None:
    """Lie algebra tables."""


@lie.command("info")
@click.option("--algebra", "label", required=True, help="Algebra label, e.g. A1, E7.")
@click.option("--out", "out_path", type=click.Path(writable=True), default=None)
@click.option("--table", "table_path", type=click.Path(writable=True), default=None,
              help="Also write the full serialized bracket table to this path.")
def lie_info(label: str, out_path: str | None, table_path: str | None) -> None:
    """Dimension, root count, Killing determinant sign, Jacobi verdict."""
    alg = _load_algebra(label)
    body = {
        "algebra": alg.label,
        "dim": alg.dim,
        "rank": alg.rank,
        "positive_roots": alg.n_positive,
        "root_count": alg.root_system.root_count,
        "killing_det_sign": killing_determinant_sign(alg),
        "jacobi_holds": alg.jacobi_checked,
        "basis_labels": list(alg.basis_labels),
    }
    manifest = RunManifest("lie-info", {"algebra": label}, algebra=label)
    write_report(build_report(manifest, body), out_path)
    if table_path:
        with open(table_path, "w", encoding="utf-8") as fh:
            json.dump(serialize_table(alg), fh, sort_keys=True, indent=1)


def _lambda_option(alg, spec: str):
    try:
        return parse_lambda_spec(alg, spec)
    except (ValueError, OSError) as exc:
        raise click.UsageError(str(exc)) from exc


@main.command()
@click.option("--algebra", "label", required=True)
@click.option("--k", type=int, required=True)
@click.option("--variant", type=click.Choice(["classical", "constrained", "equivalent"]),
              default="constrained", show_default=True)
@click.option("--lambda", "lam_spec", default="preset:zero", show_default=True)
@click.option("--out", "out_path", type=click.Path(writable=True), default=None)
@click.option("--mm", "mm_path", type=click.Path(writable=True), default=None,
              help="Write the matrix in Matrix Market coordinate format.")
@click.pass_context
def matrix(ctx, label: str, k: int, variant: str, lam_spec: str,
           out_path: str | None, mm_path: str | None) -> None:
    """Assemble a Spencer operator matrix."""
    alg = _load_algebra(label)
    cap = ctx.obj["max_dim"]
    try:
        if variant == "classical":
            mat = delta_classical(alg, k, cap)
        else:
            lam = _lambda_option(alg, lam_spec)
            formula = "symmetrized" if variant == "constrained" else "equivalent"
            mat = delta_constrained(alg, lam, k, cap, formula=formula)
    except ResourceCapExceeded as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_RESOURCE_CAP)
    body = {
        "algebra": alg.label,
        "variant": mat.variant,
        "k_from": mat.k_from,
        "k_to": mat.k_to,
        "nrows": mat.nrows,
        "ncols": mat.ncols,
        "nnz": mat.nnz(),
        "lambda": describe_lambda(mat.lam) if mat.lam is not None else None,
    }
    manifest = RunManifest(
        "spencer-matrix",
        {"algebra": label, "k": k, "variant": variant, "lambda": lam_spec},
        algebra=label,
    )
    write_report(build_report(manifest, body), out_path)
    if mm_path:
        with open(mm_path, "w", encoding="utf-8") as fh:
            fh.write(mat.to_matrix_market())


@main.command()
@click.option("--algebra", "label", required=True)
@click.option("--k", type=int, required=True)
@click.option("--lambda", "lam_spec", required=True)
@click.option("--out", "out_path", type=click.Path(writable=True), default=None)
@click.option("--csv", "csv_path", type=click.Path(writable=True), default=None)
@click.option("--basis/--no-basis", default=False, show_default=True,
              help="Include the kernel basis in the report body.")
@click.option("--decompose/--no-decompose", default=False, show_default=True,
              help="Attach module-structure verdicts and the irrep decomposition.")
@click.pass_context
def kernel(ctx, label: str, k: int, lam_spec: str, out_path: str | None,
           csv_path: str | None, basis: bool, decompose: bool) -> None:
    """Exact nullspace of the constraint-coupled operator."""
    alg = _load_algebra(label)
    lam = _lambda_option(alg, lam_spec)
    try:
        kb, cert = kernel_of_constrained(alg, lam, k, ctx.obj["max_dim"])
    except ResourceCapExceeded as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_RESOURCE_CAP)
    body = {
        "algebra": alg.label,
        "k": k,
        "lambda": describe_lambda(lam),
        "kernel_dim": kb.dim,
        "certificate": cert.as_dict(),
    }
    if basis:
        body["kernel_basis"] = [el.serialize() for el in kb.basis]
    if decompose:
        from .repdecomp import decompose_character, is_g_submodule, weight_decomposition

        sub = is_g_submodule(alg, kb)
        wd = weight_decomposition(alg, kb)
        block = {
            "is_submodule": sub["is_submodule"],
            "violation_count": sub["violation_count"],
            "weights": wd["weights"],
            "graded": wd["graded"],
            # decomposition below a failed module check is advisory: the
            # module-forcing hypothesis is violated for this kernel
            "advisory": not sub["is_submodule"],
        }
        if wd["graded"]:
            try:
                summands = decompose_character(alg, [tuple(w) for w in wd["multiset"]])
                block["summands"] = [s.as_dict() for s in summands]
            except ValueError as exc:
                block["summands"] = None
                block["decomposition_error"] = str(exc)
        else:
            block["summands"] = None
            block["decomposition_error"] = "kernel is not weight-graded"
        body["decomposition"] = block
    manifest = RunManifest(
        "spencer-kernel", {"algebra": label, "k": k, "lambda": lam_spec}, algebra=label
    )
    write_report(build_report(manifest, body), out_path)
    if csv_path:
        rows = [
            {"prime": p, "modular_rank": r}
            for p, r in zip(cert.primes_used, cert.modular_ranks)
        ] or [{"prime": "", "modular_rank": cert.rank}]
        write_csv(rows, csv_path)


@main.command()
@click.option("--algebra", "label", required=True)
@click.option("--lambda", "lam_spec", required=True)
@click.option("--k-min", type=int, default=1, show_default=True)
@click.option("--k-max", type=int, default=2, show_default=True)
@click.option("--out", "out_path", type=click.Path(writable=True), default=None)
@click.pass_context
def verify(ctx, label: str, lam_spec: str, k_min: int, k_max: int,
           out_path: str | None) -> None:
    """Mirror antisymmetry, kernel mirror stability, and nilpotency audits.

    Exit 0 only when every forced identity that ran holds; a forced audit
    blocked by the resource cap exits 3.  Nilpotency results never gate.
    """
    alg = _load_algebra(label)
    lam = _lambda_option(alg, lam_spec)
    cap = ctx.obj["max_dim"]
    audits = [{"kind": "generator-formula-agreement",
               **generator_formula_agreement(alg, lam)}]
    forced_ok = True
    forced_capped = False
    for k in range(k_min, k_max + 1):
        try:
            mirror = verify_mirror(alg, lam, k, cap)
            audits.append({"kind": "mirror-antisymmetry", **mirror})
            forced_ok = forced_ok and mirror["holds"]
        except ResourceCapExceeded as exc:
            audits.append({"kind": "mirror-antisymmetry", "k": k, "skipped": str(exc)})
            forced_capped = True
        try:
            stability = mirror_stability_check(alg, lam, k, cap)
            audits.append({"kind": "kernel-mirror-stability", **stability})
            forced_ok = forced_ok and stability["kernels_equal"]
        except ResourceCapExceeded as exc:
            audits.append({"kind": "kernel-mirror-stability", "k": k, "skipped": str(exc)})
            forced_capped = True
        try:
            nil = nilpotency_audit(alg, lam, k, cap)
            audits.append({"kind": "nilpotency", **nil})
        except ResourceCapExceeded as exc:
            audits.append({"kind": "nilpotency", "k": k, "skipped": str(exc)})
    body = {
        "algebra": alg.label,
        "lambda": describe_lambda(lam),
        "audits": audits,
        "forced_identities_hold": forced_ok,
        "forced_audit_capped": forced_capped,
    }
    manifest = RunManifest(
        "spencer-verify",
        {"algebra": label, "lambda": lam_spec, "k_min": k_min, "k_max": k_max},
        algebra=label,
    )
    write_report(build_report(manifest, body), out_path)
    if not forced_ok:
        sys.exit(EXIT_FORCED_IDENTITY)
    if forced_capped:
        sys.exit(EXIT_RESOURCE_CAP)


@main.command()
@click.option("--torus", "torus_dim", type=int, default=2, show_default=True)
@click.option("--n", "subdivisions", type=int, default=4, show_default=True)
@click.option("--algebra", "label", required=True)
@click.option("--k", type=int, required=True)
@click.option("--lambda", "lam_spec", required=True)
@click.option("--out", "out_path", type=click.Path(writable=True), default=None)
@click.option("--csv", "csv_path", type=click.Path(writable=True), default=None)
@click.pass_context
def cohomology(ctx, torus_dim: int, subdivisions: int, label: str, k: int,
               lam_spec: str, out_path: str | None, csv_path: str | None) -> None:
    """Degenerate-complex cohomology over a cubical torus."""
    alg = _load_algebra(label)
    lam = _lambda_option(alg, lam_spec)
    complex_ = CellComplex.torus(torus_dim, subdivisions)
    try:
        rep = degenerate_cohomology(alg, lam, k, complex_, cap=ctx.obj["max_dim"])
    except ResourceCapExceeded as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_RESOURCE_CAP)
    body = rep.as_dict()
    manifest = RunManifest(
        "spencer-cohomology",
        {
            "torus": torus_dim, "n": subdivisions, "algebra": label,
            "k": k, "lambda": lam_spec,
        },
        algebra=label,
    )
    write_report(build_report(manifest, body), out_path)
    if csv_path:
        rows = [
            {"degree": p, "betti": rep.betti[p], "degenerate_dim": rep.degenerate_dims[p]}
            for p in range(len(rep.betti))
        ]
        write_csv(rows, csv_path)


@main.command()
@click.option("--algebra", "label", required=True)
@click.option("--h11", type=int, required=True)
@click.option("--kernel-dim", "kernel_dim", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(writable=True), default=None)
def tension(label: str, h11: int, kernel_dim: int | None, out_path: str | None) -> None:
    """Dimension-tension verdict from the minimal-irrep and h11 bounds."""
    try:
        CartanDatum.from_label(label)
        rep = tension_report(label, h11, kernel_dim)
    except (CartanError, ValueError) as exc:
        raise click.UsageError(str(exc)) from exc
    manifest = RunManifest(
        "tension", {"algebra": label, "h11": h11, "kernel_dim": kernel_dim}, algebra=label
    )
    write_report(build_report(manifest, rep.as_dict()), out_path)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out", "trace_path", type=click.Path(writable=True), default=None,
              help="Per-iteration energy breakdown CSV.")
@click.option("--json", "json_path", type=click.Path(writable=True), default=None,
              help="Write the JSON report here instead of stdout.")
def varsolve(config_path: str, trace_path: str | None, json_path: str | None) -> None:
    """Minimize the penalized energy for a configured lattice instance."""
    with open(config_path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    label = cfg.get("algebra", "A1")
    alg = _load_algebra(label)
    lattice = cfg.get("lattice", {})
    d = int(lattice.get("d", 2))
    n = int(lattice.get("n", 4))
    seed = int(cfg.get("seed", 0))
    wcfg = cfg.get("weights", {})
    weights = Weights(
        alpha1=float(wcfg.get("alpha1", 1.0)),
        alpha2=float(wcfg.get("alpha2", 0.0)),
        alpha3=float(wcfg.get("alpha3", 1.0)),
        bound_c=float(wcfg.get("C", 1.0)),
    )
    scfg = cfg.get("solver", {})
    solver = SolverConfig(
        step=float(scfg.get("step", 0.1)),
        max_iters=int(scfg.get("max_iters", 2000)),
        tol=float(scfg.get("tol", 1e-8)),
    )
    omega_cfg = cfg.get("omega", {"mode": "random", "scale": 0.3})
    if omega_cfg.get("mode") == "zero":
        bundle = LatticeBundle(d, n, alg)
        import numpy as np

        rng = np.random.default_rng(seed)
        config0 = FieldConfig(
            float(cfg.get("lambda_scale", 0.5)) * rng.standard_normal((bundle.n_nodes, alg.dim))
        )
    else:
        bundle, config0 = random_bundle_and_config(
            alg, d, n, seed,
            omega_scale=float(omega_cfg.get("scale", 0.3)),
            lam_scale=float(cfg.get("lambda_scale", 0.5)),
        )
    final, trace = minimize(bundle, config0, weights, solver)
    certs = certify_compatible_pair(bundle, final)
    last = trace[-1]
    body = {
        "algebra": alg.label,
        "lattice": {"d": d, "n": n},
        "seed": seed,
        "iterations": len(trace) - 1,
        "converged": last.grad_norm < solver.tol,
        "final": {
            "energy": last.breakdown.as_dict(),
            "grad_norm": last.grad_norm,
            "cartan_residual": cartan_residual(bundle, final),
        },
        "start": {"energy": trace[0].breakdown.as_dict()},
        "monotone": all(
            trace[i + 1].breakdown.total <= trace[i].breakdown.total
            for i in range(len(trace) - 1)
        ),
        "node_certificates": [c.as_dict() for c in certs],
    }
    manifest = RunManifest("varsolve", {"config": cfg}, algebra=label, seeds=[seed])
    write_report(build_report(manifest, body), json_path)
    if trace_path:
        rows = [
            {
                "iteration": row.iteration,
                "total": repr(row.breakdown.total),
                "main": repr(row.breakdown.main),
                "pen1": repr(row.breakdown.pen1),
                "pen3": repr(row.breakdown.pen3),
                "grad_norm": repr(row.grad_norm),
                "step": repr(row.step),
            }
            for row in trace
        ]
        write_csv(rows, trace_path)


if __name__ == "__main__":
    main()
