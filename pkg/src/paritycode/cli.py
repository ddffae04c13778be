"""``paritycode`` command line.

Exit status: 0 success, 1 validation failure (bad input, failed check),
2 solver failure (non-convergence, dimension cap).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .codes import verify_code
from .conditions import check_conditions
from .errors import DimensionCapError, ParityCodeError, SolverError
from .gadgets import audit_ancilla_counts, format_audit
from .io import dump_code, dump_program, load_custom_code, load_model
from .layouts import build_square_lattice, build_tree_code, build_triangular_lattice
from .metrics import metric_chi
from .oracles import brute_force_logical_ground
from .program import VARIANTS, compile_program
from .spectral import DEFAULT_DRIVER_SIGN, AnnealSchedule, anneal_gap_profile, assemble, lowest_eigs
from .sweep import ExperimentConfig, default_r_grid, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


class CheckFailed(Exception):
    """A verification ran but did not pass."""


def _nu_policy(raw: str) -> str:
    return {"even": "all_even", "odd": "all_odd"}.get(raw, raw)


def _parse_tree(raw: str) -> list[tuple[int, int]]:
    edges = []
    for part in raw.split(","):
        a, b = part.strip().split("-")
        edges.append((int(a), int(b)))
    return edges


def _delta(delta: float | None, R: float | None, J: float) -> float:
    if delta is not None and R is not None:
        raise click.UsageError("give either --Delta or --R, not both")
    if R is not None:
        return R * J / 2
    return 1.0 if delta is None else delta


def _program(code_path, model_path, variant, delta, R, J, ratio):
    code = load_custom_code(Path(code_path))
    model = load_model(Path(model_path))
    return code, model, compile_program(model, code, variant, _delta(delta, R, J), ratio)


code_opt = click.option("--code", "code_path", required=True, type=click.Path(exists=True, dir_okay=False))
model_opt = click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
variant_opt = click.option("--variant", type=click.Choice(VARIANTS), default="formal", show_default=True)
delta_opts = [
    click.option("--Delta", "delta", type=float, default=None, help="penalty scale (default 1)"),
    click.option("--R", "R", type=float, default=None, help="Delta / J_av with J_av = J/2"),
    click.option("--J", "J", type=float, default=1.0, show_default=True, help="instance scale for --R"),
    click.option("--ratio", type=float, default=2.0, show_default=True, help="odd_qubit coupling ratio"),
]


def with_options(opts):
    def wrap(f):
        for o in reversed(opts):
            f = o(f)
        return f

    return wrap


@click.group()
def cli() -> None:
    """Design, compile and spectrally validate parity-constraint encodings."""


@cli.command()
@click.option("--square", type=int, help="square lattice with N logical spins")
@click.option("--triangular", type=int, help="triangular lattice with N logical spins")
@click.option("--tree", help="tree code from edges, e.g. '1-2,1-3,2-4'")
@click.option("--nu", default="even", show_default=True, help="even | odd | all_even | all_odd")
@click.option("--out", type=click.Path(dir_okay=False), help="write the code file here")
def design(square, triangular, tree, nu, out):
    """Build a built-in layout and write it as a code file."""
    chosen = [x for x in (square, triangular, tree) if x is not None]
    if len(chosen) != 1:
        raise click.UsageError("choose exactly one of --square, --triangular, --tree")
    policy = _nu_policy(nu)
    if square is not None:
        code = build_square_lattice(square, policy)
    elif triangular is not None:
        code = build_triangular_lattice(triangular, policy)
    else:
        code = build_tree_code(_parse_tree(tree), policy)
    text = dump_code(code, out)
    if out is None:
        click.echo(text)
    click.echo(f"{code.name}: {code.n_spins} spins, {code.n_stabilisers} stabilisers", err=out is None)


@cli.command()
@code_opt
def verify(code_path):
    """Check counts, independence, logical X relations and label agreement."""
    code = load_custom_code(Path(code_path))
    report = verify_code(code)
    for line in report.lines():
        click.echo(line)
    for p, lab in enumerate(code.labels):
        click.echo(f"  {code.spins[p]!s:>12}  label {sorted(lab.subset)}  mu {lab.mu:+d}")
    if not report.passed:
        raise CheckFailed("verification failed")


@cli.command(name="compile")
@code_opt
@model_opt
@variant_opt
@with_options(delta_opts)
@click.option("--out", type=click.Path(dir_okay=False))
def compile_cmd(code_path, model_path, variant, delta, R, J, ratio, out):
    """Compile a model onto a code; prints or writes the program as JSON."""
    _, _, program = _program(code_path, model_path, variant, delta, R, J, ratio)
    text = dump_program(program, out)
    if out is None:
        click.echo(text)
    else:
        click.echo(f"{program.variant}: {len(program.sites)} sites, dimension {program.total_dim}")


@cli.command()
@code_opt
@model_opt
@variant_opt
@with_options(delta_opts)
@click.option("--s", "s", type=float, default=1.0, show_default=True)
@click.option("--k", type=int, default=8, show_default=True)
@click.option("--driver-sign", type=click.Choice(["-1", "1"]), default=str(DEFAULT_DRIVER_SIGN), show_default=True)
def spectrum(code_path, model_path, variant, delta, R, J, ratio, s, k, driver_sign):
    """Lowest k eigenvalues of H(s) for the compiled program."""
    _, model, program = _program(code_path, model_path, variant, delta, R, J, ratio)
    res = lowest_eigs(assemble(program, s, driver_sign=int(driver_sign)), k)
    click.echo(f"method {res.method}  dimension {program.total_dim}  residual {res.residual:.2e}")
    for i, e in enumerate(res.eigenvalues):
        click.echo(f"{i:>4} {e:.12g}")
    if s == 1.0:
        cfg, energy = brute_force_logical_ground(model)
        click.echo(f"logical ground {cfg} energy {energy:.12g}")


@cli.command()
@code_opt
@model_opt
@variant_opt
@with_options(delta_opts)
@click.option("--points", type=int, default=101, show_default=True)
@click.option("--refine/--no-refine", default=False)
@click.option("--driver-sign", type=click.Choice(["-1", "1"]), default=str(DEFAULT_DRIVER_SIGN), show_default=True)
@click.option("--drive-ancillas/--no-drive-ancillas", default=True, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="CSV of s, gap_logic, gap_phys")
def anneal(code_path, model_path, variant, delta, R, J, ratio, points, refine, driver_sign, drive_ancillas, out):
    """Gap profile of the program and of the logical model; reports chi."""
    _, model, program = _program(code_path, model_path, variant, delta, R, J, ratio)
    sched = AnnealSchedule.uniform(points)
    c = metric_chi(
        model, program, sched, driver_sign=int(driver_sign), drive_ancillas=drive_ancillas, refine=refine
    )
    rows = np.column_stack([sched.grid, c.logic_profile.gaps, c.phys_profile.gaps])
    if out:
        np.savetxt(out, rows, delimiter=",", header="s,gap_logic,gap_phys", comments="", fmt="%.17g")
    click.echo(f"min gap logic {c.min_gap_logic:.12g} at s={c.logic_profile.s_min:.4f}")
    click.echo(f"min gap phys  {c.min_gap_phys:.12g} at s={c.phys_profile.s_min:.4f}")
    click.echo(f"chi {'' if c.chi is None else f'{c.chi:.12g}'}  flags {';'.join(c.flags) or '-'}")


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="JSON ExperimentConfig")
@click.option("--n", "n_logical", type=int)
@click.option("--variants", default="even_qutrit,odd_qubit", show_default=True)
@click.option("--nu", default=None, help="override the variant's nu policy")
@click.option("--R", "R_values", default=None, help="comma list of R; default geometric 1..1e3, 25 points")
@click.option("--instances", type=int, default=1, show_default=True)
@click.option("--seed", "base_seed", type=int, default=0, show_default=True)
@click.option("--J", "J", type=float, default=1.0, show_default=True)
@click.option("--points", type=int, default=101, show_default=True)
@click.option("--metrics", default="delta_e,chi", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--summary", type=click.Path(dir_okay=False), default=None)
def sweep(config_path, n_logical, variants, nu, R_values, instances, base_seed, J, points, metrics, out, summary):
    """Run an instance batch over an R grid; writes records and summary CSVs.

    Worker count comes from the PARITYCODE_WORKERS environment variable.
    """
    if config_path:
        cfg = ExperimentConfig.from_dict(json.loads(Path(config_path).read_text()))
    else:
        if n_logical is None:
            raise click.UsageError("--n is required without --config")
        grid = default_r_grid() if R_values is None else tuple(float(r) for r in R_values.split(","))
        cfg = ExperimentConfig(
            n_logical, tuple(v.strip() for v in variants.split(",")), _nu_policy(nu) if nu else None, J, grid,
            instances, base_seed, points, tuple(m.strip() for m in metrics.split(",")),
        )
    result = run_sweep(cfg)
    rec_path, sum_path = result.write(out, summary)
    click.echo(result.summary_csv(), nl=False)
    click.echo(f"wrote {rec_path} and {sum_path}", err=True)


@cli.command()
@code_opt
@model_opt
@variant_opt
@with_options(delta_opts)
def conditions(code_path, model_path, variant, delta, R, J, ratio):
    """Conditions (i)-(iv) and the subspace spectrum match (dense, small N)."""
    code, model, program = _program(code_path, model_path, variant, delta, R, J, ratio)
    report = check_conditions(program, code, model)
    for line in report.lines():
        click.echo(line)
    if not report.ok:
        raise CheckFailed("conditions not satisfied")


@cli.command(name="gadget-audit")
@click.option("--max-m", type=int, default=8, show_default=True)
@click.option("--min-m", type=int, default=3, show_default=True)
def gadget_audit(max_m, min_m):
    """Minimal ancilla counts for M-body gadgets against the commonly stated counts."""
    click.echo(format_audit(audit_ancilla_counts(max_m, min_m)))


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, prog_name="paritycode", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_INVALID
    except click.ClickException as exc:
        exc.show()
        return EXIT_INVALID
    except (SolverError, DimensionCapError) as exc:
        click.echo(f"solver failure: {exc}", err=True)
        return EXIT_SOLVER
    except CheckFailed as exc:
        click.echo(str(exc), err=True)
        return EXIT_INVALID
    except ParityCodeError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
