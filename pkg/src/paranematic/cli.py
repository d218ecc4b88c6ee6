"""Command line entry point.

Subcommands: `specfun` (scalar function values), `energy` (asymptotic pair
energy sweeps), `solve` (exterior field solves), `anneal` (Metropolis
annealing), `verify` (self-check suites).  Every run that writes files
leaves exactly one `manifest.json` in the output directory recording the
resolved inputs; outputs are deterministic for a fixed seed.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 verification failure.  Lengths in outputs are blown-up units unless
`--physical` is passed (conversion happens on output only).
"""

from __future__ import annotations

import csv
import functools
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import (ConfigError, IllConditioned, InsufficientDecay,
                     MeshTooCoarse, NonConverged, OverlapError)

_SCHEMA_VERSION = 1
_EXIT_CONFIG = 2
_EXIT_NUMERICAL = 3
_EXIT_VERIFY = 4
_NUMERICAL_ERRORS = (NonConverged, IllConditioned, MeshTooCoarse,
                     InsufficientDecay, OverlapError)


@dataclass(frozen=True)
class RunManifest:
    """Provenance record: one per output directory."""

    subcommand: str
    config: dict
    seed: int
    tool_version: str
    input_hash: str
    outputs: tuple
    wall_time_s: float
    schema_version: int = _SCHEMA_VERSION


def _hash_input(config_path, resolved: dict) -> str:
    if config_path is not None:
        return hashlib.sha256(Path(config_path).read_bytes()).hexdigest()
    blob = json.dumps(resolved, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _write_manifest(out_dir: Path, subcommand: str, resolved: dict,
                    seed: int, config_path, outputs: list[str],
                    t_start: float) -> None:
    manifest = RunManifest(
        subcommand=subcommand,
        config=resolved,
        seed=seed,
        tool_version=__version__,
        input_hash=_hash_input(config_path, resolved),
        outputs=tuple(sorted(outputs)),
        wall_time_s=round(time.time() - t_start, 3),
    )
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(asdict(manifest), indent=2, sort_keys=True)
                    + "\n")


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(_EXIT_CONFIG)
        except _NUMERICAL_ERRORS as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(_EXIT_NUMERICAL)
    return wrapper


def _prepare_out(out) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


@click.group()
@click.version_option(version=__version__, prog_name="paranematic")
def main() -> None:
    """Colloid interaction energies in a weakly ordered host fluid."""


# ---------------------------------------------------------------------------
# specfun

_FN_ARITY = {"besselk": 2, "theta": 2, "polylog": 1, "erfc": 1, "ck": 1}


def _tokenize(args: tuple[str, ...]) -> list[str]:
    tokens: list[str] = []
    for chunk in args:
        tokens.extend(t for t in chunk.replace(",", " ").split() if t)
    return tokens


@main.command("specfun")
@click.option("--fn", "fn_name", required=True,
              type=click.Choice(sorted(_FN_ARITY)),
              help="Function family to evaluate.")
@click.option("--args", "fn_args", multiple=True,
              help="Arguments; index first for besselk/theta, then one or "
                   "more points. Repeatable and space/comma separable.")
@_guarded
def specfun_cmd(fn_name: str, fn_args: tuple[str, ...]) -> None:
    """Print function values as plain decimal text, one per line."""
    from . import specfun

    tokens = _tokenize(fn_args)
    if not tokens:
        raise ConfigError("specfun needs at least one value in --args")
    try:
        if fn_name in ("besselk", "theta"):
            if len(tokens) < 2:
                raise ConfigError(f"--fn {fn_name} takes an integer index "
                                  "followed by at least one point")
            index = int(tokens[0])
            points = [float(t) for t in tokens[1:]]
            fn = (specfun.bessel_k_scaled if fn_name == "besselk"
                  else specfun.theta_k)
            values = [fn(index, x) for x in points]
        elif fn_name == "ck":
            values = [float(specfun.interaction_coefficient(int(t)))
                      for t in tokens]
        else:
            fn = specfun.polylog_half if fn_name == "polylog" else specfun.erfc
            values = [fn(float(t)) for t in tokens]
    except ValueError as exc:
        raise ConfigError(str(exc))
    for v in values:
        click.echo(format(v, ".17g"))


# ---------------------------------------------------------------------------
# energy

def _parse_sweep(spec: str) -> np.ndarray:
    try:
        name, rng = spec.split("=", 1)
        lo, hi, step = (float(t) for t in rng.split(":"))
    except ValueError:
        raise ConfigError(f"sweep must look like b=min:max:step, got {spec!r}")
    if name.strip() != "b":
        raise ConfigError(f"only b sweeps are supported, got {name!r}")
    if step <= 0 or hi < lo:
        raise ConfigError(f"empty sweep range {spec!r}")
    if lo <= 0:
        raise ConfigError("b sweep needs a positive half-gap start")
    return np.arange(lo, hi + step / 2, step)


@main.command("energy")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Two-particle TOML configuration.")
@click.option("--method", type=click.Choice(["large-b", "o1", "auto"]),
              default="auto", show_default=True)
@click.option("--sweep", "sweep_spec", required=True,
              help="Half-gap sweep, b=min:max:step (blown-up units).")
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Directory for energy.csv and manifest.json; default "
                   "prints CSV to stdout.")
@click.option("--physical", is_flag=True,
              help="Report b in physical units (b times eps^2).")
@_guarded
def energy_cmd(config_path, method, sweep_spec, out, physical) -> None:
    """Asymptotic pair-energy sweep over the half-gap b."""
    from .asymptotics import (nonconstant_pair_energy, two_particle_O1,
                              two_particle_large_b)
    from .model import load_particle_config

    t0 = time.time()
    config = load_particle_config(config_path)
    if len(config.particles) != 2:
        raise ConfigError("energy sweeps need exactly two particles")
    d1, d2 = (p.data for p in config.particles)
    eps = config.epsilon
    constants = d1.is_constant and d2.is_constant
    if method == "auto":
        method = "o1" if constants else "large-b"
    if method == "o1" and not constants:
        raise ConfigError("method o1 supports constant boundary data only")
    bs = _parse_sweep(sweep_spec)

    rows = []
    for b in bs:
        b = float(b)
        if constants:
            g1 = d1.constant_value.real
            g2 = d2.constant_value.real
            fn = two_particle_O1 if method == "o1" else two_particle_large_b
            bk = fn(g1, g2, b, eps)
        else:
            bk = nonconstant_pair_energy(d1, d2, b, eps)
        b_out = b * eps**2 if physical else b
        rows.append((b_out, bk.self_energy, bk.neck_total,
                     bk.remainder_bound, bk.total))

    unit = "physical" if physical else "blown_up"
    header = (f"b[{unit}]", "self[energy]", "neck_total[energy]",
              "remainder_bound[energy]", "total[energy]")

    def emit(stream):
        writer = csv.writer(stream)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format(v, ".12g") for v in row])

    resolved = {"config_file": str(config_path), "method": method,
                "sweep": sweep_spec, "physical": physical, "epsilon": eps}
    if out is None:
        emit(sys.stdout)
    else:
        out_dir = _prepare_out(out)
        with open(out_dir / "energy.csv", "w", newline="") as fh:
            emit(fh)
        _write_manifest(out_dir, "energy", resolved, seed=1,
                        config_path=config_path, outputs=["energy.csv"],
                        t_start=t0)
        click.echo(f"wrote {out_dir / 'energy.csv'}")


# ---------------------------------------------------------------------------
# solve

def _parse_fd(spec: str) -> tuple[float, float]:
    try:
        h, padding = (float(t) for t in spec.split(","))
    except ValueError:
        raise ConfigError(f"--fd takes h,padding, got {spec!r}")
    return h, padding


def _parse_samples(spec: str) -> np.ndarray:
    try:
        xpart, ypart = spec.split(",")
        x0, x1, nx = xpart.split(":")
        y0, y1, ny = ypart.split(":")
        xs = np.linspace(float(x0), float(x1), int(nx))
        ys = np.linspace(float(y0), float(y1), int(ny))
    except ValueError:
        raise ConfigError(
            f"--samples takes x0:x1:nx,y0:y1:ny, got {spec!r}")
    X, Y = np.meshgrid(xs, ys)
    return np.stack([X.ravel(), Y.ravel()], axis=1)


@main.command("solve")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--modes", "modes_m", type=int, default=None,
              help="Collocation mode cutoff M (defaults to the suggestion).")
@click.option("--colloc", "colloc_p", type=int, default=None,
              help="Collocation points per circle P (default 2(2M+1)).")
@click.option("--fd", "fd_spec", default=None,
              help="Also run the finite-difference solver: h,padding.")
@click.option("--nonlinear", is_flag=True,
              help="Also minimize the nonlinear energy (needs --fd).")
@click.option("--samples", "samples_spec", default=None,
              help="Field sample grid x0:x1:nx,y0:y1:ny (blown-up units).")
@click.option("--out", type=click.Path(file_okay=False), default=None)
@click.option("--physical", is_flag=True,
              help="Convert sample coordinates to physical units on output.")
@_guarded
def solve_cmd(config_path, modes_m, colloc_p, fd_spec, nonlinear,
              samples_spec, out, physical) -> None:
    """Exterior field solve; prints energies and writes coefficient tables."""
    from .fieldsolver import solve_collocation, solve_fd, solve_nonlinear
    from .model import load_particle_config

    t0 = time.time()
    if nonlinear and fd_spec is None:
        raise ConfigError("--nonlinear runs on the FD grid; pass --fd h,padding")
    config = load_particle_config(config_path)
    sol = solve_collocation(config, M=modes_m, P=colloc_p)
    click.echo(f"energy = {sol.energy:.12g}")
    click.echo(f"boundary_residual = {sol.boundary_residual:.6g}")

    fd_sol = nl_sol = None
    if fd_spec is not None:
        h, padding = _parse_fd(fd_spec)
        fd_sol = solve_fd(config, h=h, padding=padding)
        click.echo(f"fd_energy = {fd_sol.energy:.12g}")
        if nonlinear:
            nl_sol = solve_nonlinear(config, h=h, padding=padding)
            click.echo(f"nonlinear_energy = {nl_sol.energy:.12g}")

    coeff_rows = [("particle", "mode", "re[coefficient]", "im[coefficient]")]
    M = sol.M
    for j in range(len(config.particles)):
        for m in range(-M, M + 1):
            c = sol.coefficients[j, M + m]
            coeff_rows.append((j, m, format(c.real, ".12g"),
                               format(c.imag, ".12g")))

    sample_rows = None
    if samples_spec is not None:
        pts = _parse_samples(samples_spec)
        field = (fd_sol if fd_sol is not None else sol)
        vals = np.asarray(field.evaluate(pts))
        coords = pts * config.epsilon**2 if physical else pts
        unit = "physical" if physical else "blown_up"
        sample_rows = [(f"x[{unit}]", f"y[{unit}]", "u_re", "u_im")]
        for (x, y), v in zip(coords, vals):
            sample_rows.append((format(x, ".9g"), format(y, ".9g"),
                                format(v.real, ".12g"), format(v.imag, ".12g")))

    resolved = {"config_file": str(config_path), "modes": sol.M, "colloc": sol.P,
                "fd": fd_spec, "nonlinear": nonlinear,
                "samples": samples_spec, "physical": physical}
    if out is None:
        writer = csv.writer(sys.stdout)
        for row in coeff_rows:
            writer.writerow(row)
        if sample_rows:
            for row in sample_rows:
                writer.writerow(row)
    else:
        out_dir = _prepare_out(out)
        outputs = ["coefficients.csv"]
        with open(out_dir / "coefficients.csv", "w", newline="") as fh:
            csv.writer(fh).writerows(coeff_rows)
        if sample_rows:
            outputs.append("samples.csv")
            with open(out_dir / "samples.csv", "w", newline="") as fh:
                csv.writer(fh).writerows(sample_rows)
        _write_manifest(out_dir, "solve", resolved, seed=1,
                        config_path=config_path, outputs=outputs, t_start=t0)
        click.echo(f"wrote {', '.join(outputs)} in {out_dir}")


# ---------------------------------------------------------------------------
# anneal

def _anneal_settings(doc: dict) -> dict:
    table = doc.get("anneal", {})
    if not isinstance(table, dict):
        raise ConfigError("[anneal] must be a table")
    known = {"degrees", "sweeps", "t_start", "t_end", "epsilon_sq",
             "n_side", "spacing", "jitter", "box_half_width"}
    extra = set(table) - known
    if extra:
        raise ConfigError(f"unknown [anneal] keys: {', '.join(sorted(extra))}")
    degrees = table.get("degrees", 2)
    if isinstance(degrees, list):
        if len(degrees) != 2:
            raise ConfigError("degrees is an integer or a pair [da, db]")
        degrees = tuple(int(d) for d in degrees)
    else:
        degrees = int(degrees)
    return {
        "degrees": degrees,
        "sweeps": int(table.get("sweeps", 25000)),
        "t_start": float(table.get("t_start", 0.25)),
        "t_end": float(table.get("t_end", 0.0)),
        "epsilon_sq": float(table.get("epsilon_sq", 0.4)),
        "n_side": int(table.get("n_side", 16)),
        "spacing": float(table.get("spacing", 2.2)),
        "jitter": float(table.get("jitter", 0.05)),
        "box_half_width": float(table.get("box_half_width", 23.0)),
    }


def _angle_histograms(stats, bins: int = 36):
    """(bin_center, count, class) rows; one period per class."""
    rows = []
    groups = (
        ("nn", stats.nn_relative_angles, stats.nn_angle_degrees),
        ("second_nn", stats.second_relative_angles, stats.second_angle_degrees),
    )
    for cls, angles, degs in groups:
        if len(angles) == 0:
            continue
        period = 2.0 * math.pi / (int(degs.max()) - 1)
        counts, edges = np.histogram(angles, bins=bins, range=(0.0, period))
        centers = 0.5 * (edges[:-1] + edges[1:])
        rows.extend((c, int(n), cls) for c, n in zip(centers, counts))
    if len(stats.mixed_contact_angles):
        counts, edges = np.histogram(stats.mixed_contact_angles, bins=bins,
                                     range=(0.0, math.pi))
        centers = 0.5 * (edges[:-1] + edges[1:])
        rows.extend((c, int(n), "mixed_contact")
                    for c, n in zip(centers, counts))
    return rows


@main.command("anneal")
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="TOML file with an [anneal] table; defaults throughout "
                   "when omitted.")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--snapshots", "n_snapshots", type=int, default=25,
              show_default=True, help="Number of trajectory snapshots.")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@_guarded
def anneal_cmd(config_path, seed, n_snapshots, out) -> None:
    """Metropolis annealing run: trajectory, histograms, summary."""
    from . import montecarlo as mc
    from .model import load_toml

    t0 = time.time()
    doc = load_toml(config_path) if config_path else {}
    settings = _anneal_settings(doc)
    state = mc.lattice_initial_state(
        seed=seed, degrees=settings["degrees"], n_side=settings["n_side"],
        spacing=settings["spacing"], jitter=settings["jitter"],
        epsilon_sq=settings["epsilon_sq"],
        box_half_width=settings["box_half_width"])
    sched = mc.Schedule(t_start=settings["t_start"], t_end=settings["t_end"],
                        sweeps=settings["sweeps"])
    every = max(1, sched.sweeps // max(1, n_snapshots))
    trajectory = mc.anneal(state, sched, snapshot_every=every)

    out_dir = _prepare_out(out)
    degrees = [int(d) for d in trajectory.state.degrees]
    with open(out_dir / "trajectory.jsonl", "w") as fh:
        for sn in trajectory.snapshots:
            record = {
                "schema_version": _SCHEMA_VERSION,
                "sweep": int(sn.sweep),
                "temperature": float(sn.temperature),
                "energy": float(sn.energy),
                "positions": [[round(float(x), 12) for x in p]
                              for p in sn.positions],
                "angles": [round(float(a), 12) for a in sn.angles],
                "degrees": degrees,
            }
            fh.write(json.dumps(record) + "\n")

    stats = mc.neighbor_stats(trajectory.state)
    with open(out_dir / "histograms.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("bin_center[rad]", "count", "class"))
        for center, count, cls in _angle_histograms(stats):
            writer.writerow((format(center, ".9g"), count, cls))

    accepted = trajectory.accepted
    n_particles = len(trajectory.state.positions)
    with open(out_dir / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("metric", "value"))
        writer.writerow(("final_energy", format(trajectory.state.energy, ".12g")))
        chunks = np.array_split(accepted, 10) if len(accepted) else []
        for i, chunk in enumerate(chunks, 1):
            rate = (float(chunk.sum()) / (len(chunk) * n_particles)
                    if len(chunk) else math.nan)
            writer.writerow((f"acceptance_decile_{i}", format(rate, ".6g")))

    resolved = dict(settings)
    resolved["degrees"] = (list(settings["degrees"])
                           if isinstance(settings["degrees"], tuple)
                           else settings["degrees"])
    resolved["config_file"] = str(config_path) if config_path else None
    resolved["snapshots"] = n_snapshots
    _write_manifest(out_dir, "anneal", resolved, seed=seed,
                    config_path=config_path,
                    outputs=["trajectory.jsonl", "histograms.csv",
                             "summary.csv"],
                    t_start=t0)
    click.echo(f"final energy {trajectory.state.energy:.6f}; "
               f"outputs in {out_dir}")


# ---------------------------------------------------------------------------
# verify

@main.command("verify")
@click.argument("suite", default="all",
                type=click.Choice(["specfun", "asymptotics", "solver",
                                   "montecarlo", "all"]))
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Directory for verify.csv and manifest.json.")
@_guarded
def verify_cmd(suite, out) -> None:
    """Run a self-check suite; exit 4 if any check fails."""
    from .verification import run_verify

    t0 = time.time()
    checks = run_verify(suite)
    rows = [("suite", "check", "measured", "required", "passed")]
    for c in checks:
        rows.append((c.suite, c.name, format(c.measured, ".6e"),
                     c.required, str(c.passed).lower()))
        status = "PASS" if c.passed else "FAIL"
        click.echo(f"{status}  {c.suite:12s}{c.name:36s}"
                   f"measured {c.measured:.3e}  required {c.required}")
    failures = sum(not c.passed for c in checks)
    if out is not None:
        out_dir = _prepare_out(out)
        with open(out_dir / "verify.csv", "w", newline="") as fh:
            csv.writer(fh).writerows(rows)
        _write_manifest(out_dir, "verify", {"suite": suite}, seed=1,
                        config_path=None, outputs=["verify.csv"], t_start=t0)
    click.echo(f"{len(checks) - failures}/{len(checks)} checks passed")
    if failures:
        sys.exit(_EXIT_VERIFY)


if __name__ == "__main__":
    main()
