"""Experiment configs, the Monte-Carlo sweep engine, and CSV/manifest output.

A sweep maps every ``(alpha, seed)`` pair to one finite-time exponent:
stationary run -> potential path -> power iteration.  Rows are computed by a
worker pool but committed to ``ftle.csv`` strictly in job order, so the file
is byte-identical for any worker count and an interrupted sweep leaves a
clean prefix that a rerun completes (finished rows are never recomputed).

``ftle.csv`` columns (all deterministic for a fixed config):

    alpha, seed, T, N, dt, burn_in, lambda_T, iters, residual, converged

Per-row timing is observability data, not results, and lives in
``manifest.json`` next to the outputs together with the config echo and the
package version.  Failed rows (blow-ups) go to ``failures.csv`` with a
reason; the sweep continues.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .ftle import ftle_for_run
from .solver import BlowUpError, SolverConfig
from .stationary import sample_stationary

FTLE_COLUMNS = ("alpha", "seed", "T", "N", "dt", "burn_in",
                "lambda_T", "iters", "residual", "converged")

STEER_COLUMNS = ("lambda_target", "kappa", "phi0", "f", "c",
                 "lambda_measured", "abs_err")

WICK_COLUMNS = ("N", "m", "C_N", "emp_var", "se", "zscore")


class ConfigError(ValueError):
    """Invalid experiment specification (maps to exit code 2)."""


@dataclass(frozen=True)
class ExperimentSpec:
    """Parsed experiment configuration."""

    mode: str
    cfg: SolverConfig
    burn_in: float
    alphas: tuple
    seeds: tuple
    out_dir: Path
    workers: int = 1
    tol: float = 1e-10
    max_iter: int = 200
    lambdas: tuple = ()
    cutoffs: tuple = (8, 16, 32, 64, 128)
    n_samples: int = 10_000
    input_file: str = ""
    betas: tuple = (-0.1,)

    def job_keys(self):
        return [(a, s) for a in self.alphas for s in self.seeds]


MODES = ("simulate", "stationary", "ftle", "sweep", "steer", "wick-check", "besov")


def parse_spec(doc: dict, *, out_dir=None, workers=None, seed=None) -> ExperimentSpec:
    """Build a validated spec from a JSON document plus CLI overrides."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    mode = doc.get("mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")

    try:
        cfg = SolverConfig(
            dim=int(doc.get("dim", 2)),
            cutoff=int(doc.get("cutoff", 8)),
            dt=float(doc.get("dt", 1e-3)),
            horizon=float(doc.get("horizon", 1.0)),
            alpha=float(doc.get("alpha", 0.0)),
            phys_points=int(doc.get("phys_points", 0)),
            mass=float(doc.get("mass", 1.0)),
            seed=int(seed if seed is not None else doc.get("seed", 0)),
            noise_amp=float(doc.get("noise_amp", 1.0)),
            snapshot_stride=int(doc.get("snapshot_stride", 1)),
            epsilon=float(doc.get("epsilon", 0.1)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad solver parameters: {exc}") from exc

    seeds_doc = doc.get("seeds", [cfg.seed])
    if isinstance(seeds_doc, dict):
        seeds = tuple(range(int(seeds_doc["start"]), int(seeds_doc["stop"])))
    else:
        seeds = tuple(int(s) for s in seeds_doc)
    alphas = tuple(float(a) for a in doc.get("alphas", [cfg.alpha]))

    if mode == "sweep" and (not alphas or not seeds):
        raise ConfigError("sweep needs non-empty alphas and seeds")
    lambdas = tuple(float(x) for x in doc.get("lambdas", ()))
    if mode == "steer" and not lambdas:
        raise ConfigError("steer needs non-empty lambdas")

    burn_in = float(doc.get("burn_in", 1.0))
    if burn_in < 0:
        raise ConfigError("burn_in must be >= 0")

    workers_val = workers if workers is not None else doc.get(
        "workers", os.environ.get("PHI4_WORKERS", 1))
    try:
        workers_val = int(workers_val)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad workers value: {workers_val!r}") from exc
    if workers_val < 1:
        raise ConfigError("workers must be >= 1")

    out = Path(out_dir if out_dir is not None else doc.get("out_dir", "out"))

    return ExperimentSpec(
        mode=mode, cfg=cfg, burn_in=burn_in, alphas=alphas, seeds=seeds,
        out_dir=out, workers=workers_val,
        tol=float(doc.get("tol", 1e-10)), max_iter=int(doc.get("max_iter", 200)),
        lambdas=lambdas,
        cutoffs=tuple(int(n) for n in doc.get("cutoffs", (8, 16, 32, 64, 128))),
        n_samples=int(doc.get("n_samples", 10_000)),
        input_file=str(doc.get("input", "")),
        betas=tuple(float(b) for b in doc.get("betas", (-0.1,))),
    )


# -- formatting ---------------------------------------------------------------

def _fmt(x) -> str:
    """Shortest round-trip text for floats; plain text otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv_row(fh, values):
    fh.write(",".join(_fmt(v) for v in values) + "\n")
    fh.flush()


# -- FTLE sweep ---------------------------------------------------------------

def ftle_row(cfg: SolverConfig, burn_in: float, alpha: float, seed: int,
             tol: float, max_iter: int) -> dict:
    """Compute one sweep row: stationary trajectory, then its exponent."""
    run_cfg = replace(cfg, alpha=alpha, seed=seed)
    run = sample_stationary(run_cfg, burn_in, seed, record_z=False)
    s = ftle_for_run(run, tol=tol, max_iter=max_iter)
    return {
        "alpha": alpha, "seed": seed, "T": cfg.horizon, "N": cfg.cutoff,
        "dt": cfg.dt, "burn_in": burn_in, "lambda_T": s.lambda_t,
        "iters": s.iterations, "residual": s.residual, "converged": s.converged,
    }


def _sweep_worker(args) -> tuple[tuple, dict | None, str]:
    spec, alpha, seed = args
    try:
        row = ftle_row(spec.cfg, spec.burn_in, alpha, seed, spec.tol, spec.max_iter)
        return (alpha, seed), row, ""
    except BlowUpError as exc:
        return (alpha, seed), None, str(exc)


def _read_completed(csv_path: Path) -> set:
    """Keys of complete rows already on disk; truncates a torn last line."""
    if not csv_path.exists():
        return set()
    raw = csv_path.read_bytes()
    if raw and not raw.endswith(b"\n"):
        raw = raw[:raw.rfind(b"\n") + 1]
        csv_path.write_bytes(raw)
    done = set()
    lines = raw.decode("utf-8").splitlines()
    for line in lines[1:]:
        parts = next(csv.reader([line]))
        if len(parts) == len(FTLE_COLUMNS):
            done.add((parts[0], parts[1]))
    return done


def run_sweep(spec: ExperimentSpec) -> Path:
    """Execute (or resume) the sweep; returns the path of ``ftle.csv``."""
    out = spec.out_dir
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "ftle.csv"
    fail_path = out / "failures.csv"

    done = _read_completed(csv_path)
    jobs = spec.job_keys()
    key_str = {(a, s): (repr(float(a)), str(s)) for a, s in jobs}
    pending = [(a, s) for a, s in jobs if key_str[(a, s)] not in done]

    t_start = time.time()
    results: dict[tuple, tuple[dict | None, str]] = {}

    new_file = not csv_path.exists()
    with open(csv_path, "a", encoding="utf-8", newline="") as fh, \
            open(fail_path, "a", encoding="utf-8", newline="") as fail_fh:
        if new_file:
            fh.write(",".join(FTLE_COLUMNS) + "\n")
            fh.flush()

        def commit_ready(queue):
            # write strictly in job order; stop at the first missing result
            while queue and queue[0] in results:
                key = queue.pop(0)
                row, err = results.pop(key)
                if row is None:
                    _write_csv_row(fail_fh, [key[0], key[1], err])
                else:
                    _write_csv_row(fh, [row[c] for c in FTLE_COLUMNS])

        queue = [k for k in jobs if key_str[k] not in done]
        if spec.workers == 1 or len(pending) <= 1:
            for key in list(queue):
                results[key] = _sweep_worker((spec, key[0], key[1]))[1:]
                commit_ready(queue)
        else:
            with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                for key, row, err in pool.map(
                        _sweep_worker, [(spec, a, s) for a, s in pending],
                        chunksize=1):
                    results[key] = (row, err)
                    commit_ready(queue)

    _write_manifest(spec, "sweep", {"jobs": len(jobs),
                                    "computed": len(pending),
                                    "wall_s": time.time() - t_start})
    return csv_path


def _spec_echo(spec: ExperimentSpec) -> dict:
    doc = asdict(spec)
    doc["out_dir"] = str(spec.out_dir)
    return doc


def _package_version() -> str:
    from . import __version__

    return __version__


def _write_manifest(spec: ExperimentSpec, mode: str, extra: dict | None = None):
    doc = {"mode": mode, "config": _spec_echo(spec),
           "version": _package_version()}
    if extra:
        doc.update(extra)
    (spec.out_dir / "manifest.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True))


# -- other experiment modes ----------------------------------------------------

def run_steer(spec: ExperimentSpec) -> Path:
    from .steering import rate_support_demo

    out = spec.out_dir
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "steer.csv"
    reports = []
    for alpha in spec.alphas:
        cfg = replace(spec.cfg, alpha=alpha)
        reports.extend(rate_support_demo(spec.lambdas, alpha, cfg,
                                         tol=spec.tol, max_iter=spec.max_iter))
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(STEER_COLUMNS) + "\n")
        for r in reports:
            _write_csv_row(fh, [r.lambda_target, r.kappa, r.triple.phi0,
                                r.triple.forcing, r.triple.c,
                                r.lambda_measured, r.abs_err])
    _write_manifest(spec, "steer")
    return csv_path


def run_wick_check(spec: ExperimentSpec) -> Path:
    """Renormalization constants and the Monte-Carlo variance check."""
    from .grids import TorusGrid
    from .noise import sample_stationary_z, wick_constant

    out = spec.out_dir
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "wick.csv"
    mass = spec.cfg.mass
    rows = []
    for n in spec.cutoffs:
        grid = TorusGrid(spec.cfg.dim, n)
        c_n = wick_constant(grid, mass)
        if n <= 8 and spec.n_samples > 0:
            zero = (0,) * grid.dim
            vals = np.empty(spec.n_samples)
            for i in range(spec.n_samples):
                z = sample_stationary_z(grid, mass, spec.cfg.seed, trajectory=i)
                # value at x = 0 is the plain coefficient sum
                vals[i] = float(np.sum(z.coeffs).real)
            emp = float(np.var(vals, ddof=1))
            se = float(emp * np.sqrt(2.0 / (spec.n_samples - 1)))
            z_score = float((emp - c_n) / se)
        else:
            emp, se, z_score = float("nan"), float("nan"), float("nan")
        rows.append({"N": n, "m": mass, "C_N": c_n, "emp_var": emp,
                     "se": se, "zscore": z_score})
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(WICK_COLUMNS) + "\n")
        for r in rows:
            _write_csv_row(fh, [r[c] for c in WICK_COLUMNS])
    for r in rows:
        print(f"N={r['N']}: C_N={_fmt(r['C_N'])} emp_var={_fmt(r['emp_var'])} "
              f"zscore={_fmt(r['zscore'])}")
    _write_manifest(spec, "wick-check")
    return csv_path


def run_stationary(spec: ExperimentSpec) -> list:
    """Stationary runs per (alpha, seed); writes potential-path files."""
    from .storage import save_path

    out = spec.out_dir
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for alpha in spec.alphas:
        for seed in spec.seeds:
            cfg = replace(spec.cfg, alpha=alpha, seed=seed)
            run = sample_stationary(cfg, spec.burn_in, seed, record_z=False)
            meta = {"alpha": alpha, "seed": seed, "burn_in": spec.burn_in,
                    "c_used": run.c_used, "dt": cfg.dt}
            path = out / f"qpath_alpha{alpha!r}_seed{seed}.fpath"
            save_path(path, run.potential, kind="potential", meta=meta)
            written.append(path)
    _write_manifest(spec, "stationary", {"files": [p.name for p in written]})
    return written


def run_simulate(spec: ExperimentSpec) -> list:
    """Full-solution paths per (alpha, seed); writes field-path files."""
    from .storage import save_path

    out = spec.out_dir
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for alpha in spec.alphas:
        for seed in spec.seeds:
            cfg = replace(spec.cfg, alpha=alpha, seed=seed)
            run = sample_stationary(cfg, spec.burn_in, seed, record_z=False)
            meta = {"alpha": alpha, "seed": seed, "burn_in": spec.burn_in,
                    "c_used": run.c_used, "dt": cfg.dt}
            path = out / f"phipath_alpha{alpha!r}_seed{seed}.fpath"
            save_path(path, run.phi, kind="solution", meta=meta)
            written.append(path)
    _write_manifest(spec, "simulate", {"files": [p.name for p in written]})
    return written


def run_ftle_file(spec: ExperimentSpec) -> Path:
    """Exponent of stored potential-path files."""
    from .ftle import PotentialPath, ftle
    from .storage import load_path

    if not spec.input_file:
        raise ConfigError("ftle mode needs an input potential-path file")
    out = spec.out_dir
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "ftle.csv"
    fp, header = load_path(spec.input_file)
    meta = header.get("meta", {})
    alpha = float(meta.get("alpha", spec.cfg.alpha))
    seed = int(meta.get("seed", spec.cfg.seed))
    q = PotentialPath.from_field_path(fp)
    s = ftle(q, alpha, seed=seed, tol=spec.tol, max_iter=spec.max_iter)
    new_file = not csv_path.exists()
    with open(csv_path, "a", encoding="utf-8", newline="") as fh:
        if new_file:
            fh.write(",".join(FTLE_COLUMNS) + "\n")
        _write_csv_row(fh, [alpha, seed, s.horizon, fp.grid.cutoff, q.dt,
                            meta.get("burn_in", 0.0), s.lambda_t, s.iterations,
                            s.residual, s.converged])
    print(f"lambda_T = {_fmt(s.lambda_t)} (iters={s.iterations}, "
          f"converged={_fmt(s.converged)})")
    return csv_path


def run_besov(spec: ExperimentSpec) -> int:
    """Print block norms and Besov norms of a stored field."""
    from .blocks import BlockDecomposition, besov_norm, block
    from .grids import sup_norm
    from .storage import load_field

    if not spec.input_file:
        raise ConfigError("besov mode needs an input field file")
    f, header = load_field(spec.input_file)
    dec = BlockDecomposition(f.grid)
    print(f"field: kind={header.get('kind')} dim={f.grid.dim} "
          f"cutoff={f.grid.cutoff}")
    for j in dec.indices():
        print(f"block {j:3d}: sup = {sup_norm(block(f, j))!r}")
    for beta in spec.betas:
        print(f"besov({beta!r}) = {besov_norm(f, beta)!r}")
    return 0


def run_config(path) -> int:
    """Execute a config file; exit codes: 0 ok, 1 runtime failure, 2 bad config."""
    try:
        doc = json.loads(Path(path).read_text())
        spec = parse_spec(doc)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}")
        return 2
    return dispatch(spec)


def dispatch(spec: ExperimentSpec) -> int:
    try:
        if spec.mode == "sweep":
            run_sweep(spec)
        elif spec.mode == "steer":
            run_steer(spec)
        elif spec.mode == "wick-check":
            run_wick_check(spec)
        elif spec.mode == "stationary":
            run_stationary(spec)
        elif spec.mode == "simulate":
            run_simulate(spec)
        elif spec.mode == "ftle":
            run_ftle_file(spec)
        elif spec.mode == "besov":
            run_besov(spec)
        else:  # unreachable after validation
            raise ConfigError(f"unknown mode {spec.mode}")
    except ConfigError as exc:
        print(f"config error: {exc}")
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"run failed: {exc}")
        return 1
    return 0
