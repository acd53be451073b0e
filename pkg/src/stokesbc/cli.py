"""Command-line harness: verification campaigns, solves, audits, NS runs.

Five verbs, all sharing the global flags --config/--seed/--jobs/--out:

    stokesbc verify-symbols   closed-form inverse sweep vs the generic inverse
    stokesbc verify-traces    trace multipliers vs adaptive kernel quadrature
    stokesbc solve            synthesize a periodic-strip field from mode data
    stokesbc energy-audit     empirical boundary-power classification
    stokesbc run-ns           nonlinear backward-Euler/Picard time march

Configuration is JSON, strictly validated: unknown keys are rejected, and
every verb documents its defaults in _DEFAULTS below.  --seed overrides the
config seed; --jobs (or the STOKESBC_JOBS environment variable) sets the
worker-pool width.  Reports embed the fully resolved config.

Determinism contract: identical config + seed produce byte-identical output
files regardless of --jobs.  Random sweeps are split into a fixed number of
chunks, each with its own seed sequence derived from (seed, chunk), and
chunk results are merged in chunk order — the pool width never influences
what is drawn or how results are ordered.  No timestamps or runtimes are
written to any artifact.

Exit codes: 0 success, 1 tolerance breach (or non-converged run),
2 configuration error, 3 numerical-budget failure.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from .energy import classify_bc
from .errors import (
    ConfigError,
    InvalidModeError,
    QuadratureBudgetError,
    StokesbcError,
)
from .halfspace import (
    GridSpec,
    canonical_json,
    field_manifest,
    solve_mode,
    synthesize_field,
    write_field_csv,
    write_manifest,
)
from .navier_stokes import NsStepper, run_simulation, stream_function_field
from .parabolic import verify_trace_relations
from .quadrature import QuadratureCfg
from .symbols import (
    BcSpec,
    FluidConstants,
    boundary_symbol,
    closed_form_inverse,
    derive_mode,
    generic_inverse,
)

#: number of independent sweep chunks; fixed so that results do not depend
#: on the worker-pool width.
N_CHUNKS = 16

#: the nine boundary-condition pairs in canonical order
ALL_BCS = [(a, b) for b in (0, 1, -1) for a in (0, 1, -1)]

#: the six pairs with an invertible boundary symbol (beta = -1 prescribes
#: the pressure trace directly and has no symbol to invert)
SYMBOL_BCS = [(a, b) for b in (0, 1) for a in (0, 1, -1)]

TWO_PI = 2.0 * math.pi

_DEFAULTS: dict[str, dict] = {
    "verify-symbols": {
        "seed": 2024,
        "n_modes": 10_000,
        "abs_xi_range": [1.0e-2, 1.0e2],
        "lambda_im_range": [0.0, 1.0e2],
        "epsilon_choices": [1.0e-2, 1.0, 1.0e2],
        "rho_range": [0.1, 10.0],
        "mu_range": [0.1, 10.0],
        "identity_tol": 1.0e-12,
        "generic_tol": 1.0e-10,
    },
    "verify-traces": {
        "seed": 2024,
        "n_modes": 300,
        "relations": ["T00", "T10", "T11"],
        "rel_tol": 1.0e-7,
        "abs_xi_range": [1.0e-2, 1.0e2],
        "lambda_im_range": [0.0, 1.0e2],
        "epsilon_choices": [1.0e-2, 1.0, 1.0e2],
        "rho_range": [0.1, 10.0],
        "mu_range": [0.1, 10.0],
        "quadrature": {
            "rel_tol": 1.0e-10,
            "truncation_multiplier": 40.0,
            "max_subdivisions": 2000,
        },
    },
    "solve": {
        "seed": 0,
        "constants": {"rho": 1.0, "mu": 1.0, "epsilon": 1.0},
        "lambda": {"re": 0.0, "im": 0.0},
        "bc": {"alpha": 0, "beta": 0},
        "grid": {
            "x_length": TWO_PI,
            "x_count": 64,
            "y_max": 8.0,
            "y_count": 129,
            "y_kind": "uniform",
            "y_grading": 0.0,
        },
        "modes": [],
        "residual_samples": 33,
        "residual_tol": None,
    },
    "energy-audit": {
        "seed": 0,
        "constants": {"rho": 1.0, "mu": 1.0},
        "bcs": None,
        "n_trials": 100,
        "x_length": TWO_PI,
    },
    "run-ns": {
        "seed": 0,
        "constants": {"rho": 1.0, "mu": 1.0},
        "grid": {
            "x_length": TWO_PI,
            "x_count": 16,
            # the top boundary must sit deep enough that the initial tail
            # y^2 e^{-decay y} cannot feed an artificial boundary layer:
            # the discrete divergence defect scales like the datum there.
            "y_max": 16.0,
            "y_count": 129,
            "y_kind": "cheb",
            "y_grading": 0.0,
        },
        "initial": {"amplitude": 1.0e-3, "k": 1, "decay": 1.25},
        "dt": 0.02,
        "n_steps": 50,
        "picard_tol": 1.0e-8,
        "picard_max": 10,
        "dt_min": None,
    },
}


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def _merge_config(defaults: dict, override: dict, path: str = "") -> dict:
    """Recursive merge of override into defaults, rejecting unknown keys."""
    merged = {}
    for key, base in defaults.items():
        merged[key] = base
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"unknown config key: {where!r}")
        base = defaults[key]
        if isinstance(base, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where!r} must be an object")
            merged[key] = _merge_config(base, value, where)
        else:
            merged[key] = value
    return merged


def _require_number(cfg: dict, key: str, *, positive: bool = False, path: str = ""):
    where = f"{path}.{key}" if path else key
    val = cfg[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{where!r} must be a number, got {val!r}")
    if not math.isfinite(val):
        raise ConfigError(f"{where!r} must be finite, got {val!r}")
    if positive and val <= 0:
        raise ConfigError(f"{where!r} must be > 0, got {val!r}")
    return val


def _require_int(cfg: dict, key: str, *, minimum: int | None = None, path: str = ""):
    where = f"{path}.{key}" if path else key
    val = cfg[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{where!r} must be an integer, got {val!r}")
    if minimum is not None and val < minimum:
        raise ConfigError(f"{where!r} must be >= {minimum}, got {val}")
    return val


def _require_range(cfg: dict, key: str, *, positive: bool = False) -> tuple[float, float]:
    val = cfg[key]
    if (
        not isinstance(val, (list, tuple))
        or len(val) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in val)
    ):
        raise ConfigError(f"{key!r} must be a [low, high] pair of numbers")
    lo, hi = float(val[0]), float(val[1])
    if lo > hi:
        raise ConfigError(f"{key!r} must be ascending, got {val!r}")
    if positive and lo <= 0:
        raise ConfigError(f"{key!r} must be positive, got {val!r}")
    return lo, hi


def _load_config(command: str, config_path: str | None, seed: int | None) -> dict:
    defaults = _DEFAULTS[command]
    override: dict = {}
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                override = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"config parse error in {config_path}: line {exc.lineno} "
                f"column {exc.colno}: {exc.msg}"
            ) from exc
        if not isinstance(override, dict):
            raise ConfigError("config root must be a JSON object")
    resolved = _merge_config(defaults, override)
    if seed is not None:
        resolved["seed"] = seed
    _require_int(resolved, "seed", minimum=0)
    return resolved


def _resolve_jobs(jobs: int | None) -> int:
    if jobs is None:
        env = os.environ.get("STOKESBC_JOBS")
        if env is not None:
            try:
                jobs = int(env)
            except ValueError as exc:
                raise ConfigError(f"STOKESBC_JOBS must be an integer, got {env!r}") from exc
        else:
            jobs = 1
    if jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {jobs}")
    return jobs


def _map_ordered(fn, tasks, jobs: int) -> list:
    """Apply fn over tasks, preserving task order in the result list."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _chunk_counts(total: int) -> list[int]:
    base, rem = divmod(total, N_CHUNKS)
    return [base + (1 if c < rem else 0) for c in range(N_CHUNKS)]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(v) for v in row) + "\n")


def _write_report(out_dir: str, name: str, report: dict) -> str:
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(canonical_json(_jsonable(report)))
    return path


def _draw_constants(rng: np.random.Generator, cfg: dict):
    """One random admissible (constants, lambda, |xi|) sample.

    Draw order is part of the determinism contract — do not reorder.
    """
    lo, hi = cfg["abs_xi_range"]
    abs_xi = 10.0 ** rng.uniform(math.log10(lo), math.log10(hi))
    lam_lo, lam_hi = cfg["lambda_im_range"]
    lam = 1j * rng.uniform(lam_lo, lam_hi)
    eps = float(rng.choice(cfg["epsilon_choices"]))
    rho_lo, rho_hi = cfg["rho_range"]
    rho = 10.0 ** rng.uniform(math.log10(rho_lo), math.log10(rho_hi))
    mu_lo, mu_hi = cfg["mu_range"]
    mu = 10.0 ** rng.uniform(math.log10(mu_lo), math.log10(mu_hi))
    constants = FluidConstants(rho=rho, mu=mu, epsilon=eps)
    return derive_mode(constants, lam, (abs_xi,))


def _validate_sweep_config(cfg: dict) -> None:
    _require_int(cfg, "n_modes", minimum=1)
    _require_range(cfg, "abs_xi_range", positive=True)
    lam_lo, _ = _require_range(cfg, "lambda_im_range")
    if lam_lo < 0:
        raise ConfigError("'lambda_im_range' must be non-negative")
    _require_range(cfg, "rho_range", positive=True)
    _require_range(cfg, "mu_range", positive=True)
    eps = cfg["epsilon_choices"]
    if (
        not isinstance(eps, (list, tuple))
        or not eps
        or any(isinstance(e, bool) or not isinstance(e, (int, float)) or e <= 0 for e in eps)
    ):
        raise ConfigError("'epsilon_choices' must be a non-empty list of positive numbers")


# ---------------------------------------------------------------------------
# verb: verify-symbols
# ---------------------------------------------------------------------------


def _symbols_chunk(task) -> list[tuple]:
    chunk, count, cfg = task
    rng = np.random.default_rng([cfg["seed"], chunk])
    eye = None
    rows = []
    for idx in range(count):
        mode = _draw_constants(rng, cfg)
        if eye is None:
            eye = np.eye(mode.n)
        worst_id = 0.0
        worst_gap = 0.0
        worst_pair = ""
        for alpha, beta in SYMBOL_BCS:
            bc = BcSpec(alpha, beta)
            b = boundary_symbol(mode, bc)
            closed = closed_form_inverse(mode, bc)
            generic = generic_inverse(mode, bc)
            rid = float(
                np.max(np.abs(b @ closed - eye))
                / (np.max(np.abs(b)) * np.max(np.abs(closed)))
            )
            gap = float(np.max(np.abs(closed - generic)) / np.max(np.abs(generic)))
            if max(rid, gap) >= max(worst_id, worst_gap):
                worst_pair = f"({alpha},{beta})"
            worst_id = max(worst_id, rid)
            worst_gap = max(worst_gap, gap)
        rows.append(
            (
                chunk,
                idx,
                mode.abs_xi,
                mode.lam.imag,
                mode.constants.epsilon,
                mode.constants.rho,
                mode.constants.mu,
                worst_id,
                worst_gap,
                worst_pair,
            )
        )
    return rows


def _cmd_verify_symbols(cfg: dict, jobs: int, out_dir: str) -> int:
    _validate_sweep_config(cfg)
    _require_number(cfg, "identity_tol", positive=True)
    _require_number(cfg, "generic_tol", positive=True)

    tasks = [
        (chunk, count, cfg)
        for chunk, count in enumerate(_chunk_counts(cfg["n_modes"]))
        if count > 0
    ]
    chunks = _map_ordered(_symbols_chunk, tasks, jobs)
    rows = [row for chunk_rows in chunks for row in chunk_rows]

    worst_id = max((r[7] for r in rows), default=0.0)
    worst_gap = max((r[8] for r in rows), default=0.0)
    worst_row = max(rows, key=lambda r: max(r[7], r[8]), default=None)
    passed = worst_id < cfg["identity_tol"] and worst_gap < cfg["generic_tol"]

    header = [
        "chunk",
        "index",
        "abs_xi",
        "lambda_im",
        "epsilon",
        "rho",
        "mu",
        "identity_residual",
        "generic_gap",
        "worst_pair",
    ]
    _write_csv(os.path.join(out_dir, "verify_symbols.csv"), header, rows)
    report = {
        "command": "verify-symbols",
        "config": cfg,
        "pairs": [f"({a},{b})" for a, b in SYMBOL_BCS],
        "n_modes": len(rows),
        "worst_identity_residual": worst_id,
        "worst_generic_gap": worst_gap,
        "worst_mode": dict(zip(header, worst_row)) if worst_row else None,
        "passed": passed,
    }
    _write_report(out_dir, "verify_symbols.json", report)
    click.echo(
        f"verify-symbols: {len(rows)} modes x {len(SYMBOL_BCS)} pairs, "
        f"worst identity residual {worst_id:.3e} (tol {cfg['identity_tol']:.1e}), "
        f"worst generic gap {worst_gap:.3e} (tol {cfg['generic_tol']:.1e}): "
        f"{'PASS' if passed else 'FAIL'}"
    )
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# verb: verify-traces
# ---------------------------------------------------------------------------

_RELATION_ALPHAS = {"T00": (0,), "T10": (1, -1), "T11": (0, 1, -1)}


def _traces_chunk(task):
    relation, alpha, ri, chunk, count, cfg = task
    rng = np.random.default_rng([cfg["seed"], ri, alpha + 1, chunk])
    modes = [_draw_constants(rng, cfg) for _ in range(count)]
    qcfg = QuadratureCfg(
        rel_tol=cfg["quadrature"]["rel_tol"],
        truncation_multiplier=cfg["quadrature"]["truncation_multiplier"],
        max_subdivisions=cfg["quadrature"]["max_subdivisions"],
    )
    return verify_trace_relations(
        modes, alpha, relation, cfg=qcfg, rel_tol=cfg["rel_tol"]
    )


def _cmd_verify_traces(cfg: dict, jobs: int, out_dir: str) -> int:
    _validate_sweep_config(cfg)
    _require_number(cfg, "rel_tol", positive=True)
    relations = cfg["relations"]
    if not isinstance(relations, (list, tuple)) or not relations:
        raise ConfigError("'relations' must be a non-empty list")
    for rel in relations:
        if rel not in _RELATION_ALPHAS:
            raise ConfigError(
                f"unknown relation {rel!r}; choose from {sorted(_RELATION_ALPHAS)}"
            )
    q = cfg["quadrature"]
    _require_number(q, "rel_tol", positive=True, path="quadrature")
    _require_number(q, "truncation_multiplier", positive=True, path="quadrature")
    _require_int(q, "max_subdivisions", minimum=1, path="quadrature")

    tasks = []
    for ri, relation in enumerate(relations):
        for alpha in _RELATION_ALPHAS[relation]:
            for chunk, count in enumerate(_chunk_counts(cfg["n_modes"])):
                if count > 0:
                    tasks.append((relation, alpha, ri, chunk, count, cfg))
    chunk_reports = _map_ordered(_traces_chunk, tasks, jobs)

    rows = []
    sections = []
    by_key: dict[tuple, list] = {}
    for task, rep in zip(tasks, chunk_reports):
        relation, alpha, _, chunk, _, _ = task
        by_key.setdefault((relation, alpha), []).append((chunk, rep))
        for idx, entry in enumerate(rep.entries):
            rows.append(
                (
                    relation,
                    alpha,
                    chunk,
                    idx,
                    entry["abs_xi"],
                    entry["lambda_im"],
                    entry["epsilon"],
                    entry["rho"],
                    entry["mu"],
                    entry["rel_error"],
                )
            )
    all_passed = True
    for ri, relation in enumerate(relations):
        for alpha in _RELATION_ALPHAS[relation]:
            parts = by_key[(relation, alpha)]
            n_modes = sum(rep.n_modes for _, rep in parts)
            worst_rep = max(parts, key=lambda cr: cr[1].max_rel_error)[1]
            max_err = worst_rep.max_rel_error
            passed = max_err < cfg["rel_tol"]
            all_passed = all_passed and passed
            sections.append(
                {
                    "relation": relation,
                    "alpha": alpha,
                    "n_modes": n_modes,
                    "max_rel_error": max_err,
                    "worst_mode": worst_rep.worst,
                    "passed": passed,
                }
            )

    header = [
        "relation",
        "alpha",
        "chunk",
        "index",
        "abs_xi",
        "lambda_im",
        "epsilon",
        "rho",
        "mu",
        "rel_error",
    ]
    _write_csv(os.path.join(out_dir, "verify_traces.csv"), header, rows)
    report = {
        "command": "verify-traces",
        "config": cfg,
        "relations": sections,
        "max_rel_error": max((s["max_rel_error"] for s in sections), default=0.0),
        "passed": all_passed,
    }
    _write_report(out_dir, "verify_traces.json", report)
    for s in sections:
        click.echo(
            f"verify-traces: {s['relation']} alpha={s['alpha']:+d} over "
            f"{s['n_modes']} modes, max rel error {s['max_rel_error']:.3e} "
            f"(tol {cfg['rel_tol']:.1e}): {'PASS' if s['passed'] else 'FAIL'}"
        )
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# verb: solve
# ---------------------------------------------------------------------------


def _parse_complex(obj, where: str) -> complex:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if isinstance(obj, dict) and set(obj) <= {"re", "im"}:
        re = obj.get("re", 0.0)
        im = obj.get("im", 0.0)
        if all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)
        ):
            return complex(re, im)
    raise ConfigError(f"{where!r} must be a number or {{'re': .., 'im': ..}}")


def _grid_from_config(cfg: dict) -> GridSpec:
    g = cfg["grid"]
    _require_number(g, "x_length", positive=True, path="grid")
    _require_int(g, "x_count", minimum=1, path="grid")
    _require_number(g, "y_max", positive=True, path="grid")
    _require_int(g, "y_count", minimum=2, path="grid")
    _require_number(g, "y_grading", path="grid")
    if g["y_kind"] not in ("uniform", "graded", "cheb"):
        raise ConfigError("grid.y_kind must be 'uniform', 'graded' or 'cheb'")
    return GridSpec(
        x_length=float(g["x_length"]),
        x_count=int(g["x_count"]),
        y_max=float(g["y_max"]),
        y_count=int(g["y_count"]),
        y_grading=float(g["y_grading"]),
        y_kind=g["y_kind"],
    )


def _constants_from_config(cfg: dict, *, epsilon_key: bool = True) -> FluidConstants:
    c = cfg["constants"]
    _require_number(c, "rho", positive=True, path="constants")
    _require_number(c, "mu", positive=True, path="constants")
    if epsilon_key:
        _require_number(c, "epsilon", positive=True, path="constants")
        eps = float(c["epsilon"])
    else:
        eps = 1.0
    return FluidConstants(rho=float(c["rho"]), mu=float(c["mu"]), epsilon=eps)


def _cmd_solve(cfg: dict, jobs: int, out_dir: str) -> int:
    constants = _constants_from_config(cfg)
    lam = _parse_complex(cfg["lambda"], "lambda")
    bc_cfg = cfg["bc"]
    if bc_cfg["alpha"] not in (-1, 0, 1) or bc_cfg["beta"] not in (-1, 0, 1):
        raise ConfigError("bc.alpha and bc.beta must each be one of -1, 0, +1")
    bc = BcSpec(int(bc_cfg["alpha"]), int(bc_cfg["beta"]))
    grid = _grid_from_config(cfg)
    n_samples = _require_int(cfg, "residual_samples", minimum=2)
    if cfg["residual_tol"] is not None:
        _require_number(cfg, "residual_tol", positive=True)

    if not isinstance(cfg["modes"], list):
        raise ConfigError("'modes' must be a list")
    contributions = {}
    data = []
    for i, entry in enumerate(cfg["modes"]):
        where = f"modes[{i}]"
        if not isinstance(entry, dict) or set(entry) - {"k", "h_w"}:
            raise ConfigError(f"{where} must be an object with keys 'k' and 'h_w'")
        k = entry.get("k")
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise ConfigError(f"{where}.k must be an integer >= 1")
        if k in contributions:
            raise ConfigError(f"duplicate mode k = {k}")
        h_w = _parse_complex(entry.get("h_w", 1.0), f"{where}.h_w")
        mode = derive_mode(constants, lam, (grid.wavenumber(k),))
        contributions[k] = solve_mode(mode, bc, h_w)
        data.append((k, h_w))

    field = synthesize_field(constants, contributions, grid)

    y_samples = np.linspace(0.0, grid.y_max, n_samples)
    mode_rows = []
    for k, h_w in data:
        sol = contributions[k]
        scale = max(
            float(np.max(np.abs(sol.velocity.evaluate(y_samples)))), abs(h_w), 1.0e-300
        )
        momentum = float(np.max(np.abs(sol.momentum_residual().evaluate(y_samples))))
        divergence = float(np.max(np.abs(sol.divergence()(y_samples))))
        datum = abs(sol.normal_row() - h_w)
        tangential = float(np.max(np.abs(sol.tangential_row())))
        mode_rows.append(
            (
                k,
                momentum / scale,
                divergence / scale,
                datum / max(abs(h_w), 1.0e-300),
                tangential / scale,
            )
        )

    write_field_csv(os.path.join(out_dir, "field.csv"), field)
    manifest = field_manifest(field, "field.csv", config=_jsonable(cfg))
    write_manifest(os.path.join(out_dir, "manifest.json"), manifest)

    header = ["k", "momentum", "divergence", "datum_normal", "datum_tangential"]
    _write_csv(os.path.join(out_dir, "solve_residuals.csv"), header, mode_rows)
    worst = max((max(r[1:]) for r in mode_rows), default=0.0)
    passed = cfg["residual_tol"] is None or worst < cfg["residual_tol"]
    report = {
        "command": "solve",
        "config": cfg,
        "n_modes": len(mode_rows),
        "residuals": [dict(zip(header, row)) for row in mode_rows],
        "max_residual": worst,
        "passed": passed,
    }
    _write_report(out_dir, "solve_report.json", report)
    click.echo(
        f"solve: {len(mode_rows)} mode(s) on {grid.x_count}x{grid.y_count} grid, "
        f"max residual {worst:.3e}: {'PASS' if passed else 'FAIL'}"
    )
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# verb: energy-audit
# ---------------------------------------------------------------------------


def _cmd_energy_audit(cfg: dict, jobs: int, out_dir: str) -> int:
    constants = _constants_from_config(cfg, epsilon_key=False)
    n_trials = _require_int(cfg, "n_trials", minimum=1)
    _require_number(cfg, "x_length", positive=True)
    bcs = cfg["bcs"]
    if bcs is None:
        bcs = [{"alpha": a, "beta": b} for a, b in ALL_BCS]
    if not isinstance(bcs, list) or not bcs:
        raise ConfigError("'bcs' must be a non-empty list (or null for all nine)")
    specs = []
    for i, entry in enumerate(bcs):
        if (
            not isinstance(entry, dict)
            or set(entry) != {"alpha", "beta"}
            or entry["alpha"] not in (-1, 0, 1)
            or entry["beta"] not in (-1, 0, 1)
        ):
            raise ConfigError(
                f"bcs[{i}] must be {{'alpha': a, 'beta': b}} with a, b in -1, 0, +1"
            )
        specs.append(BcSpec(int(entry["alpha"]), int(entry["beta"])))

    def _one(bc: BcSpec):
        return classify_bc(
            bc,
            rho=constants.rho,
            mu=constants.mu,
            n_trials=n_trials,
            seed=cfg["seed"],
            x_length=float(cfg["x_length"]),
        )

    reports = _map_ordered(_one, specs, jobs)
    rows = []
    section = []
    for rep in reports:
        rows.append(
            (
                rep.bc.alpha,
                rep.bc.beta,
                rep.predicted_class,
                rep.empirical_class,
                rep.adapted_form,
                rep.max_abs_linear_power,
                rep.max_abs_full_power,
                rep.zero_tol,
                rep.witness_floor,
                rep.passed,
            )
        )
        section.append(
            {
                "alpha": rep.bc.alpha,
                "beta": rep.bc.beta,
                "predicted_class": rep.predicted_class,
                "empirical_class": rep.empirical_class,
                "adapted_form": rep.adapted_form,
                "n_trials": rep.n_trials,
                "max_abs_linear_power": rep.max_abs_linear_power,
                "max_abs_full_power": rep.max_abs_full_power,
                "zero_tol": rep.zero_tol,
                "witness_floor": rep.witness_floor,
                "witness_found": rep.empirical_class == "B3",
                "passed": rep.passed,
            }
        )
    all_passed = all(rep.passed for rep in reports)

    header = [
        "alpha",
        "beta",
        "predicted_class",
        "empirical_class",
        "adapted_form",
        "max_abs_linear_power",
        "max_abs_full_power",
        "zero_tol",
        "witness_floor",
        "passed",
    ]
    _write_csv(os.path.join(out_dir, "energy_audit.csv"), header, rows)
    report = {
        "command": "energy-audit",
        "config": cfg,
        "classification": section,
        "passed": all_passed,
    }
    _write_report(out_dir, "energy_audit.json", report)
    for s in section:
        click.echo(
            f"energy-audit: (alpha,beta)=({s['alpha']:+d},{s['beta']:+d}) "
            f"predicted {s['predicted_class']} empirical {s['empirical_class']} "
            f"[form {s['adapted_form']}]: {'PASS' if s['passed'] else 'FAIL'}"
        )
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# verb: run-ns
# ---------------------------------------------------------------------------


def _cmd_run_ns(cfg: dict, jobs: int, out_dir: str) -> int:
    constants = _constants_from_config(cfg, epsilon_key=False)
    grid = _grid_from_config(cfg)
    if grid.y_kind != "cheb":
        raise ConfigError("run-ns requires grid.y_kind = 'cheb'")
    init = cfg["initial"]
    _require_number(init, "amplitude", path="initial")
    _require_int(init, "k", minimum=1, path="initial")
    _require_number(init, "decay", positive=True, path="initial")
    dt = _require_number(cfg, "dt", positive=True)
    n_steps = _require_int(cfg, "n_steps", minimum=1)
    picard_tol = _require_number(cfg, "picard_tol", positive=True)
    picard_max = _require_int(cfg, "picard_max", minimum=1)
    dt_min = cfg["dt_min"]
    if dt_min is not None:
        dt_min = _require_number(cfg, "dt_min", positive=True)

    initial = stream_function_field(
        constants, grid, float(init["amplitude"]), k=int(init["k"]), decay=float(init["decay"])
    )
    stepper = NsStepper(constants, grid)
    result = run_simulation(
        stepper,
        initial,
        dt,
        n_steps,
        dt_min=dt_min,
        picard_tol=picard_tol,
        picard_max=picard_max,
        keep_states=False,
    )

    rows = []
    for i, rep in enumerate(result.reports):
        rows.append(
            (
                i + 1,
                rep.time,
                rep.dt,
                rep.n_iterations,
                rep.gaps[-1] if rep.gaps else 0.0,
                rep.converged,
                rep.max_divergence,
                rep.energy,
            )
        )
    header = [
        "step",
        "time",
        "dt",
        "picard_iterations",
        "picard_gap",
        "converged",
        "max_divergence",
        "kinetic_energy",
    ]
    _write_csv(os.path.join(out_dir, "energy.csv"), header, rows)

    final_field = result.states[-1].field
    write_field_csv(os.path.join(out_dir, "final_field.csv"), final_field)
    write_manifest(
        os.path.join(out_dir, "final_manifest.json"),
        field_manifest(final_field, "final_field.csv", config=_jsonable(cfg)),
    )

    completed = result.status == "completed"
    report = {
        "command": "run-ns",
        "config": cfg,
        "status": result.status,
        "n_steps_accepted": len(result.reports),
        "final_dt": result.final_dt,
        "final_time": result.states[-1].time,
        "initial_energy": result.energies[0],
        "final_energy": result.energies[-1],
        "max_divergence": max((r.max_divergence for r in result.reports), default=0.0),
        "max_picard_iterations": max(
            (r.n_iterations for r in result.reports), default=0
        ),
        "passed": completed,
    }
    _write_report(out_dir, "run_ns.json", report)
    click.echo(
        f"run-ns: {len(result.reports)} step(s), status {result.status}, "
        f"energy {result.energies[0]:.6e} -> {result.energies[-1]:.6e}: "
        f"{'PASS' if completed else 'FAIL'}"
    )
    return 0 if completed else 1


# ---------------------------------------------------------------------------
# click wiring
# ---------------------------------------------------------------------------

_COMMANDS = {
    "verify-symbols": _cmd_verify_symbols,
    "verify-traces": _cmd_verify_traces,
    "solve": _cmd_solve,
    "energy-audit": _cmd_energy_audit,
    "run-ns": _cmd_run_ns,
}


def _global_options(fn):
    fn = click.option(
        "--config",
        "config_path",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="JSON config file merged over the verb's defaults.",
    )(fn)
    fn = click.option("--seed", type=int, default=None, help="Override the config seed.")(fn)
    fn = click.option(
        "--jobs",
        type=int,
        default=None,
        help="Worker-pool width (default: STOKESBC_JOBS or 1).",
    )(fn)
    fn = click.option(
        "--out",
        "out_dir",
        type=click.Path(file_okay=False),
        required=True,
        help="Output directory for reports and data files.",
    )(fn)
    return fn


def _run(command: str, config_path, seed, jobs, out_dir) -> None:
    ctx = click.get_current_context()
    try:
        cfg = _load_config(command, config_path, seed)
        n_jobs = _resolve_jobs(jobs)
        os.makedirs(out_dir, exist_ok=True)
        code = _COMMANDS[command](cfg, n_jobs, out_dir)
    except (ConfigError, InvalidModeError) as exc:
        click.echo(f"config error: {exc}", err=True)
        ctx.exit(2)
    except QuadratureBudgetError as exc:
        click.echo(f"numerical budget exhausted: {exc}", err=True)
        ctx.exit(3)
    except StokesbcError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(1)
    ctx.exit(code)


@click.group()
@click.version_option(package_name="stokesbc")
def main() -> None:
    """Halfspace Stokes boundary-symbol toolbox."""


def _register(name: str, help_text: str) -> None:
    @main.command(name=name, help=help_text)
    @_global_options
    def _cmd(config_path, seed, jobs, out_dir, _name=name):
        _run(_name, config_path, seed, jobs, out_dir)


_register(
    "verify-symbols",
    "Sweep random admissible modes and compare the closed-form boundary-symbol "
    "inverse against the identity and against a polished generic inverse.",
)
_register(
    "verify-traces",
    "Verify the closed trace multipliers against adaptive quadrature of the "
    "reflection kernels over random admissible modes.",
)
_register(
    "solve",
    "Solve the listed lattice modes for a boundary datum and synthesize the "
    "periodic-strip velocity/pressure field (CSV + manifest).",
)
_register(
    "energy-audit",
    "Classify each boundary condition by the sign structure of its wall "
    "boundary power on random constraint-surface trial fields.",
)
_register(
    "run-ns",
    "Run the nonlinear backward-Euler/Picard time march on a periodic strip "
    "and emit per-step energy diagnostics plus the final field.",
)


if __name__ == "__main__":
    main()
