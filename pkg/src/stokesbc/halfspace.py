"""Resolvent mode solves on the half-space and sampled-field assembly.

A mode problem, per tangential frequency xi, is

    omega^2 uhat - mu uhat'' + gradhat p = rho fhat      (momentum)
    i xi . vhat + what'                  = ghat          (divergence)

on y in (0, inf) with decay, omega^2 = rho lambda_eps + mu |xi|^2, plus the
boundary rows at y = 0 selected by (alpha, beta):

    tangential (datum 0 here):
        alpha = 0:    vhat(0)
        alpha = +-1:  -+ mu vhat'(0) - mu i xi what(0)
    normal (datum h_w, the e_y component of the boundary datum):
        beta = 0:     what(0)
        beta = +1:    -2 mu what'(0) + p(0)
        beta = -1:    p(0)

solve_mode handles the homogeneous interior (f = 0, g = 0) with boundary
datum h_w; its solutions are exactly in the span of the two-rate ansatz

    vhat = omega z_v e^{-m y} - i zeta z_w e^{-r y},
    what = i zeta . z_v e^{-m y} + |zeta| z_w e^{-r y},
    phat = kappa lambda_eps z_w e^{-r y},

with m = omega/sqrt(mu), r = |xi|, zeta = sqrt(mu) xi, kappa = rho sqrt(mu).

splitting_solve_mode handles full data (f, g, h_w) by the three-stage
scheme: (1) a pressure built from the divergence datum (plus, for the
pressure-type rows beta = +-1, the harmonic extension of h_w); (2) a
particular velocity from decaying Helmholtz solves of
-gradhat qbar + rho W fhat componentwise, corrected by fast-decay
exponentials so the tangential row vanishes and the divergence trace
matches g(0) (whence div u = g identically); (3) for beta in {0, +1}, a
solve_mode correction carrying the leftover normal datum.  The reported
pressure is qbar + rho q_f + (stage-3 mode pressure), q_f the Dirichlet
potential of the forcing split off by the zero-trace (Weyl-type)
projection.

The sampled-field layer turns dictionaries {k: mode solution} with
xi_k = 2 pi k / L into real fields on a periodic-strip grid, and reads and
writes them deterministically (CSV with columns x,y,u_x,u_y,p; canonical
JSON manifests).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .elliptic import (
    dirichlet_extend_mode,
    divergence_pressure_mode,
    solve_elliptic_mode,
)
from .errors import ProfileError, ZeroModeError
from .grids import graded_grid
from .profiles import (
    ScalarModeProfile,
    VectorModeProfile,
    gradient,
    helmholtz_solve_mode,
)
from .symbols import BcSpec, FluidConstants, ModeParams, solve_coefficients

__all__ = [
    "ModeSolution",
    "SplittingSolution",
    "solve_mode",
    "splitting_solve_mode",
    "forward_data",
    "GridSpec",
    "SampledField",
    "synthesize_field",
    "write_field_csv",
    "read_field_csv",
    "field_manifest",
    "canonical_json",
    "write_manifest",
    "read_manifest",
]


@dataclass(frozen=True)
class ModeSolution:
    """A per-mode flow (velocity profile, pressure profile) tied to its mode
    parameters and boundary-condition pair."""

    mode: ModeParams
    bc: BcSpec
    velocity: VectorModeProfile
    pressure: ScalarModeProfile
    coefficients: tuple | None = None  # (z_v, z_w) when in ansatz form

    def __post_init__(self) -> None:
        if tuple(self.velocity.xi) != tuple(self.mode.xi):
            raise ProfileError("velocity xi does not match mode xi")
        if tuple(self.pressure.xi) != tuple(self.mode.xi):
            raise ProfileError("pressure xi does not match mode xi")

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_coefficients(cls, mode: ModeParams, bc: BcSpec, z_v, z_w) -> "ModeSolution":
        """Assemble the two-rate ansatz profiles from (z_v, z_w)."""
        z_v = np.asarray(z_v, dtype=complex)
        z_w = complex(z_w)
        m = mode.rate_fast
        r = mode.rate_slow
        zeta = np.asarray(mode.zeta, dtype=float)
        xi = mode.xi

        tangential = tuple(
            ScalarModeProfile(
                xi,
                (
                    (mode.omega * z_v[j], m, 0),
                    (-1j * zeta[j] * z_w, r, 0),
                ),
            )
            for j in range(len(xi))
        )
        normal = ScalarModeProfile(
            xi,
            (
                (1j * (zeta @ z_v), m, 0),
                (mode.abs_zeta * z_w, r, 0),
            ),
        )
        pressure = ScalarModeProfile(
            xi, ((mode.kappa * mode.lambda_eps * z_w, r, 0),)
        )
        return cls(
            mode,
            bc,
            VectorModeProfile(xi, tangential, normal),
            pressure,
            coefficients=(z_v, z_w),
        )

    # -- residual calculus ------------------------------------------------------

    def momentum_residual(self) -> VectorModeProfile:
        """omega^2 u - mu u'' + gradhat p, componentwise, as profiles.

        Equals rho fhat for a solution of the forced problem; vanishes (to
        roundoff) for solve_mode output.
        """
        om2 = self.mode.omega**2
        mu = self.mode.constants.mu
        p = self.pressure
        tang = tuple(
            om2 * c - mu * c.derivative().derivative() + (1j * xij) * p
            for xij, c in zip(self.mode.xi, self.velocity.tangential)
        )
        w = self.velocity.normal
        norm = om2 * w - mu * w.derivative().derivative() + p.derivative()
        return VectorModeProfile(self.mode.xi, tang, norm)

    def divergence(self) -> ScalarModeProfile:
        return self.velocity.divergence()

    def tangential_row(self, alpha: int | None = None) -> np.ndarray:
        """Value of the tangential boundary row (length n-1 vector)."""
        if alpha is None:
            alpha = self.bc.alpha
        mu = self.mode.constants.mu
        xi = np.asarray(self.mode.xi, dtype=float)
        if alpha == 0:
            return np.array([c(0.0) for c in self.velocity.tangential])
        if alpha in (1, -1):
            dv0 = np.array([c.derivative()(0.0) for c in self.velocity.tangential])
            w0 = self.velocity.normal(0.0)
            return -float(alpha) * mu * dv0 - mu * 1j * xi * w0
        raise ValueError(f"alpha must be in {{-1,0,+1}}, got {alpha}")

    def normal_row(self, beta: int | None = None) -> complex:
        """Value of the normal boundary row (scalar)."""
        if beta is None:
            beta = self.bc.beta
        mu = self.mode.constants.mu
        if beta == 0:
            return self.velocity.normal(0.0)
        if beta == 1:
            return -2.0 * mu * self.velocity.normal.derivative()(0.0) + self.pressure(0.0)
        if beta == -1:
            return self.pressure(0.0)
        raise ValueError(f"beta must be in {{-1,0,+1}}, got {beta}")

    def __add__(self, other: "ModeSolution") -> "ModeSolution":
        if not isinstance(other, ModeSolution):
            return NotImplemented
        return ModeSolution(
            self.mode,
            self.bc,
            self.velocity + other.velocity,
            self.pressure + other.pressure,
        )


def solve_mode(mode: ModeParams, bc: BcSpec, h_w) -> ModeSolution:
    """Solve the homogeneous-interior mode problem with normal datum h_w.

    h_w is the e_y component of the boundary datum (equivalently -h . nu for
    the outer normal nu = -e_y).  The tangential datum is zero.  Every such
    decaying solution lies in the two-rate ansatz span, so the result is in
    coefficient form.  For beta in {0, +1} the coefficients come from the
    boundary-symbol inverse; the beta = -1 (pressure Dirichlet) row
    determines z_w = h_w / (kappa lambda_eps) directly and the tangential
    row then fixes z_v in closed form.
    """
    h_w = complex(h_w)
    if bc.beta in (0, 1):
        z_v, z_w = solve_coefficients(mode, bc, h_w)
        return ModeSolution.from_coefficients(mode, bc, z_v, z_w)

    z_w = h_w / (mode.kappa * mode.lambda_eps)
    zeta = np.asarray(mode.zeta, dtype=float)
    if bc.alpha == 0:
        z_v = (1j * zeta) * (z_w / mode.omega)
    elif bc.alpha == -1:
        z_v = np.zeros(len(mode.xi), dtype=complex)
    else:  # alpha == +1
        gamma = 2.0 * mode.abs_zeta * z_w / (mode.omega**2 + mode.abs_zeta**2)
        z_v = gamma * (1j * zeta)
    return ModeSolution.from_coefficients(mode, bc, z_v, z_w)


@dataclass(frozen=True)
class SplittingSolution:
    """Outcome of the three-stage solve, with the stage pieces kept for
    inspection."""

    mode: ModeParams
    bc: BcSpec
    velocity: VectorModeProfile
    pressure: ScalarModeProfile
    pressure_divergence: ScalarModeProfile  # stage-1 pressure (incl. h extension)
    pressure_forcing: ScalarModeProfile  # rho * Dirichlet potential of f
    trace_correction: ModeSolution | None  # stage-3 mode (beta in {0, +1})
    residual_datum: complex  # normal datum carried by stage 3

    def as_mode_solution(self) -> ModeSolution:
        return ModeSolution(self.mode, self.bc, self.velocity, self.pressure)


def splitting_solve_mode(
    mode: ModeParams,
    bc: BcSpec,
    f: VectorModeProfile,
    g: ScalarModeProfile,
    h_w,
) -> SplittingSolution:
    """Solve the full mode problem (forcing f, divergence g, normal datum h_w)
    by the pressure / velocity / trace-correction splitting.

    Stage 1 builds qbar: the divergence pressure of g (zero Dirichlet trace)
    plus, for beta = +-1, the decaying harmonic extension of h_w.  Stage 2
    solves omega^2 u - mu u'' = -gradhat qbar + rho W fhat componentwise
    (W the zero-trace potential projection, whose potential q_f joins the
    pressure as rho q_f) and adds fast exponentials A e^{-m y}, B e^{-m y}
    fixing the tangential row to zero and the divergence trace to g(0) --
    which forces div u = g identically, since the defect solves the
    homogeneous decaying Helmholtz problem with zero trace.  Stage 3 (only
    beta in {0, +1}) adds solve_mode on the leftover normal datum.
    """
    h_w = complex(h_w)
    if mode.abs_xi == 0.0:
        raise ZeroModeError(
            "splitting_solve_mode needs |xi| > 0; the mean mode has its own "
            "one-dimensional solver"
        )
    if tuple(f.xi) != tuple(mode.xi) or tuple(g.xi) != tuple(mode.xi):
        raise ProfileError("f/g xi does not match mode xi")

    mu = mode.constants.mu
    rho = mode.constants.rho
    m = mode.rate_fast
    xi = np.asarray(mode.xi, dtype=float)
    n1 = len(mode.xi)

    # stage 1: pressure from the divergence datum (+ boundary extension)
    q_bar = divergence_pressure_mode(mode, g)
    if bc.beta != 0:
        q_bar = q_bar + dirichlet_extend_mode(mode.xi, h_w)

    # zero-trace potential part of the forcing
    q_f = solve_elliptic_mode(mode.xi, -1.0 * f.divergence(), "dirichlet_zero")
    f_proj = f - gradient(q_f)

    # stage 2: particular velocity + fast-exponential correction
    rhs = (-1.0) * gradient(q_bar) + rho * f_proj
    om2 = mode.omega**2
    v_p = [
        helmholtz_solve_mode(om2, mu, comp, "dirichlet", 0.0)
        for comp in rhs.tangential
    ]
    w_p = helmholtz_solve_mode(om2, mu, rhs.normal, "dirichlet", 0.0)

    v_p0 = np.array([c(0.0) for c in v_p])
    dv_p0 = np.array([c.derivative()(0.0) for c in v_p])
    w_p0 = w_p(0.0)
    dw_p0 = w_p.derivative()(0.0)
    g0 = complex(g(0.0))

    if bc.alpha == 0:
        amp_v = -v_p0
        amp_w = (1j * xi @ (v_p0 + amp_v) + dw_p0 - g0) / m
    else:
        sgn = float(bc.alpha)
        block = np.zeros((n1 + 1, n1 + 1), dtype=complex)
        block[:n1, :n1] = sgn * mu * m * np.eye(n1)
        block[:n1, n1] = -mu * 1j * xi
        block[n1, :n1] = 1j * xi
        block[n1, n1] = -m
        rhs_vec = np.concatenate(
            [
                sgn * mu * dv_p0 + mu * 1j * xi * w_p0,
                [g0 - 1j * xi @ v_p0 - dw_p0],
            ]
        )
        sol = np.linalg.solve(block, rhs_vec)
        amp_v = sol[:n1]
        amp_w = sol[n1]

    tangential = tuple(
        v_p[j] + ScalarModeProfile.single(mode.xi, amp_v[j], m) for j in range(n1)
    )
    normal = w_p + ScalarModeProfile.single(mode.xi, amp_w, m)
    velocity = VectorModeProfile(mode.xi, tangential, normal)
    pressure = q_bar + rho * q_f

    partial = ModeSolution(mode, bc, velocity, pressure)
    if bc.beta == -1:
        return SplittingSolution(
            mode, bc, velocity, pressure, q_bar, rho * q_f, None, 0.0
        )

    resid = h_w - partial.normal_row(bc.beta)
    correction = solve_mode(mode, bc, resid)
    return SplittingSolution(
        mode,
        bc,
        velocity + correction.velocity,
        pressure + correction.pressure,
        q_bar,
        rho * q_f,
        correction,
        resid,
    )


def forward_data(
    solution: ModeSolution,
    require_zero_tangential: bool = True,
    tol: float = 1.0e-9,
):
    """Recover (f, g, h_w) that the given flow solves, for round-trip tests.

    f = (omega^2 u - mu u'' + gradhat p)/rho, g = div u, h_w = the normal
    boundary row of solution.bc.  The splitting solver takes a zero
    tangential datum, so by default the tangential row must vanish (add
    interior bumps with double zeros at the wall to keep it so).
    """
    mode, bc = solution.mode, solution.bc
    f = (1.0 / mode.constants.rho) * solution.momentum_residual()
    g = solution.divergence()
    h_w = solution.normal_row(bc.beta)
    if require_zero_tangential:
        row = solution.tangential_row(bc.alpha)
        scale = max(1.0, abs(h_w))
        if np.max(np.abs(row)) > tol * scale:
            raise ProfileError(
                f"tangential boundary row is not homogeneous: |row| = "
                f"{np.max(np.abs(row)):.3e}"
            )
    return f, g, h_w


# ---------------------------------------------------------------------------
# sampled fields on a periodic strip (n = 2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid on the periodic strip [0, x_length) x [0, y_max].

    x nodes are uniform without the right endpoint (periodic).  y nodes are
    selected by y_kind: 'uniform', 'graded' (exponential map of strength
    y_grading), or 'cheb' (Chebyshev-Lobatto points mapped to [0, y_max],
    wall first).
    """

    x_length: float
    x_count: int
    y_max: float
    y_count: int
    y_grading: float = 0.0
    y_kind: str = "uniform"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_length) and self.x_length > 0.0):
            raise ValueError(f"x_length must be positive, got {self.x_length}")
        if not (math.isfinite(self.y_max) and self.y_max > 0.0):
            raise ValueError(f"y_max must be positive, got {self.y_max}")
        if self.x_count < 1:
            raise ValueError(f"x_count must be >= 1, got {self.x_count}")
        if self.y_count < 2:
            raise ValueError(f"y_count must be >= 2, got {self.y_count}")
        if self.y_kind not in ("uniform", "graded", "cheb"):
            raise ValueError(
                f"y_kind must be 'uniform', 'graded', or 'cheb', got {self.y_kind!r}"
            )
        if self.y_kind == "graded":
            if not (math.isfinite(self.y_grading) and self.y_grading > 0.0):
                raise ValueError(
                    f"y_kind 'graded' needs y_grading > 0, got {self.y_grading}"
                )
        elif not (math.isfinite(self.y_grading) and self.y_grading >= 0.0):
            raise ValueError(f"y_grading must be >= 0, got {self.y_grading}")

    def x_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.x_length, self.x_count, endpoint=False)

    def y_nodes(self) -> np.ndarray:
        if self.y_kind == "cheb":
            j = np.arange(self.y_count)
            return 0.5 * self.y_max * (1.0 - np.cos(np.pi * j / (self.y_count - 1)))
        if self.y_kind == "graded" or self.y_grading > 0.0:
            return graded_grid(self.y_max, self.y_count, self.y_grading)
        return np.linspace(0.0, self.y_max, self.y_count)

    def wavenumber(self, k: int) -> float:
        return 2.0 * math.pi * k / self.x_length


@dataclass
class SampledField:
    """A real velocity/pressure field sampled on a GridSpec grid."""

    grid: GridSpec
    constants: FluidConstants
    x: np.ndarray  # (nx,)
    y: np.ndarray  # (ny,)
    velocity: np.ndarray  # (2, nx, ny), components (u_x, u_y)
    pressure: np.ndarray  # (nx, ny)

    def __post_init__(self) -> None:
        nx, ny = len(self.x), len(self.y)
        if self.velocity.shape != (2, nx, ny):
            raise ValueError(
                f"velocity must have shape (2, {nx}, {ny}), got {self.velocity.shape}"
            )
        if self.pressure.shape != (nx, ny):
            raise ValueError(
                f"pressure must have shape ({nx}, {ny}), got {self.pressure.shape}"
            )


_HERMITIAN_TOL = 1.0e-8


def _check_hermitian_pair(plus: ModeSolution, minus: ModeSolution, y: np.ndarray) -> None:
    sample = y[:: max(1, len(y) // 7)]
    vp = plus.velocity.evaluate(sample)
    vm = minus.velocity.evaluate(sample)
    pp = np.atleast_1d(plus.pressure(sample))
    pm = np.atleast_1d(minus.pressure(sample))
    scale = max(float(np.max(np.abs(vp))), float(np.max(np.abs(pp))), 1.0e-300)
    gap = max(
        float(np.max(np.abs(vm - np.conj(vp)))),
        float(np.max(np.abs(pm - np.conj(pp)))),
    )
    if gap > _HERMITIAN_TOL * scale:
        raise ValueError(
            "mode set is not Hermitian: the -k mode must be the complex "
            f"conjugate of the +k mode (relative gap {gap / scale:.3e})"
        )


def synthesize_field(
    constants: FluidConstants,
    contributions: dict,
    grid: GridSpec,
) -> SampledField:
    """Assemble the real field sum_k e^{i xi_k x} uhat_k(y) on the grid.

    contributions maps integer harmonics k to ModeSolution objects whose
    tangential frequency must equal 2 pi k / x_length.  A k = 0 entry must
    be real; for k != 0 the conjugate partner is implied (and validated for
    consistency if both signs are supplied), each pair contributing
    2 Re(e^{i xi_k x} uhat_k).
    """
    x = grid.x_nodes()
    y = grid.y_nodes()
    nx, ny = len(x), len(y)
    u = np.zeros((2, nx, ny))
    p = np.zeros((nx, ny))

    done: set[int] = set()
    for k in sorted(contributions):
        if abs(k) in done:
            continue
        done.add(abs(k))
        sol = contributions[k]
        if not isinstance(sol, ModeSolution):
            raise TypeError(f"contribution {k} is not a ModeSolution")
        if sol.mode.constants != constants:
            raise ValueError(f"contribution {k} has mismatched fluid constants")
        expected = grid.wavenumber(k)
        got = sol.mode.xi
        if len(got) != 1 or abs(got[0] - expected) > 1.0e-12 * max(1.0, abs(expected)):
            raise ValueError(
                f"contribution {k} has xi = {got}, expected ({expected},)"
            )

        vhat = sol.velocity.evaluate(y)  # (2, ny)
        phat = np.atleast_1d(sol.pressure(y))
        if k == 0:
            scale = max(float(np.max(np.abs(vhat))), float(np.max(np.abs(phat))), 1e-300)
            imag = max(float(np.max(np.abs(vhat.imag))), float(np.max(np.abs(phat.imag))))
            if imag > _HERMITIAN_TOL * scale:
                raise ValueError(
                    f"k = 0 contribution must be real (imaginary part {imag:.3e})"
                )
            u += vhat.real[:, None, :]
            p += phat.real[None, :]
        else:
            if -k in contributions:
                _check_hermitian_pair(sol, contributions[-k], y)
            phase = np.exp(1j * expected * x)  # (nx,)
            u += 2.0 * np.real(phase[None, :, None] * vhat[:, None, :])
            p += 2.0 * np.real(phase[:, None] * phat[None, :])

    return SampledField(grid, constants, x, y, u, p)


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------

_CSV_COLUMNS = ("x", "y", "u_x", "u_y", "p")


def write_field_csv(path, field: SampledField) -> None:
    """Write the field as CSV with fixed columns x,y,u_x,u_y,p.

    Rows run over x (outer) then y (inner); floats are printed with repr,
    which round-trips exactly, so re-reading and re-writing is
    byte-identical.
    """
    lines = [",".join(_CSV_COLUMNS)]
    for i in range(len(field.x)):
        xv = float(field.x[i])
        for j in range(len(field.y)):
            lines.append(
                ",".join(
                    repr(float(v))
                    for v in (
                        xv,
                        field.y[j],
                        field.velocity[0, i, j],
                        field.velocity[1, i, j],
                        field.pressure[i, j],
                    )
                )
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_field_csv(path) -> dict:
    """Read a field CSV back into arrays (inverse of write_field_csv).

    Returns a dict with 1-d node arrays 'x', 'y' and full arrays 'u_x',
    'u_y', 'p' of shape (nx, ny).
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln]
    header = tuple(lines[0].split(","))
    if header != _CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    x_nodes = rows[:, 0]
    nx = len(np.unique(x_nodes))
    ny = len(rows) // nx
    if nx * ny != len(rows):
        raise ValueError("CSV rows do not form a full tensor grid")
    shaped = rows.reshape(nx, ny, 5)
    return {
        "x": shaped[:, 0, 0].copy(),
        "y": shaped[0, :, 1].copy(),
        "u_x": shaped[:, :, 2].copy(),
        "u_y": shaped[:, :, 3].copy(),
        "p": shaped[:, :, 4].copy(),
    }


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def field_manifest(field: SampledField, data_file: str, config: dict | None = None) -> dict:
    """Pure-data description of a written field (grid, constants, file)."""
    manifest = {
        "format": "stokesbc-field",
        "version": 1,
        "columns": list(_CSV_COLUMNS),
        "data_file": data_file,
        "grid": {
            "x_length": field.grid.x_length,
            "x_count": field.grid.x_count,
            "y_max": field.grid.y_max,
            "y_count": field.grid.y_count,
            "y_grading": field.grid.y_grading,
            "y_kind": field.grid.y_kind,
        },
        "constants": {
            "rho": field.constants.rho,
            "mu": field.constants.mu,
            "epsilon": field.constants.epsilon,
        },
    }
    if config is not None:
        manifest["config"] = config
    return manifest


def write_manifest(path, manifest: dict) -> None:
    Path(path).write_text(canonical_json(manifest), encoding="utf-8")


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
