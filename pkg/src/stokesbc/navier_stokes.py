"""Desk-scale nonlinear solver on the periodic strip.

Time discretization is backward Euler with a Picard-frozen convective term:
each step solves the shifted resolvent problem

    (rho/dt) u - mu Lap u + grad p = rho (u_old/dt + f - (u*.grad) u*),
    div u = 0,   u no-slip at y = 0 (bc pair (0, 0)),

where u* is the previous Picard iterate (starting from u_old).  That is the
mode problem of the rest of this package with constants (rho, mu,
epsilon = 1/dt) and lambda = 0, so each step is a family of per-mode
boundary-value solves over the x harmonics.

The per-mode backend mirrors the continuous three-stage splitting on a
Chebyshev-Lobatto wall-normal grid:

    (1) a discrete Dirichlet solve (xi^2 - D^2) q = -div Fhat splits the
        forcing datum into rho W Fhat + rho grad q (reported pressure
        rho q);
    (2) one block collocation solve per mode for (vhat, what): interior
        rows (omega^2 - mu D^2) = rho (W Fhat), boundary rows vhat(0) = 0
        (tangential), i xi vhat(0) + (D what)(0) = 0 (divergence trace),
        and vhat(Y) = what(Y) = 0 (truncation); the LU factors are cached
        per (mode, dt);
    (3) the exponential two-rate ansatz correction carrying the leftover
        normal trace -what(0), sampled on the nodes (its pressure joins the
        reported pressure).

The mean mode xi = 0 reduces to what == 0, a one-dimensional Helmholtz
solve for vbar with vbar(0) = vbar(Y) = 0, and the hydrostatic integration
pbar' = rho Fbar_y with pbar(Y) = 0.

The driver halves dt when Picard stalls or the kinetic energy grows for
three consecutive accepted steps, and stops with status 'blowup_suspected'
at dt_min.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .energy import kinetic_energy
from .errors import InvalidModeError
from .grids import cheb_lobatto, diff_matrix
from .halfspace import GridSpec, ModeSolution, SampledField, solve_mode
from .symbols import BcSpec, FluidConstants, derive_mode

__all__ = [
    "NsState",
    "IterationReport",
    "SimulationResult",
    "NsStepper",
    "nonlinearity",
    "stream_function_field",
    "run_simulation",
]

_NS_BC = BcSpec(0, 0)  # no-slip


@dataclass(frozen=True)
class NsState:
    """A snapshot of the evolving field."""

    time: float
    field: SampledField


@dataclass(frozen=True)
class IterationReport:
    """Per-step Picard diagnostics."""

    time: float
    dt: float
    n_iterations: int
    gaps: tuple[float, ...]
    converged: bool
    max_divergence: float
    energy: float


@dataclass(frozen=True)
class SimulationResult:
    status: str  # 'completed' | 'blowup_suspected'
    states: tuple[NsState, ...]
    reports: tuple[IterationReport, ...]
    energies: tuple[float, ...]
    final_dt: float


def _ddx_spec(arr: np.ndarray, x_length: float) -> np.ndarray:
    nx = arr.shape[0]
    k = 2.0 * np.pi * np.fft.rfftfreq(nx, d=1.0 / nx) / x_length
    spec = np.fft.rfft(arr, axis=0)
    spec *= (1j * k)[:, None]
    if nx % 2 == 0:
        spec[-1] = 0.0
    return np.fft.irfft(spec, n=nx, axis=0)


def _ddx_fd(arr: np.ndarray, x_length: float) -> np.ndarray:
    nx = arr.shape[0]
    h = x_length / nx
    return (np.roll(arr, -1, axis=0) - np.roll(arr, 1, axis=0)) / (2.0 * h)


def nonlinearity(
    field: SampledField, method: str = "spectral", ddy: np.ndarray | None = None
) -> np.ndarray:
    """-(u . grad) u on the grid, shape (2, nx, ny).

    method 'spectral' differentiates x by FFT and y by 5-point stencils
    (or a supplied derivative matrix); method 'fd' uses second-order
    central differences in both directions, as an independent cross-check.
    No density factor is applied: the result is the acceleration datum the
    stepper adds to f.
    """
    u = field.velocity
    if method == "spectral":
        ddx = _ddx_spec
        dmat = ddy if ddy is not None else diff_matrix(field.y, 1, npts=min(5, len(field.y)))
    elif method == "fd":
        ddx = _ddx_fd
        dmat = diff_matrix(field.y, 1, npts=min(3, len(field.y)))
    else:
        raise ValueError(f"method must be 'spectral' or 'fd', got {method!r}")
    out = np.empty_like(u)
    for c in range(2):
        gx = ddx(u[c], field.grid.x_length)
        gy = u[c] @ dmat.T
        out[c] = -(u[0] * gx + u[1] * gy)
    return out


def stream_function_field(
    constants: FluidConstants,
    grid: GridSpec,
    amplitude: float,
    k: int = 1,
    decay: float = 1.0,
) -> SampledField:
    """Divergence-free no-slip initial field from psi = A sin(xi x) y^2 e^{-c y}.

    u = (d_y psi, -d_x psi) vanishes with its tangential trace at the wall
    (double zero in y), so it is compatible with the no-slip pair (0, 0).
    The pressure starts at zero.
    """
    x = grid.x_nodes()
    y = grid.y_nodes()
    xi = grid.wavenumber(k)
    shape_y = y * y * np.exp(-decay * y)
    dshape_y = (2.0 * y - decay * y * y) * np.exp(-decay * y)
    sin_x = np.sin(xi * x)
    cos_x = np.cos(xi * x)
    u = np.empty((2, len(x), len(y)))
    u[0] = amplitude * sin_x[:, None] * dshape_y[None, :]
    u[1] = -amplitude * xi * cos_x[:, None] * shape_y[None, :]
    p = np.zeros((len(x), len(y)))
    return SampledField(grid, constants, x, y, u, p)


class NsStepper:
    """Backward-Euler/Picard stepper on a (uniform x) x (Chebyshev y) grid."""

    def __init__(self, constants: FluidConstants, grid: GridSpec):
        if grid.y_kind != "cheb":
            raise InvalidModeError(
                "NsStepper needs a GridSpec with y_kind='cheb' "
                f"(got {grid.y_kind!r})"
            )
        self.constants = constants
        self.grid = grid
        self.x = grid.x_nodes()
        self.y = grid.y_nodes()
        self.nx = len(self.x)
        self.ny = len(self.y)
        _, d_std = cheb_lobatto(self.ny - 1)
        self.dy = (-2.0 / grid.y_max) * d_std
        self.dy2 = self.dy @ self.dy
        self.n_modes = self.nx // 2 + 1
        self.xi = 2.0 * np.pi * np.fft.rfftfreq(self.nx, d=1.0 / self.nx) / grid.x_length
        self._pressure_lu: dict[int, tuple] = {}
        self._velocity_lu: dict[tuple[int, float], tuple] = {}
        self._mean_velocity_lu: dict[float, tuple] = {}
        self._mean_pressure_lu: tuple | None = None

    # -- cached factorizations -------------------------------------------------

    def _pressure_system(self, ki: int) -> tuple:
        if ki not in self._pressure_lu:
            n = self.ny
            mat = self.xi[ki] ** 2 * np.eye(n) - self.dy2
            mat[0, :] = 0.0
            mat[0, 0] = 1.0
            mat[n - 1, :] = 0.0
            mat[n - 1, n - 1] = 1.0
            self._pressure_lu[ki] = lu_factor(mat.astype(complex))
        return self._pressure_lu[ki]

    def _velocity_system(self, ki: int, dt: float) -> tuple:
        key = (ki, dt)
        if key not in self._velocity_lu:
            n = self.ny
            mu = self.constants.mu
            omega_sq = self.constants.rho / dt + mu * self.xi[ki] ** 2
            helm = omega_sq * np.eye(n) - mu * self.dy2
            block = np.zeros((2 * n, 2 * n), dtype=complex)
            block[:n, :n] = helm
            block[n:, n:] = helm
            # tangential row: vhat(0) = 0
            block[0, :] = 0.0
            block[0, 0] = 1.0
            # truncation rows
            block[n - 1, :] = 0.0
            block[n - 1, n - 1] = 1.0
            block[2 * n - 1, :] = 0.0
            block[2 * n - 1, 2 * n - 1] = 1.0
            # divergence-trace row: i xi vhat(0) + (D what)(0) = 0
            block[n, :] = 0.0
            block[n, 0] = 1j * self.xi[ki]
            block[n, n:] = self.dy[0, :]
            self._velocity_lu[key] = lu_factor(block)
        return self._velocity_lu[key]

    def _mean_velocity_system(self, dt: float) -> tuple:
        if dt not in self._mean_velocity_lu:
            n = self.ny
            mu = self.constants.mu
            helm = (self.constants.rho / dt) * np.eye(n) - mu * self.dy2
            helm[0, :] = 0.0
            helm[0, 0] = 1.0
            helm[n - 1, :] = 0.0
            helm[n - 1, n - 1] = 1.0
            self._mean_velocity_lu[dt] = lu_factor(helm)
        return self._mean_velocity_lu[dt]

    def _mean_pressure_system(self) -> tuple:
        if self._mean_pressure_lu is None:
            n = self.ny
            mat = self.dy.copy()
            mat[n - 1, :] = 0.0
            mat[n - 1, n - 1] = 1.0
            self._mean_pressure_lu = lu_factor(mat)
        return self._mean_pressure_lu

    # -- the shifted-resolvent solve --------------------------------------------

    def solve_stokes(self, f_datum: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
        """Solve the dt-shifted resolvent problem with datum f (2, nx, ny).

        Returns (velocity (2, nx, ny), pressure (nx, ny)), both real.
        """
        rho = self.constants.rho
        n = self.ny
        spec = np.fft.rfft(f_datum, axis=1)  # (2, n_modes, ny)
        u_spec = np.zeros((2, self.n_modes, n), dtype=complex)
        p_spec = np.zeros((self.n_modes, n), dtype=complex)

        # mean mode: what = 0, 1-d Helmholtz for vbar, hydrostatic pbar
        fx = spec[0, 0].copy()
        fy = spec[1, 0].copy()
        rhs_v = rho * fx
        rhs_v[0] = 0.0
        rhs_v[n - 1] = 0.0
        u_spec[0, 0] = lu_solve(self._mean_velocity_system(dt), rhs_v)
        rhs_p = rho * fy
        rhs_p[n - 1] = 0.0
        p_spec[0] = lu_solve(self._mean_pressure_system(), rhs_p)

        last = self.n_modes - 1 if self.nx % 2 == 0 else self.n_modes
        for ki in range(1, last):
            xi = self.xi[ki]
            fhat = spec[:, ki, :]  # (2, ny)

            # stage 1: potential part of the datum
            div_f = 1j * xi * fhat[0] + self.dy @ fhat[1]
            rhs_q = -div_f
            rhs_q[0] = 0.0
            rhs_q[n - 1] = 0.0
            q = lu_solve(self._pressure_system(ki), rhs_q)
            wf_x = fhat[0] - 1j * xi * q
            wf_y = fhat[1] - self.dy @ q

            # stage 2: block collocation solve
            rhs = np.zeros(2 * n, dtype=complex)
            rhs[:n] = rho * wf_x
            rhs[n:] = rho * wf_y
            rhs[0] = 0.0
            rhs[n - 1] = 0.0
            rhs[n] = 0.0
            rhs[2 * n - 1] = 0.0
            sol = lu_solve(self._velocity_system(ki, dt), rhs)
            vhat = sol[:n]
            what = sol[n:]
            phat = rho * q

            # stage 3: exponential trace correction for the leftover w(0)
            resid = -what[0]
            if resid != 0.0:
                mode = derive_mode(
                    FluidConstants(rho, self.constants.mu, 1.0 / dt), 0.0, (xi,)
                )
                corr: ModeSolution = solve_mode(mode, _NS_BC, resid)
                samples = corr.velocity.evaluate(self.y)
                vhat = vhat + samples[0]
                what = what + samples[1]
                phat = phat + corr.pressure(self.y)

            u_spec[0, ki] = vhat
            u_spec[1, ki] = what
            p_spec[ki] = phat

        u = np.fft.irfft(u_spec, n=self.nx, axis=1)
        p = np.fft.irfft(p_spec, n=self.nx, axis=0)
        return u, p

    # -- time stepping -----------------------------------------------------------

    def step(
        self,
        state: NsState,
        dt: float,
        forcing=None,
        picard_tol: float = 1.0e-8,
        picard_max: int = 10,
    ) -> tuple[NsState, IterationReport]:
        """One backward-Euler step with Picard iteration on the convection.

        forcing, if given, is called as forcing(t_next) and must return an
        array (2, nx, ny).  The gap is the sup-norm distance between
        consecutive Picard velocity iterates.
        """
        if dt <= 0.0 or not math.isfinite(dt):
            raise ValueError(f"dt must be positive, got {dt}")
        u_old = state.field.velocity
        t_next = state.time + dt
        f_ext = forcing(t_next) if forcing is not None else 0.0

        guess = state.field
        gaps: list[float] = []
        converged = False
        u_new, p_new = u_old, state.field.pressure
        for _ in range(picard_max):
            f_datum = u_old / dt + f_ext + nonlinearity(guess, ddy=self.dy)
            u_new, p_new = self.solve_stokes(f_datum, dt)
            gap = float(np.max(np.abs(u_new - guess.velocity)))
            gaps.append(gap)
            guess = SampledField(self.grid, self.constants, self.x, self.y, u_new, p_new)
            if gap < picard_tol:
                converged = True
                break

        div = _ddx_spec(u_new[0], self.grid.x_length) + u_new[1] @ self.dy.T
        new_field = guess
        new_state = NsState(time=t_next, field=new_field)
        report = IterationReport(
            time=t_next,
            dt=dt,
            n_iterations=len(gaps),
            gaps=tuple(gaps),
            converged=converged,
            max_divergence=float(np.max(np.abs(div))),
            energy=kinetic_energy(new_field),
        )
        return new_state, report


def run_simulation(
    stepper: NsStepper,
    initial: SampledField,
    dt: float,
    n_steps: int,
    forcing=None,
    dt_min: float | None = None,
    picard_tol: float = 1.0e-8,
    picard_max: int = 10,
    keep_states: bool = True,
) -> SimulationResult:
    """March n_steps accepted steps, halving dt on trouble.

    A step is rejected (and dt halved) when Picard fails to converge; dt is
    also halved after three consecutive accepted steps with growing kinetic
    energy.  Once dt would fall below dt_min (default dt / 1024) the run
    stops with status 'blowup_suspected'.
    """
    if dt_min is None:
        dt_min = dt / 1024.0
    state = NsState(time=0.0, field=initial)
    states = [state]
    reports: list[IterationReport] = []
    energies = [kinetic_energy(initial)]
    growth_streak = 0
    accepted = 0
    status = "completed"

    while accepted < n_steps:
        candidate, report = stepper.step(
            state, dt, forcing=forcing, picard_tol=picard_tol, picard_max=picard_max
        )
        if not report.converged:
            dt = dt / 2.0
            if dt < dt_min:
                status = "blowup_suspected"
                break
            continue
        state = candidate
        reports.append(report)
        energies.append(report.energy)
        if keep_states:
            states.append(state)
        accepted += 1
        if report.energy > energies[-2]:
            growth_streak += 1
        else:
            growth_streak = 0
        if growth_streak >= 3:
            growth_streak = 0
            dt = dt / 2.0
            if dt < dt_min:
                status = "blowup_suspected"
                break

    if not keep_states:
        states.append(state)
    return SimulationResult(
        status=status,
        states=tuple(states),
        reports=tuple(reports),
        energies=tuple(energies),
        final_dt=dt,
    )
