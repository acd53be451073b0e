"""Kinetic-energy functionals, boundary-power audits, and the empirical
boundary-condition classification.

Conventions (2-d strip, wall at y = 0, outer normal nu = -e_y there):

    (grad u)_{ij} = d_i u_j,
    D = (grad u + grad u^T)/2,     R = (grad u - grad u^T)/2,
    S = 2 mu D - p I,              T = 2 mu R - p I.

Multiplying the momentum equation by u and integrating by parts gives two
equivalent balances for divergence-free fields (E = int rho |u|^2 / 2):

    dE/dt + int_G rho/2 |u|^2 (u.nu) + 2 mu int |D|^2 - int_G u.(nu^T S) = 0,
    dE/dt + int_G rho/2 |u|^2 (u.nu) + 2 mu int |R|^2 - int_G u.(nu^T T) = 0,

where the boundary contraction is on the left index, (nu^T X)_j = nu_i X_ij
(the order matters for the antisymmetric T).  The convective cubic term is
present for the nonlinear equations and absent for the linear ones.

At the wall the traces reduce to

    u.nu = -w,
    (nu^T S)_x = -mu (d_y v + d_x w),   (nu^T S)_y = p - 2 mu d_y w,
    (nu^T T)_x = -mu (d_y v - d_x w),   (nu^T T)_y = p,

so each boundary-condition pair (alpha, beta) with homogeneous data pins
part of the integrand:

    alpha = 0: v = 0        alpha = +1: d_y v = -d_x w   alpha = -1: d_y v = d_x w
    beta  = 0: w = 0        beta  = +1: p = 2 mu d_y w   beta  = -1: p = 0

Classes (see BcSpec): B1 (all beta = 0 pairs) kills the full convective
boundary power, B2 kills the linear one, B3 ((+1,-1) and (-1,+1)) kills
neither.  The vanishing happens pointwise in the adapted stress form: T
when alpha = -1 or beta = -1, else S.  classify_bc measures these powers on
random fields drawn from the constraint surface and compares with the
prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AuditError
from .grids import diff_matrix, trapezoid_weights
from .halfspace import SampledField
from .symbols import BcSpec

__all__ = [
    "TensorField",
    "tensors",
    "kinetic_energy",
    "dissipation",
    "boundary_power",
    "convective_flux",
    "power_s",
    "power_s_alt",
    "power_ns",
    "power_ns_alt",
    "EnergyReport",
    "energy_balance_residual",
    "ClassificationReport",
    "classify_bc",
    "CompatibilityEntry",
    "CompatibilityReport",
    "check_compatibility",
]


# ---------------------------------------------------------------------------
# discrete differential calculus on sampled fields
# ---------------------------------------------------------------------------


def _ddx(arr: np.ndarray, x_length: float) -> np.ndarray:
    """Spectral x-derivative along axis 0 (periodic)."""
    nx = arr.shape[0]
    k = 2.0 * np.pi * np.fft.rfftfreq(nx, d=1.0 / nx) / x_length
    spec = np.fft.rfft(arr, axis=0)
    spec *= (1j * k)[:, None]
    if nx % 2 == 0:
        spec[-1] = 0.0  # drop the unpaired Nyquist mode from the derivative
    return np.fft.irfft(spec, n=nx, axis=0)


def _y_derivative_matrix(y: np.ndarray) -> np.ndarray:
    return diff_matrix(y, deriv=1, npts=min(5, len(y)))


@dataclass(frozen=True)
class TensorField:
    """Velocity gradient and the derived tensors of a sampled field.

    grad[i, j] = d_i u_j; sym/antisym are D and R; stress_sym/stress_antisym
    are S = 2 mu D - p I and T = 2 mu R - p I.  All arrays have trailing
    shape (nx, ny).
    """

    field: SampledField
    grad: np.ndarray
    sym: np.ndarray
    antisym: np.ndarray
    stress_sym: np.ndarray
    stress_antisym: np.ndarray


def tensors(field: SampledField) -> TensorField:
    u = field.velocity
    mu = field.constants.mu
    dmat = _y_derivative_matrix(field.y)
    grad = np.empty((2, 2) + field.pressure.shape)
    for j in range(2):
        grad[0, j] = _ddx(u[j], field.grid.x_length)
        grad[1, j] = u[j] @ dmat.T
    sym = 0.5 * (grad + grad.transpose(1, 0, 2, 3))
    antisym = 0.5 * (grad - grad.transpose(1, 0, 2, 3))
    eye_p = np.einsum("ij,xy->ijxy", np.eye(2), field.pressure)
    return TensorField(
        field=field,
        grad=grad,
        sym=sym,
        antisym=antisym,
        stress_sym=2.0 * mu * sym - eye_p,
        stress_antisym=2.0 * mu * antisym - eye_p,
    )


def _weights(field: SampledField) -> tuple[float, np.ndarray]:
    wx = field.grid.x_length / len(field.x)
    return wx, trapezoid_weights(field.y)


def kinetic_energy(field: SampledField) -> float:
    """E = int rho |u|^2 / 2 over the strip."""
    wx, wy = _weights(field)
    dens = 0.5 * field.constants.rho * np.sum(field.velocity**2, axis=0)
    return float(wx * np.sum(dens @ wy))


def dissipation(field: SampledField, form: str = "S", tensor: TensorField | None = None) -> float:
    """2 mu int |D|^2 (form 'S') or 2 mu int |R|^2 (form 'T')."""
    t = tensor if tensor is not None else tensors(field)
    rate = t.sym if _check_form(form) == "S" else t.antisym
    wx, wy = _weights(field)
    dens = np.sum(rate**2, axis=(0, 1))
    return float(2.0 * field.constants.mu * wx * np.sum(dens @ wy))


def _check_form(form: str) -> str:
    if form not in ("S", "T"):
        raise ValueError(f"form must be 'S' or 'T', got {form!r}")
    return form


def _face(field: SampledField, face: str) -> tuple[int, float]:
    """(y index, outward normal-y component) for 'wall' or 'top'."""
    if face == "wall":
        return 0, -1.0
    if face == "top":
        return len(field.y) - 1, 1.0
    raise ValueError(f"face must be 'wall' or 'top', got {face!r}")


def boundary_power(
    field: SampledField,
    form: str = "S",
    face: str = "wall",
    tensor: TensorField | None = None,
) -> float:
    """int u . (nu^T X) dx over the chosen horizontal face, X = S or T."""
    t = tensor if tensor is not None else tensors(field)
    stress = t.stress_sym if _check_form(form) == "S" else t.stress_antisym
    j, nu_y = _face(field, face)
    wx = field.grid.x_length / len(field.x)
    # (nu^T X)_c = nu_y * X[y, c]
    integrand = sum(
        field.velocity[c, :, j] * nu_y * stress[1, c, :, j] for c in range(2)
    )
    return float(wx * np.sum(integrand))


def convective_flux(field: SampledField, face: str = "wall") -> float:
    """int rho/2 |u|^2 (u . nu) dx over the chosen horizontal face."""
    j, nu_y = _face(field, face)
    speed_sq = np.sum(field.velocity[:, :, j] ** 2, axis=0)
    wx = field.grid.x_length / len(field.x)
    return float(
        0.5 * field.constants.rho * wx * np.sum(speed_sq * nu_y * field.velocity[1, :, j])
    )


def power_s(field: SampledField, tensor: TensorField | None = None) -> float:
    """Linear boundary power in the symmetric form, int_wall u . (nu^T S)."""
    return boundary_power(field, "S", "wall", tensor)


def power_s_alt(field: SampledField, tensor: TensorField | None = None) -> float:
    """Linear boundary power in the antisymmetric form, int_wall u . (nu^T T)."""
    return boundary_power(field, "T", "wall", tensor)


def power_ns(field: SampledField, tensor: TensorField | None = None) -> float:
    """Convective boundary power, symmetric form."""
    return power_s(field, tensor) - convective_flux(field, "wall")


def power_ns_alt(field: SampledField, tensor: TensorField | None = None) -> float:
    """Convective boundary power, antisymmetric form."""
    return power_s_alt(field, tensor) - convective_flux(field, "wall")


# ---------------------------------------------------------------------------
# discrete energy balance
# ---------------------------------------------------------------------------

_TOP_FACE_REL_TOL = 1.0e-8


@dataclass(frozen=True)
class EnergyReport:
    """Residuals of the discrete kinetic-energy balance along a time series.

    residuals[i] corresponds to series index i+1 (centered time derivative):

        (E[i+2] - E[i]) / (2 dt) + conv[i+1] + diss[i+1] - power[i+1].
    """

    dt: float
    form: str
    convective: bool
    energies: tuple[float, ...]
    dissipations: tuple[float, ...]
    boundary_powers: tuple[float, ...]
    convective_fluxes: tuple[float, ...]
    residuals: tuple[float, ...]

    @property
    def max_abs_residual(self) -> float:
        return max((abs(r) for r in self.residuals), default=0.0)


def energy_balance_residual(
    series,
    dt: float,
    form: str = "S",
    convective: bool = True,
) -> EnergyReport:
    """Audit the kinetic-energy balance on a uniformly sampled time series.

    series is a sequence of at least three SampledField snapshots spaced dt
    apart on a common grid.  The time derivative is the centered difference,
    so with second-order space discretization the residual of an exact
    solution is O(dt^2 + h^2).  Raises AuditError when the truncation face
    y = y_max carries boundary power above 1e-8 of the audit scale (the
    balance then has no business being checked on this window).
    """
    series = list(series)
    if len(series) < 3:
        raise AuditError("energy audit needs at least 3 snapshots")
    if dt <= 0.0 or not math.isfinite(dt):
        raise AuditError(f"dt must be positive, got {dt}")
    _check_form(form)
    g0 = series[0].grid
    for f in series[1:]:
        if f.grid != g0 or f.constants != series[0].constants:
            raise AuditError("energy audit needs a common grid and constants")

    energies, diss, bpow, conv, top = [], [], [], [], []
    for f in series:
        t = tensors(f)
        energies.append(kinetic_energy(f))
        diss.append(dissipation(f, form, t))
        bpow.append(boundary_power(f, form, "wall", t))
        c = convective_flux(f, "wall") if convective else 0.0
        top_power = boundary_power(f, form, "top", t)
        if convective:
            top_power -= convective_flux(f, "top")
        conv.append(c)
        top.append(abs(top_power))

    scale = max(max(energies) / dt, max(diss), 1.0e-300)
    if max(top) > _TOP_FACE_REL_TOL * scale:
        raise AuditError(
            f"truncation face carries boundary power {max(top):.3e} "
            f"(> {_TOP_FACE_REL_TOL:.0e} of the audit scale {scale:.3e}); "
            "enlarge y_max"
        )

    residuals = tuple(
        (energies[i + 1] - energies[i - 1]) / (2.0 * dt)
        + conv[i]
        + diss[i]
        - bpow[i]
        for i in range(1, len(series) - 1)
    )
    return EnergyReport(
        dt=dt,
        form=form,
        convective=convective,
        energies=tuple(energies),
        dissipations=tuple(diss),
        boundary_powers=tuple(bpow),
        convective_fluxes=tuple(conv),
        residuals=residuals,
    )


# ---------------------------------------------------------------------------
# empirical classification of the boundary-condition pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    bc: BcSpec
    predicted_class: str
    empirical_class: str
    adapted_form: str
    n_trials: int
    max_abs_linear_power: float  # adapted-form linear boundary power
    max_abs_full_power: float  # linear minus convective cubic flux
    zero_tol: float
    witness_floor: float

    @property
    def passed(self) -> bool:
        return self.empirical_class == self.predicted_class


def _wall_field(x: np.ndarray, harmonics: dict[float, complex]) -> np.ndarray:
    out = np.zeros_like(x)
    for xi, amp in harmonics.items():
        out += 2.0 * np.real(amp * np.exp(1j * xi * x))
    return out


def classify_bc(
    bc: BcSpec,
    rho: float = 1.0,
    mu: float = 1.0,
    n_trials: int = 100,
    seed: int = 0,
    x_length: float = 2.0 * math.pi,
) -> ClassificationReport:
    """Measure the wall boundary powers on random constraint-surface fields.

    Each trial draws wall traces (v, w, d_y v, d_y w, p) for the harmonics
    k = 1, 2 of the periodic strip, projects them onto the homogeneous
    constraint surface of bc, normalizes to unit trace magnitude, and
    evaluates the adapted-form linear power and the full (convective)
    power exactly (the integrands are trigonometric polynomials, integrated
    on a grid beyond their Nyquist limit).  Two harmonics are essential:
    the cubic flux of a single harmonic integrates to zero regardless of bc,
    which would make B2 indistinguishable from B1.

    The empirical class is B1 if both powers stay below zero_tol over all
    trials, B2 if only the linear power does, and B3 if the linear power
    exceeds the witness floor on some trial.
    """
    rng = np.random.default_rng(seed)
    form = bc.adapted_form
    nx = 64
    x = np.linspace(0.0, x_length, nx, endpoint=False)
    wx = x_length / nx

    scale = x_length * max(1.0, rho, mu)
    zero_tol = 1.0e-10 * scale
    witness_floor = 1.0e-3

    max_lin = 0.0
    max_full = 0.0
    for _ in range(n_trials):
        traces: dict[str, dict[float, complex]] = {
            name: {} for name in ("v", "w", "dv", "dw", "p")
        }
        for k in (1, 2):
            xi = 2.0 * math.pi * k / x_length
            raw = rng.standard_normal(10)
            v0, w0, dv0, dw0, p0 = (
                raw[0] + 1j * raw[1],
                raw[2] + 1j * raw[3],
                raw[4] + 1j * raw[5],
                raw[6] + 1j * raw[7],
                raw[8] + 1j * raw[9],
            )
            # project onto the homogeneous constraint surface
            if bc.beta == 0:
                w0 = 0.0
            elif bc.beta == 1:
                p0 = 2.0 * mu * dw0
            else:
                p0 = 0.0
            if bc.alpha == 0:
                v0 = 0.0
            else:
                dv0 = -bc.alpha * 1j * xi * w0
            mag = max(abs(v0), abs(w0), abs(dv0), abs(dw0), abs(p0))
            if mag == 0.0:
                continue
            for name, amp in zip(("v", "w", "dv", "dw", "p"), (v0, w0, dv0, dw0, p0)):
                traces[name][xi] = amp / mag

        v = _wall_field(x, traces["v"])
        w = _wall_field(x, traces["w"])
        dv = _wall_field(x, traces["dv"])
        dw = _wall_field(x, traces["dw"])
        p = _wall_field(x, traces["p"])
        dxw = _wall_field(x, {xi: 1j * xi * amp for xi, amp in traces["w"].items()})

        if form == "S":
            integrand = -mu * v * (dv + dxw) + w * (p - 2.0 * mu * dw)
        else:
            integrand = -mu * v * (dv - dxw) + w * p
        pi_lin = wx * float(np.sum(integrand))
        conv = wx * float(np.sum(0.5 * rho * (v**2 + w**2) * (-w)))
        max_lin = max(max_lin, abs(pi_lin))
        max_full = max(max_full, abs(pi_lin - conv))

    if max_lin <= zero_tol and max_full <= zero_tol:
        empirical = "B1"
    elif max_lin <= zero_tol:
        empirical = "B2"
    elif max_lin >= witness_floor:
        empirical = "B3"
    else:
        empirical = "indeterminate"

    return ClassificationReport(
        bc=bc,
        predicted_class=bc.preservation_class,
        empirical_class=empirical,
        adapted_form=form,
        n_trials=n_trials,
        max_abs_linear_power=max_lin,
        max_abs_full_power=max_full,
        zero_tol=zero_tol,
        witness_floor=witness_floor,
    )


# ---------------------------------------------------------------------------
# initial-data compatibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompatibilityEntry:
    condition: str
    checked: bool
    reason: str
    residual: float
    passed: bool


@dataclass(frozen=True)
class CompatibilityReport:
    entries: tuple[CompatibilityEntry, ...]

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries if e.checked)


def check_compatibility(
    field: SampledField,
    bc: BcSpec,
    p_exponent: float,
    h_tangential=0.0,
    h_normal=0.0,
    tol: float = 1.0e-6,
) -> CompatibilityReport:
    """Check the initial-data compatibility conditions that the integrability
    exponent makes meaningful.

    C1 (always): the initial field is divergence free.
    C2 (trace condition on the tangential rows): requires p > 3/2 for the
       velocity trace (alpha = 0, v(0) = h) and p > 3 for the stress trace
       (alpha = +-1, -mu (d_y v +- d_x w)(0) = h).
    C3 (normal row): only the velocity-type row beta = 0 constrains the
       initial velocity (w(0) = h, for p > 3/2); the pressure-type rows are
       met by the initial pressure and impose nothing on u0.
    """
    mu = field.constants.mu
    dmat = _y_derivative_matrix(field.y)
    u, w_comp = field.velocity[0], field.velocity[1]
    entries = []

    div = _ddx(u, field.grid.x_length) + w_comp @ dmat.T
    grad_scale = max(1.0, float(np.max(np.abs(tensors(field).grad))))
    res = float(np.max(np.abs(div))) / grad_scale
    entries.append(
        CompatibilityEntry("C1", True, "divergence-free initial field", res, res <= tol)
    )

    h_t = np.broadcast_to(np.asarray(h_tangential, dtype=float), field.x.shape)
    h_n = np.broadcast_to(np.asarray(h_normal, dtype=float), field.x.shape)
    vel_scale = max(1.0, float(np.max(np.abs(field.velocity))))

    if bc.alpha == 0:
        if p_exponent > 1.5:
            res = float(np.max(np.abs(u[:, 0] - h_t))) / vel_scale
            entries.append(
                CompatibilityEntry("C2", True, "velocity trace (p > 3/2)", res, res <= tol)
            )
        else:
            entries.append(
                CompatibilityEntry(
                    "C2", False, "tangential velocity trace undefined for p <= 3/2", 0.0, True
                )
            )
    else:
        if p_exponent > 3.0:
            dv0 = (u @ dmat.T)[:, 0]
            dxw0 = _ddx(w_comp, field.grid.x_length)[:, 0]
            row = -mu * (dv0 + bc.alpha * dxw0)
            res = float(np.max(np.abs(row - h_t))) / max(1.0, mu * vel_scale)
            entries.append(
                CompatibilityEntry("C2", True, "tangential stress trace (p > 3)", res, res <= tol)
            )
        else:
            entries.append(
                CompatibilityEntry(
                    "C2", False, "tangential stress trace undefined for p <= 3", 0.0, True
                )
            )

    if bc.beta == 0:
        if p_exponent > 1.5:
            res = float(np.max(np.abs(w_comp[:, 0] - h_n))) / vel_scale
            entries.append(
                CompatibilityEntry("C3", True, "normal velocity trace (p > 3/2)", res, res <= tol)
            )
        else:
            entries.append(
                CompatibilityEntry(
                    "C3", False, "normal velocity trace undefined for p <= 3/2", 0.0, True
                )
            )
    else:
        entries.append(
            CompatibilityEntry(
                "C3",
                False,
                "pressure-type normal row is met by the initial pressure, "
                "not a constraint on the velocity",
                0.0,
                True,
            )
        )

    return CompatibilityReport(entries=tuple(entries))
