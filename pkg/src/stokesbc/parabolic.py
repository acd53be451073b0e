"""Reflection kernels for the divergence-form parabolic problem and the
kernel-route mode solver, with a finite-difference oracle and the trace
verification sweep.

The special velocity solutions driven by a decaying harmonic pressure
p(y) = P e^{-|xi| y} solve, per mode,

    omega^2 vhat - mu vhat'' = -i xi phat,
    omega^2 what - mu what'' = -phat',

subject to the boundary condition family indexed by alpha:

    alpha = 0:    [vhat] = 0                     (tangential velocity trace)
    alpha = +-1:  -+ mu [d_y vhat] - mu i xi [what] = 0   (stress trace)
    all alpha:    i xi.[vhat] + [d_y what] = 0   (divergence trace)

They are represented by reflected heat kernels.  With the free-space kernel

    G(y, eta) = (1 / (2 sqrt(mu) omega)) e^{-m |y - eta|},  m = omega/sqrt(mu),

and its image Gr(y, eta) := G(y, -eta), set G± = G ± Gr and

    vhat = - int K_v(y, eta) (i xi phat)(eta) d eta,
    what = - int K_w(y, eta) phat'(eta) d eta,

where for alpha = 0:  K_v = G_-,  K_w = G_+,  and for alpha = +-1:

    K_v^± = (1 - c_v^±) G_+ + c_v^± G_-,    c_v^± = ± |z|(omega+|z|) / (omega^2 ± |z|^2),
    K_w^± = (1 - c_w^±) G_+ + c_w^± G_-,    c_w^± = - |z|(omega-+|z|) / (omega^2 ± |z|^2),

with |z| = |zeta| = sqrt(mu)|xi|.  (Equivalently K = G + R Gr with image
coefficient R = 1 - 2c.)  The coefficients follow from imposing the two
boundary rows on the half-line traces of G/Gr; the denominators are
omega^2 + |zeta|^2 = rho lambda_eps + 2 mu |xi|^2 and
omega^2 - |zeta|^2 = rho lambda_eps, both with positive real part for
admissible modes.  The resulting wall traces reproduce the closed trace
relations

    (T00)  omega(omega + |zeta|) [what](0)        = h   (alpha = 0)
    (T10)  (omega^2 ± |zeta|^2)  [what](0)        = h   (alpha = +-1)
    (T11)  S^alpha (-2 mu [d_y what](0) + [p](0)) = [p](0)

for Neumann-driven (-d_y p(0) = h) resp. Dirichlet-driven pressures, with
S^alpha the beta = +1 trace multiplier.  verify_trace_relations sweeps these
identities with adaptive quadrature on the kernel side.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ProfileError, ZeroModeError
from .profiles import (
    ScalarModeProfile,
    VectorModeProfile,
    apply_reflected_exp,
    convolve_abs_exp,
)
from .quadrature import QuadratureCfg, adaptive_integrate
from .symbols import BcSpec, ModeParams, trace_multiplier

__all__ = [
    "KernelSpec",
    "KernelApplication",
    "VerificationReport",
    "kernel_weight",
    "eval_kernel",
    "eval_kernel_dy",
    "apply_kernel",
    "parabolic_solve_mode",
    "oracle_fd_solve",
    "FdOracleSolution",
    "verify_trace_relations",
]

_KINDS = ("G", "G_plus", "G_minus", "Kv_plus", "Kv_minus", "Kw_plus", "Kw_minus")


@dataclass(frozen=True)
class KernelSpec:
    """A kernel kind bound to a mode-parameter point."""

    kind: str
    mode: ModeParams

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")


def kernel_weight(kind: str, mode: ModeParams) -> complex:
    """Weight c on G_- in K = (1-c) G_+ + c G_- for the given kernel kind."""
    omega = mode.omega
    az = mode.abs_zeta
    if kind == "G":
        return 0.5
    if kind == "G_plus":
        return 0.0
    if kind == "G_minus":
        return 1.0
    if kind == "Kv_plus":
        return az * (omega + az) / (omega**2 + az**2)
    if kind == "Kv_minus":
        return -az * (omega + az) / (omega**2 - az**2)
    if kind == "Kw_plus":
        return -az * (omega - az) / (omega**2 + az**2)
    if kind == "Kw_minus":
        return -az * (omega + az) / (omega**2 - az**2)
    raise ValueError(f"unknown kernel kind {kind!r}")


def _image_coefficient(kind: str, mode: ModeParams) -> complex:
    """R in K = G + R Gr (Gr the image kernel); R = 1 - 2c."""
    return 1.0 - 2.0 * kernel_weight(kind, mode)


def _prefactor(mode: ModeParams) -> complex:
    return 1.0 / (2.0 * math.sqrt(mode.constants.mu) * mode.omega)


def eval_kernel(spec: KernelSpec, y, eta):
    """Evaluate the kernel pointwise (vectorized over y/eta broadcasts)."""
    mode = spec.mode
    m = mode.rate_fast
    y = np.asarray(y, dtype=float)
    eta = np.asarray(eta, dtype=float)
    base = np.exp(-m * np.abs(y - eta))
    refl = np.exp(-m * (y + eta))
    r = _image_coefficient(spec.kind, mode)
    out = _prefactor(mode) * (base + r * refl)
    return out if out.shape else complex(out)


def eval_kernel_dy(spec: KernelSpec, y, eta):
    """d/dy of the kernel (the |y - eta| kink contributes sign(y - eta))."""
    mode = spec.mode
    m = mode.rate_fast
    y = np.asarray(y, dtype=float)
    eta = np.asarray(eta, dtype=float)
    base = -m * np.sign(y - eta) * np.exp(-m * np.abs(y - eta))
    refl = -m * np.exp(-m * (y + eta))
    r = _image_coefficient(spec.kind, mode)
    out = _prefactor(mode) * (base + r * refl)
    return out if out.shape else complex(out)


def _kernel_closed_form(
    spec: KernelSpec, rhs: ScalarModeProfile, y_max: float | None = None
) -> ScalarModeProfile:
    """int_0^inf K(y, eta) rhs(eta) d eta as an exponential-sum profile."""
    mode = spec.mode
    m = mode.rate_fast
    r = _image_coefficient(spec.kind, mode)
    out = convolve_abs_exp(m, rhs, y_max=y_max)
    if r != 0.0:
        out = out + r * apply_reflected_exp(m, rhs)
    return _prefactor(mode) * out


@dataclass(frozen=True)
class KernelApplication:
    """apply_kernel result: tabulated values, the closed form, and their
    observed disagreement."""

    y: np.ndarray
    values: np.ndarray
    closed_form: ScalarModeProfile
    max_mismatch: float
    error_estimate: float


def _truncation_bound(
    mode: ModeParams, rhs: ScalarModeProfile, y_grid: np.ndarray, cfg: QuadratureCfg
) -> float:
    rates = [mode.rate_fast.real] + [
        t.rate.real for t in rhs.terms if t.rate.real > 0.0
    ]
    rmin = min(rates)
    tail = cfg.truncation_multiplier / rmin
    return float(max(np.max(y_grid), tail) + tail)


def apply_kernel(
    spec: KernelSpec,
    rhs: ScalarModeProfile,
    y_grid,
    cfg: QuadratureCfg | None = None,
) -> KernelApplication:
    """Tabulate int_0^inf K(y, eta) rhs(eta) d eta on y_grid.

    Each point is integrated adaptively with a breakpoint at eta = y (the
    kernel kink); the domain is truncated where the integrand has decayed by
    e^{-truncation_multiplier}.  The closed-form exponential-sum result is
    computed alongside and the maximal relative disagreement reported.
    """
    if cfg is None:
        cfg = QuadratureCfg()
    y_grid = np.atleast_1d(np.asarray(y_grid, dtype=float))
    upper = _truncation_bound(spec.mode, rhs, y_grid, cfg)
    closed = _kernel_closed_form(spec, rhs, y_max=float(np.max(y_grid)) or None)

    values = np.empty(y_grid.shape, dtype=complex)
    err_total = 0.0
    for i, y in enumerate(y_grid):
        f = lambda eta, y=y: eval_kernel(spec, y, eta) * rhs(eta)
        brk = (float(y),) if 0.0 < y < upper else ()
        val, err, _ = adaptive_integrate(
            f,
            0.0,
            upper,
            rel_tol=cfg.rel_tol,
            max_subdivisions=cfg.max_subdivisions,
            breakpoints=brk,
        )
        values[i] = val
        err_total = max(err_total, err)

    ref = closed(y_grid)
    scale = float(np.max(np.abs(ref))) or 1.0
    mismatch = float(np.max(np.abs(values - ref))) / scale
    return KernelApplication(
        y=y_grid,
        values=values,
        closed_form=closed,
        max_mismatch=mismatch,
        error_estimate=err_total,
    )


# ---------------------------------------------------------------------------
# kernel-route mode solve
# ---------------------------------------------------------------------------

_KV_BY_ALPHA = {0: "G_minus", 1: "Kv_plus", -1: "Kv_minus"}
_KW_BY_ALPHA = {0: "G_plus", 1: "Kw_plus", -1: "Kw_minus"}


def _check_harmonic(pressure: ScalarModeProfile) -> None:
    r = pressure.abs_xi
    if r == 0.0:
        raise ZeroModeError("kernel solve needs |xi| > 0")
    for t in pressure.terms:
        if t.power != 0 or abs(t.rate - r) > 1e-12 * max(1.0, r):
            raise ProfileError(
                "parabolic_solve_mode needs a decaying harmonic pressure "
                f"(pure e^(-|xi| y) shape); got rate {t.rate}, power {t.power} "
                f"at |xi| = {r}"
            )


def parabolic_solve_mode(
    mode: ModeParams,
    alpha: int,
    pressure: ScalarModeProfile,
    pressure_bc_kind: str,
) -> VectorModeProfile:
    """Velocity profile of the kernel-route special solution.

    pressure must be the decaying harmonic extension of its wall datum
    (shape P e^{-|xi| y}); pressure_bc_kind records whether that datum was a
    Dirichlet trace ('dirichlet', beta = +1 route) or an outward normal
    derivative ('neumann', beta = 0 route).  The returned velocity solves
    the interior equations with the alpha tangential row and the divergence
    row, and i xi.vhat + d_y what = 0 holds identically.
    """
    if alpha not in (-1, 0, 1):
        raise ValueError(f"alpha must be in {{-1,0,+1}}, got {alpha}")
    if pressure_bc_kind not in ("dirichlet", "neumann"):
        raise ValueError(
            f"pressure_bc_kind must be 'dirichlet' or 'neumann', got {pressure_bc_kind!r}"
        )
    if tuple(pressure.xi) != tuple(mode.xi):
        raise ValueError(f"mode/pressure xi mismatch: {mode.xi} vs {pressure.xi}")
    _check_harmonic(pressure)

    kv = KernelSpec(_KV_BY_ALPHA[alpha], mode)
    kw = KernelSpec(_KW_BY_ALPHA[alpha], mode)
    v_base = _kernel_closed_form(kv, pressure)
    tangential = tuple((-1j * xij) * v_base for xij in mode.xi)
    w = -1.0 * _kernel_closed_form(kw, pressure.derivative())
    return VectorModeProfile(mode.xi, tangential, w)


# ---------------------------------------------------------------------------
# finite-difference oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FdOracleSolution:
    """Second-order FD solution of the reduced two-field boundary-value
    problem, tabulated on its graded grid."""

    y: np.ndarray
    v_tangential: np.ndarray  # shape (n-1, len(y)); equals i xi V
    w: np.ndarray
    v_scalar: np.ndarray  # V with vhat = i xi V


def oracle_fd_solve(
    mode: ModeParams,
    alpha: int,
    pressure: ScalarModeProfile,
    n_points: int,
    y_max: float | None = None,
    stretch: float = 4.0,
) -> FdOracleSolution:
    """Independent second-order finite-difference solve of the kernel problem.

    The tangential field is proportional to i xi (vhat = i xi V), so the
    unknowns are the scalars (V, w) solving

        omega^2 V - mu V'' = -phat,      omega^2 w - mu w'' = -phat',

    with the alpha rows at y = 0 (V(0) = 0 for alpha = 0;
    -+ V'(0) - w(0) = 0 for alpha = +-1), the divergence row
    -|xi|^2 V(0) + w'(0) = 0, and homogeneous Dirichlet rows at the
    truncation boundary.  Discretized by central differences in the mapped
    coordinate of the exponential grid (uniform second order); boundary
    derivatives use one-sided second-order stencils.
    """
    if alpha not in (-1, 0, 1):
        raise ValueError(f"alpha must be in {{-1,0,+1}}, got {alpha}")
    _check_harmonic(pressure)
    r = mode.abs_xi
    mu = mode.constants.mu
    omega_sq = mode.omega**2
    m_re = mode.rate_fast.real
    if y_max is None:
        y_max = 25.0 / min(r, m_re)

    n = int(n_points)
    ds = 1.0 / (n - 1)
    s = np.linspace(0.0, 1.0, n)
    ea = math.expm1(stretch)
    y = y_max * np.expm1(stretch * s) / ea
    ys = y_max * stretch * np.exp(stretch * s) / ea  # dy/ds; y_ss = a * y_s

    # second derivative in y at interior nodes: (u_ss - a u_s)/y_s^2
    ny = 2 * n
    A = np.zeros((ny, ny), dtype=complex)
    b = np.zeros(ny, dtype=complex)

    def fill_interior(block: int, rhs_vals: np.ndarray) -> None:
        base = block * n
        for i in range(1, n - 1):
            row = base + i
            inv = 1.0 / (ys[i] ** 2)
            c_m = inv * (1.0 / ds**2 + stretch / (2.0 * ds))
            c_0 = inv * (-2.0 / ds**2)
            c_p = inv * (1.0 / ds**2 - stretch / (2.0 * ds))
            A[row, base + i - 1] = -mu * c_m
            A[row, base + i] = omega_sq - mu * c_0
            A[row, base + i + 1] = -mu * c_p
            b[row] = rhs_vals[i]

    fill_interior(0, -pressure(y))
    fill_interior(1, -pressure.derivative()(y))

    # one-sided d/dy at y = 0 in mapped coordinate: u_y(0) = u_s(0)/y_s(0)
    d0 = np.array([-1.5, 2.0, -0.5]) / (ds * ys[0])

    row_v0 = 0
    if alpha == 0:
        A[row_v0, 0] = 1.0  # V(0) = 0
    else:
        # -+ V'(0) - w(0) = 0
        A[row_v0, 0:3] = -float(alpha) * d0
        A[row_v0, n] = -1.0
    # divergence row: -|xi|^2 V(0) + w'(0) = 0
    row_w0 = n
    A[row_w0, 0] = -(r**2)
    A[row_w0, n : n + 3] += d0

    # truncation rows
    A[n - 1, n - 1] = 1.0
    A[ny - 1, ny - 1] = 1.0

    sol = np.linalg.solve(A, b)
    v_scalar = sol[:n]
    w = sol[n:]
    xi = np.asarray(mode.xi, dtype=float)
    v_tan = (1j * xi)[:, None] * v_scalar[None, :]
    return FdOracleSolution(y=y, v_tangential=v_tan, w=w, v_scalar=v_scalar)


# ---------------------------------------------------------------------------
# trace-relation verification sweep
# ---------------------------------------------------------------------------

_RELATION_ALPHAS = {"T00": (0,), "T10": (1, -1), "T11": (0, 1, -1)}


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a trace-relation sweep."""

    relation: str
    alpha: int
    rel_tol: float
    n_modes: int
    max_rel_error: float
    passed: bool
    entries: tuple[dict, ...] = field(repr=False, default=())

    @property
    def worst(self) -> dict:
        if not self.entries:
            return {}
        return max(self.entries, key=lambda e: e["rel_error"])


def _quad_trace(
    spec: KernelSpec, source: ScalarModeProfile, cfg: QuadratureCfg, dy: bool
) -> complex:
    """Wall trace of int K(y, .) source at y = 0 (or its d_y) by quadrature."""
    mode = spec.mode
    rates = [mode.rate_fast.real] + [
        t.rate.real for t in source.terms if t.rate.real > 0.0
    ]
    upper = cfg.truncation_multiplier / min(rates)
    kernel = eval_kernel_dy if dy else eval_kernel
    f = lambda eta: kernel(spec, 0.0, eta) * source(eta)
    val, _, _ = adaptive_integrate(
        f, 0.0, upper, rel_tol=cfg.rel_tol, max_subdivisions=cfg.max_subdivisions
    )
    return val


def verify_trace_relations(
    modes,
    alpha: int,
    relation: str,
    cfg: QuadratureCfg | None = None,
    rel_tol: float = 1.0e-7,
    datum: complex = 1.0,
) -> VerificationReport:
    """Check one closed trace relation against kernel quadrature.

    relation 'T00' (alpha = 0) and 'T10' (alpha = +-1) drive the kernels by
    the Neumann-extended pressure of the datum (-d_y p(0) = datum) and test
    multiplier * [what](0) = datum with the beta = 0 trace multiplier.
    'T11' (any alpha) drives by the Dirichlet extension (p(0) = datum) and
    tests S^alpha * (-2 mu [d_y what](0) + [p](0)) = datum.
    """
    if relation not in _RELATION_ALPHAS:
        raise ValueError(f"relation must be one of {sorted(_RELATION_ALPHAS)}")
    if alpha not in _RELATION_ALPHAS[relation]:
        raise ValueError(f"relation {relation} does not apply to alpha = {alpha}")
    if cfg is None:
        cfg = QuadratureCfg()

    from .elliptic import dirichlet_extend_mode, neumann_extend_mode

    entries = []
    for mode in modes:
        kw = KernelSpec(_KW_BY_ALPHA[alpha], mode)
        if relation in ("T00", "T10"):
            pressure = neumann_extend_mode(mode.xi, datum)
            w0 = -_quad_trace(kw, pressure.derivative(), cfg, dy=False)
            mult = trace_multiplier(mode, BcSpec(alpha, 0))
            recovered = mult * w0
        else:
            pressure = dirichlet_extend_mode(mode.xi, datum)
            dw0 = -_quad_trace(kw, pressure.derivative(), cfg, dy=True)
            stress = -2.0 * mode.constants.mu * dw0 + pressure(0.0)
            mult = trace_multiplier(mode, BcSpec(alpha, 1))
            recovered = mult * stress
        rel_error = abs(recovered - datum) / abs(datum)
        entries.append(
            {
                "abs_xi": mode.abs_xi,
                "lambda_re": mode.lam.real,
                "lambda_im": mode.lam.imag,
                "rho": mode.constants.rho,
                "mu": mode.constants.mu,
                "epsilon": mode.constants.epsilon,
                "rel_error": rel_error,
            }
        )

    max_err = max((e["rel_error"] for e in entries), default=0.0)
    return VerificationReport(
        relation=relation,
        alpha=alpha,
        rel_tol=rel_tol,
        n_modes=len(entries),
        max_rel_error=max_err,
        passed=max_err < rel_tol,
        entries=tuple(entries),
    )
