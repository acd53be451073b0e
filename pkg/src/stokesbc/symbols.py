"""Boundary-symbol algebra for the shifted Stokes resolvent problem on a halfspace.

Geometry and conventions
------------------------
The fluid fills R^n_+ = {(x, y) : x in R^{n-1}, y > 0}; the boundary is
{y = 0} with *outer* normal nu = -e_y.  Velocity fields split as u = (v, w)
into a tangential part v and the wall-normal component w.  Applying the
tangential Fourier transform (x -> xi) and the time Laplace transform
(t -> lambda) to

    rho eps u + rho d_t u - mu lap u + grad p = 0,   div u = 0,

gives, per mode, with lambda_eps = eps + lambda and
omega = sqrt(rho lambda_eps + mu |xi|^2) (principal branch, Re omega > 0):

    omega^2 vhat - mu d_y^2 vhat + i xi phat = 0
    omega^2 what - mu d_y^2 what + d_y phat  = 0
    i xi . vhat + d_y what = 0.

Derived symbols: zeta = sqrt(mu) xi, kappa = rho sqrt(mu), and the identity
omega^2 - |zeta|^2 = rho lambda_eps.

Decaying solutions are spanned by the exponential ansatz

    [vhat; what; phat](y) = A [ z_v e^{-(omega/sqrt(mu)) y} ; z_w e^{-|xi| y} ]

    A = [[ omega I_{n-1},   -i zeta          ],           ((n+1) x n)
         [ i zeta^T,         |zeta|          ],
         [ 0,                kappa lambda_eps ]].

A boundary condition indexed by (alpha, beta) closes the system through an
n x n boundary symbol B acting on the coefficient vector (z_v, z_w):

    B [z_v; z_w] = [0; h_w],

where h_w is the e_y-component of the boundary datum (h_w = -h.nu).  alpha
selects the tangential condition (0: velocity trace; +1/-1: symmetric /
antisymmetric viscous stress), beta the normal one (0: normal velocity;
+1: normal stress; -1: pressure trace).  beta = -1 prescribes the pressure
trace directly and needs no symbol solve, so the symbol constructors reject it.

Rows of B against the ansatz:

    alpha = 0 :  [ omega I,  -i zeta ]                      (velocity trace)
    alpha = +-1: [ +-sqrt(mu) omega^2 I - sqrt(mu)(i zeta)(i zeta)^T,
                   -sqrt(mu) (1 +- 1) i zeta |zeta| ]       (stress trace)
    beta = 0 :   [ i zeta^T,  |zeta| ]                      (normal velocity)
    beta = +1:   [ 2 sqrt(mu) omega i zeta^T,
                   kappa lambda_eps + 2 sqrt(mu) |zeta|^2 ] (normal stress)

Each case factors as B = diag(d_t I, d_n) M with d_t = omega (alpha = 0) or
+-sqrt(mu) omega^2 (alpha = +-1), d_n = omega (beta = 0) or
2 sqrt(mu) omega^2 (beta = +1); the reduced matrix M has the closed-form
inverses implemented in closed_form_inverse.

Trace multipliers (trace_multiplier) relate the scalar datum h_w to the
pressure co-trace of the solved mode:

    beta = 0 :  -d_y phat(0) = T^alpha h_w,
                T^0 = omega(omega + |zeta|),  T^{+-1} = omega^2 +- |zeta|^2
    beta = +1:   phat(0) = S^alpha h_w,
                S^0 = 1,
                S^{+-1} = (omega^2 +- |zeta|^2) /
                          ((omega^2 -+ |zeta|^2)
                           + 2 (omega/(omega+|zeta|)) (|zeta|^2 +- |zeta|^2))
    beta = -1:   phat(0) = h_w (multiplier 1).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidModeError, SingularModeError, UnsupportedCaseError

__all__ = [
    "FluidConstants",
    "ModeParams",
    "BcSpec",
    "AnsatzMatrix",
    "derive_mode",
    "ansatz_matrix",
    "boundary_symbol",
    "boundary_symbol_factors",
    "closed_form_inverse",
    "generic_inverse",
    "trace_multiplier",
    "solve_coefficients",
    "COND_WARN_THRESHOLD",
]

#: condition-number threshold above which closed_form_inverse warns
COND_WARN_THRESHOLD = 1.0e12


@dataclass(frozen=True)
class FluidConstants:
    """Density rho, viscosity mu and resolvent shift epsilon (all > 0)."""

    rho: float
    mu: float
    epsilon: float

    def __post_init__(self) -> None:
        for name in ("rho", "mu", "epsilon"):
            val = getattr(self, name)
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise InvalidModeError(f"{name} must be a real number, got {val!r}")
            if not math.isfinite(val) or val <= 0.0:
                raise InvalidModeError(f"{name} must be finite and > 0, got {val}")


@dataclass(frozen=True)
class ModeParams:
    """One tangential-frequency / resolvent-parameter point.

    Carries the derived symbols used everywhere downstream:
    lambda_eps = epsilon + lam, zeta = sqrt(mu) xi, kappa = rho sqrt(mu),
    omega = sqrt(rho lambda_eps + mu |xi|^2) on the principal branch.
    Build instances through derive_mode, which validates admissibility.
    """

    constants: FluidConstants
    lam: complex
    xi: tuple[float, ...]
    lambda_eps: complex = field(init=False)
    kappa: float = field(init=False)
    omega: complex = field(init=False)

    def __post_init__(self) -> None:
        lam = complex(self.lam)
        if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            raise InvalidModeError(f"lambda must be finite, got {lam}")
        if lam.real < 0.0:
            raise InvalidModeError(f"Re lambda must be >= 0, got {lam}")
        xi = tuple(float(c) for c in self.xi)
        if len(xi) < 1:
            raise InvalidModeError("xi must have at least one component (n >= 2)")
        if not all(math.isfinite(c) for c in xi):
            raise InvalidModeError(f"xi must be finite, got {xi}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "xi", xi)
        c = self.constants
        lam_eps = c.epsilon + lam
        object.__setattr__(self, "lambda_eps", lam_eps)
        object.__setattr__(self, "kappa", c.rho * math.sqrt(c.mu))
        # Re(rho lambda_eps + mu |xi|^2) >= rho epsilon > 0, so the argument
        # never touches the branch cut and Re omega > 0.
        arg = c.rho * lam_eps + c.mu * self.abs_xi_sq
        object.__setattr__(self, "omega", cmath.sqrt(arg))

    # -- derived scalars ---------------------------------------------------

    @property
    def n(self) -> int:
        """Space dimension (tangential components + 1)."""
        return len(self.xi) + 1

    @property
    def abs_xi_sq(self) -> float:
        return float(sum(c * c for c in self.xi))

    @property
    def abs_xi(self) -> float:
        return math.sqrt(self.abs_xi_sq)

    @property
    def zeta(self) -> np.ndarray:
        return math.sqrt(self.constants.mu) * np.array(self.xi, dtype=float)

    @property
    def abs_zeta(self) -> float:
        return math.sqrt(self.constants.mu) * self.abs_xi

    @property
    def rate_fast(self) -> complex:
        """Decay rate omega/sqrt(mu) of the viscous ansatz column."""
        return self.omega / math.sqrt(self.constants.mu)

    @property
    def rate_slow(self) -> float:
        """Decay rate |xi| of the pressure (harmonic) ansatz column."""
        return self.abs_xi

    def with_lambda_eps(self, lam_eps: complex) -> "ModeParams":
        """Same constants/xi with epsilon + lambda replaced by lam_eps.

        Convenience for time steppers that absorb 1/dt into the shift; the
        real part of lam_eps must stay >= epsilon of the constants.
        """
        lam = complex(lam_eps) - self.constants.epsilon
        return ModeParams(self.constants, lam, self.xi)


_VALID_AB = (-1, 0, 1)

# static preservation classes, keyed by (alpha, beta)
_BC_CLASS = {
    (0, 0): "B1",
    (1, 0): "B1",
    (-1, 0): "B1",
    (0, 1): "B2",
    (1, 1): "B2",
    (0, -1): "B2",
    (-1, -1): "B2",
    (1, -1): "B3",
    (-1, 1): "B3",
}


@dataclass(frozen=True)
class BcSpec:
    """Boundary-condition index pair (alpha, beta), each in {-1, 0, +1}.

    preservation_class tags the induced kinetic-energy behaviour:
      B1 - boundary power of the full (convective) balance vanishes,
      B2 - boundary power of the linear balance vanishes,
      B3 - neither vanishes identically.
    The vorticity-flavoured members (alpha = -1 or beta = -1) vanish in the
    balance written with the antisymmetric stress T = 2 mu R - p I; the rest
    in the symmetric form S = 2 mu D - p I.
    """

    alpha: int
    beta: int

    def __post_init__(self) -> None:
        if self.alpha not in _VALID_AB or self.beta not in _VALID_AB:
            raise UnsupportedCaseError(
                f"(alpha, beta) must lie in {{-1,0,+1}}^2, got ({self.alpha}, {self.beta})"
            )

    @property
    def preservation_class(self) -> str:
        return _BC_CLASS[(self.alpha, self.beta)]

    @property
    def preserves_navier_stokes(self) -> bool:
        """Boundary power of the convective kinetic-energy balance vanishes."""
        return self.preservation_class == "B1"

    @property
    def preserves_stokes(self) -> bool:
        """Boundary power of the linear kinetic-energy balance vanishes."""
        return self.preservation_class in ("B1", "B2")

    @property
    def adapted_form(self) -> str:
        """Which stress form makes the boundary power vanish pointwise.

        'S' for the symmetric stress 2 mu D - p I, 'T' for the antisymmetric
        2 mu R - p I.  For B3 neither vanishes; the tag still names the form
        in which the class's witness functionals are reported.
        """
        return "T" if (self.alpha == -1 or self.beta == -1) else "S"


@dataclass(frozen=True)
class AnsatzMatrix:
    """The (n+1) x n coefficient matrix of the exponential ansatz, together
    with the decay rates (omega/sqrt(mu), |xi|) of its two column groups."""

    entries: np.ndarray
    rate_fast: complex
    rate_slow: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def derive_mode(constants: FluidConstants, lam: complex, xi) -> ModeParams:
    """Validate and derive a mode-parameter point.

    Rejects Re lam < 0, non-finite lam or xi, and (via FluidConstants)
    nonpositive rho/mu/epsilon.
    """
    if np.ndim(xi) == 0:
        xi = (xi,)
    return ModeParams(constants, lam, tuple(float(c) for c in np.asarray(xi).ravel()))


def ansatz_matrix(mode: ModeParams) -> AnsatzMatrix:
    """Assemble the (n+1) x n exponential-ansatz coefficient matrix."""
    nt = mode.n - 1
    zeta = mode.zeta.astype(complex)
    a = np.zeros((mode.n + 1, mode.n), dtype=complex)
    a[:nt, :nt] = mode.omega * np.eye(nt)
    a[:nt, nt] = -1j * zeta
    a[nt, :nt] = 1j * zeta
    a[nt, nt] = mode.abs_zeta
    a[nt + 1, nt] = mode.kappa * mode.lambda_eps
    return AnsatzMatrix(entries=a, rate_fast=mode.rate_fast, rate_slow=mode.rate_slow)


def _check_bc_for_symbol(bc: BcSpec) -> None:
    if bc.beta == -1:
        raise UnsupportedCaseError(
            "beta = -1 prescribes the pressure trace directly; no boundary "
            "symbol exists for it (solve that case through the pressure "
            "extension path)"
        )


def boundary_symbol_factors(
    mode: ModeParams, bc: BcSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Return (diag, M) with boundary symbol B = diag(diag) @ M.

    diag holds the row scalings (d_t repeated n-1 times, then d_n); M is the
    reduced matrix whose closed-form inverse closed_form_inverse implements.
    """
    _check_bc_for_symbol(bc)
    nt = mode.n - 1
    omega = mode.omega
    mu = mode.constants.mu
    sqmu = math.sqrt(mu)
    zeta = mode.zeta.astype(complex)
    az = mode.abs_zeta
    izeta = 1j * zeta

    d = np.empty(mode.n, dtype=complex)
    m = np.zeros((mode.n, mode.n), dtype=complex)

    if bc.alpha == 0:
        d[:nt] = omega
        m[:nt, :nt] = np.eye(nt)
        m[:nt, nt] = -izeta / omega
    else:
        sgn = float(bc.alpha)
        d[:nt] = sgn * sqmu * omega**2
        # row block of B: sgn sqrt(mu) omega^2 I - sqrt(mu) (i zeta)(i zeta)^T
        # and -sqrt(mu) (1 + sgn*1)... divided by d_t = sgn sqrt(mu) omega^2:
        m[:nt, :nt] = np.eye(nt) - sgn * np.outer(izeta, izeta) / omega**2
        m[:nt, nt] = -sgn * (1.0 + sgn) * izeta * az / omega**2

    if bc.beta == 0:
        d[nt] = omega
        m[nt, :nt] = izeta / omega
        m[nt, nt] = az / omega
    else:  # beta == +1
        d[nt] = 2.0 * sqmu * omega**2
        m[nt, :nt] = izeta / omega
        m[nt, nt] = (mode.kappa * mode.lambda_eps + 2.0 * sqmu * az**2) / (
            2.0 * sqmu * omega**2
        )
        # kappa lambda_eps = sqrt(mu) rho lambda_eps = sqrt(mu)(omega^2-|zeta|^2),
        # so the corner entry equals (omega^2 + |zeta|^2) / (2 omega^2).

    return d, m


def boundary_symbol(mode: ModeParams, bc: BcSpec) -> np.ndarray:
    """The n x n boundary symbol B^{alpha,beta} acting on (z_v, z_w)."""
    d, m = boundary_symbol_factors(mode, bc)
    return d[:, None] * m


def closed_form_inverse(mode: ModeParams, bc: BcSpec) -> np.ndarray:
    """Closed-form inverse of boundary_symbol(mode, bc).

    Uses the displayed inverse of the reduced matrix M (with
    c = i zeta / omega, s = |zeta| / omega, C = c c^T):

      (0,0):    {(1-s)s}^-1  [ (1-s)s I - C,        c        ]
                             [ -c^T,                1        ]
      (+-1,0):  {(1-s^2)s}^-1[ (1-s^2)s I - s C,    (1+-1)s c ]
                             [ -c^T,                1+-s^2   ]
      (0,+1):   {(1-s^2)/2}^-1[ (1-s^2)/2 I - C,    c        ]
                             [ -c^T,                1        ]
      (+-1,+1): delta^-1 [ delta I +- ((1+s^2)/2 -+ (1+-1)s) C,  (1+-1)s c ]
                         [ -c^T,                                 1+-s^2   ]
                with delta = (1+s^2)/2 (1+-s^2) - (s^3 +- s^3),

    then B^-1 = M^-1 diag(d)^-1.  The beta = 0 displays are singular at
    xi = 0 (s = 0), which raises SingularModeError; s = 1 cannot happen for
    admissible modes since 1 - s^2 = rho lambda_eps / omega^2 != 0.
    Emits a warning when cond(B) exceeds COND_WARN_THRESHOLD.
    """
    d, _ = boundary_symbol_factors(mode, bc)
    nt = mode.n - 1
    omega = mode.omega
    c = 1j * mode.zeta.astype(complex) / omega
    s = mode.abs_zeta / omega
    cc = np.outer(c, c)
    eye = np.eye(nt)

    # 1 - s^2 = rho lambda_eps / omega^2 exactly; the direct subtraction
    # cancels catastrophically when rho lambda_eps << mu |xi|^2, so every
    # near-singular factor below is built from this stable form.
    one_m_s2 = mode.constants.rho * mode.lambda_eps / omega**2
    one_m_s = one_m_s2 / (1.0 + s)

    minv = np.zeros((mode.n, mode.n), dtype=complex)

    if bc.beta == 0:
        if mode.abs_xi == 0.0:
            raise SingularModeError(
                "the (alpha, 0) closed-form inverses require xi != 0 "
                "(the normal-velocity row degenerates at the mean mode)"
            )
        if bc.alpha == 0:
            pref = 1.0 / (one_m_s * s)
            minv[:nt, :nt] = pref * (one_m_s * s * eye - cc)
            minv[:nt, nt] = pref * c
            minv[nt, :nt] = -pref * c
            minv[nt, nt] = pref
        else:
            sgn = float(bc.alpha)
            pref = 1.0 / (one_m_s2 * s)
            minv[:nt, :nt] = pref * (one_m_s2 * s * eye - s * cc)
            minv[:nt, nt] = pref * (1.0 + sgn) * s * c
            minv[nt, :nt] = -pref * c
            minv[nt, nt] = pref * (one_m_s2 if sgn < 0 else 1.0 + s * s)
    else:  # beta == +1
        if bc.alpha == 0:
            pref = 1.0 / (0.5 * one_m_s2)
            minv[:nt, :nt] = pref * (0.5 * one_m_s2 * eye - cc)
            minv[:nt, nt] = pref * c
            minv[nt, :nt] = -pref * c
            minv[nt, nt] = pref
        else:
            sgn = float(bc.alpha)
            if sgn > 0:
                # delta = (1+s^2)^2/2 - 2 s^3 = (1-s)(1 + s + 3 s^2 - s^3)/2
                delta = 0.5 * one_m_s * (1.0 + s + 3.0 * s * s - s**3)
            else:
                delta = 0.5 * (1.0 + s * s) * one_m_s2
            pref = 1.0 / delta
            minv[:nt, :nt] = eye + pref * sgn * (
                0.5 * (1.0 + s * s) - sgn * (1.0 + sgn) * s
            ) * cc
            minv[:nt, nt] = pref * (1.0 + sgn) * s * c
            minv[nt, :nt] = -pref * c
            minv[nt, nt] = pref * (one_m_s2 if sgn < 0 else 1.0 + s * s)

    binv = minv / d[None, :]

    b = d[:, None] * _reduced_from_factors(mode, bc)
    cond = np.linalg.cond(b)
    if cond > COND_WARN_THRESHOLD:
        warnings.warn(
            f"boundary symbol poorly conditioned (cond = {cond:.3e}) at "
            f"(alpha, beta) = ({bc.alpha}, {bc.beta}), |xi| = {mode.abs_xi:.3e}",
            RuntimeWarning,
            stacklevel=2,
        )
    return binv


def generic_inverse(mode: ModeParams, bc: BcSpec, refine: int = 1) -> np.ndarray:
    """Invert the boundary symbol numerically (LU), then Newton-polish.

    A plain LU inverse carries an O(cond * eps) error, which at the worst
    corners of the admissible parameter range would swamp the closed form's
    own accuracy in a comparison.  Each Newton step X <- X (2I - B X)
    squares the residual ||I - B X||, so one step brings the generic
    inverse to working precision whenever cond(B) < ~1e8.
    """
    b = boundary_symbol(mode, bc)
    x = np.linalg.inv(b)
    eye2 = 2.0 * np.eye(b.shape[0])
    for _ in range(refine):
        x = x @ (eye2 - b @ x)
    return x


def _reduced_from_factors(mode: ModeParams, bc: BcSpec) -> np.ndarray:
    _, m = boundary_symbol_factors(mode, bc)
    return m


def trace_multiplier(mode: ModeParams, bc: BcSpec) -> complex:
    """Scalar multiplier tying the boundary datum h_w to the pressure co-trace.

    beta = 0:  -d_y phat(0) = T^alpha h_w
    beta = +1:  phat(0)     = S^alpha h_w
    beta = -1:  phat(0)     = h_w           (identity; the datum IS the trace)
    """
    omega = mode.omega
    az = mode.abs_zeta
    # omega^2 - |zeta|^2 == rho lambda_eps exactly; avoid the cancelling
    # subtraction (see closed_form_inverse).
    rho_lam = mode.constants.rho * mode.lambda_eps
    if bc.beta == 0:
        if bc.alpha == 0:
            return omega * (omega + az)
        return rho_lam if bc.alpha < 0 else omega**2 + az**2
    if bc.beta == 1:
        if bc.alpha == 0:
            return 1.0 + 0.0j
        sgn = float(bc.alpha)
        numer = rho_lam if sgn < 0 else omega**2 + az**2
        denom = (omega**2 + az**2 if sgn < 0 else rho_lam) + 2.0 * (
            omega / (omega + az)
        ) * (az**2 + sgn * az**2)
        return numer / denom
    return 1.0 + 0.0j


def solve_coefficients(
    mode: ModeParams, bc: BcSpec, h_w: complex
) -> tuple[np.ndarray, complex]:
    """Solve B [z_v; z_w] = [0; h_w] by the closed-form inverse.

    Returns (z_v, z_w); z_v has shape (n-1,).
    """
    binv = closed_form_inverse(mode, bc)
    rhs = np.zeros(mode.n, dtype=complex)
    rhs[-1] = h_w
    z = binv @ rhs
    return z[:-1], complex(z[-1])
