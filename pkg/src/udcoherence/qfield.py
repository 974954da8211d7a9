"""Detector trajectories, the pulled-back field kernel and coherence evaluators.

All quantities are in units of the detector gap: ``e_bar = E / Omega``,
``t_bar = Omega * T``, ``a_bar = a / Omega`` and proper time
``tau_bar = Omega * tau``.  Reported coherences are divided by the coupling.

For a real, even coherent amplitude the k-integral of the off-diagonal
element splits at k = 0 into right movers, which see only ``u = t - x``,
and left movers, which see only ``v = t + x``::

    rho_coh / g = -i Int dtau chi(tau) e^{i tau} [K(e_bar u) + K(e_bar v)]
    K(y)        = pi^{-1/2} Int_0^inf exp(-p^2/2) p^{-1/2} cos(y p) dp

and the coherence is ``C / g = 2 |rho_coh / g|``.
"""
from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .specfun import (
    QuadratureError,
    QuadratureResult,
    bessel_i_scaled,
    gamma_real,
    integrate_adaptive,
    integrate_halfline_sqrt_singularity,
)

__all__ = [
    "DetectorConfig", "FieldProfile", "SwitchingProfile",
    "Rest", "ConstantVelocity", "UniformAcceleration", "Trajectory",
    "LightconeCoords", "Method", "CoherenceResult", "CoherenceError",
    "DegenerateInputWarning", "PerturbativeWarning",
    "SHORT_TIME_LIMIT", "KERNEL_AT_ZERO", "TAU_CUTOFF",
    "lightcone_coords", "switching", "gaussian_amplitude", "doppler_amplitude",
    "effective_initial_energy", "kernel", "kernel_direct", "field_kernel",
    "amplitude_kernel", "coherence_rest_closed_form",
    "coherence_velocity_closed_form", "coherence_numeric",
    "coherence_accelerated", "coherence_rest_with_amplitude", "coherence",
    "reduce_parameters",
]

#: K(0) = Gamma(1/4) 2^{1/4} / (2 sqrt(pi))
KERNEL_AT_ZERO = gamma_real(0.25) * 2.0 ** 0.25 / (2.0 * math.sqrt(math.pi))
#: C/g as the interaction duration goes to zero, for every trajectory:
#: sqrt(4 pi) 8^{1/4} / Gamma(3/4) = 4 K(0)
SHORT_TIME_LIMIT = math.sqrt(4.0 * math.pi) * 8.0 ** 0.25 / gamma_real(0.75)
#: switching is truncated at |tau| = TAU_CUTOFF * t_bar; the dropped tail is < e^{-32}
TAU_CUTOFF = 8.0
#: smallest e_bar / t_bar accepted before clamping
MIN_REDUCED = 1e-6
#: relative error claimed for the closed forms (special-function accuracy)
CLOSED_FORM_REL_ERR = 1e-12


class DegenerateInputWarning(UserWarning):
    pass


class PerturbativeWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# Parameter types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DetectorConfig:
    """Detector gap ``omega`` (inverse time) and dimensionless coupling."""

    omega: float
    coupling: float = 1.0

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        if not (self.coupling > 0 and math.isfinite(self.coupling)):
            raise ValueError(f"coupling must be positive, got {self.coupling!r}")


@dataclass(frozen=True)
class FieldProfile:
    e_bar: float

    def __post_init__(self):
        _check_positive("e_bar", self.e_bar)


@dataclass(frozen=True)
class SwitchingProfile:
    t_bar: float

    def __post_init__(self):
        _check_positive("t_bar", self.t_bar)


def _check_positive(name, x):
    if not (isinstance(x, (int, float, np.floating, np.integer)) and math.isfinite(x) and x > 0):
        raise ValueError(f"{name} must be a finite positive number, got {x!r}")


def reduce_parameters(detector: DetectorConfig, energy: float, duration: float,
                      acceleration: float | None = None):
    """Convert raw (E, T, a) into the reduced (e_bar, t_bar, a_bar)."""
    e_bar = energy / detector.omega
    t_bar = duration * detector.omega
    if acceleration is None:
        return e_bar, t_bar
    return e_bar, t_bar, acceleration / detector.omega


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LightconeCoords:
    u: float
    v: float


@dataclass(frozen=True)
class Rest:
    """Detector at rest at the origin."""

    @property
    def tag(self) -> str:
        return "rest"

    def lightcone(self, tau):
        tau = np.asarray(tau, dtype=float)
        return tau, tau


@dataclass(frozen=True)
class ConstantVelocity:
    """Inertial worldline ``t = gamma tau``, ``x = gamma upsilon tau``."""

    upsilon: float

    def __post_init__(self):
        if not (math.isfinite(self.upsilon) and abs(self.upsilon) < 1.0):
            raise ValueError(f"|upsilon| must be < 1, got {self.upsilon!r}")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.upsilon) * (1.0 + self.upsilon))

    @property
    def tag(self) -> str:
        return f"v={self.upsilon:g}"

    def lightcone(self, tau):
        tau = np.asarray(tau, dtype=float)
        g = self.gamma
        return g * (1.0 - self.upsilon) * tau, g * (1.0 + self.upsilon) * tau


@dataclass(frozen=True)
class UniformAcceleration:
    """Hyperbolic worldline through the origin with reduced proper acceleration ``a_bar``."""

    a_bar: float

    def __post_init__(self):
        if not (math.isfinite(self.a_bar) and self.a_bar > 0.0):
            raise ValueError(
                f"a_bar must be > 0 (use Rest for zero acceleration), got {self.a_bar!r}")

    @property
    def tag(self) -> str:
        return f"a={self.a_bar:g}"

    def lightcone(self, tau):
        tau = np.asarray(tau, dtype=float)
        a = self.a_bar
        x = a * tau
        with np.errstate(over="ignore"):
            # u = (1 - e^{-a tau}) / a, v = (e^{a tau} - 1) / a; expm1 keeps small a*tau exact
            return -np.expm1(-x) / a, np.expm1(x) / a


Trajectory = Union[Rest, ConstantVelocity, UniformAcceleration]


def lightcone_coords(traj: Trajectory, tau_bar: float) -> LightconeCoords:
    u, v = traj.lightcone(tau_bar)
    return LightconeCoords(float(u), float(v))


def trajectory_from_tag(tag: str) -> Trajectory:
    """Inverse of ``traj.tag``: ``rest``, ``v=<upsilon>`` or ``a=<a_bar>``."""
    tag = tag.strip()
    if tag == "rest":
        return Rest()
    kind, _, value = tag.partition("=")
    if kind == "v":
        return ConstantVelocity(float(value))
    if kind == "a":
        return UniformAcceleration(float(value))
    raise ValueError(f"unknown trajectory tag {tag!r}")


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

def switching(tau_bar, t_bar: float):
    """Unit-normalised Gaussian switching of width ``t_bar``."""
    tau_bar = np.asarray(tau_bar, dtype=float)
    return np.exp(-0.5 * (tau_bar / t_bar) ** 2) / (math.sqrt(2.0 * math.pi) * t_bar)


def gaussian_amplitude(q, e_bar: float):
    q = np.asarray(q, dtype=float)
    return np.exp(-0.5 * (q / e_bar) ** 2) / math.sqrt(e_bar)


def doppler_amplitude(e_bar: float, upsilon: float, q):
    """Equal-weight mix of the two Doppler-shifted Gaussian amplitudes.

    The shifted energies are ``e_bar * gamma * (1 -+ upsilon)``.
    """
    gamma = 1.0 / math.sqrt((1.0 - upsilon) * (1.0 + upsilon))
    e_minus = e_bar * gamma * (1.0 - upsilon)
    e_plus = e_bar * gamma * (1.0 + upsilon)
    return 0.5 * (gaussian_amplitude(q, e_minus) + gaussian_amplitude(q, e_plus))


def effective_initial_energy(e_bar: float, upsilon: float) -> float:
    """Field energy seen by the moving detector; diagnostic only."""
    gamma = 1.0 / math.sqrt((1.0 - upsilon) * (1.0 + upsilon))
    u2 = upsilon * upsilon
    return 0.5 * e_bar * (gamma + (1.0 - u2) / (1.0 + u2))


# ---------------------------------------------------------------------------
# Field kernel
# ---------------------------------------------------------------------------

_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)
# exp(-p^2/2) < 1e-17 beyond p = 9
_P_MAX = 9.0

# table layout: Chebyshev panels on [0, _Y_SWITCH], large-y expansion beyond
_Y_SWITCH = 10.0
_PANEL_WIDTH = 0.5
_PANEL_DEGREE = 28
_N_ASYMPTOTIC = 20
_ASYMPTOTIC_COEF = np.array([
    0.5 ** m * math.gamma(2 * m + 0.5) / math.factorial(m) / math.sqrt(2.0 * math.pi)
    for m in range(_N_ASYMPTOTIC)
])
#: absolute accuracy of the tabulated kernel, checked in the test-suite
KERNEL_TABLE_ERR = 1e-14


def kernel_direct(y: float, rel_tol: float = 1e-13) -> QuadratureResult:
    """K(y) straight from its defining integral (no table)."""
    res = integrate_halfline_sqrt_singularity(
        lambda p: np.exp(-0.5 * p * p) * np.cos(y * p),
        rel_tol=rel_tol, abs_tol=1e-16, k_max=_P_MAX)
    return QuadratureResult(res.value * _INV_SQRT_PI, res.err_estimate * _INV_SQRT_PI,
                            res.evaluations)


@functools.lru_cache(maxsize=1)
def _kernel_table() -> np.ndarray:
    # built once per process and never mutated afterwards
    n_panels = int(round(_Y_SWITCH / _PANEL_WIDTH))
    k = np.arange(_PANEL_DEGREE + 1)
    cheb_nodes = np.cos(np.pi * (k + 0.5) / (_PANEL_DEGREE + 1))
    coefs = np.empty((n_panels, _PANEL_DEGREE + 1))
    for i in range(n_panels):
        lo = i * _PANEL_WIDTH
        ys = lo + 0.5 * _PANEL_WIDTH * (cheb_nodes + 1.0)
        vals = np.array([kernel_direct(y).value for y in ys])
        coefs[i] = np.polynomial.chebyshev.chebfit(cheb_nodes, vals, _PANEL_DEGREE)
    coefs.setflags(write=False)
    return coefs


def kernel(y):
    """Tabulated K(y), vectorised over ``y``.  Even in ``y``."""
    y = np.abs(np.asarray(y, dtype=float))
    out = np.empty_like(y)
    small = y < _Y_SWITCH
    if np.any(small):
        coefs = _kernel_table()
        ys = y[small]
        idx = np.minimum((ys / _PANEL_WIDTH).astype(int), coefs.shape[0] - 1)
        t = 2.0 * (ys - idx * _PANEL_WIDTH) / _PANEL_WIDTH - 1.0
        c = coefs[idx]
        # Clenshaw recurrence, one coefficient row per point
        b1 = np.zeros_like(t)
        b2 = np.zeros_like(t)
        for j in range(_PANEL_DEGREE, 0, -1):
            b1, b2 = 2.0 * t * b1 - b2 + c[:, j], b1
        out[small] = t * b1 - b2 + c[:, 0]
    big = ~small
    if np.any(big):
        yb = y[big]
        with np.errstate(over="ignore", divide="ignore"):
            inv2 = 1.0 / (yb * yb)
            acc = np.zeros_like(yb)
            for c in _ASYMPTOTIC_COEF[::-1]:
                acc = acc * inv2 + c
            out[big] = acc / np.sqrt(yb)
    return out


def field_kernel(e_bar: float, s):
    """Right- or left-mover kernel at light-cone coordinate ``s``.

    Depends on its arguments only through ``e_bar * s``.
    """
    return kernel(e_bar * np.asarray(s, dtype=float))


def amplitude_kernel(amplitude: Callable[[np.ndarray], np.ndarray], s: float,
                     rel_tol: float = 1e-12) -> QuadratureResult:
    """``pi^{-1/2} Int_0^inf amplitude(q) q^{-1/2} cos(q s) dq`` by direct quadrature."""
    res = integrate_halfline_sqrt_singularity(
        lambda q: amplitude(q) * np.cos(q * s), rel_tol=rel_tol, abs_tol=1e-16)
    return QuadratureResult(res.value * _INV_SQRT_PI, res.err_estimate * _INV_SQRT_PI,
                            res.evaluations)


# ---------------------------------------------------------------------------
# Coherence
# ---------------------------------------------------------------------------

class Method(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    DOPPLER_CLOSED_FORM = "DopplerClosedForm"
    QUADRATURE = "Quadrature"


@dataclass(frozen=True)
class CoherenceResult:
    """l1-norm coherence over coupling, with the amplitude it came from."""

    c_over_g: float
    rho_coh_over_g: complex | None
    err_estimate: float
    method: Method
    notes: tuple = field(default=())

    def scaled(self, detector: DetectorConfig) -> float:
        """Coherence in absolute terms, ``g * C/g``; warns outside the perturbative regime."""
        c = detector.coupling * self.c_over_g
        if c > 0.1:
            warnings.warn(f"g*C = {c:.3g} > 0.1: second-order result is unreliable",
                          PerturbativeWarning, stacklevel=2)
        return c


class CoherenceError(RuntimeError):
    """Quadrature for a coherence value failed; ``result`` is the best estimate."""

    def __init__(self, message: str, result: CoherenceResult):
        super().__init__(message)
        self.result = result


def _clamp(name, x):
    _check_positive(name, x)
    if x < MIN_REDUCED:
        warnings.warn(f"{name}={x:g} clamped to {MIN_REDUCED:g}", DegenerateInputWarning,
                      stacklevel=3)
        return MIN_REDUCED
    return float(x)


def _rest_closed_form(e_bar: float, t_bar: float) -> float:
    # the explicit exponential and the Bessel scaling combine to exp(-t^2 / (2 (1 + s)))
    s = (e_bar * t_bar) ** 2
    z = s * t_bar * t_bar / (4.0 * (1.0 + s))
    prefactor = math.sqrt(4.0 * math.pi * e_bar * t_bar * t_bar / (1.0 + s))
    return prefactor * math.exp(-0.5 * t_bar * t_bar / (1.0 + s)) * bessel_i_scaled(-0.25, z)


def coherence_rest_closed_form(e_bar: float, t_bar: float) -> CoherenceResult:
    """Closed-form coherence for a detector at rest."""
    e_bar = _clamp("e_bar", e_bar)
    t_bar = _clamp("t_bar", t_bar)
    c = _rest_closed_form(e_bar, t_bar)
    # the amplitude is -i times a positive real number
    return CoherenceResult(c, complex(0.0, -0.5 * c), CLOSED_FORM_REL_ERR * c,
                           Method.CLOSED_FORM)


def coherence_velocity_closed_form(e_bar: float, t_bar: float, upsilon: float) -> CoherenceResult:
    """Constant-velocity coherence as the mean of two Doppler-shifted rest values."""
    ConstantVelocity(upsilon)  # domain check
    e_bar = _clamp("e_bar", e_bar)
    t_bar = _clamp("t_bar", t_bar)
    red = math.sqrt((1.0 - upsilon) / (1.0 + upsilon))
    blue = math.sqrt((1.0 + upsilon) / (1.0 - upsilon))
    c = 0.5 * (_rest_closed_form(e_bar * red, t_bar) + _rest_closed_form(e_bar * blue, t_bar))
    return CoherenceResult(c, complex(0.0, -0.5 * c), CLOSED_FORM_REL_ERR * c,
                           Method.DOPPLER_CLOSED_FORM)


def _tau_integral(integrand, t_bar, rel_tol, max_evaluations=200_000):
    span = TAU_CUTOFF * t_bar
    return integrate_adaptive(integrand, -span, span, rel_tol=rel_tol,
                              abs_tol=1e-15, max_evaluations=max_evaluations,
                              initial_panels=4)


def _result_from_amplitude(res: QuadratureResult, extra_err: float) -> CoherenceResult:
    rho = complex(0.0, -1.0) * res.value
    return CoherenceResult(2.0 * abs(rho), rho, 2.0 * (res.err_estimate + extra_err),
                           Method.QUADRATURE)


def coherence_numeric(traj: Trajectory, e_bar: float, t_bar: float,
                      rel_tol: float = 1e-8) -> CoherenceResult:
    """Coherence by direct proper-time quadrature along any trajectory."""
    if not 1e-10 <= rel_tol <= 1e-2:
        raise ValueError(f"rel_tol must lie in [1e-10, 1e-2], got {rel_tol!r}")
    e_bar = _clamp("e_bar", e_bar)
    t_bar = _clamp("t_bar", t_bar)

    def integrand(tau):
        u, v = traj.lightcone(tau)
        return switching(tau, t_bar) * np.exp(1j * tau) * (kernel(e_bar * u) + kernel(e_bar * v))

    # each kernel call is off by at most KERNEL_TABLE_ERR, and chi integrates to one
    kernel_err = 2.0 * KERNEL_TABLE_ERR
    try:
        res = _tau_integral(integrand, t_bar, rel_tol)
    except QuadratureError as exc:
        best = _result_from_amplitude(exc.result, kernel_err)
        raise CoherenceError(
            f"coherence quadrature failed for {traj!r}, e_bar={e_bar:g}, t_bar={t_bar:g}, "
            f"rel_tol={rel_tol:g}: {exc}", best) from exc
    return _result_from_amplitude(res, kernel_err)


def coherence_accelerated(e_bar: float, t_bar: float, a_bar: float,
                          rel_tol: float = 1e-8) -> CoherenceResult:
    """Coherence for a uniformly accelerated detector (no closed form exists)."""
    return coherence_numeric(UniformAcceleration(a_bar), e_bar, t_bar, rel_tol)


def coherence_rest_with_amplitude(amplitude: Callable[[np.ndarray], np.ndarray],
                                  t_bar: float, rel_tol: float = 1e-7) -> CoherenceResult:
    """Detector at rest in a coherent field with an arbitrary even amplitude.

    The kernel is integrated afresh at every proper-time node, so this is
    slow; it exists to check the Doppler argument for inertial motion.
    """
    t_bar = _clamp("t_bar", t_bar)

    def integrand(tau):
        ks = np.array([amplitude_kernel(amplitude, abs(s)).value for s in np.ravel(tau)])
        return switching(tau, t_bar) * np.cos(tau) * 2.0 * ks.reshape(np.shape(tau))

    # the rest integrand is even, so only the cosine survives
    res = _tau_integral(integrand, t_bar, rel_tol)
    return _result_from_amplitude(res, 2e-12)


def coherence(traj: Trajectory, e_bar: float, t_bar: float,
              rel_tol: float = 1e-6) -> CoherenceResult:
    """Cheapest valid evaluator for ``traj``."""
    if isinstance(traj, Rest):
        return coherence_rest_closed_form(e_bar, t_bar)
    if isinstance(traj, ConstantVelocity):
        return coherence_velocity_closed_form(e_bar, t_bar, traj.upsilon)
    if isinstance(traj, UniformAcceleration):
        return coherence_numeric(traj, e_bar, t_bar, rel_tol)
    raise TypeError(f"not a trajectory: {traj!r}")
