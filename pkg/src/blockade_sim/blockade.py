"""Optimal pumping conditions and blockade diagnostics."""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ParameterError, SingularDenominatorError
from .model import Direction, SystemParams, complex_detunings, effective_drive

SINGULAR_TOL = 1e-12
POISSON_FLOOR = 1e-30


class Branch(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


class Blockade(str, enum.Enum):
    SINGLE_PHOTON = "single"
    TWO_PHOTON = "two"
    NONE = "none"


def wrap_phase(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    wrapped = math.remainder(theta, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


@dataclass(frozen=True)
class PumpSetting:
    omega_p: float
    theta_p: float

    @classmethod
    def from_complex(cls, value: complex) -> PumpSetting:
        # value = omega_p * exp(-i theta_p)
        return cls(abs(value), wrap_phase(-cmath.phase(value)) if value != 0 else 0.0)

    @property
    def complex_value(self) -> complex:
        return self.omega_p * cmath.exp(-1j * self.theta_p)

    def apply(self, params: SystemParams) -> SystemParams:
        return params.replace(omega_p=self.omega_p, theta_p=self.theta_p)


def _common(params: SystemParams, direction: Direction):
    dc, da = complex_detunings(params)
    W = effective_drive(params, direction)
    dac = da * (da + dc) - W * W
    return dc, da, W, params.g ** 2, dac


def optimal_pump_single(params: SystemParams, direction: Direction) -> PumpSetting:
    """Pump that cancels the steady two-photon amplitude ``C2g``."""
    dc, da, W, g2, dac = _common(params, direction)
    den = dc * dac - g2 * (da + dc)
    if abs(den) < SINGULAR_TOL:
        raise SingularDenominatorError(f"single-photon pump denominator {abs(den):.3g}")
    return PumpSetting.from_complex(2 * W * W * (g2 + dac) / den)


@dataclass(frozen=True)
class TwoPhotonCoefficients:
    Delta: complex
    delta_ac_small: complex
    alpha: complex
    beta: complex
    delta: complex
    zeta: complex
    discriminant: complex


def two_photon_coefficients(params: SystemParams, direction: Direction) -> TwoPhotonCoefficients:
    dc, da, W, g2, dac = _common(params, direction)
    delta = da + 2 * dc
    zeta = 3 * da + 4 * dc
    dac_small = g2 * (3 * da * (da + dc) - 4 * W * W)
    alpha = 3 * dc * dac * delta
    beta = 2 * (2 * g2 + dac) * delta
    Delta = alpha - 4 * g2 * g2 - dac_small
    disc = Delta ** 2 - 4 * beta * W * W * (g2 * zeta + dac * delta)
    return TwoPhotonCoefficients(Delta, dac_small, alpha, beta, delta, zeta, disc)


def _two_photon_roots(params, direction) -> dict[Branch, complex]:
    co = two_photon_coefficients(params, direction)
    if abs(co.beta) < SINGULAR_TOL:
        raise SingularDenominatorError(f"|beta| = {abs(co.beta):.3g}")
    root = cmath.sqrt(co.discriminant)
    return {Branch.PLUS: (co.Delta + root) / co.beta,
            Branch.MINUS: (co.Delta - root) / co.beta}


def optimal_pump_two(params: SystemParams, direction: Direction,
                     branch: Branch | str) -> PumpSetting:
    """Pump that cancels the steady three-photon amplitude ``C3g``."""
    return PumpSetting.from_complex(_two_photon_roots(params, direction)[Branch(branch)])


def select_branch(params: SystemParams, direction: Direction) -> Branch:
    """The root with the smaller pump modulus; ties go to ``MINUS``."""
    roots = _two_photon_roots(params, direction)
    return Branch.PLUS if abs(roots[Branch.PLUS]) < abs(roots[Branch.MINUS]) else Branch.MINUS


def pump_is_weak(setting: PumpSetting, params: SystemParams, direction: Direction) -> bool:
    return setting.omega_p < effective_drive(params, direction)


def nonreciprocal_ratio(g2_forward: float, g2_backward: float) -> float:
    """Forward/backward antibunching contrast in dB."""
    if not (g2_forward > 0 and g2_backward > 0):
        raise ParameterError("nonreciprocal ratio needs positive correlations")
    return -10.0 * math.log10(g2_forward / g2_backward)


def single_photon_resonance(params: SystemParams) -> float:
    """Detuning ``Re[g^2 / (delta_a - i gamma/2)]`` where blockade is expected."""
    _, da = complex_detunings(params)
    if da == 0:
        raise SingularDenominatorError("atomic detuning and damping both vanish")
    return (params.g ** 2 / da).real


def classify_blockade(g2: float, g3: float) -> Blockade:
    if g2 < 1:
        return Blockade.SINGLE_PHOTON
    if g3 < 1:
        return Blockade.TWO_PHOTON
    return Blockade.NONE


@dataclass(frozen=True)
class PoissonDeviation:
    deviation: np.ndarray
    reference: np.ndarray
    underflow: np.ndarray

    def n_photon_blockade(self, n: int) -> bool:
        """``P_n >= Poisson_n`` and ``P_{n+1} < Poisson_{n+1}``."""
        if n + 1 >= self.deviation.size:
            raise IndexError(f"distribution too short for n={n}")
        if self.underflow[n] or self.underflow[n + 1]:
            return False
        return bool(self.deviation[n] >= 0 and self.deviation[n + 1] < 0)


def poisson_deviation(P, mean: float) -> PoissonDeviation:
    """Relative deviation of ``P`` from a Poisson distribution of the same mean.

    Levels where the Poisson weight drops below ``POISSON_FLOOR`` are flagged in
    ``underflow`` and carry NaN.
    """
    P = np.asarray(P, dtype=float)
    if mean <= 0:
        raise ParameterError("mean photon number must be positive")
    n = np.arange(P.size)
    ref = np.exp(n * math.log(mean) - mean - gammaln(n + 1))
    underflow = ref < POISSON_FLOOR
    dev = np.full(P.size, np.nan)
    ok = ~underflow
    dev[ok] = (P[ok] - ref[ok]) / ref[ok]
    return PoissonDeviation(dev, ref, underflow)


def n_photon_blockade(P, mean: float, n: int) -> bool:
    return poisson_deviation(P, mean).n_photon_blockade(n)
