"""Physical parameters and Hamiltonians of the pumped asymmetric atom-cavity system.

All rates and detunings are dimensionless, measured in units of the total
cavity decay rate kappa (so kappa = 1 throughout).
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import ParameterError
from .hilbert import (
    FockQubitSpace,
    Operator,
    annihilation,
    sigma_minus,
)

KAPPA_SUM_TOL = 1e-9


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"

    @property
    def reversed(self) -> Direction:
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


@dataclass(frozen=True)
class SystemParams:
    """Model parameters in units of kappa.

    ``allow_loss`` lets ``kappa1 + kappa2 < 1``; the remainder is intrinsic
    cavity loss and every rate is still measured against the total kappa.
    """

    kappa1: float = 0.9
    kappa2: float = 0.1
    gamma: float = 0.7
    g: float = 1.0
    delta_c: float = 1.0
    delta_a: float = 0.6
    b_in: float = 0.02
    omega_p: float = 0.0
    theta_p: float = 0.0
    allow_loss: bool = False

    def __post_init__(self):
        bad = [name for name in ("kappa1", "kappa2", "gamma", "g", "b_in", "omega_p")
               if not getattr(self, name) >= 0]
        if bad:
            raise ParameterError(f"parameters must be non-negative: {', '.join(bad)}")
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ParameterError(f"{f.name} is not finite")
        total = self.kappa1 + self.kappa2
        if self.allow_loss:
            if total > 1 + KAPPA_SUM_TOL:
                raise ParameterError(f"kappa1 + kappa2 = {total} exceeds the unit kappa")
        elif abs(total - 1) > KAPPA_SUM_TOL:
            raise ParameterError(
                f"kappa1 + kappa2 must equal 1 (got {total}); pass allow_loss=True "
                "to model intrinsic cavity loss")

    @property
    def kappa_loss(self) -> float:
        return max(0.0, 1.0 - self.kappa1 - self.kappa2)

    @property
    def pump(self) -> complex:
        """Complex pump ``omega_p * exp(-i theta_p)``."""
        return self.omega_p * np.exp(-1j * self.theta_p)

    def replace(self, **changes) -> SystemParams:
        if "kappa1" in changes and "kappa2" not in changes and not self.allow_loss:
            changes["kappa2"] = 1.0 - changes["kappa1"]
        return dataclasses.replace(self, **changes)

    def swapped(self) -> SystemParams:
        """Mirror image of the cavity: kappa1 and kappa2 exchanged."""
        return dataclasses.replace(self, kappa1=self.kappa2, kappa2=self.kappa1)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def input_decay(params: SystemParams, direction: Direction) -> float:
    return params.kappa1 if Direction(direction) is Direction.FORWARD else params.kappa2


def output_decay(params: SystemParams, direction: Direction) -> float:
    return params.kappa2 if Direction(direction) is Direction.FORWARD else params.kappa1


def effective_drive(params: SystemParams, direction: Direction) -> float:
    return math.sqrt(input_decay(params, direction)) * params.b_in


def complex_detunings(params: SystemParams) -> tuple[complex, complex]:
    """``(delta_c - i/2, delta_a - i gamma/2)``."""
    return params.delta_c - 0.5j, params.delta_a - 0.5j * params.gamma


def _build(params, direction, space, delta_c, delta_a, label) -> Operator:
    a = annihilation(space).matrix
    sm = sigma_minus(space).matrix
    ad = a.conj().T
    sp = sm.conj().T
    drive = effective_drive(params, direction)
    pump = params.pump
    h = (delta_c * ad @ a
         + delta_a * sp @ sm
         + params.g * (a @ sp + ad @ sm)
         + drive * (ad + a)
         + 0.5 * (pump * ad @ ad + np.conj(pump) * a @ a))
    return Operator(space, h, label)


def hamiltonian(params: SystemParams, direction: Direction,
                space: FockQubitSpace) -> Operator:
    """Rotating-frame Hamiltonian at the frequency-matching point (drive at half the pump)."""
    return _build(params, direction, space, params.delta_c, params.delta_a, "H")


def non_hermitian_hamiltonian(params: SystemParams, direction: Direction,
                              space: FockQubitSpace) -> Operator:
    dc, da = complex_detunings(params)
    return _build(params, direction, space, dc, da, "Hnon")


@dataclass(frozen=True)
class PhysicalUnits:
    drive_power_W: float
    pump_power_W: float
    emission_rate_hz: float
    leakage_rate_hz: float


def physical_units(params: SystemParams, kappa_hz: float, wavelength_nm: float,
                   *, direction: Direction = Direction.FORWARD,
                   photon_number: float = 0.0,
                   chi_hz: float | None = None) -> PhysicalUnits:
    """Convert to SI with ``kappa_hz`` (kappa / 2 pi in Hz) as the rate unit.

    ``photon_number`` is the intracavity <a^dag a> from a solver. The pump
    power needs the nonlinear coupling ``chi_hz`` in the same units; it is
    NaN when that is not given. ``emission_rate_hz`` counts photons leaving
    through the output mirror, ``leakage_rate_hz`` through both mirrors.
    """
    if kappa_hz <= 0 or wavelength_nm <= 0:
        raise ParameterError("kappa_hz and wavelength_nm must be positive")
    omega_drive = 2 * math.pi * constants.c / (wavelength_nm * 1e-9)
    photon_energy = constants.hbar * omega_drive
    k_in = input_decay(params, direction)
    drive = effective_drive(params, direction)
    drive_power = photon_energy * drive ** 2 / k_in * kappa_hz if k_in > 0 else 0.0
    if chi_hz is None:
        pump_power = math.nan
    else:
        # pump photons carry twice the drive frequency
        pump_power = 2 * photon_energy * (params.omega_p * kappa_hz) ** 2 / (4 * chi_hz)
    return PhysicalUnits(
        drive_power_W=drive_power,
        pump_power_W=pump_power,
        emission_rate_hz=output_decay(params, direction) * photon_number * kappa_hz,
        leakage_rate_hz=photon_number * kappa_hz,
    )
