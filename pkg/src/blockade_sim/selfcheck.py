"""Fast invariant self-test behind ``blockade-sim check``."""
from __future__ import annotations

import warnings

import numpy as np

from . import amplitudes as amp
from . import hilbert as hs
from . import lindblad
from .blockade import (
    Branch,
    optimal_pump_single,
    optimal_pump_two,
    single_photon_resonance,
)
from .model import Direction, SystemParams, hamiltonian, non_hermitian_hamiltonian

FIG2 = SystemParams(kappa1=0.9, kappa2=0.1, gamma=0.7, g=1.0, delta_a=0.6, b_in=0.02)


def _commutator_identity():
    space = hs.make_space(6)
    a = hs.annihilation(space)
    comm = hs.commutator(a, a.dag).matrix
    lower = 2 * space.n_max
    return np.allclose(comm[:lower, :lower], np.eye(lower))


def _atom_completeness():
    space = hs.make_space(5)
    sm = hs.sigma_minus(space)
    total = (sm.dag @ sm + sm @ sm.dag).matrix
    return np.allclose(total, np.eye(space.dim))


def _modes_commute():
    space = hs.make_space(5)
    a, sm = hs.annihilation(space), hs.sigma_minus(space)
    return np.array_equal((a @ sm).matrix, (sm @ a).matrix)


def _hamiltonian_hermitian():
    p = FIG2.replace(omega_p=3e-4, theta_p=-1.2)
    h = hamiltonian(p, Direction.FORWARD, hs.make_space(6)).matrix
    return np.allclose(h, h.conj().T, atol=0)


def _direction_swap():
    p = FIG2.replace(omega_p=3e-4, theta_p=0.4)
    space = hs.make_space(5)
    back = hamiltonian(p, Direction.BACKWARD, space).matrix
    swapped = hamiltonian(p.swapped(), Direction.FORWARD, space).matrix
    return np.array_equal(back, swapped)


def _anti_hermitian_part():
    p = FIG2.replace(omega_p=3e-4, theta_p=0.4)
    space = hs.make_space(5)
    h = non_hermitian_hamiltonian(p, Direction.FORWARD, space).matrix
    anti = 0.5 * (h - h.conj().T)
    n = hs.number_operator(space).matrix
    pe = (hs.sigma_plus(space) @ hs.sigma_minus(space)).matrix
    return np.allclose(anti, -0.5j * n - 0.5j * p.gamma * pe)


def _single_cancellation():
    p = FIG2.replace(delta_c=1.1)
    setting = optimal_pump_single(p, Direction.FORWARD)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", amp.ClosedFormMismatchWarning)
        s = amp.steady_amplitudes(setting.apply(p), Direction.FORWARD)
    omega = 0.9 ** 0.5 * 0.02
    return abs(s.c2g) ** 2 / (abs(s.c1g) ** 2 * omega ** 2) < 1e-10


def _two_cancellation():
    p = FIG2.replace(delta_c=1.0)
    omega = 0.9 ** 0.5 * 0.02
    ok = True
    for branch in Branch:
        setting = optimal_pump_two(p, Direction.FORWARD, branch)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", amp.ClosedFormMismatchWarning)
            s = amp.steady_amplitudes(setting.apply(p), Direction.FORWARD)
        ok &= abs(s.c3g) ** 2 / (abs(s.c1g) ** 2 * omega ** 4) < 1e-10
    return ok


def _amplitudes_match_linear_solve():
    p = FIG2.replace(delta_c=0.9, omega_p=5e-4, theta_p=-1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", amp.ClosedFormMismatchWarning)
        closed = amp.steady_amplitudes(p, Direction.FORWARD).as_array()
    linear = amp.ode_steady_amplitudes(p, Direction.FORWARD).as_array()
    return np.allclose(closed, linear, rtol=1e-9, atol=0)


def _steady_state_invariants():
    p = optimal_pump_single(FIG2.replace(delta_c=single_photon_resonance(FIG2)),
                            Direction.FORWARD).apply(FIG2.replace(delta_c=1.0))
    space = hs.make_space(10)
    ok = True
    for d in Direction:
        liou = lindblad.build_liouvillian(p, d, space)
        rho = lindblad.steady_state(liou)
        ok &= not rho.invariant_violations()
        ok &= lindblad.residual_norm(liou, rho) < lindblad.RESIDUAL_TOL
    return ok


def _trace_preservation():
    liou = lindblad.build_liouvillian(FIG2.replace(omega_p=1e-3), Direction.FORWARD,
                                      hs.make_space(5))
    return np.max(np.abs(lindblad.trace_row(liou.space) @ liou.generator)) < 1e-10


def _vacuum_is_dark():
    space = hs.make_space(4)
    liou = lindblad.build_liouvillian(FIG2.replace(b_in=0.0), Direction.FORWARD, space)
    rho = lindblad.steady_state(liou)
    return np.allclose(rho.matrix, lindblad.DensityMatrix.basis(space, 0).matrix, atol=1e-12)


CHECKS = [
    ("truncated commutator [a, a+] = 1 below the top level", _commutator_identity),
    ("two-level completeness", _atom_completeness),
    ("cavity and atom operators commute", _modes_commute),
    ("Hamiltonian is Hermitian", _hamiltonian_hermitian),
    ("backward equals forward with mirrors swapped", _direction_swap),
    ("non-Hermitian part is the damping", _anti_hermitian_part),
    ("closed-form amplitudes match the linear system", _amplitudes_match_linear_solve),
    ("single-photon optimal pump cancels C2g", _single_cancellation),
    ("two-photon optimal pump cancels C3g", _two_cancellation),
    ("Liouvillian preserves trace", _trace_preservation),
    ("vacuum is the undriven steady state", _vacuum_is_dark),
    ("steady states are physical with small residual", _steady_state_invariants),
]


def run_checks(out=print) -> bool:
    all_ok = True
    for label, fn in CHECKS:
        try:
            ok = bool(fn())
        except Exception as exc:  # report, keep going
            ok = False
            label = f"{label} ({type(exc).__name__}: {exc})"
        all_ok &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {label}")
    return all_ok
