"""Zero-temperature master equation for the pumped atom-cavity system.

Density matrices are vectorized by stacking columns, so ``A rho B`` maps to
``kron(B.T, A) @ vec(rho)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import InvariantViolation, SteadyStateError, UndefinedCorrelationError
from .hilbert import FockQubitSpace, annihilation, make_space, sigma_minus
from .model import Direction, SystemParams, hamiltonian

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = -1e-8
RESIDUAL_TOL = 1e-8
UNIQUENESS_TOL = 1e-8
EVOLVE_TRACE_DRIFT = 1e-6
MIN_PHOTONS = 1e-15
TRUNCATION_RTOL = 1e-4


def vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: FockQubitSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"matrix shape {m.shape} does not fit dim {self.space.dim}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def pure(cls, space: FockQubitSpace, psi) -> DensityMatrix:
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(space, np.outer(psi, psi.conj()))

    @classmethod
    def basis(cls, space: FockQubitSpace, n: int, s: int = 0) -> DensityMatrix:
        return cls.pure(space, space.basis_vector(n, s))

    @property
    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    @property
    def trace_error(self) -> float:
        return float(abs(np.trace(self.matrix) - 1))

    @property
    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def invariant_violations(self) -> list[str]:
        problems = []
        if self.hermiticity_error >= HERMITIAN_TOL:
            problems.append(f"not Hermitian (max |rho - rho^dag| = {self.hermiticity_error:.3g})")
        if self.trace_error >= TRACE_TOL:
            problems.append(f"trace off by {self.trace_error:.3g}")
        lam = self.min_eigenvalue
        if lam <= POSITIVITY_TOL:
            problems.append(f"negative eigenvalue {lam:.3g}")
        return problems

    def validate(self) -> DensityMatrix:
        problems = self.invariant_violations()
        if problems:
            raise InvariantViolation("; ".join(problems))
        return self


@dataclass(frozen=True, eq=False)
class Liouvillian:
    space: FockQubitSpace
    generator: np.ndarray

    def apply(self, rho) -> np.ndarray:
        m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
        return unvec(self.generator @ vec(m), self.space.dim)


def _dissipator(c: np.ndarray) -> np.ndarray:
    eye = np.eye(c.shape[0])
    cdc = c.conj().T @ c
    return np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)


def build_liouvillian(params: SystemParams, direction: Direction,
                      space: FockQubitSpace) -> Liouvillian:
    h = hamiltonian(params, direction, space).matrix
    eye = np.eye(space.dim)
    gen = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    # total kappa is the unit, so the cavity collapse operator is plain a
    gen += _dissipator(annihilation(space).matrix)
    if params.gamma > 0:
        gen += params.gamma * _dissipator(sigma_minus(space).matrix)
    return Liouvillian(space, gen)


def trace_row(space: FockQubitSpace) -> np.ndarray:
    return vec(np.eye(space.dim))


def steady_state(liouvillian: Liouvillian, *, check_unique: bool = False) -> DensityMatrix:
    """Unique steady state via a bordered solve, with an SVD fallback.

    One equation of ``L vec(rho) = 0`` is redundant by trace preservation and is
    replaced by ``Tr rho = 1``. ``check_unique`` additionally verifies that the
    second-smallest singular value of the generator clears ``UNIQUENESS_TOL``.
    """
    space = liouvillian.space
    gen = liouvillian.generator
    if check_unique:
        sv = linalg.svdvals(gen)
        if sv[-2] <= UNIQUENESS_TOL:
            raise SteadyStateError(
                f"steady state not unique (second-smallest singular value {sv[-2]:.3g})")
    bordered = gen.copy()
    bordered[0, :] = trace_row(space)
    rhs = np.zeros(gen.shape[0], dtype=complex)
    rhs[0] = 1.0
    try:
        x = linalg.solve(bordered, rhs, check_finite=False)
    except linalg.LinAlgError:
        x = _null_vector(gen, space)
    rho = unvec(x, space.dim)
    rho = 0.5 * (rho + rho.conj().T)
    residual = np.linalg.norm(gen @ vec(rho))
    if not residual < RESIDUAL_TOL:
        raise SteadyStateError(f"steady-state residual {residual:.3g} exceeds {RESIDUAL_TOL}")
    return DensityMatrix(space, rho)


def _null_vector(gen: np.ndarray, space: FockQubitSpace) -> np.ndarray:
    _, s, vh = linalg.svd(gen)
    if s[-2] <= UNIQUENESS_TOL:
        raise SteadyStateError(
            f"steady state not unique (second-smallest singular value {s[-2]:.3g})")
    x = vh[-1].conj()
    return x / (trace_row(space) @ x)


def residual_norm(liouvillian: Liouvillian, rho: DensityMatrix) -> float:
    return float(np.linalg.norm(liouvillian.generator @ vec(rho.matrix)))


def evolve(rho0: DensityMatrix, liouvillian: Liouvillian, t_final: float,
           dt: float = 1.0) -> DensityMatrix:
    """Propagate with the exact one-step propagator ``expm(L dt)``.

    The trace is checked after every step; a drift above ``EVOLVE_TRACE_DRIFT``
    raises :class:`InvariantViolation`.
    """
    rho0.validate()
    n_steps = max(1, int(np.ceil(t_final / dt - 1e-9)))
    h = t_final / n_steps
    prop = linalg.expm(liouvillian.generator * h)
    x = vec(rho0.matrix)
    tr = trace_row(liouvillian.space)
    for _ in range(n_steps):
        x = prop @ x
        drift = abs(tr @ x - 1)
        if drift > EVOLVE_TRACE_DRIFT:
            raise InvariantViolation(f"trace drifted by {drift:.3g} during evolution")
    rho = unvec(x, liouvillian.space.dim)
    return DensityMatrix(liouvillian.space, rho)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    diff = rho.matrix - sigma.matrix
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def photon_distribution(rho: DensityMatrix, space: FockQubitSpace | None = None) -> np.ndarray:
    """Fock-level populations with the atom traced out."""
    space = space or rho.space
    diag = np.real(np.diag(rho.matrix))
    return diag.reshape(space.n_max + 1, 2).sum(axis=1)


def _factorial_moment(p: np.ndarray, k: int) -> float:
    n = np.arange(p.size)
    falling = np.ones_like(n, dtype=float)
    for j in range(k):
        falling *= n - j
    return float(falling @ p)


def mean_photon_number(rho: DensityMatrix, space: FockQubitSpace | None = None) -> float:
    return _factorial_moment(photon_distribution(rho, space), 1)


def _gk(rho, space, k):
    p = photon_distribution(rho, space)
    n = _factorial_moment(p, 1)
    if n <= MIN_PHOTONS:
        raise UndefinedCorrelationError(f"<a^dag a> = {n:.3g} is vacuum-like")
    return _factorial_moment(p, k) / n ** k


def g2(rho: DensityMatrix, space: FockQubitSpace | None = None) -> float:
    """``<a^dag^2 a^2> / <a^dag a>^2``; equal to the output-port value since sqrt(kappa_out) cancels."""
    return _gk(rho, space, 2)


def g3(rho: DensityMatrix, space: FockQubitSpace | None = None) -> float:
    return _gk(rho, space, 3)



@dataclass(frozen=True)
class PointSolution:
    rho: DensityMatrix
    n_photon: float
    g2: float
    g3: float
    residual: float
    top_population: float


def solve_point(params: SystemParams, direction: Direction, n_max: int = 10) -> PointSolution:
    """Steady state and its photon statistics at one parameter point."""
    space = make_space(n_max)
    liou = build_liouvillian(params, direction, space)
    rho = steady_state(liou)
    p = photon_distribution(rho)
    n = _factorial_moment(p, 1)
    if n > MIN_PHOTONS:
        second, third = _factorial_moment(p, 2) / n ** 2, _factorial_moment(p, 3) / n ** 3
    else:
        second = third = float("nan")
    return PointSolution(rho, n, second, third, residual_norm(liou, rho), float(p[-1]))


@dataclass(frozen=True)
class TruncationCheck:
    converged: bool
    g2_delta: float
    g3_delta: float


def check_truncation(params: SystemParams, direction: Direction, n_max: int = 10) -> TruncationCheck:
    """Compare g2 and g3 at ``n_max`` and ``n_max + 3``."""
    if n_max < 4:
        raise ValueError("check_truncation needs n_max >= 4")
    lo = solve_point(params, direction, n_max)
    hi = solve_point(params, direction, n_max + 3)
    if not (np.isfinite(lo.g2) and np.isfinite(hi.g2)):
        undriven = lo.n_photon <= MIN_PHOTONS and hi.n_photon <= MIN_PHOTONS
        return TruncationCheck(undriven, 0.0 if undriven else np.inf,
                               0.0 if undriven else np.inf)
    d2 = abs(hi.g2 - lo.g2) / abs(hi.g2)
    d3 = abs(hi.g3 - lo.g3) / abs(hi.g3) if hi.g3 else abs(hi.g3 - lo.g3)
    return TruncationCheck(bool(d2 < TRUNCATION_RTOL and d3 < TRUNCATION_RTOL), d2, d3)
