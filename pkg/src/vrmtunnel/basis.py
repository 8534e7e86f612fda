"""Cosine basis on the inner window and the variational matrices built from it.

Overlap and kinetic integrals of ``cos(k x)`` products are done in closed
form; only the potential term goes through quadrature. The potential
matrix does not depend on the energy, so :class:`BasisIntegrals` is computed
once per (basis, profile) and reused across an energy sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, PreconditionError
from .quadrature import QuadratureSpec, integrate

__all__ = [
    "BasisSet",
    "BasisIntegrals",
    "VariationalSystem",
    "EnergyMatrices",
    "kappa_grid",
    "basis_eval",
    "cosine_integral",
    "overlap_matrix",
    "kinetic_matrix",
    "potential_matrix",
    "basis_integrals",
    "assemble_system",
    "assemble_energy_matrices",
    "whitening",
    "DEFAULT_RCOND",
]

# Overlap eigenvalues below DEFAULT_RCOND * max are treated as numerically null.
DEFAULT_RCOND = 1e-13


def kappa_grid(start: float, step: float, end: float) -> list[float]:
    """Inclusive arithmetic grid ``start, start+step, ..., end``.

    ``end`` is kept when it lies within 1e-12 of a grid point. Values are
    computed as ``start + i*step`` so they do not accumulate rounding.
    """
    if not step > 0:
        raise DomainError(f"grid step must be positive, got {step}")
    if start > end:
        raise DomainError(f"grid start {start} exceeds end {end}")
    n = int(math.floor((end - start) / step + 1e-12 / step)) + 1
    values = [start + i * step for i in range(n)]
    # snap the final point onto `end` when it is the same value up to rounding
    if abs(values[-1] - end) <= 1e-12:
        values[-1] = end
    return [round(v, 12) for v in values]


@dataclass(frozen=True)
class BasisSet:
    """Functions ``cos(kappa_i x)`` on the window ``domain = (a, b)``."""

    kappas: tuple[float, ...]
    domain: tuple[float, float]

    def __post_init__(self):
        k = tuple(float(v) for v in self.kappas)
        object.__setattr__(self, "kappas", k)
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))
        if len(k) < 2:
            raise DomainError("basis needs at least two functions")
        if any(v < 0 for v in k):
            raise DomainError("kappas must be non-negative")
        if any(b <= a for a, b in zip(k[:-1], k[1:])):
            raise DomainError("kappas must be strictly increasing (no duplicates)")
        if not self.domain[0] < self.domain[1]:
            raise DomainError("basis domain needs a < b")

    @classmethod
    def from_grid(cls, start, step, end, domain):
        return cls(tuple(kappa_grid(start, step, end)), domain)

    @property
    def size(self) -> int:
        return len(self.kappas)

    @cached_property
    def k(self) -> np.ndarray:
        return np.asarray(self.kappas)

    def values(self, x):
        """``chi_i(x)`` for all i; shape ``(N,) + shape(x)``."""
        return np.cos(np.multiply.outer(self.k, np.asarray(x, dtype=float)))

    def derivatives(self, x):
        x = np.asarray(x, dtype=float)
        return -np.multiply.outer(self.k, np.ones_like(x)) * np.sin(np.multiply.outer(self.k, x))


def basis_eval(basis: BasisSet, i: int, x: float):
    """``(chi_i(x), chi_i'(x))`` for the zero-based index ``i``."""
    if not 0 <= i < basis.size:
        raise IndexError(f"basis index {i} out of range for {basis.size} functions")
    k = basis.kappas[i]
    return math.cos(k * x), -k * math.sin(k * x)


def cosine_integral(q, a, b):
    """Exact ``int_a^b cos(q x) dx``, stable as ``q -> 0``."""
    q = np.asarray(q, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return (b - a) * np.cos(q * mid) * np.sinc(q * half / np.pi)


def overlap_matrix(basis: BasisSet) -> np.ndarray:
    a, b = basis.domain
    k = basis.k
    diff = cosine_integral(k[:, None] - k[None, :], a, b)
    plus = cosine_integral(k[:, None] + k[None, :], a, b)
    return 0.5 * (diff + plus)


def kinetic_matrix(basis: BasisSet) -> np.ndarray:
    """``int chi_i' chi_j' dx``."""
    a, b = basis.domain
    k = basis.k
    diff = cosine_integral(k[:, None] - k[None, :], a, b)
    plus = cosine_integral(k[:, None] + k[None, :], a, b)
    return 0.5 * np.outer(k, k) * (diff - plus)


def potential_matrix(basis: BasisSet, profile, quad: QuadratureSpec | None = None):
    """``int chi_i V chi_j dx`` by adaptive Gauss-Legendre quadrature."""
    quad = quad or QuadratureSpec()
    a, b = basis.domain
    k = basis.k

    def panel(x, w):
        chi = np.cos(np.outer(k, x))
        return (chi * (w * profile(x))) @ chi.T

    m = integrate(panel, a, b, quad, kmax=float(k.max()), breakpoints=profile.breakpoints)
    return 0.5 * (m + m.T)


@dataclass(frozen=True, eq=False)
class BasisIntegrals:
    """Energy-independent integrals: overlap, kinetic and potential matrices."""

    basis: BasisSet
    gram: np.ndarray
    kinetic: np.ndarray
    potential: np.ndarray


def basis_integrals(basis: BasisSet, profile, quad: QuadratureSpec | None = None):
    return BasisIntegrals(
        basis, overlap_matrix(basis), kinetic_matrix(basis), potential_matrix(basis, profile, quad)
    )


def whitening(gram: np.ndarray, rcond: float = DEFAULT_RCOND) -> np.ndarray:
    """Columns spanning the numerically independent part of the basis.

    Returns ``S`` (N x r) with ``S.T @ gram @ S = I``, keeping overlap
    eigenvalues above ``rcond * max``. Cosine grids denser than the window
    can resolve are close to linearly dependent; dropping those directions
    removes roundoff noise without changing the representable functions.
    ``rcond=0`` keeps every direction with a positive eigenvalue.
    """
    evals, vecs = np.linalg.eigh(gram)
    keep = evals > max(rcond * evals.max(), 0.0)
    if not np.any(keep):
        raise DomainError("basis overlap matrix has no positive eigenvalues")
    return vecs[:, keep] / np.sqrt(evals[keep])


@dataclass(frozen=True, eq=False)
class VariationalSystem:
    """Boundary-augmented variational problem for one energy.

    ``A`` is the symmetric functional matrix, ``v_a``/``v_b`` the basis
    values at the window edges (the rank-one boundary matrices are their
    outer products) and ``d_a``/``d_b`` the basis derivatives there.
    ``gram`` is the overlap matrix, used to whiten the solve.
    """

    A: np.ndarray
    v_a: np.ndarray
    v_b: np.ndarray
    d_a: np.ndarray = None
    d_b: np.ndarray = None
    gram: np.ndarray = None
    E: float = float("nan")

    @property
    def delta_a(self):
        return np.outer(self.v_a, self.v_a)

    @property
    def delta_b(self):
        return np.outer(self.v_b, self.v_b)

    @cached_property
    def symmetry_defect(self) -> float:
        scale = float(np.max(np.abs(self.A))) or 1.0
        return float(np.max(np.abs(self.A - self.A.T))) / scale


@dataclass(frozen=True, eq=False)
class EnergyMatrices:
    """Numerator ``P`` and norm ``Rm`` matrices of the average-energy ratio."""

    P: np.ndarray
    Rm: np.ndarray


def _check_domain(basis, setup):
    if (setup.a, setup.b) != basis.domain:
        raise PreconditionError(
            f"basis domain {basis.domain} differs from setup window ({setup.a}, {setup.b})"
        )


def assemble_system(basis, profile, E, setup, quad=None, integrals=None) -> VariationalSystem:
    """``A_ij = -int chi_i' chi_j' + 2E int chi_i chi_j - 2 int chi_i V chi_j``."""
    _check_domain(basis, setup)
    if integrals is None:
        integrals = basis_integrals(basis, profile, quad)
    A = -integrals.kinetic + 2.0 * E * integrals.gram - 2.0 * integrals.potential
    A = 0.5 * (A + A.T)
    a, b = basis.domain
    return VariationalSystem(
        A=A,
        v_a=basis.values(a),
        v_b=basis.values(b),
        d_a=basis.derivatives(a),
        d_b=basis.derivatives(b),
        gram=integrals.gram,
        E=float(E),
    )


def assemble_energy_matrices(basis, profile, setup, quad=None, integrals=None) -> EnergyMatrices:
    """``P_ij = int chi_i (-chi_j''/2 + V chi_j)``, ``Rm_ij = int chi_i chi_j``."""
    _check_domain(basis, setup)
    if integrals is None:
        integrals = basis_integrals(basis, profile, quad)
    # chi_j'' = -kappa_j^2 chi_j
    kin = 0.5 * integrals.gram * basis.k[None, :] ** 2
    return EnergyMatrices(P=kin + integrals.potential, Rm=integrals.gram)
