"""Variational R-matrix solve: inner solutions, channel matching, R and T.

For a chosen right-edge log-derivative ``lambda_b`` the stationarity
condition reads ``(A + lambda_b v_b v_b^T) C = lambda_a v_a v_a^T C``.
Because the right-hand side is rank one, ``C`` is proportional to
``w = (A + lambda_b v_b v_b^T)^{-1} v_a`` and ``lambda_a = 1 / (v_a . w)``
once ``C`` is scaled to ``v_a . C = 1``; no eigensolver is needed.

The solve is carried out in a whitened basis (overlap = identity on the
numerically independent subspace, see :func:`vrmtunnel.basis.whitening`).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import (
    DEFAULT_RCOND,
    BasisSet,
    assemble_energy_matrices,
    assemble_system,
    basis_integrals,
    whitening,
)
from .errors import (
    DegenerateBoundaryError,
    DependentSolutionsError,
    PreconditionError,
    ResonanceError,
    TunnelingError,
)
from .potentials import ScatteringSetup, wavenumbers

__all__ = [
    "InnerSolution",
    "ChannelAmplitudes",
    "TunnelingResult",
    "COND_LIMIT",
    "inner_solution",
    "channel_amplitudes",
    "match_amplitudes",
    "reflection_transmission",
    "average_energy",
    "solve_tunneling",
    "write_debug_csv",
]

COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class InnerSolution:
    """Coefficients ``C`` (scaled so ``psi(a) = 1``) and edge log-derivatives.

    ``lambda_b`` is the imposed value; the realised ``psi'(b)/psi(b)`` of the
    truncated expansion only approaches it as the basis grows, so it is kept
    separately in ``realised_lambda_b`` when derivative data is available.
    """

    C: np.ndarray
    lambda_b: float
    lambda_a: float
    condition: float = float("nan")
    residual: float = float("nan")
    realised_lambda_a: float = float("nan")
    realised_lambda_b: float = float("nan")

    def scaled(self, s: float) -> "InnerSolution":
        return InnerSolution(
            self.C * s,
            self.lambda_b,
            self.lambda_a,
            self.condition,
            self.residual,
            self.realised_lambda_a,
            self.realised_lambda_b,
        )


@dataclass(frozen=True)
class ChannelAmplitudes:
    """Plane-wave coefficients: ``a1 e^{ik1x} + b1 e^{-ik1x}`` left, ``a3, b3`` right."""

    a1: complex
    b1: complex
    a3: complex
    b3: complex


@dataclass(frozen=True)
class TunnelingResult:
    E: float
    T: float
    R: float
    E_av: float
    unitarity_defect: float
    cond_indicator: float
    lambda_b: float = float("nan")
    lambda_b_tilde: float = float("nan")
    solutions: tuple = field(default=(), repr=False, compare=False)
    amplitudes: tuple = field(default=(), repr=False, compare=False)


def _eigen_residual(system, C, lambda_b, lambda_a):
    lhs = system.A @ C + lambda_b * system.v_b * (system.v_b @ C)
    rhs = lambda_a * system.v_a * (system.v_a @ C)
    scale = np.linalg.norm(system.A, 2) * np.linalg.norm(C)
    return float(np.linalg.norm(lhs - rhs) / scale) if scale else 0.0


def inner_solution(system, lambda_b, rcond=DEFAULT_RCOND, transform=None, cond_limit=COND_LIMIT):
    """Unique finite solution of the rank-one generalized eigenproblem.

    ``transform`` is a precomputed whitening matrix; by default it is built
    from ``system.gram`` (identity when the system carries no overlap).
    """
    if transform is None:
        transform = whitening(system.gram, rcond) if system.gram is not None else None
    if transform is None:
        Ar, ua, ub = system.A, system.v_a, system.v_b
    else:
        Ar = transform.T @ system.A @ transform
        ua = transform.T @ system.v_a
        ub = transform.T @ system.v_b
    M = Ar + lambda_b * np.outer(ub, ub)
    cond = float(np.linalg.cond(M))
    if not math.isfinite(cond) or cond > cond_limit:
        raise ResonanceError(
            f"boundary-augmented matrix is near singular for lambda_b={lambda_b} "
            f"(condition {cond:.3e}); perturb lambda_b",
            lambda_b=lambda_b,
            condition=cond,
        )
    y = np.linalg.solve(M, ua)
    w = y if transform is None else transform @ y
    psi_a = float(system.v_a @ w)
    if psi_a == 0.0 or abs(psi_a) <= 1e-14 * np.linalg.norm(system.v_a) * np.linalg.norm(w):
        raise DegenerateBoundaryError(
            f"inner solution vanishes at the left edge for lambda_b={lambda_b}"
        )
    C = w / psi_a
    lambda_a = 1.0 / psi_a
    psi_b = float(system.v_b @ C)
    if abs(psi_b) <= 1e-14 * np.linalg.norm(system.v_b) * np.linalg.norm(C):
        raise DegenerateBoundaryError(
            f"inner solution vanishes at the right edge for lambda_b={lambda_b}"
        )
    realised_a = realised_b = float("nan")
    if system.d_a is not None:
        realised_a = float(system.d_a @ C)  # psi(a) = 1
        realised_b = float(system.d_b @ C) / psi_b
    return InnerSolution(
        C=C,
        lambda_b=float(lambda_b),
        lambda_a=lambda_a,
        condition=cond,
        residual=_eigen_residual(system, C, lambda_b, lambda_a),
        realised_lambda_a=realised_a,
        realised_lambda_b=realised_b,
    )


def channel_amplitudes(psi_a, dpsi_a, psi_b, dpsi_b, setup: ScatteringSetup) -> ChannelAmplitudes:
    """Match value and slope at both edges to outer plane waves."""
    k1, k3 = wavenumbers(setup)
    ea = np.exp(1j * k1 * setup.a)
    eb = np.exp(1j * k3 * setup.b)
    a1 = 0.5 * (psi_a + dpsi_a / (1j * k1)) / ea
    b1 = 0.5 * (psi_a - dpsi_a / (1j * k1)) * ea
    a3 = 0.5 * (psi_b + dpsi_b / (1j * k3)) / eb
    b3 = 0.5 * (psi_b - dpsi_b / (1j * k3)) * eb
    return ChannelAmplitudes(complex(a1), complex(b1), complex(a3), complex(b3))


def match_amplitudes(sol: InnerSolution, basis: BasisSet, setup: ScatteringSetup):
    a, b = setup.a, setup.b
    C = sol.C
    return channel_amplitudes(
        float(basis.values(a) @ C),
        float(basis.derivatives(a) @ C),
        float(basis.values(b) @ C),
        float(basis.derivatives(b) @ C),
        setup,
    )


def reflection_transmission(amps, amps_t, k1, k3):
    """``(R, T)`` for unit incidence from the left and no wave incoming from the right.

    With ``Psi = B psi + Bt psi_t``, the constraints ``B a1 + Bt a1t = 1`` and
    ``B b3 + Bt b3t = 0`` give ``B = b3t/D`` and ``Bt = -b3/D`` with
    ``D = a1 b3t - b3 a1t``; the reflected and transmitted amplitudes are
    ``(b1 b3t - b3 b1t)/D`` and ``(a3 b3t - b3 a3t)/D``.
    """
    d = amps.a1 * amps_t.b3 - amps.b3 * amps_t.a1
    scale = abs(amps.a1 * amps_t.b3) + abs(amps.b3 * amps_t.a1)
    if scale == 0.0 or abs(d) <= 1e-12 * scale:
        raise DependentSolutionsError(
            "inner solutions are linearly dependent at the edges; choose another lambda pair"
        )
    rho = (amps.b1 * amps_t.b3 - amps.b3 * amps_t.b1) / d
    tau = (amps.a3 * amps_t.b3 - amps.b3 * amps_t.a3) / d
    return abs(rho) ** 2, (k3 / k1) * abs(tau) ** 2


def average_energy(C, em) -> float:
    """Ratio of quadratic forms ``C.P.C / C.Rm.C``."""
    C = np.asarray(C, dtype=float)
    norm = float(C @ em.Rm @ C)
    if not norm > 0:
        raise DegenerateBoundaryError("average energy undefined for a zero-norm expansion")
    return float(C @ em.P @ C) / norm


def _solve_with_retries(system, lam, other, transform, retries, step):
    tried = []
    for _ in range(retries + 1):
        if lam == other:
            lam += step
        try:
            return inner_solution(system, lam, transform=transform)
        except (ResonanceError, DegenerateBoundaryError) as exc:
            tried.append(lam)
            last = exc
            lam += step
    raise type(last)(f"{last} (tried lambda_b={tried})") from last


def solve_tunneling(
    profile,
    setup: ScatteringSetup,
    basis: BasisSet,
    lambda_b: float,
    lambda_b_tilde: float,
    quad=None,
    *,
    integrals=None,
    rcond=DEFAULT_RCOND,
    retries=3,
    perturbation=0.5,
) -> TunnelingResult:
    """Full pipeline for one energy: assemble, two inner solves, match, R/T, E_av.

    A resonant ``lambda_b`` (near-singular augmented matrix) is shifted by
    ``perturbation`` up to ``retries`` times; the values actually used are
    reported on the result.
    """
    if lambda_b == lambda_b_tilde:
        raise PreconditionError("lambda_b and lambda_b_tilde must differ")
    k1, k3 = wavenumbers(setup)
    if integrals is None:
        integrals = basis_integrals(basis, profile, quad)
    system = assemble_system(basis, profile, setup.E, setup, integrals=integrals)
    transform = whitening(system.gram, rcond)

    sols = []
    for lam, other, name in ((lambda_b, lambda_b_tilde, "lambda_b"), (lambda_b_tilde, None, "lambda_b_tilde")):
        if other is None:
            other = sols[0].lambda_b
        try:
            sols.append(_solve_with_retries(system, lam, other, transform, retries, perturbation))
        except TunnelingError as exc:
            raise type(exc)(f"E={setup.E}, {name}={lam}, stage=inner_solution: {exc}") from exc

    amps = [match_amplitudes(s, basis, setup) for s in sols]
    try:
        R, T = reflection_transmission(amps[0], amps[1], k1, k3)
    except TunnelingError as exc:
        raise type(exc)(f"E={setup.E}, stage=reflection_transmission: {exc}") from exc
    em = assemble_energy_matrices(basis, profile, setup, integrals=integrals)
    E_av = average_energy(sols[0].C, em)
    return TunnelingResult(
        E=setup.E,
        T=T,
        R=R,
        E_av=E_av,
        unitarity_defect=abs(T + R - 1.0),
        cond_indicator=max(s.condition for s in sols),
        lambda_b=sols[0].lambda_b,
        lambda_b_tilde=sols[1].lambda_b,
        solutions=tuple(sols),
        amplitudes=tuple(amps),
    )


def write_debug_csv(path, records):
    """Dump inner solutions as CSV rows keyed by ``(profile, E, lambda_b)``.

    ``records`` is an iterable of ``(profile_kind, TunnelingResult)`` pairs
    whose results still carry their solutions and amplitudes.
    """
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["profile", "E", "lambda_b", "lambda_a", "a1", "b1", "a3", "b3", "C"])
        for kind, res in records:
            for sol, amp in zip(res.solutions, res.amplitudes):
                out.writerow(
                    [
                        kind,
                        repr(res.E),
                        repr(sol.lambda_b),
                        repr(sol.lambda_a),
                        repr(amp.a1),
                        repr(amp.b1),
                        repr(amp.a3),
                        repr(amp.b3),
                        " ".join(repr(float(c)) for c in sol.C),
                    ]
                )
