"""Reference transmission values that do not go through the variational solve.

* closed forms for the bell-shaped and Eckart barriers,
* high-accuracy initial-value integration of the Schrodinger equation,
* exact matching of an analytically known solution pair (e.g. Airy functions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import airy, expit

from .errors import AccuracyError, DependentSolutionsError, DomainError, PreconditionError
from .potentials import LinearStep, ScatteringSetup, wavenumbers
from .solver import channel_amplitudes, reflection_transmission

__all__ = [
    "bell_transmission_exact",
    "eckart_reflection_exact",
    "eckart_transmission_exact",
    "ReferenceSolution",
    "reference_solution",
    "integrate_reference",
    "SolutionPair",
    "matched_pair_coefficients",
    "matched_pair_transmission",
    "plane_wave_pair",
    "exponential_pair",
    "airy_pair",
]


def bell_transmission_exact(E, V0):
    """Exact transmission through ``V0 / cosh^2 x`` on the whole line (needs ``8 V0 > 1``).

    Evaluated as a logistic of the log-ratio ``cosh^2(pi beta/2) / sinh^2(pi k)``
    so large energies and heights cannot overflow.
    """
    if not 8.0 * V0 > 1.0:
        raise DomainError(f"closed form needs 8*V0 > 1, got V0={V0}")
    if not E > 0:
        raise DomainError("energy must be positive")
    x = math.pi * math.sqrt(2.0 * E)
    y = 0.5 * math.pi * math.sqrt(8.0 * V0 - 1.0)
    # log(cosh^2 y) - log(sinh^2 x), each with its leading exponential factored out
    log_ratio = 2.0 * (y - x) + 2.0 * (math.log1p(math.exp(-2.0 * y)) - math.log(-math.expm1(-2.0 * x)))
    return float(expit(-log_ratio))


def _log_cosh(z):
    z = abs(z)
    return z + math.log1p(math.exp(-2.0 * z)) - math.log(2.0)


def eckart_reflection_exact(E, A, B):
    """Exact reflection for the Eckart barrier (needs ``B > 1/4`` and ``E > A/2``)."""
    if not B > 0.25:
        raise DomainError(f"closed form needs B > 1/4, got B={B}")
    if not E > 0.5 * A or not E > 0:
        raise DomainError(f"closed form needs E > A/2 (open right channel), got E={E}, A={A}")
    k = math.sqrt(2.0 * E)
    beta = math.sqrt(k * k - A)
    delta = math.sqrt(B - 0.25)
    c_minus = _log_cosh(2.0 * math.pi * (k - beta))
    c_plus = _log_cosh(2.0 * math.pi * (k + beta))
    c_delta = _log_cosh(2.0 * math.pi * delta)
    m = max(c_minus, c_plus, c_delta)
    num = math.exp(c_minus - m) + math.exp(c_delta - m)
    den = math.exp(c_plus - m) + math.exp(c_delta - m)
    return num / den


def eckart_transmission_exact(E, A, B):
    return 1.0 - eckart_reflection_exact(E, A, B)


@dataclass(frozen=True)
class ReferenceSolution:
    T: float
    R: float
    error_estimate: float
    unitarity_defect: float
    rtol: float


def _edge_states(profile, setup, rtol):
    """Propagate ``(psi, psi')`` from ``b`` to ``a`` for unit initial data ``(1,0)``, ``(0,1)``."""
    E = setup.E

    def rhs(x, y):
        f = 2.0 * (float(profile(x)) - E)
        return [y[1], f * y[0], y[3], f * y[2]]

    cuts = sorted({setup.a, setup.b, *(p for p in profile.breakpoints if setup.a < p < setup.b)}, reverse=True)
    y = np.array([1.0, 0.0, 0.0, 1.0])
    for hi, lo in zip(cuts[:-1], cuts[1:]):
        sol = solve_ivp(rhs, (hi, lo), y, method="DOP853", rtol=rtol, atol=rtol * 1e-6)
        if not sol.success:
            raise AccuracyError(f"integration failed: {sol.message}")
        y = sol.y[:, -1]
    return y


def _coefficients(profile, setup, rtol):
    y = _edge_states(profile, setup, rtol)
    amps = channel_amplitudes(y[0], y[1], 1.0, 0.0, setup)
    amps_t = channel_amplitudes(y[2], y[3], 0.0, 1.0, setup)
    k1, k3 = wavenumbers(setup)
    return reflection_transmission(amps, amps_t, k1, k3)


def reference_solution(profile, setup: ScatteringSetup, tol: float = 1e-10) -> ReferenceSolution:
    """Adaptive-step integration certified to ``tol``.

    Successive runs tighten the step tolerance by a factor 100 until the
    change in ``T`` (the error estimate) and the unitarity defect both fall
    below ``tol``.
    """
    if not tol >= 1e-12:
        raise PreconditionError("reference tolerance must be >= 1e-12")
    wavenumbers(setup)
    rtol = min(1e-6, tol * 1e-2)
    R, T = _coefficients(profile, setup, rtol)
    while True:
        finer = max(rtol * 1e-2, 2.5e-14)
        R2, T2 = _coefficients(profile, setup, finer)
        est = abs(T2 - T)
        defect = abs(T2 + R2 - 1.0)
        if est <= tol and defect <= tol:
            return ReferenceSolution(T2, R2, est, defect, finer)
        if finer <= 2.5e-14:
            raise AccuracyError(
                f"reference integration reached its step floor with error {max(est, defect):.3e}",
                achieved=max(est, defect),
            )
        rtol, R, T = finer, R2, T2


def integrate_reference(profile, setup: ScatteringSetup, tol: float = 1e-10):
    """``(T, R)`` from direct integration across the window."""
    ref = reference_solution(profile, setup, tol)
    return ref.T, ref.R


@dataclass(frozen=True)
class SolutionPair:
    """Two exact inner solutions; each callable returns ``(value, derivative)`` at ``x``."""

    f: Callable
    g: Callable


def matched_pair_coefficients(pair: SolutionPair, setup: ScatteringSetup):
    """``(T, R)`` from exact matching of ``psi = alpha f + beta g`` to the outer waves.

    With only an outgoing wave on the right, ``psi`` must be proportional to
    ``phi = G f - F g`` where ``F = f'(b) - i k3 f(b)``, ``G = g'(b) - i k3 g(b)``.
    Matching ``phi`` to a unit incident wave at ``a`` gives
    ``T = 4 (k3/k1) |W_b / D|^2`` with ``W_b = f(b) g'(b) - g(b) f'(b)`` and
    ``D = G (f(a) - i f'(a)/k1) - F (g(a) - i g'(a)/k1)``.
    """
    k1, k3 = wavenumbers(setup)
    fa, dfa = pair.f(setup.a)
    ga, dga = pair.g(setup.a)
    fb, dfb = pair.f(setup.b)
    gb, dgb = pair.g(setup.b)
    wronskian = fb * dgb - gb * dfb
    if abs(wronskian) <= 1e-12 * (abs(fb * dgb) + abs(gb * dfb)):
        raise DependentSolutionsError("solution pair is linearly dependent (vanishing Wronskian)")
    F = dfb - 1j * k3 * fb
    G = dgb - 1j * k3 * gb
    phi_a = G * fa - F * ga
    dphi_a = G * dfa - F * dga
    D = phi_a - 1j * dphi_a / k1
    T = 4.0 * (k3 / k1) * abs(wronskian / D) ** 2
    # psi = s phi with s = 2 e^{ik1 a} / D; reflected amplitude from psi(a) = e^{ik1a} + r e^{-ik1a}
    ea = np.exp(1j * k1 * setup.a)
    s = 2.0 * ea / D
    r = (s * phi_a - ea) * ea
    return float(T), float(abs(r) ** 2)


def matched_pair_transmission(pair: SolutionPair, setup: ScatteringSetup) -> float:
    return matched_pair_coefficients(pair, setup)[0]


def plane_wave_pair(E, V=0.0) -> SolutionPair:
    """``exp(+-i k x)`` for a constant potential ``V < E``."""
    k = math.sqrt(2.0 * (E - V))
    return SolutionPair(
        lambda x: (np.exp(1j * k * x), 1j * k * np.exp(1j * k * x)),
        lambda x: (np.exp(-1j * k * x), -1j * k * np.exp(-1j * k * x)),
    )


def exponential_pair(E, V) -> SolutionPair:
    """``exp(+-kappa x)`` for a constant potential ``V > E``."""
    kappa = math.sqrt(2.0 * (V - E))
    return SolutionPair(
        lambda x: (math.exp(kappa * x), kappa * math.exp(kappa * x)),
        lambda x: (math.exp(-kappa * x), -kappa * math.exp(-kappa * x)),
    )


def airy_pair(profile: LinearStep, E) -> SolutionPair:
    """Airy-function solutions for ``V = v0 (B - x)``: ``Ai(z)``, ``Bi(z)`` with
    ``z = (2 v0)^{1/3} (B - x - E/v0)``."""
    if not profile.v0 > 0:
        raise DomainError("Airy pair needs a positive slope coefficient")
    scale = (2.0 * profile.v0) ** (1.0 / 3.0)
    shift = profile.B - E / profile.v0

    def z(x):
        return scale * (shift - x)

    def f(x):
        ai, aip, _, _ = airy(z(x))
        return float(ai), -scale * float(aip)

    def g(x):
        _, _, bi, bip = airy(z(x))
        return float(bi), -scale * float(bip)

    return SolutionPair(f, g)
