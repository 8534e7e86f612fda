"""Barrier profiles, outer-region constants and wavenumbers.

Everything is in atomic units (hbar = m = 1): energies in hartree, lengths
in bohr, so a plane wave in a region of constant potential ``V`` has
wavenumber ``sqrt(2 (E - V))``.

Profiles only describe ``V(x)`` inside the truncation window; the outer
constants ``V1`` and ``V3`` live on :class:`ScatteringSetup`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
from scipy.special import expit

from .errors import DomainError, PreconditionError

__all__ = [
    "LinearStep",
    "ExponentialStep",
    "Parabolic",
    "BellShaped",
    "Eckart",
    "Sampled",
    "ScatteringSetup",
    "PROFILE_KINDS",
    "make_profile",
    "evaluate",
    "peak",
    "wavenumbers",
    "golden_section_max",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _scalar_or_array(x, values):
    if np.ndim(x) == 0:
        return float(values)
    return values


class _Profile:
    kind: ClassVar[str]

    def __call__(self, x):
        return evaluate(self, x)

    def _values(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Interior points where ``V`` is not smooth (quadrature panel edges)."""
        return ()

    def params(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


@dataclass(frozen=True)
class LinearStep(_Profile):
    """``V(x) = v0 * (B - x)``; steepest at the left edge of the window."""

    v0: float
    B: float
    kind: ClassVar[str] = "linear"

    def _values(self, x):
        return self.v0 * (self.B - x)


@dataclass(frozen=True)
class ExponentialStep(_Profile):
    """``V(x) = v0 * exp(-(x - a))``."""

    v0: float
    a: float
    kind: ClassVar[str] = "exponential"

    def _values(self, x):
        with np.errstate(over="ignore"):
            v = self.v0 * np.exp(-(x - self.a))
        if not np.all(np.isfinite(v)):
            raise DomainError("exponential step overflows this far left of its origin")
        return v


@dataclass(frozen=True)
class Parabolic(_Profile):
    """``V(x) = v0 * (B**2 - (x - x0)**2)``, vertex height ``v0 * B**2``."""

    v0: float
    B: float
    x0: float
    kind: ClassVar[str] = "parabolic"

    def _values(self, x):
        return self.v0 * (self.B**2 - (x - self.x0) ** 2)


@dataclass(frozen=True)
class BellShaped(_Profile):
    """``V(x) = v0 / cosh(x - x0)**2``."""

    v0: float
    x0: float
    kind: ClassVar[str] = "bell"

    def _values(self, x):
        # 1/cosh^2(y) = 4 e^{-2|y|} / (1 + e^{-2|y|})^2, no overflow for large |y|
        t = np.exp(-2.0 * np.abs(x - self.x0))
        return self.v0 * 4.0 * t / (1.0 + t) ** 2

    @property
    def closed_form_valid(self) -> bool:
        return 8.0 * self.v0 > 1.0


@dataclass(frozen=True)
class Eckart(_Profile):
    """Eckart barrier ``V = (A s + B s (1 - s)) / 2`` with ``s`` the logistic of ``x - x0``.

    ``A`` sets the asymptotic step (``V -> A/2`` on the right), ``B`` the hump.
    """

    A: float
    B: float
    x0: float
    kind: ClassVar[str] = "eckart"

    def _values(self, x):
        y = x - self.x0
        s = expit(y)
        return 0.5 * (self.A * s + self.B * s * expit(-y))

    @property
    def closed_form_valid(self) -> bool:
        return self.B > 0.25


@dataclass(frozen=True)
class Sampled(_Profile):
    """Piecewise-linear profile through ``(x, V)`` knots."""

    knots: tuple[tuple[float, float], ...]
    kind: ClassVar[str] = "sampled"
    _xs: np.ndarray = field(init=False, repr=False, compare=False)
    _vs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        knots = tuple((float(x), float(v)) for x, v in self.knots)
        if len(knots) < 2:
            raise DomainError("sampled profile needs at least two knots")
        xs = np.array([k[0] for k in knots])
        vs = np.array([k[1] for k in knots])
        if not np.all(np.isfinite(xs)) or not np.all(np.isfinite(vs)):
            raise DomainError("sampled knots must be finite")
        if np.any(np.diff(xs) <= 0):
            raise DomainError("sampled knots must be strictly increasing in x")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "_xs", xs)
        object.__setattr__(self, "_vs", vs)

    def _values(self, x):
        if np.any(x < self._xs[0]) or np.any(x > self._xs[-1]):
            raise DomainError(
                f"x outside sampled range [{self._xs[0]}, {self._xs[-1]}]"
            )
        return np.interp(x, self._xs, self._vs)

    @property
    def breakpoints(self):
        return tuple(self._xs[1:-1])

    def params(self):
        return {"knots": self.knots}


PROFILE_KINDS = {
    cls.kind: cls
    for cls in (LinearStep, ExponentialStep, Parabolic, BellShaped, Eckart, Sampled)
}


def make_profile(kind: str, **params):
    """Build a profile from its family name (``"linear"``, ``"bell"``, ...)."""
    try:
        cls = PROFILE_KINDS[kind]
    except KeyError:
        raise DomainError(
            f"unknown profile kind {kind!r}; expected one of {sorted(PROFILE_KINDS)}"
        ) from None
    return cls(**params)


def evaluate(profile, x):
    """Potential in hartree at ``x`` (scalar or array) inside the window."""
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("x must be finite")
    return _scalar_or_array(x, profile._values(xa))


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-10):
    """Maximise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _window(profile, a, b):
    if a is None or b is None:
        raise DomainError(f"peak of a {profile.kind} profile needs a window (a, b)")
    if not a < b:
        raise DomainError("window requires a < b")
    return float(a), float(b)


def peak(profile, a: float | None = None, b: float | None = None):
    """Location and height ``(x_max, V_max)`` of the barrier maximum on ``[a, b]``.

    Closed forms are used where the maximiser is obvious; otherwise a coarse
    scan brackets the global maximum and golden-section search refines it.
    """
    if isinstance(profile, LinearStep):
        a, b = _window(profile, a, b)
        x = a if profile.v0 >= 0 else b
        return x, evaluate(profile, x)
    if isinstance(profile, (Parabolic, BellShaped)):
        x = profile.x0
        if a is not None and b is not None:
            x = min(max(x, a), b)
        return x, evaluate(profile, x)
    if isinstance(profile, Sampled):
        xs, vs = profile._xs, profile._vs
        lo = xs[0] if a is None else max(a, xs[0])
        hi = xs[-1] if b is None else min(b, xs[-1])
        cand = np.concatenate(([lo, hi], xs[(xs > lo) & (xs < hi)]))
        vals = evaluate(profile, cand)
        i = int(np.argmax(vals))
        return float(cand[i]), float(vals[i])
    if a is None and b is None and isinstance(profile, Eckart):
        a, b = profile.x0 - 30.0, profile.x0 + 30.0
    a, b = _window(profile, a, b)
    grid = np.linspace(a, b, 2049)
    vals = evaluate(profile, grid)
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    x, v = golden_section_max(lambda t: evaluate(profile, t), lo, hi)
    # a maximum on the window edge is better represented by the scan point itself
    if vals[i] > v:
        return float(grid[i]), float(vals[i])
    return x, v


@dataclass(frozen=True)
class ScatteringSetup:
    """Window ``[a, b]``, outer constants ``V1`` (left) and ``V3`` (right), energy ``E``."""

    a: float
    b: float
    V1: float
    V3: float
    E: float

    def __post_init__(self):
        for name in ("a", "b", "V1", "V3", "E"):
            if not math.isfinite(getattr(self, name)):
                raise PreconditionError(f"{name} must be finite")
        if not self.a < self.b:
            raise PreconditionError(f"window needs a < b, got a={self.a}, b={self.b}")

    @property
    def k1(self) -> float:
        return wavenumbers(self)[0]

    @property
    def k3(self) -> float:
        return wavenumbers(self)[1]

    def at_energy(self, E: float) -> "ScatteringSetup":
        return ScatteringSetup(self.a, self.b, self.V1, self.V3, E)


def wavenumbers(setup: ScatteringSetup):
    """Outer-region wavenumbers ``(k1, k3)``; closed channels are rejected."""
    if setup.E <= setup.V1 or setup.E <= setup.V3:
        raise PreconditionError(
            f"E={setup.E} must exceed V1={setup.V1} and V3={setup.V3} "
            "(closed channels are not supported)"
        )
    return math.sqrt(2.0 * (setup.E - setup.V1)), math.sqrt(2.0 * (setup.E - setup.V3))
