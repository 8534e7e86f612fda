"""Adaptive composite Gauss-Legendre quadrature for array-valued integrands."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

__all__ = ["QuadratureSpec", "integrate", "initial_edges"]


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature controls.

    ``tol`` is an absolute bound on every integrated entry; panels are split
    until the one-panel and two-half-panel estimates agree to within the
    panel's share of ``tol``.
    """

    tol: float = 1e-10
    nodes: int = 16
    min_nodes_per_period: int = 8
    max_depth: int = 40
    max_panels: int = 200_000

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("quadrature tol must be positive")
        if self.nodes < 2:
            raise ValueError("need at least two Gauss nodes per panel")


@lru_cache(maxsize=None)
def _gauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def initial_edges(a, b, spec: QuadratureSpec, kmax=0.0, breakpoints=()):
    """Panel edges on ``[a, b]`` resolving oscillations up to wavenumber ``kmax``.

    Interior ``breakpoints`` are always panel edges so no panel straddles a kink.
    """
    cuts = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    edges = [cuts[0]]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        n = 1
        if kmax > 0:
            period = 2.0 * math.pi / kmax
            max_width = spec.nodes * period / spec.min_nodes_per_period
            n = max(1, math.ceil((hi - lo) / max_width))
        edges.extend(np.linspace(lo, hi, n + 1)[1:].tolist())
    return edges


def _panel(f, lo, hi, n):
    x, w = _gauss(n)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return f(mid + half * x, half * w)


def integrate(f, a, b, spec: QuadratureSpec | None = None, kmax=0.0, breakpoints=()):
    """Integrate ``f`` over ``[a, b]``.

    ``f(x, w)`` receives quadrature nodes and weights for one panel and
    returns the weighted sum (any array shape). Accepting the weights lets
    callers contract matrix-valued integrands with a single matrix product.
    """
    spec = spec or QuadratureSpec()
    length = b - a
    stack = []
    edges = initial_edges(a, b, spec, kmax, breakpoints)
    for lo, hi in zip(edges[:-1], edges[1:]):
        stack.append((lo, hi, _panel(f, lo, hi, spec.nodes), 0))
    total = None
    panels = 0
    while stack:
        lo, hi, coarse, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid, spec.nodes)
        right = _panel(f, mid, hi, spec.nodes)
        fine = left + right
        err = float(np.max(np.abs(fine - coarse)))
        budget = spec.tol * (hi - lo) / length
        if err <= budget:
            total = fine if total is None else total + fine
            panels += 1
            continue
        if depth >= spec.max_depth or panels + len(stack) > spec.max_panels:
            raise QuadratureError(
                f"quadrature did not converge on [{lo}, {hi}] (error {err:.3e} > {budget:.3e})",
                residual=err,
            )
        stack.append((mid, hi, right, depth + 1))
        stack.append((lo, mid, left, depth + 1))
    return total
