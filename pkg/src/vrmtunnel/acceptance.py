"""The acceptance suite: nine numbered criteria, each a list of graded checks.

Every check carries the measured value and its bound so a report line can
be read on its own. Checks marked ``info`` are printed but not graded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .basis import VariationalSystem
from .config import CATALOG
from .harness import canonical_config, reproduce_table, run_sweep
from .oracles import (
    bell_transmission_exact,
    eckart_transmission_exact,
    exponential_pair,
    integrate_reference,
    matched_pair_transmission,
    plane_wave_pair,
    reference_solution,
)
from .potentials import Sampled, ScatteringSetup, peak
from .solver import (
    inner_solution,
    match_amplitudes,
    reflection_transmission,
    solve_tunneling,
)

__all__ = ["Check", "CriterionResult", "CRITERIA", "run_criterion", "run_all", "EAV_BANDS"]

# Published relative E_av error ranges (fractions), reported for comparison only.
EAV_BANDS = {
    "linear": (0.0003, 0.0175),
    "exponential": (0.00013, 0.021),
    "bell": (0.000065, 0.00694),
    "eckart": (0.00078, 0.0143),
}

RANDOM_SEED = 20240611


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    bound: str
    passed: bool
    info: bool = False

    def line(self) -> str:
        flag = "info" if self.info else ("PASS" if self.passed else "FAIL")
        return f"    [{flag}] {self.name}: {self.value:.6g} ({self.bound})"


def _le(name, value, limit):
    return Check(name, float(value), f"<= {limit:g}", bool(math.isfinite(value) and value <= limit))


def _near(name, value, target, tol):
    ok = math.isfinite(value) and abs(value - target) <= tol
    return Check(name, float(value), f"{target:g} +/- {tol:g}", bool(ok))


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    checks: tuple[Check, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.info)

    def line(self) -> str:
        graded = [c for c in self.checks if not c.info]
        good = sum(c.passed for c in graded)
        return f"criterion {self.number} {'PASS' if self.passed else 'FAIL'}: {self.title} ({good}/{len(graded)} checks)"

    def text(self) -> str:
        return "\n".join([self.line()] + [c.line() for c in self.checks])


def _table_checks(report):
    return tuple(Check(c.label, c.computed, f"{c.reference:g} +/- {c.tolerance:g}", c.passed) for c in report.cells)


@lru_cache(maxsize=None)
def _catalog_rows(kind, workers=1):
    return tuple(run_sweep(canonical_config(kind), workers=workers, oracle=True))


# ------------------------------------------------------------------ criteria


def criterion_1(workers=1):
    return CriterionResult(1, "exponential step table (VRM and reference integration)",
                           _table_checks(reproduce_table("table2", workers=workers)))


def criterion_2(workers=1):
    return CriterionResult(2, "parabolic barrier table (VRM and reference integration)",
                           _table_checks(reproduce_table("table3", workers=workers)))


def criterion_3(workers=1):
    report = reproduce_table("table1", workers=workers)
    checks = []
    for c in report.cells:
        if "decreasing" in c.label:
            checks.append(Check(c.label, c.computed, "0 violations", c.passed))
        else:
            checks.append(Check(c.label + " |dT|", c.delta, f"<= {c.tolerance:g}", c.passed))
    return CriterionResult(3, "linear step barrier-length table in property mode", tuple(checks))


def criterion_4(workers=1):
    cfg = canonical_config("bell")
    bell = cfg.profile
    energies = np.arange(0.5, 4.0 + 1e-9, 0.25)
    wide = narrow = 0.0
    for E in energies:
        exact = bell_transmission_exact(E, bell.v0)
        s = ScatteringSetup(bell.x0 - 10.0, bell.x0 + 10.0, 0.0, 0.0, float(E))
        wide = max(wide, abs(integrate_reference(bell, s)[0] - exact))
        narrow = max(narrow, abs(integrate_reference(bell, cfg.setup(float(E)))[0] - exact))
    rows = _catalog_rows("bell", workers)
    dev = [abs(r.value("T") - bell_transmission_exact(r.E, bell.v0)) for r in rows]
    worst = int(np.nanargmax(dev))
    at2 = next(r for r in rows if abs(r.E - 2.0) < 1e-12)
    checks = (
        _le("closed form vs integration on [x0-10, x0+10], max |dT|", wide, 1e-6),
        _le(f"closed form vs integration on [{cfg.a:g}, {cfg.b:g}], max |dT|", narrow, 5e-3),
        _le(f"VRM vs closed form, max |dT| (worst at E={rows[worst].E:g})", dev[worst], 0.02),
        _near("VRM T at E=2", at2.value("T"), 0.62, 0.03),
        Check("closed-form T at E=2", bell_transmission_exact(2.0, bell.v0), "reference value", True, info=True),
    )
    return CriterionResult(4, "bell-shaped barrier closed form", checks)


def criterion_5(workers=1):
    cfg = canonical_config("eckart")
    ek = cfg.profile
    lo, hi = ek.x0 - 30.0, ek.x0 + 30.0
    wide = 0.0
    for E in cfg.energies:
        s = ScatteringSetup(lo, hi, float(ek(lo)), float(ek(hi)), E)
        wide = max(wide, abs(reference_solution(ek, s, 1e-10).T - eckart_transmission_exact(E, ek.A, ek.B)))
    rows = _catalog_rows("eckart", workers)
    dev = [abs(r.value("T") - eckart_transmission_exact(r.E, ek.A, ek.B)) for r in rows]
    worst = int(np.nanargmax(dev))
    above = next(r for r in rows if r.E > 2.23)
    x_peak, v_peak = peak(ek)
    checks = (
        _le(f"closed form vs integration on [{lo:g}, {hi:g}], max |dT|", wide, 1e-6),
        _le(f"VRM vs 1 - R_exact, max |dT| (worst at E={rows[worst].E:g})", dev[worst], 0.03),
        Check(f"VRM T at E={above.E:g}, just above 2.23", above.value("T"), ">= 0.95",
              bool(above.value("T") >= 0.95)),
        Check(f"exact T at E={above.E:g}", eckart_transmission_exact(above.E, ek.A, ek.B), ">= 0.95",
              bool(eckart_transmission_exact(above.E, ek.A, ek.B) >= 0.95)),
        Check(f"barrier maximum of the profile (at x={x_peak:.4f})", v_peak, "compare 2.23", True, info=True),
        Check("left outer constant V(a) used", cfg.v1, f"a = {cfg.a:g}", True, info=True),
        Check("alternative left constant V(1)", float(ek(1.0)), "not used", True, info=True),
    )
    return CriterionResult(5, "Eckart barrier closed form", checks)


def criterion_6(workers=1):
    report = reproduce_table("figure-claims")
    checks = tuple(
        Check(c.label, c.computed, f"{c.reference:g} +/- {c.tolerance:g}", c.passed)
        for c in report.cells if "crossing" in c.label
    )
    return CriterionResult(6, "R = T crossing energies", checks)


def criterion_7(workers=1):
    report = reproduce_table("figure-claims")
    checks = tuple(
        Check(c.label, c.computed, f"{c.reference:g} +/- {c.tolerance:g}", c.passed)
        for c in report.cells if "crossing" not in c.label
    )
    return CriterionResult(7, "over-barrier reflection", checks)


def criterion_8(workers=1):
    checks = []
    for kind in CATALOG:
        rel = [abs(r.value("E_av") - r.E) / r.E for r in _catalog_rows(kind, workers)]
        checks.append(_le(f"{kind}: max |E_av - E|/E", max(rel), 0.02))
        if kind in EAV_BANDS:
            lo, hi = EAV_BANDS[kind]
            checks.append(Check(f"{kind}: range {min(rel):.3%} - {max(rel):.3%}", max(rel),
                                f"published range {lo:.4%} - {hi:.3%}", True, info=True))
    return CriterionResult(8, "average-energy diagnostic", tuple(checks))


def _random_rank_one_checks(n_systems=50, n=6):
    rng = np.random.default_rng(RANDOM_SEED)
    worst_lambda = worst_vec = 0.0
    for _ in range(n_systems):
        X = rng.standard_normal((n, n))
        A = X + X.T
        va, vb = rng.standard_normal(n), rng.standard_normal(n)
        lam_b = float(rng.uniform(0.5, 5.0))
        sol = inner_solution(VariationalSystem(A, va, vb), lam_b)
        (alpha, beta), vecs = scipy.linalg.eig(
            A + lam_b * np.outer(vb, vb), np.outer(va, va), homogeneous_eigvals=True, right=True
        )
        ratio = np.abs(beta) / (np.abs(alpha) + np.abs(beta))
        j = int(np.argmax(ratio))
        lam = (alpha[j] / beta[j]).real
        vec = vecs[:, j].real / (va @ vecs[:, j].real)
        worst_lambda = max(worst_lambda, abs(lam - sol.lambda_a) / max(1.0, abs(lam)))
        worst_vec = max(worst_vec, np.linalg.norm(vec - sol.C) / np.linalg.norm(vec))
    return worst_lambda, worst_vec


def criterion_9(workers=1):
    checks = []
    for kind in CATALOG:
        rows = _catalog_rows(kind, workers)
        checks.append(_le(f"{kind}: reference |T+R-1|", max(abs(r.T_oracle + r.R_oracle - 1.0) for r in rows), 1e-8))
    for kind in CATALOG:
        rows = _catalog_rows(kind, workers)
        checks.append(_le(f"{kind}: VRM |T+R-1|", max(r.value("unitarity_defect") for r in rows), 5e-3))

    for kind in CATALOG:
        cfg = canonical_config(kind)
        worst = 0.0
        picks = cfg.energies[:: max(1, len(cfg.energies) // 3)][:3]
        for E in picks:
            base = solve_tunneling(cfg.profile, cfg.setup(E), cfg.basis, cfg.lambda_b, cfg.lambda_b_tilde)
            alt = solve_tunneling(cfg.profile, cfg.setup(E), cfg.basis, cfg.lambda_b + 1.0,
                                  cfg.lambda_b_tilde + 3.0)
            worst = max(worst, abs(base.T - alt.T))
        checks.append(_le(f"{kind}: lambda-pair invariance, max |dT|", worst, 1e-3))

    cfg = canonical_config("exponential")
    setup = cfg.setup(0.25)
    res = solve_tunneling(cfg.profile, setup, cfg.basis, cfg.lambda_b, cfg.lambda_b_tilde)
    k1, k3 = setup.k1, setup.k3
    worst = 0.0
    for s1, s2 in ((1e-3, 7.5), (-2.0, 0.01), (123.0, -4.0)):
        a = match_amplitudes(res.solutions[0].scaled(s1), cfg.basis, setup)
        b = match_amplitudes(res.solutions[1].scaled(s2), cfg.basis, setup)
        worst = max(worst, abs(reflection_transmission(a, b, k1, k3)[1] - res.T))
    checks.append(_le("normalization invariance, max |dT|", worst, 1e-12))

    lam_err, vec_err = _random_rank_one_checks()
    checks.append(_le("rank-one solve vs generalized eigensolver, eigenvalue", lam_err, 1e-8))
    checks.append(_le("rank-one solve vs generalized eigensolver, eigenvector", vec_err, 1e-8))

    worst = 0.0
    free = Sampled(((1.0, 0.0), (4.0, 0.0)))
    for E in (0.3, 1.0, 2.0):
        s = ScatteringSetup(1.0, 4.0, 0.0, 0.0, E)
        worst = max(worst, abs(matched_pair_transmission(plane_wave_pair(E), s) - integrate_reference(free, s)[0]))
    barrier = Sampled(((1.0, 0.5), (2.5, 0.5)))
    for E, pair in ((0.2, exponential_pair(0.2, 0.5)), (0.4, exponential_pair(0.4, 0.5)),
                    (0.8, plane_wave_pair(0.8, 0.5))):
        s = ScatteringSetup(1.0, 2.5, 0.0, 0.0, E)
        worst = max(worst, abs(matched_pair_transmission(pair, s) - integrate_reference(barrier, s)[0]))
    checks.append(_le("matched-pair vs integration (free and constant barrier)", worst, 1e-8))
    return CriterionResult(9, "property suite", tuple(checks))


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def run_criterion(number: int, workers: int = 1) -> CriterionResult:
    return CRITERIA[number](workers=workers)


def run_all(workers: int = 1):
    return [run_criterion(n, workers) for n in sorted(CRITERIA)]
