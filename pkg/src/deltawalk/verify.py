"""Self-check suites run by ``deltawalk verify``.

Each suite returns a :class:`SuiteReport` listing every check with the
observed quantity, the tolerance it was held to and the verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .green import b_probe, edge_square_integrable, watson_asymptotic, watson_c, watson_c1
from .model import OneParticleParams, QuasiMomentum, TwoParticleParams
from .oracle import (
    Which,
    build_fiber,
    build_one_particle,
    build_two_particle_torus,
    extremal_eigen,
    full_spectrum,
    hermiticity_defect,
)
from .quadrature import QuadratureSpec, Status, integrate_bessel_path, integrate_periodic
from .spectral import VerdictKind, classify_fiber, classify_one_particle

__all__ = ["Check", "SuiteReport", "SUITES", "run_suite"]

# Literature value of c(3) = W/3 used as the reference in the quadrature suite.
C3_REFERENCE = 0.5054620197


@dataclass(frozen=True)
class Check:
    name: str
    observed: float
    tolerance: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "observed": self.observed, "tolerance": self.tolerance, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, observed: float, tolerance: float, detail: str = "") -> None:
        self.checks.append(Check(name, float(observed), float(tolerance), bool(observed <= tolerance), detail))

    def add_flag(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(name, 0.0 if ok else 1.0, 0.0, bool(ok), detail))

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _quadrature() -> SuiteReport:
    rep = SuiteReport("quadrature")
    res = integrate_periodic(lambda a, b: np.ones(np.broadcast(a, b).shape), QuadratureSpec.default(2))
    rep.add("constant integrand d=2", abs(res.value - (2 * math.pi) ** 2), 1e-9 * (2 * math.pi) ** 2)
    res = integrate_periodic(lambda a: 1.0 / (2.0 + np.cos(a)), QuadratureSpec.default(1))
    rep.add("1/(2+cos) grid", abs(res.value / (2 * math.pi) - 1 / math.sqrt(3)), 1e-9)
    bes = integrate_bessel_path([1.0], 2.0)
    rep.add("1/(2+cos) Bessel path", abs(bes.value - 1 / math.sqrt(3)), 1e-12)
    c3 = watson_c(3)
    grid = c3.result if c3.method == "grid" else c3.cross_check
    other = c3.cross_check if c3.method == "grid" else c3.result
    rep.add("c(3) grid vs Bessel", abs(grid.value - other.value), 2e-7)
    rep.add("c(3) vs literature", abs(c3.value - C3_REFERENCE), 1e-6)
    for d in (3, 4, 5):
        c, c1 = watson_c(d), watson_c1(d)
        tol = 2.0 * QuadratureSpec.default(d).rel_tol
        rep.add(f"c({d}) + c1({d})", abs(c.value + c1.value) / c.value, tol)
    rep.add("c(10) vs asymptotic series", abs(watson_c(10).value - watson_asymptotic(10)), 5e-4)
    return rep


def _oracle() -> SuiteReport:
    rep = SuiteReport("oracle")
    p = OneParticleParams(1.0, 2.0, 1)
    exact = 2.0 * (1.0 + math.sqrt(2.0))
    nu = classify_one_particle(p).point.nu
    rep.add("d=1 solver vs closed form", abs(nu - exact) / exact, 1e-10)
    eig = extremal_eigen(build_one_particle(p, 2000), Which.LARGEST, 1e-10)
    rep.add("d=1 Lanczos vs closed form", abs(eig.value - exact), 1e-8)
    for mu in (3.0, -3.0):
        for units in (0.0, 0.5, 1.0):
            tp = TwoParticleParams(1.0, 2.0, mu, 1)
            phi = QuasiMomentum.from_pi_units([units])
            nu = classify_fiber(phi, tp).point.nu
            which = Which.LARGEST if mu > 0 else Which.SMALLEST
            eig = extremal_eigen(build_fiber(phi, tp, 2000), which, 1e-10)
            rep.add(f"fiber d=1 mu={mu:g} phi={units:g}pi", abs(nu - eig.value), 1e-8)
    tp = TwoParticleParams(1.0, 2.0, 1.5, 1)
    N = 12
    H = build_two_particle_torus(tp, N)
    rep.add("two-particle torus Hermitian", hermiticity_defect(H), 1e-12)
    union = np.sort(
        np.concatenate(
            [full_spectrum(build_fiber(QuasiMomentum((2 * math.pi * j / N,)), tp, None, "Periodic", n_sites=N)) for j in range(N)]
        )
    )
    rep.add("direct-integral identity N=12", float(np.max(np.abs(full_spectrum(H) - union))), 1e-10)
    return rep


def _theorem_branches() -> SuiteReport:
    rep = SuiteReport("theorem-branches")
    rng = np.random.default_rng(7)
    mismatches = 0
    worst = 0.0
    for _ in range(20):
        d = int(rng.choice([1, 2, 3, 5]))
        lam1, lam2 = rng.uniform(0.2, 2.0, size=2)
        mu = float(rng.choice([-1, 1]) * rng.uniform(0.5, 30.0))
        fib = classify_fiber(QuasiMomentum.zero(d), TwoParticleParams(lam1, lam2, mu, d)).point
        one = classify_one_particle(OneParticleParams(lam1 + lam2, mu, d)).point
        if fib.kind is not one.kind:
            mismatches += 1
        elif fib.nu is not None:
            worst = max(worst, abs(fib.nu - one.nu) / max(1.0, abs(one.nu)))
    rep.add("phi=0 reduction: verdict mismatches", mismatches, 0)
    rep.add("phi=0 reduction: max nu difference", worst, 1e-9)
    c3 = watson_c(3).value
    star = 4.0 / c3
    for factor, want in ((1.1, VerdictKind.EXISTS), (1.0, VerdictKind.ABSENT), (0.9, VerdictKind.ABSENT)):
        got = classify_fiber(QuasiMomentum.zero(3), TwoParticleParams(1.0, 1.0, factor * star, 3)).point.kind
        rep.add_flag(f"d=3 gate at {factor:g} mu*", got is want, f"{got.value}")
    c5 = watson_c(5).value
    got = classify_one_particle(OneParticleParams(1.0, 2.0 / c5, 5)).point
    rep.add_flag("d=5 threshold at equality", got.kind is VerdictKind.THRESHOLD_UPPER and got.nu == 20.0, got.kind.value)
    got = classify_fiber(QuasiMomentum.from_pi_units([1]), TwoParticleParams(1.0, 1.0, 2.0, 1)).point
    rep.add("s=0 closed form nu = 6", abs(got.nu - 6.0), 0.0)
    return rep


def _appendix() -> SuiteReport:
    rep = SuiteReport("appendix")
    cases = (
        ((1.0,) * 3, 3.0, Status.DIVERGENT),
        ((1.0,) * 4, 4.0, Status.DIVERGENT),
        ((1.0,) * 3, 0.0, Status.DIVERGENT),
        ((1.0,) * 5, 5.0, Status.CONVERGED),
        ((1.0,) * 4, -4.0, Status.DIVERGENT),
    )
    for weights, y, want in cases:
        res = b_probe(weights, y)
        rep.add_flag(f"b_probe m={len(weights)} y={y:g}", res.status is want, res.status.value)
        lemma = edge_square_integrable(len(weights))
        if abs(y) == sum(weights):
            rep.add_flag(f"lemma agrees m={len(weights)}", lemma == (want is Status.CONVERGED))
    return rep


SUITES = {
    "quadrature": _quadrature,
    "oracle": _oracle,
    "theorem-branches": _theorem_branches,
    "appendix": _appendix,
}


def run_suite(name: str) -> SuiteReport:
    """Run one named suite."""
    return SUITES[name]()
