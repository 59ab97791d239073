"""The acceptance suite: ten numerical criteria with fixed tolerances.

Each ``criterion_*`` function returns a :class:`CriterionResult` listing every
individual check with the measured value and the tolerance it was held to.
``run_all`` drives them for ``orbconv verify`` and the test suite.
"""

from __future__ import annotations

import math
import os
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from .cartan import RestrictedRoot, build_space, root_separation_constant
from .errors import QuadratureBudgetError, ThresholdError
from .montecarlo import compare, empirical_transform, histogram, sample_convolution
from .oracles import conical_function, separation_brute_force
from .products import (
    ProductConvolution,
    ProductSpace,
    product_l2,
    product_profile,
    product_regularity_report,
)
from .spherical import plancherel_weights, spherical_values
from .transform import (
    OrbitalConvolution,
    density_at,
    density_derivative,
    density_profile,
    l2_norm_sq,
)

__all__ = ["Check", "CriterionResult", "CRITERIA", "run_all", "run_criterion"]

# generators for the C^1 check: generic so that neither t = 0 nor the test
# points is a breakpoint of the density
C1_GENERATORS = (0.8, 1.0, 1.3, 1.7)


@dataclass
class Check:
    what: str
    value: object
    expected: str
    ok: bool


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0
    budget_seconds: float = math.inf
    error: str | None = None
    budget_failure: bool = False

    @property
    def passed(self) -> bool:
        return (self.error is None and all(c.ok for c in self.checks)
                and self.seconds <= self.budget_seconds)

    def add(self, what: str, value, expected: str, ok: bool) -> None:
        self.checks.append(Check(what, value, expected, bool(ok)))

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [c for c in self.checks if not c.ok]
        tail = ""
        if self.error:
            tail = f"  error: {self.error}"
        elif failed:
            tail = "  failed: " + "; ".join(f"{c.what} = {_short(c.value)} (want {c.expected})"
                                           for c in failed)
        elif self.seconds > self.budget_seconds:
            tail = f"  over budget: {self.seconds:.1f}s > {self.budget_seconds:.0f}s"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.seconds:.1f}s){tail}"

    def to_dict(self) -> dict:
        return {
            "number": self.number, "title": self.title, "passed": self.passed,
            "seconds": self.seconds, "budget_seconds": self.budget_seconds,
            "error": self.error,
            "checks": [{"what": c.what, "value": c.value, "expected": c.expected, "ok": c.ok}
                       for c in self.checks],
        }


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _h(n: int):
    return build_space("real-hyperbolic", [n])


# ---------------------------------------------------------------------------

def criterion_1(quick: bool = False) -> CriterionResult:
    res = CriterionResult(1, "spherical functions: normalization, Weyl symmetry, conical oracle",
                          budget_seconds=60.0)
    for n in (2, 3, 4):
        space = _h(n)
        lam = np.linspace(-20.0, 20.0, 50)
        at0 = spherical_values(space, lam, 0.0)
        res.add(f"H{n}: max |phi_lambda(a_0) - 1|", float(np.max(np.abs(at0 - 1.0))), "<= 1e-10",
                np.max(np.abs(at0 - 1.0)) <= 1e-10)
        worst = 0.0
        for t in (0.5, 1.0, 2.5):
            plus = spherical_values(space, lam, t)
            minus = spherical_values(space, -lam, t)
            worst = max(worst, float(np.max(np.abs(plus - minus))))
        res.add(f"H{n}: max |phi_lambda - phi_-lambda|", worst, "<= 1e-10", worst <= 1e-10)
    space = _h(2)
    lam = np.linspace(0.0, 20.0, 21)
    ts = np.linspace(0.0, 5.0, 11)
    worst = 0.0
    for t in ts:
        got = spherical_values(space, lam, t).real
        ref = conical_function(lam, t)
        worst = max(worst, float(np.max(np.abs(got - ref))))
    res.add("H2: max |phi - conical oracle| on [0,20]x[0,5]", worst, "<= 1e-8", worst <= 1e-8)
    return res


def criterion_2(quick: bool = False) -> CriterionResult:
    res = CriterionResult(2, "product formula against Monte Carlo (H2, r=2, t=(1,1.5))",
                          budget_seconds=60.0)
    conv = OrbitalConvolution(_h(2), (1.0, 1.5))
    samples = sample_convolution(conv, 100_000, seed=20240601)
    lams = [0.5, 1.0, 2.0, 5.0]
    emp = empirical_transform(samples, conv, lams)
    for lam, mean, se in zip(lams, emp["mean"], emp["stderr"]):
        exact = transform_value(conv, lam)
        z = abs(mean - exact) / se
        res.add(f"lambda={lam}: |MC - prod phi| / stderr", float(z), "<= 3", z <= 3.0)
    return res


def transform_value(conv, lam) -> float:
    from .transform import transform_of_convolution

    return float(transform_of_convolution(conv, lam).real)


def criterion_3(quick: bool = False) -> CriterionResult:
    res = CriterionResult(3, "Plancherel weight growth exponent n - l", budget_seconds=10.0)
    lam = np.geomspace(1e2, 1e4, 200)
    for n in (2, 3):
        w = plancherel_weights(_h(n), lam)
        slope = float(np.polyfit(np.log(lam), np.log(w), 1)[0])
        res.add(f"H{n}: fitted slope", slope, f"{n - 1} +- 0.05", abs(slope - (n - 1)) <= 0.05)
    return res


def criterion_4(quick: bool = False) -> CriterionResult:
    res = CriterionResult(4, "L2 threshold verdicts on H2 and H3", budget_seconds=300.0)
    cases = [
        (2, 2, "divergent", -1.0),
        (2, 3, "finite", -2.0),
        (2, 4, "finite", -3.0),
        (3, 3, "divergent", None),
        (3, 4, "finite", None),
    ]
    for n, r, verdict, exponent in cases:
        rep = l2_norm_sq(OrbitalConvolution(_h(n), (1.0,) * r))
        res.add(f"H{n} r={r}: verdict (tail exponent {rep.tail_exponent:.4f})", rep.verdict,
                verdict, rep.verdict == verdict)
        if exponent is not None:
            res.add(f"H{n} r={r}: tail exponent", rep.tail_exponent, f"{exponent} +- 0.1",
                    abs(rep.tail_exponent - exponent) <= 0.1)
    return res


def criterion_5(quick: bool = False) -> CriterionResult:
    res = CriterionResult(5, "density validity and Monte Carlo agreement (H2, r=3, t=(1,1,1))",
                          budget_seconds=300.0)
    space = _h(2)
    conv = OrbitalConvolution(space, (1.0, 1.0, 1.0))
    prof = density_profile(conv)
    res.add("mass", prof.mass, "1 +- 1e-3", abs(prof.mass - 1.0) <= 1e-3)
    res.add("min density", float(prof.values.min()), ">= -1e-6", prof.values.min() >= -1e-6)
    peak = float(prof.values.max())
    beyond = np.abs(density_at(conv, np.array([3.01, 3.1, 3.5, 4.0, 5.0])))
    ratio = float(beyond.max() / peak)
    res.add("max |density| beyond t=3 / peak", ratio, "<= 1e-4", ratio <= 1e-4)
    n = 200_000 if quick else 1_000_000
    samples = sample_convolution(conv, n, seed=7)
    hist = histogram(samples, bins=100 if quick else 200, space=space, range_=(0.0, 3.0))
    cmp = compare(hist, prof)
    res.add(f"L1 distance to MC histogram (N={n})", cmp["l1"], "<= 0.05", cmp["l1"] <= 0.05)
    res.add(f"KS distance to MC (N={n})", cmp["ks"], "<= 0.01", cmp["ks"] <= 0.01)
    return res


def criterion_6(quick: bool = False) -> CriterionResult:
    res = CriterionResult(6, "Plancherel consistency: spectral vs real-space L2 (H2, r=3,4)",
                          budget_seconds=120.0)
    for r in (3, 4):
        conv = OrbitalConvolution(_h(2), (1.0,) * r)
        rep = l2_norm_sq(conv)
        prof = density_profile(conv)
        real = prof.l2_norm_sq()
        if rep.value is None:
            res.add(f"r={r}: spectral value", None, "finite", False)
            continue
        rel = abs(rep.value - real) / real
        res.add(f"r={r}: |spectral - real| / real", float(rel), "<= 0.01", rel <= 0.01)
    return res


def criterion_7(quick: bool = False) -> CriterionResult:
    res = CriterionResult(7, f"C^1 density: derivative vs finite differences (H2, r=4, "
                             f"t={C1_GENERATORS})", budget_seconds=120.0)
    conv = OrbitalConvolution(_h(2), C1_GENERATORS)
    h = 1e-4
    for t in (0.5, 1.0, 2.0):
        d = density_derivative(conv, t, 1)
        fd = (density_at(conv, t + h) - density_at(conv, t - h)) / (2 * h)
        rel = abs(d - fd) / abs(fd)
        res.add(f"t={t}: relative gap to central difference", float(rel), "<= 1e-4", rel <= 1e-4)
    d0 = density_derivative(conv, 0.0, 1)
    res.add("derivative at t=0", float(d0), "|.| <= 1e-6", abs(d0) <= 1e-6)
    below = OrbitalConvolution(_h(2), C1_GENERATORS[:3])
    try:
        density_derivative(below, 1.0, 1)
        refused = False
    except ThresholdError:
        refused = True
    res.add("k=1 refused at r=3", refused, "True", refused)
    return res


def criterion_8(quick: bool = False) -> CriterionResult:
    res = CriterionResult(8, "product spaces H2 x H2 (r=3): mass, L2 factorization, thresholds",
                          budget_seconds=180.0)
    h2 = _h(2)
    pspace = ProductSpace((h2, h2))
    pconv = ProductConvolution(pspace, ((1.0, 0.9), (1.0, 1.2), (1.0, 1.4)))
    prof = product_profile(pconv)
    res.add("product mass", prof["mass"], "1 +- 2e-3", abs(prof["mass"] - 1.0) <= 2e-3)
    l2 = product_l2(pconv, profiles=prof["factors"])
    if l2["spectral"] is None:
        res.add("product of factor L2 values", None, "finite", False)
    else:
        rel = abs(l2["real_space"] - l2["spectral"]) / l2["spectral"]
        res.add("|joint real-space L2 - prod factor spectral L2| / prod", float(rel), "<= 0.02",
                rel <= 0.02)
    h3 = _h(3)
    expected = {((2, 2), 3): (True, 0), ((2, 2), 4): (True, 1),
                ((2, 3), 3): (False, -1), ((2, 3), 4): (True, 0)}
    for (dims, r), want in expected.items():
        factors = tuple(h2 if d == 2 else h3 for d in dims)
        pc = ProductConvolution(ProductSpace(factors), tuple((1.0, 1.0) for _ in range(r)))
        rep = product_regularity_report(pc)
        got = (rep["l2_threshold_met"], rep["ck_max"])
        res.add(f"dims {dims}, r={r}: (l2, ck_max)", str(got), str(want), got == want)
    return res


def criterion_9(quick: bool = False) -> CriterionResult:
    from .cli import main

    res = CriterionResult(9, "determinism of simulate output", budget_seconds=30.0)
    with tempfile.TemporaryDirectory() as tmp:
        paths = [os.path.join(tmp, f"run{i}.csv") for i in range(2)]
        for p in paths:
            code = main(["simulate", "--family", "real-hyperbolic", "--n", "2", "--t", "1,1,1",
                         "--N", "20000", "--seed", "12345", "--format", "csv", "--out", p])
            res.add(f"exit code of simulate -> {os.path.basename(p)}", code, "0", code == 0)
        with open(paths[0], "rb") as a, open(paths[1], "rb") as b:
            same = a.read() == b.read()
    res.add("byte-identical CSV", same, "True", same)
    return res


def criterion_10(quick: bool = False) -> CriterionResult:
    res = CriterionResult(10, "root separation constant", budget_seconds=10.0)
    for norm in (1.0, 2.5):
        c = root_separation_constant([RestrictedRoot((norm,), 1)])
        res.add(f"rank one, |alpha|={norm}", c, f"== {norm}", c == norm)
    ang = 2.0 * math.pi / 3.0
    roots = [(1.0, 0.0), (math.cos(ang), math.sin(ang))]
    c = root_separation_constant([RestrictedRoot(r, 1) for r in roots])
    oracle = separation_brute_force(roots)
    res.add("120-degree pair", c, "0.5 +- 1e-3", abs(c - 0.5) <= 1e-3)
    res.add("120-degree pair vs grid oracle", abs(c - oracle), "<= 1e-3", abs(c - oracle) <= 1e-3)
    return res


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def run_criterion(number: int, quick: bool = False) -> CriterionResult:
    fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        res = fn(quick=quick)
    except QuadratureBudgetError as exc:
        res = CriterionResult(number, fn.__name__, error=f"quadrature budget: {exc}",
                              budget_failure=True)
    except Exception as exc:  # report, keep going with the other criteria
        res = CriterionResult(number, fn.__name__, error=f"{type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - start
    return res


def run_all(quick: bool = False, only=None, log=None) -> list[CriterionResult]:
    out = []
    for number in sorted(CRITERIA):
        if only and number not in only:
            continue
        res = run_criterion(number, quick=quick)
        if log is not None:
            log(res.summary())
        out.append(res)
    return out
