"""CPAI coefficients c_t(n) = [2n+1]_omega / [2n+1]_q, their limits, and the aggregated certificate."""

from __future__ import annotations

import dataclasses
import math
import random
import time
from typing import Callable, Iterable, Sequence

import numpy as np

from . import annular, enveloping
from .diagram import TLDiagram, TLElement, inner, markov_trace, max_strands, sum_scalars
from .errors import DomainError, ResourceCapError, TLJError
from .jones_wenzl import TraceIdentityError, jones_wenzl, jw_trace_table, verify_jw
from .matching import Gluing, noncrossing_matchings
from .scalar import (
    ZERO,
    NumericParams,
    Scalar,
    TPoly,
    delta_power,
    qint,
    qint_numeric,
    qint_t,
)

SCHEMA = 1
GAP_TOL = 1e-12
PSD_TOL = -1e-9


@dataclasses.dataclass(frozen=True)
class CPAIRow:
    n: int
    delta: float
    t: float
    c_formula: float
    c_diagram: float | None = None
    abs_gap: float | None = None

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def cpai_coefficient(n: int, mode: str = "exact", params: NumericParams | None = None):
    """``exact``: the pair ([2n+1]_omega as a t-polynomial, [2n+1]_q). ``numeric``: their ratio at ``params``."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    if mode == "exact":
        return qint_t(2 * n + 1), qint(2 * n + 1)
    if mode != "numeric":
        raise DomainError(f"unknown mode {mode!r}")
    if params is None or params.t is None:
        raise DomainError("numeric mode needs delta and t")
    # Both recurrences run in floats; the closed form in q loses precision near delta = 2.
    return qint_numeric(2 * n + 1, params.t) / qint_numeric(2 * n + 1, params.delta)


def exact_row_identity(n: int) -> bool:
    """Both diagrammatic pipelines agree with the quantum-integer formula as exact polynomials."""
    p = jones_wenzl(2 * n)
    return annular.annular_trace(p) == qint_t(2 * n + 1) and markov_trace(p) == qint(2 * n + 1)


def coefficient_cross_check(n: int, params: NumericParams) -> CPAIRow:
    if n > 4:
        raise ResourceCapError(f"diagrammatic cross-check is limited to n <= 4, got {n}")
    formula = cpai_coefficient(n, "numeric", params)
    p = jones_wenzl(2 * n)
    diagram = annular.annular_trace(p).evaluate(params.q, params.t) / markov_trace(p).evaluate(params.q)
    return CPAIRow(n, params.delta, params.t, formula, diagram, abs(formula - diagram))


def cpai_table(params: NumericParams, n_max: int) -> list[CPAIRow]:
    """c_t(n) for n <= n_max, with the diagram column filled where the strand cap allows."""
    rows = []
    for n in range(n_max + 1):
        if n <= 4 and 2 * n <= max_strands():
            rows.append(coefficient_cross_check(n, params))
        else:
            rows.append(CPAIRow(n, params.delta, params.t, cpai_coefficient(n, "numeric", params)))
    return rows


@dataclasses.dataclass(frozen=True)
class DecayReport:
    rows: list[CPAIRow]
    passed: bool
    monotone: bool
    final: float
    tail_max: float


def decay_report(params: NumericParams, n_max: int = 60, final_tol: float = 1e-2, tail_tol: float = 2e-2) -> DecayReport:
    """c_t(n) for n <= n_max; passes when |c(n_max)| < final_tol and |c| stays below tail_tol over the last third."""
    if params.t is None or not params.t < params.delta:
        raise DomainError("the decay limit needs 0 < t < delta")
    rows = [CPAIRow(n, params.delta, params.t, cpai_coefficient(n, "numeric", params)) for n in range(n_max + 1)]
    values = [r.c_formula for r in rows]
    # for t < 2 the omega-integers oscillate in sign, so the predicate works with |c|
    tail = [abs(v) for v in values[n_max - n_max // 3:]]
    monotone = all(b < a for a, b in zip(values[1:], values[2:]))
    final = values[-1]
    return DecayReport(rows, abs(final) < final_tol and max(tail) < tail_tol, monotone, final, max(tail))


@dataclasses.dataclass(frozen=True)
class ConvergenceRow:
    n: int
    eps: float
    abs_dev: float


def convergence_report(n_fixed: int, delta: float, eps_list: Sequence[float]) -> list[ConvergenceRow]:
    """|c_(delta - eps)(n) - 1| for n <= n_fixed and each eps."""
    if any(e <= 0 for e in eps_list):
        raise DomainError("eps must be positive")
    rows = []
    for eps in eps_list:
        params = NumericParams(delta, delta - eps)
        for n in range(n_fixed + 1):
            rows.append(ConvergenceRow(n, eps, abs(cpai_coefficient(n, "numeric", params) - 1.0)))
    return rows


# -------------------------------------------------------------------------------------------------- orthogonality


@dataclasses.dataclass(frozen=True)
class Rect:
    """
    Rectangular TL diagram with ``bottom`` and ``top`` points: top points 0..top-1 left to right, then the bottom
    points right to left, so a square one has the same numbering as ``TLDiagram``.
    """

    bottom: int
    top: int
    pairing: tuple[int, ...]

    def top_point(self, c: int) -> int:
        return c

    def bottom_point(self, c: int) -> int:
        return self.top + self.bottom - 1 - c


def random_rect(bottom: int, top: int, rng: random.Random, terms: int = 3, coeff_range: int = 3) -> list[tuple[Rect, int]]:
    choices = noncrossing_matchings(bottom + top)
    out = []
    for _ in range(terms):
        c = 0
        while c == 0:
            c = rng.randint(-coeff_range, coeff_range)
        out.append((Rect(bottom, top, rng.choice(choices)), c))
    return out


def sandwich_rect(x: list[tuple[Rect, int]], g: TLElement, y: list[tuple[Rect, int]], m: int) -> TLElement:
    """x . g . y in TL_m, for x: g.size -> m and y: m -> g.size."""
    k = g.size
    buckets: dict[TLDiagram, dict[int, list[Scalar]]] = {}
    for rx, cx in x:
        for ry, cy in y:
            for dg, cg in g.terms.items():
                glue = Gluing()
                glue.add_piece("x", rx.pairing)
                glue.add_piece("g", dg.pairing)
                glue.add_piece("y", ry.pairing)
                for c in range(k):
                    glue.add_wire(("x", rx.bottom_point(c)), ("g", c))
                    glue.add_wire(("g", 2 * k - 1 - c), ("y", ry.top_point(c)))
                outer = [("x", rx.top_point(c)) for c in range(m)] + [("y", ry.bottom_point(c)) for c in reversed(range(m))]
                pairing, _, loops = glue.run(outer)
                d = TLDiagram(m, pairing)
                buckets.setdefault(d, {}).setdefault(len(loops), []).append(cg * (cx * cy))
    terms = []
    for d, by_loops in buckets.items():
        total = ZERO
        for loops, coeffs in by_loops.items():
            total = total + sum_scalars(coeffs) * delta_power(loops)
        terms.append((d, total))
    return TLElement(m, terms)


@dataclasses.dataclass(frozen=True)
class OrthogonalityVerdict:
    n: int
    m: int
    trials: int
    passed: bool
    nonzero: list[int]


def orthogonality_check(n: int, m: int, trials: int = 20, rng: random.Random | None = None) -> OrthogonalityVerdict:
    """
    inner(x g_n y, g_m) == 0 exactly, for random integer combinations of rectangular diagrams x: 2n -> 2m and
    y: 2m -> 2n.
    """
    if n == m:
        raise DomainError("orthogonality needs n != m")
    if max(n, m) > 3:
        raise DomainError("orthogonality check is limited to n, m <= 3")
    rng = rng or random.Random(0)
    gn, gm = jones_wenzl(2 * n), jones_wenzl(2 * m)
    bad = []
    for trial in range(trials):
        x = random_rect(2 * n, 2 * m, rng)
        y = random_rect(2 * m, 2 * n, rng)
        if not inner(sandwich_rect(x, gn, y, 2 * m), gm).is_zero():
            bad.append(trial)
    return OrthogonalityVerdict(n, m, trials, not bad, bad)


# -------------------------------------------------------------------------------------------------- PSD


@dataclasses.dataclass(frozen=True)
class PSDRow:
    n: int
    delta: float
    t: float
    min_eig: float
    max_eig: float


def psd_sweep(deltas: Iterable[float], n_max: int = 4, points: int = 20) -> list[PSDRow]:
    """Gram spectra on the grid t = delta * k / points, k = 1..points."""
    rows = []
    for delta in deltas:
        for n in range(n_max + 1):
            for k in range(1, points + 1):
                t = delta * k / points
                eig = annular.gram_spectrum(n, delta, t)
                rows.append(PSDRow(n, delta, t, float(eig[0]), float(eig[-1])))
    return rows


# -------------------------------------------------------------------------------------------------- certificate


@dataclasses.dataclass
class Check:
    name: str
    passed: bool
    witness: dict = dataclasses.field(default_factory=dict)
    error: str | None = None
    cap_breach: bool = False
    seconds: float = 0.0

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class CertificateParams:
    delta: float
    t_grid: tuple[float, ...]
    n_max: int = 60
    n_exact: int = 4
    seed: int = 0
    t_decay: float | None = None

    @classmethod
    def default(cls, delta: float, seed: int = 0, n_max: int = 60, t_grid: Sequence[float] | None = None):
        NumericParams(delta)
        if t_grid is None:
            t_grid = [delta * k / 11 for k in range(1, 11)]
        return cls(delta, tuple(float(t) for t in t_grid), n_max, 4, seed)

    def __post_init__(self):
        NumericParams(self.delta)
        for t in self.t_grid:
            NumericParams(self.delta, t)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


@dataclasses.dataclass
class Certificate:
    params: CertificateParams
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        if self.passed:
            return 0
        if any(not c.passed and not c.cap_breach for c in self.checks):
            return 1
        return 3

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "seed": self.params.seed,
            "params": self.params.to_json(),
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


def _run(name: str, fn: Callable[[], tuple[bool, dict]]) -> Check:
    start = time.perf_counter()
    try:
        ok, witness = fn()
        check = Check(name, bool(ok), witness)
    except ResourceCapError as exc:
        check = Check(name, False, error=str(exc), cap_breach=True)
    except TraceIdentityError as exc:
        check = Check(name, False, {"n": exc.n}, error=str(exc))
    except TLJError as exc:
        check = Check(name, False, error=str(exc))
    check.seconds = round(time.perf_counter() - start, 3)
    return check


def _trace_identity(n_exact: int):
    rows = jw_trace_table(n_exact)
    return True, {"values": {str(n): str(v) for n, v in rows}}


def _annular_identity(n_exact: int):
    failed = [n for n in range(1, n_exact + 1) if annular.annular_trace(jones_wenzl(2 * n)) != qint_t(2 * n + 1)]
    return not failed, {"failed_n": failed, "values": {str(n): str(qint_t(2 * n + 1)) for n in range(1, n_exact + 1)}}


def _jw_properties():
    top = min(8, max_strands())
    bad = [m for m in range(top + 1) if not verify_jw(jones_wenzl(m)).ok]
    return not bad, {"m_max": top, "failed_m": bad}


def _cross_check(params: CertificateParams):
    gaps = []
    exact = [n for n in range(params.n_exact + 1) if not exact_row_identity(n)]
    for t in params.t_grid:
        for n in range(params.n_exact + 1):
            gaps.append(coefficient_cross_check(n, NumericParams(params.delta, t)).abs_gap)
    worst = max(gaps)
    return worst <= GAP_TOL and not exact, {"max_abs_gap": worst, "exact_mismatch_n": exact}


def _a0():
    num, den = cpai_coefficient(0)
    return num == TPoly([1]) and den == qint(1), {"c_t(0)": 1}


def _decay(params: CertificateParams):
    ts = [t for t in params.t_grid if t < params.delta]
    if params.t_decay is not None:
        ts.append(params.t_decay)
    reports = {t: decay_report(NumericParams(params.delta, t), params.n_max) for t in ts}
    witness = {f"{t:.6g}": {"c_final": r.final, "tail_max": r.tail_max, "monotone": r.monotone}
               for t, r in reports.items()}
    return all(r.passed for r in reports.values()), {"n_max": params.n_max, "by_t": witness}


def _convergence(params: CertificateParams):
    eps_list = [1e-2, 1e-3, 1e-4]
    rows = convergence_report(10, params.delta, eps_list)
    by_eps = {e: max(r.abs_dev for r in rows if r.eps == e) for e in eps_list}
    monotone = all(by_eps[a] >= by_eps[b] for a, b in zip(eps_list, eps_list[1:]))
    return by_eps[1e-4] < 1e-2 and monotone, {"max_dev_by_eps": {str(e): v for e, v in by_eps.items()}}


def _psd(params: CertificateParams):
    rows = psd_sweep([params.delta], 4, 20)
    worst = min(r.min_eig for r in rows)
    return worst >= PSD_TOL, {"min_eig": worst, "n_max": 4, "points": 20}


def _orthogonality(params: CertificateParams):
    rng = random.Random(params.seed)
    bad = []
    for n in range(4):
        for m in range(4):
            if n != m:
                v = orthogonality_check(n, m, 20, rng)
                if not v.passed:
                    bad.append([n, m, v.nonzero])
    return not bad, {"pairs": 12, "trials": 20, "failures": bad}


def _adjoint_law():
    bad = []
    for n in range(4):
        for tangle in annular.elementary_tangles(n):
            if tangle.target(n) <= 3 and not annular.adjoint_law_holds(tangle, n):
                bad.append([n, tangle.kind, tangle.index])
    periods = {str(n): annular.rotation_period(n) for n in range(1, 5)}
    return not bad, {"failures": bad, "rotation_period": periods}


def _bacher(params: CertificateParams):
    rng = random.Random(params.seed + 1)
    rb = lambda: enveloping.random_box(rng, 2)
    assoc = all((x * y) * z == x * (y * z) for x, y, z in ((rb(), rb(), rb()) for _ in range(25)))
    pairs = [(rb(), rb()) for _ in range(50)]
    trace = all(enveloping.tau(x * y) == enveloping.tau(y * x) for x, y in pairs)
    anti = all(enveloping.dagger(x * y) == enveloping.dagger(y) * enveloping.dagger(x) for x, y in pairs)
    gram = enveloping.tau_gram(2, NumericParams(params.delta).q)
    min_eig = float(np.linalg.eigvalsh(gram)[0])
    ok = assoc and trace and anti and min_eig >= PSD_TOL and float(gram.diagonal().min()) > 0
    return ok, {"associative": assoc, "tracial": trace, "dagger_antimultiplicative": anti, "tau_gram_min_eig": min_eig}


def _module(params: CertificateParams):
    rng = random.Random(params.seed + 2)
    xi = enveloping.ModuleVector.xi(6)
    state = True
    for _ in range(50):
        x = enveloping.random_box(rng, 2)
        state &= enveloping.module_inner(enveloping.pi0_act_left(x, xi), xi) == TPoly([enveloping.tau(x)])
    central = True
    from .diagram import random_element

    for _ in range(20):
        a = rng.randint(0, 2)
        b = rng.randint(0, 2 - a)
        s = enveloping.split_element(random_element(a, rng), random_element(b, rng))
        central &= enveloping.pi0_act_left(s, xi) == enveloping.pi0_act_right(s, xi)
    sandwich = all(enveloping.sandwich(n) == annular.annular_trace(jones_wenzl(2 * n)) for n in range(3))
    return state and central and sandwich, {"state": state, "central": central, "sandwich": sandwich, "n_max": 6}


SUITES = (
    "trace_identity", "annular_identity", "jones_wenzl_properties", "coefficient_cross_check", "c_t(0)", "decay_in_n",
    "convergence_in_t", "module_positivity", "orthogonality", "annular_adjoint_law", "bacher_algebra_laws",
    "state_and_centrality",
)


def certificate(params: CertificateParams, progress: Callable[[Check], None] | None = None,
                only: Iterable[str] | None = None) -> Certificate:
    """Run the check suites (all of them unless ``only`` names a subset) in a fixed order."""
    suites: list[tuple[str, Callable[[], tuple[bool, dict]]]] = [
        ("trace_identity", lambda: _trace_identity(params.n_exact)),
        ("annular_identity", lambda: _annular_identity(params.n_exact)),
        ("jones_wenzl_properties", _jw_properties),
        ("coefficient_cross_check", lambda: _cross_check(params)),
        ("c_t(0)", _a0),
        ("decay_in_n", lambda: _decay(params)),
        ("convergence_in_t", lambda: _convergence(params)),
        ("module_positivity", lambda: _psd(params)),
        ("orthogonality", lambda: _orthogonality(params)),
        ("annular_adjoint_law", _adjoint_law),
        ("bacher_algebra_laws", lambda: _bacher(params)),
        ("state_and_centrality", lambda: _module(params)),
    ]
    wanted = set(SUITES if only is None else only)
    unknown = wanted - set(SUITES)
    if unknown:
        raise DomainError(f"unknown check suites: {sorted(unknown)}")
    checks = []
    for name, fn in suites:
        if name not in wanted:
            continue
        check = _run(name, fn)
        checks.append(check)
        if progress:
            progress(check)
    return Certificate(params, checks)


def parse_t_grid(text: str) -> list[float]:
    """``a:b:steps`` -> ``steps`` evenly spaced values from a to b inclusive."""
    try:
        a, b, steps = text.split(":")
        a, b, steps = float(a), float(b), int(steps)
    except ValueError as exc:
        raise DomainError(f"t grid must look like a:b:steps, got {text!r}") from exc
    if steps < 1 or not all(math.isfinite(v) for v in (a, b)):
        raise DomainError(f"bad t grid {text!r}")
    if steps == 1:
        return [a]
    return [float(v) for v in np.linspace(a, b, steps)]
