from __future__ import annotations

import json
import random

import pytest

from tlj.diagram import TLElement, inner, multiply, random_element
from tlj.errors import DomainError, ResourceCapError
from tlj.jones_wenzl import cache_put, clear_cache, jones_wenzl
from tlj.report import (
    SUITES,
    CertificateParams,
    Rect,
    certificate,
    coefficient_cross_check,
    convergence_report,
    cpai_coefficient,
    cpai_table,
    decay_report,
    exact_row_identity,
    orthogonality_check,
    parse_t_grid,
    psd_sweep,
    sandwich_rect,
)
from tlj.scalar import DELTA, ONE, NumericParams, TPoly, qint, qint_t


def test_cpai_examples():
    num, den = cpai_coefficient(0)
    assert num == TPoly([1]) and den == ONE
    assert cpai_coefficient(1, "numeric", NumericParams(3.0, 2.0)) == pytest.approx(0.375, abs=1e-15)
    for n in range(8):
        assert cpai_coefficient(n, "numeric", NumericParams(2.5, 2.5)) == pytest.approx(1.0, abs=1e-12)
    num, den = cpai_coefficient(3)
    assert num == qint_t(7) and den == qint(7)
    assert num.substitute(DELTA) == den
    with pytest.raises(DomainError):
        cpai_coefficient(-1)
    with pytest.raises(DomainError):
        cpai_coefficient(1, "numeric", NumericParams(2.5))


@pytest.mark.parametrize("n", range(5))
def test_exact_rows(n):
    assert exact_row_identity(n)


@pytest.mark.parametrize("delta", [2.0, 2.5, 3.0])
def test_cross_check_gap(delta):
    for k in range(1, 11):
        params = NumericParams(delta, delta * k / 11)
        for n in range(5):
            row = coefficient_cross_check(n, params)
            assert row.abs_gap <= 1e-12
            assert row.abs_gap == abs(row.c_formula - row.c_diagram)
    row = coefficient_cross_check(2, NumericParams(2.5, 2.0))
    assert row.abs_gap <= 1e-12
    with pytest.raises(ResourceCapError):
        coefficient_cross_check(5, params)


def test_cross_check_n1_symbolic():
    p = jones_wenzl(2)
    from tlj.annular import annular_trace
    from tlj.diagram import markov_trace

    assert annular_trace(p) == qint_t(3)
    assert markov_trace(p) == qint(3)


def test_cpai_table_columns():
    rows = cpai_table(NumericParams(2.5, 2.0), 6)
    assert [r.n for r in rows] == list(range(7))
    assert rows[0].c_formula == 1.0
    assert all(r.c_diagram is not None for r in rows[:5])
    assert rows[6].c_diagram is None and rows[6].abs_gap is None


def test_decay():
    report = decay_report(NumericParams(2.5, 2.4), 60)
    assert report.passed
    assert report.final < 1e-2
    assert report.monotone
    assert report.rows[0].c_formula == 1.0
    # asymptotic ratio (omega / q)^2 with omega ~ 1.8633 and q = 2
    ratio = report.rows[60].c_formula / report.rows[59].c_formula
    assert ratio == pytest.approx((1.8633 / 2.0) ** 2, rel=1e-3)
    with pytest.raises(DomainError):
        decay_report(NumericParams(2.5, 2.5))


def test_decay_uses_magnitudes():
    # t < 2 puts omega on the unit circle; c oscillates in sign and decays only like 1/n at delta = 2
    report = decay_report(NumericParams(2.0, 1.99), 60)
    assert report.final < 0
    assert not report.passed
    assert report.tail_max == max(abs(r.c_formula) for r in report.rows[40:])
    assert decay_report(NumericParams(2.0, 1.99), 2000).passed


def test_convergence():
    eps_list = [1e-2, 1e-3, 1e-4]
    rows = convergence_report(10, 2.5, eps_list)
    assert len(rows) == 33
    assert all(r.abs_dev == 0.0 for r in rows if r.n == 0)
    assert max(r.abs_dev for r in rows if r.eps == 1e-4) < 1e-2
    for n in range(1, 11):
        devs = [r.abs_dev for r in rows if r.n == n]
        assert devs == sorted(devs, reverse=True)
    with pytest.raises(DomainError):
        convergence_report(3, 2.5, [0.0])


def test_orthogonality_small_pairs():
    for n, m in [(0, 1), (1, 0), (1, 2), (2, 1)]:
        verdict = orthogonality_check(n, m, 20, random.Random(7))
        assert verdict.passed, verdict
    with pytest.raises(DomainError):
        orthogonality_check(1, 1)
    with pytest.raises(DomainError):
        orthogonality_check(1, 4)


def test_padded_formulation_is_not_orthogonal():
    # Padding g_0 into TL_2 and taking x = y = 1 gives tr(p_2) = [3]_q, which is not zero.
    padded = jones_wenzl(0).include(2)
    assert padded == TLElement.identity(2)
    one = TLElement.identity(2)
    value = inner(multiply(multiply(one, padded), one), jones_wenzl(2))
    assert value == qint(3)
    # Random square x, y show the same failure is generic, not an artefact of x = y = 1.
    rng = random.Random(1)
    p4, g1 = jones_wenzl(4), jones_wenzl(2).include(4)
    nonzero = sum(
        not inner(multiply(multiply(random_element(4, rng), g1), random_element(4, rng)), p4).is_zero()
        for _ in range(10)
    )
    assert nonzero > 0


def test_sandwich_rect_identity():
    # with identity rectangles the sandwich is just g
    ident = Rect(2, 2, (3, 2, 1, 0))
    g = jones_wenzl(2)
    assert sandwich_rect([(ident, 1)], g, [(ident, 1)], 2) == g


def test_psd_sweep():
    rows = psd_sweep([2.5], n_max=3, points=5)
    assert len(rows) == 4 * 5
    assert min(r.min_eig for r in rows) >= -1e-9
    assert rows[-1].t == pytest.approx(2.5)


def test_parse_t_grid():
    assert parse_t_grid("0.5:2.0:4") == pytest.approx([0.5, 1.0, 1.5, 2.0])
    assert parse_t_grid("1:1:1") == [1.0]
    for bad in ("1:2", "a:b:c", "1:2:0", "nan:1:3"):
        with pytest.raises(DomainError):
            parse_t_grid(bad)


def test_certificate_params_validation():
    with pytest.raises(DomainError):
        CertificateParams.default(1.9)
    with pytest.raises(DomainError):
        CertificateParams(2.5, (3.0,))
    params = CertificateParams.default(2.5)
    assert len(params.t_grid) == 10
    assert all(0 < t < 2.5 for t in params.t_grid)


def test_certificate_subset_and_schema():
    params = CertificateParams.default(2.5, seed=11)
    seen = []
    cert = certificate(params, progress=seen.append, only=["c_t(0)", "trace_identity", "annular_identity"])
    assert cert.passed and cert.exit_code == 0
    assert [c.name for c in cert.checks] == ["trace_identity", "annular_identity", "c_t(0)"]
    assert seen == cert.checks
    data = json.loads(json.dumps(cert.to_json()))
    assert data["schema"] == 1 and data["seed"] == 11 and data["passed"] is True
    assert data["checks"][0]["witness"]["values"]["2"] == str(qint(5))
    with pytest.raises(DomainError):
        certificate(params, only=["nope"])
    assert len(SUITES) == 12


def test_certificate_fault_injection():
    clear_cache()
    try:
        cache_put(6, jones_wenzl(6).scale(2))
        cert = certificate(CertificateParams.default(2.5), only=["trace_identity"])
        (check,) = cert.checks
        assert not check.passed
        assert check.witness == {"n": 3}
        assert "n=3" in check.error
        assert cert.exit_code == 1
    finally:
        clear_cache()


def test_certificate_cap_breach(monkeypatch):
    clear_cache()
    monkeypatch.setenv("TLJ_MAX_STRANDS", "4")
    try:
        cert = certificate(CertificateParams.default(2.5), only=["trace_identity"])
        assert cert.checks[0].cap_breach
        assert cert.exit_code == 3
    finally:
        clear_cache()
