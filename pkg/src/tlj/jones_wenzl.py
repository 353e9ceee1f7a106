"""Jones-Wenzl idempotents built by Wenzl's one-step recursion."""

from __future__ import annotations

import dataclasses
import threading

from .diagram import TLElement, adjoint, check_cap, markov_trace, multiply
from .errors import TLJError
from .scalar import Scalar, qint

_lock = threading.RLock()
_cache: dict[int, TLElement] = {}


class TraceIdentityError(TLJError, AssertionError):
    def __init__(self, n: int, got: Scalar, expected: Scalar):
        super().__init__(f"trace of jones_wenzl({2 * n}) is {got}, expected [{2 * n + 1}]_q = {expected} (n={n})")
        self.n = n


def jones_wenzl(m: int) -> TLElement:
    """
    The Jones-Wenzl idempotent p_m in TL_m.

    p_(k+1) = p_k - ([k]/[k+1]) p_k e_k p_k, with p_k included in TL_(k+1) by a strand on the right. Results are
    cached per size; ``p_0`` is the empty diagram.
    """
    if m < 0:
        raise ValueError(f"strand count must be non-negative, got {m}")
    check_cap(m)
    cached = _cache.get(m)
    if cached is not None:
        return cached
    with _lock:
        if m in _cache:
            return _cache[m]
        if m <= 1:
            result = TLElement.identity(m)
        else:
            k = m - 1
            prev = jones_wenzl(k).include(m)
            left = multiply(prev, TLElement.generator(k, m))
            result = prev - multiply(left, prev).scale(qint(k) / qint(k + 1))
        _cache[m] = result
        return result


def cache_put(m: int, element: TLElement) -> None:
    """Overwrite a cached idempotent (used for fault injection)."""
    with _lock:
        _cache[m] = element


def clear_cache() -> None:
    with _lock:
        _cache.clear()


def g(n: int) -> TLElement:
    """g_n = p_(2n)."""
    return jones_wenzl(2 * n)


@dataclasses.dataclass(frozen=True)
class JWVerdict:
    size: int
    idempotent: bool
    left_annihilates: bool
    right_annihilates: bool
    self_adjoint: bool

    @property
    def kills_e(self) -> bool:
        return self.left_annihilates and self.right_annihilates

    @property
    def ok(self) -> bool:
        return self.idempotent and self.kills_e and self.self_adjoint


def verify_jw(p: TLElement) -> JWVerdict:
    m = p.size
    gens = [TLElement.generator(i, m) for i in range(1, m)]
    return JWVerdict(
        size=m,
        idempotent=multiply(p, p) == p,
        left_annihilates=all(multiply(e, p).is_zero() for e in gens),
        right_annihilates=all(multiply(p, e).is_zero() for e in gens),
        self_adjoint=adjoint(p) == p,
    )


def jw_trace_table(n_max: int = 4) -> list[tuple[int, Scalar]]:
    """Pairs (n, tr(g_n)); raises ``TraceIdentityError`` naming n if tr(g_n) differs from [2n+1]_q."""
    rows = []
    for n in range(n_max + 1):
        value = markov_trace(jones_wenzl(2 * n))
        expected = qint(2 * n + 1)
        if value != expected:
            raise TraceIdentityError(n, value, expected)
        rows.append((n, value))
    return rows
