"""Moments of the number of rounds between successful decodes.

The count ``X`` is geometric on ``{1, 2, ...}`` with success probability
``1 - p``. Two closed forms are kept for the third moment: the published
one (``Backend.AS_PRINTED``), reproduced verbatim even though it is wrong
for ``p > 0``, and the standard one (``Backend.REDERIVED``). A brute-force
series sum serves as the independent check on both.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from mcaoi.errors import NonConvergenceError, OutOfDomainError


class Backend(str, enum.Enum):
    AS_PRINTED = "as_printed"
    REDERIVED = "rederived"

    @classmethod
    def parse(cls, value) -> "Backend":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"asprinted": "as_printed", "printed": "as_printed"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal finding attached to a result (e.g. a violated invariant)."""

    code: str
    message: str
    value: float | None = None


@dataclass(frozen=True)
class GeometricMoments:
    m1: float
    m2: float
    m3: float
    backend: Backend
    diagnostics: tuple[Diagnostic, ...] = field(default=(), compare=False)

    @property
    def ok(self) -> bool:
        return not self.diagnostics


def _check_p(p):
    if not 0.0 <= p < 1.0:
        raise OutOfDomainError(f"error rate must satisfy 0 <= p < 1, got {p}")


def _moment_diagnostics(m1, m2, m3):
    found = []
    if m1 < 1.0:
        found.append(Diagnostic("m1_below_one", f"E[X]={m1!r} < 1", m1))
    if m2 < m1 * m1 * (1 - 1e-12):
        found.append(Diagnostic("jensen_violation", f"E[X^2]={m2!r} < E[X]^2={m1 * m1!r}", m2 - m1 * m1))
    if m3 < m2 * (1 - 1e-12):
        found.append(Diagnostic("third_below_second", f"E[X^3]={m3!r} < E[X^2]={m2!r}", m3 - m2))
    return tuple(found)


def geometric_moments(p: float, backend=Backend.REDERIVED) -> GeometricMoments:
    """First three moments of ``X``.

    Invariant violations (which the as-printed third moment produces for
    most ``p > 0``) come back in ``diagnostics`` instead of raising.
    """
    _check_p(p)
    backend = Backend.parse(backend)
    q = 1.0 - p
    m1 = 1.0 / q
    m2 = (1.0 + p) / q**2
    if backend is Backend.AS_PRINTED:
        r = p / q
        m3 = 1.0 + 7.0 * r - 12.0 * r**2 + 6.0 * r**3
    else:
        m3 = (1.0 + 4.0 * p + p * p) / q**3
    return GeometricMoments(m1, m2, m3, backend, _moment_diagnostics(m1, m2, m3))


def moments_series_oracle(p: float, k: int, tail_tol: float = 1e-12, max_terms: int = 10_000_000) -> float:
    """``E[X**k]`` by direct summation of the probability mass function.

    Stops once the geometric envelope on the remaining tail drops below
    ``tail_tol``. Raises :class:`NonConvergenceError` past ``max_terms``.
    """
    _check_p(p)
    if k not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {k}")
    if not tail_tol > 0:
        raise ValueError("tail_tol must be positive")
    if p == 0.0:
        return 1.0
    q = 1.0 - p
    terms = []
    x = 1
    mass = q  # P(X = x)
    while True:
        term = x**k * mass
        terms.append(term)
        # successive-term ratio ((x+1)/x)^k p decreases in x; once below 1 the
        # tail is dominated by a geometric series started at the next term
        ratio = ((x + 1) / x) ** k * p
        if ratio < 1.0:
            nxt = (x + 1) ** k * mass * p
            if nxt / (1.0 - ratio) < tail_tol:
                break
        x += 1
        if x > max_terms:
            raise NonConvergenceError(f"series for E[X^{k}] at p={p} exceeded {max_terms} terms")
        mass *= p
    return math.fsum(terms)
