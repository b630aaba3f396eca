"""Closed-form rate and size bounds.

All logarithms are base 2.  Evaluators return plain numbers; the ones whose
source statement carries hypotheses return a :class:`BoundReport` that keeps
the value even when a hypothesis fails.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ._numbers import log2_int
from .bpis import bpis_floor_from_rate


@dataclass(frozen=True)
class BoundReport:
    name: str
    params: dict
    value: float
    violations: tuple[str, ...] = field(default=())
    extra: dict = field(default_factory=dict)

    @property
    def hypotheses_ok(self) -> bool:
        return not self.violations


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def time_sharing_loss(eps: float, n: int) -> float:
    """Rate lost to time sharing: ``-log2(1 - eps)/n`` (``inf`` at ``eps = 1``)."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    if n < 1:
        raise ValueError("n must be positive")
    if eps == 1.0:
        return math.inf
    return -math.log2(1 - eps) / n


def blocklength_rate_upper_bound(q, n: int, gamma, eps: float | None = None) -> BoundReport:
    """Upper bound ``2q(1 - 1/n)(1 + gamma)`` on the zero-error sum rate at blocklength ``n``.

    Hypotheses: ``n >= 2``, ``gamma > 0`` and ``q >= max(log n, (4/gamma) log(3/eps))``;
    the last one is only checked when ``eps`` is given.
    """
    # stays a Fraction when q and gamma are rational, so n = 2 gives q(1 + gamma) exactly
    value = 2 * q * (1 - Fraction(1, n)) * (1 + gamma)
    violations = []
    if n < 2:
        violations.append("n >= 2")
    if not gamma > 0:
        violations.append("gamma > 0")
    if q < math.log2(n):
        violations.append("q >= log n")
    if eps is not None:
        need = math.inf if eps <= 0 or gamma <= 0 else 4 / gamma * math.log2(3 / eps)
        if q < need:
            violations.append("q >= (4/gamma) log(3/eps)")
    params = {"q": q, "n": n, "gamma": gamma}
    if eps is not None:
        params["eps"] = eps
    return BoundReport("blocklength-upper", params, value, tuple(violations))


def diverse_code_rate(q: float, delta1: float, delta2: float, d: float) -> float:
    """Zero-error sum rate reachable from ``(d, 2 eps)``-diverse families."""
    return 2 * q * (1 - ((delta1 + delta2) / 2 + d)) - 2


def uniform_code_rate(q: float, delta1: float, delta2: float, gamma: float, eps: float,
             delta: float) -> float:
    """Zero-error sum rate reachable from ``gamma``-uniform families."""
    return 2 * q * (1 - ((delta1 + delta2) / 2 + 2 * (1 + gamma) * eps + delta)) - 2


def family_deficit(size: int, q: float, n: int) -> float:
    """``delta`` with ``size = Q^{n(1 - delta)}``, i.e. ``1 - log2(size)/(qn)``."""
    return 1 - log2_int(size) / (q * n)


def staircase_family_rate(q: int, gamma: float, eps: float, delta: float) -> float:
    """Rate from families as large as the ``Q >= 3`` construction, ``Q = 2^q``.

    Uses ``(delta1 + delta2)/2 = 1/2 - gamma/(2Q^2) - 1/(2q)``, which simplifies
    the rate to ``2q(1/2 + gamma/(2Q^2) - 2(1+gamma)eps - delta) - 1``.
    """
    Q = 2 ** q
    return 2 * q * (0.5 + gamma / (2 * Q * Q) - 2 * (1 + gamma) * eps - delta) - 1


def extremal_family_rate(q: float, gamma: float, eps: float, delta: float) -> float:
    """Rate from families meeting the ``gamma``-uniform upper bound."""
    return 2 * q * (0.5 + gamma / 4 + binary_entropy(gamma / 2) / 2
                    - 2 * eps * (1 + gamma) - delta) - 2


def extremal_family_eps_threshold(gamma: float) -> float:
    """Largest ``eps`` for which the extremal-family rate eventually exceeds ``q``."""
    return (gamma + 2 * binary_entropy(gamma / 2)) / (8 * (1 + gamma))


def extremal_family_min_q(gamma: float, eps: float, delta: float) -> float:
    """Smallest ``q`` with ``extremal_family_rate > q``; ``inf`` when no ``q`` works."""
    margin = (gamma + 2 * binary_entropy(gamma / 2)) / 4 - 2 * eps * (1 + gamma) - delta
    return math.inf if margin <= 0 else 1 / margin


def binary_pair_lower_bound_log2(n: int, gamma: float) -> float:
    """``log2`` of ``2/(n(n+1)) * 2^{(1 + H(gamma/4)) n}``."""
    return 1 - math.log2(n) - math.log2(n + 1) + (1 + binary_entropy(gamma / 4)) * n


def staircase_pair_lower_bound_log2(q_size: int, n: int, gamma: float) -> float:
    """``log2`` of ``n^{-Q^2/2} 2^{H(gamma/Q^2) n} (Q-1)^{gamma n/Q^2} Q^n``."""
    Q2 = q_size * q_size
    return (-Q2 / 2 * math.log2(n) + binary_entropy(gamma / Q2) * n
            + gamma * n / Q2 * math.log2(q_size - 1) + n * math.log2(q_size))


def uniform_pair_upper_bound(n: int, q: int, gamma: float) -> tuple[float, float]:
    """Upper bounds on ``|A||B|`` for ``gamma``-uniform families over ``[2^q]^n``.

    Returns ``(binomial, smooth)``: the binary bound ``C(N, floor(gamma N/2)) 2^{N(1+gamma/2)}``
    applied at ``N = qn`` after the binary reduction, and ``2^{N(1+gamma/2+H(gamma/2))}``.
    """
    if gamma > 2:
        raise ValueError("gamma must be at most 2")
    N = q * n
    k = math.floor(Fraction(repr(float(gamma))) * N / 2)
    binomial = math.comb(N, k) * 2.0 ** (N * (1 + gamma / 2))
    smooth = 2.0 ** (N * (1 + gamma / 2 + binary_entropy(gamma / 2)))
    return binomial, smooth


def packing_guarantee(size: int, n: int, q_size: int, d) -> float:
    """Packing guarantee ``|A| / (2^n Q^{dn})``."""
    return size / (2.0 ** n * float(q_size) ** (float(d) * n))


# name -> (callable, ordered parameter names) for the ``bounds eval`` command
EVALUATORS = {
    "time-sharing-loss": (time_sharing_loss, ("eps", "n")),
    "blocklength-upper": (blocklength_rate_upper_bound, ("q", "n", "gamma", "eps")),
    "diverse-code-rate": (diverse_code_rate, ("q", "delta1", "delta2", "d")),
    "uniform-code-rate": (uniform_code_rate, ("q", "delta1", "delta2", "gamma", "eps", "delta")),
    "staircase-family-rate": (staircase_family_rate, ("q", "gamma", "eps", "delta")),
    "extremal-family-rate": (extremal_family_rate, ("q", "gamma", "eps", "delta")),
    "entropy": (binary_entropy, ("p",)),
    "bpis-floor": (bpis_floor_from_rate, ("r", "n", "q")),
    "binary-pair-lower": (binary_pair_lower_bound_log2, ("n", "gamma")),
    "staircase-pair-lower": (staircase_pair_lower_bound_log2, ("Q", "n", "gamma")),
    "uniform-pair-upper": (uniform_pair_upper_bound, ("n", "q", "gamma")),
}

_INT_PARAMS = {"n", "Q"}
_INT_Q = {"staircase-family-rate", "uniform-pair-upper"}


def evaluate(name: str, params: dict[str, str]) -> BoundReport:
    """Evaluate a named bound from string parameters, as the CLI does."""
    if name not in EVALUATORS:
        raise KeyError(f"unknown bound {name!r}; choose from {', '.join(sorted(EVALUATORS))}")
    func, names = EVALUATORS[name]
    unknown = set(params) - set(names)
    if unknown:
        raise KeyError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    kwargs = {}
    for key in names:
        if key not in params:
            continue
        raw = params[key]
        as_int = key in _INT_PARAMS or (key == "q" and name in _INT_Q)
        kwargs[key] = int(raw) if as_int else float(raw)
    if name == "staircase-pair-lower":
        kwargs = {"q_size": kwargs.pop("Q"), **kwargs}
    result = func(**kwargs)
    if isinstance(result, BoundReport):
        return result
    if isinstance(result, tuple):
        binomial, smooth = result
        return BoundReport(name, kwargs, smooth, extra={"binomial": binomial})
    return BoundReport(name, kwargs, float(result))
