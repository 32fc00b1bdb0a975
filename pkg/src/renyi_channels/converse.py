"""Strong-converse exponents, success-probability bounds and a superdense-coding check."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel_info import ea_capacity, sandwiched_channel_mi
from .channels import CPMap, pauli
from .linalg import ValidationError

ALPHA_CAP = 1e4
PRESCAN_POINTS = 32
GOLDEN = (math.sqrt(5) - 1) / 2
T_TOL = 1e-7
# exponents below this are round-off in I~_alpha at R = I(N), reported as 0
E_FLOOR = 1e-12


@dataclass(frozen=True)
class ExponentPoint:
    rate: float
    exponent: float
    alpha_star: float

    def __post_init__(self):
        for name in ("rate", "exponent", "alpha_star"):
            object.__setattr__(self, name, float(getattr(self, name)))


@dataclass(frozen=True)
class CodeSimResult:
    n: int
    messages: int
    rate: float
    p_succ: float
    bound: float

    def __post_init__(self):
        for name in ("rate", "p_succ", "bound"):
            object.__setattr__(self, name, float(getattr(self, name)))


def thread_count() -> int:
    raw = os.environ.get("RENYI_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"RENYI_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValidationError(f"RENYI_THREADS must be a positive integer, got {raw!r}")
    return value


def _renyi_value(args) -> float:
    n, alpha = args
    return sandwiched_channel_mi(n, alpha, check_minimax=False).value


class RenyiProfile:
    """Memoised ``alpha -> I~_alpha(N)``.

    Every value is solved from a cold start, so results do not depend on
    evaluation order or on how the work is split across processes.
    """

    def __init__(self, n: CPMap, alpha_cap: float = ALPHA_CAP):
        if not n.trace_preserving:
            raise ValidationError("strong-converse exponents need a trace-preserving channel")
        if not alpha_cap > 1:
            raise ValidationError(f"alpha cap must exceed 1, got {alpha_cap}")
        self.n = n
        self.alpha_cap = float(alpha_cap)
        self.t_max = 1.0 - 1.0 / self.alpha_cap
        self._cache: dict[float, float] = {}

    def at_t(self, t: float) -> float:
        return self(1.0 / (1.0 - t))

    def __call__(self, alpha: float) -> float:
        if alpha not in self._cache:
            self._cache[alpha] = _renyi_value((self.n, alpha))
        return self._cache[alpha]

    def prescan_ts(self) -> np.ndarray:
        # quadratic spacing: dense near t = 0 where just-above-capacity rates peak
        k = np.arange(1, PRESCAN_POINTS + 1)
        return self.t_max * (k / PRESCAN_POINTS) ** 2

    def fill(self, ts: Sequence[float], threads: int = 1) -> None:
        alphas = [1.0 / (1.0 - t) for t in ts]
        todo = [a for a in alphas if a not in self._cache]
        if threads > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=min(threads, len(todo))) as pool:
                values = list(pool.map(_renyi_value, [(self.n, a) for a in todo]))
            self._cache.update(zip(todo, values))
        else:
            for a in todo:
                self(a)


def _golden_max(f, a: float, b: float):
    """Golden-section maximisation of ``f`` on ``[a, b]`` (interior points only)."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > T_TOL * max(1.0, b):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def strong_converse_exponent(n: CPMap, rate: float, alpha_cap: float = ALPHA_CAP,
                             profile: RenyiProfile | None = None) -> ExponentPoint:
    """``E(R) = sup_{alpha>1} (alpha-1)/alpha (R - I~_alpha(N))``, clamped at 0.

    Optimised over ``t = (alpha-1)/alpha`` in ``(0, 1 - 1/alpha_cap]``: a
    32-point pre-scan picks the bracket, golden section refines it and the
    cap endpoint is always a candidate.  ``alpha_star`` is 1 when the
    clamp is active (the supremum is only approached as alpha -> 1).
    """
    rate = float(rate)
    if not rate >= 0:
        raise ValidationError(f"rate must be nonnegative, got {rate}")
    prof = profile or RenyiProfile(n, alpha_cap)

    def h(t):
        return t * (rate - prof.at_t(t))

    ts = prof.prescan_ts()
    prof.fill(ts)
    grid = [0.0] + list(ts)
    vals = [0.0] + [h(t) for t in ts]
    k = int(np.argmax(vals))
    if k == 0 and vals[1] <= 0 and (rate - prof.at_t(ts[0])) <= 0:
        # I~_alpha is nondecreasing in alpha, so R - I~ < 0 everywhere beyond t_1
        return ExponentPoint(rate, 0.0, 1.0)
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    t_best, v_best = _golden_max(h, lo, hi)
    for t in (grid[k], prof.t_max):
        if t > 0 and h(t) > v_best:
            t_best, v_best = t, h(t)
    if v_best <= E_FLOOR:
        return ExponentPoint(rate, 0.0, 1.0)
    alpha_star = prof.alpha_cap if t_best == prof.t_max else 1.0 / (1.0 - t_best)
    return ExponentPoint(rate, v_best, alpha_star)


def exponent_curve(n: CPMap, rates: Sequence[float], alpha_cap: float = ALPHA_CAP,
                   threads: int | None = None) -> list[ExponentPoint]:
    rates = [float(r) for r in rates]
    if any(b < a for a, b in zip(rates, rates[1:])):
        raise ValidationError("rate grid must be ascending")
    prof = RenyiProfile(n, alpha_cap)
    prof.fill(prof.prescan_ts(), threads or thread_count())
    return [strong_converse_exponent(n, r, profile=prof) for r in rates]


def success_prob_bound(n: CPMap, uses: int, rate: float, alpha_cap: float = ALPHA_CAP,
                       profile: RenyiProfile | None = None) -> float:
    """``2^{-n E(R)}``; equals 1 whenever R does not exceed the capacity."""
    if int(uses) != uses or uses < 1:
        raise ValidationError(f"number of channel uses must be a positive integer, got {uses}")
    e = strong_converse_exponent(n, rate, alpha_cap, profile).exponent
    return 2.0 ** (-uses * e)


def _kl_against_near_one(eps: float, nr: float) -> float:
    """``delta_KL(eps || 1 - 2^{-nR})`` without forming ``1 - 2^{-nR}`` lossy."""
    c = -math.expm1(-nr * math.log(2))
    out = 0.0
    if eps > 0:
        out += eps * math.log2(eps / c)
    if eps < 1:
        out += (1 - eps) * (math.log2(1 - eps) + nr)
    return out


def weak_converse_epsilon(n: CPMap, uses: int, rate: float, capacity: float | None = None) -> float:
    """Smallest error compatible with ``n I(N) >= delta_KL(eps || 1 - 2^{-nR})``.

    Uses the single-letter ``n I(N)`` (additivity of the entanglement-assisted
    capacity is taken as known).  Bisection on the decreasing branch
    ``eps in [0, 1 - 2^{-nR}]``.
    """
    if int(uses) != uses or uses < 1:
        raise ValidationError(f"number of channel uses must be a positive integer, got {uses}")
    if capacity is None:
        capacity = ea_capacity(n).value
    nr = uses * float(rate)
    budget = uses * capacity
    if nr <= budget:
        return 0.0
    lo, hi = 0.0, -math.expm1(-nr * math.log(2))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _kl_against_near_one(mid, nr) > budget:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15:
            break
    return hi


# -- superdense coding -----------------------------------------------------------

def pauli_probabilities(n: CPMap) -> dict[str, float]:
    """Pauli weights of a qubit Pauli channel; raises if the map is not one.

    Expands each Kraus operator in the Pauli basis; the channel is a Pauli
    channel iff the resulting process matrix is diagonal.
    """
    if n.d_in != 2 or n.d_out != 2 or not n.trace_preserving:
        raise ValidationError("superdense simulation needs a qubit channel")
    coeffs = np.array([[np.trace(pauli(k) @ op) / 2 for k in "IXYZ"] for op in n.kraus])
    chi = coeffs.T @ coeffs.conj()
    off = np.abs(chi - np.diag(np.diag(chi))).max()
    if off > 1e-10:
        raise ValidationError("channel is not a Pauli channel (process matrix not diagonal)")
    return {k: float(chi[i, i].real) for i, k in enumerate("IXYZ")}


def simulate_superdense(n: CPMap, uses: int, messages_per_use: int = 4,
                        profile: RenyiProfile | None = None) -> CodeSimResult:
    """Exact success probability of superdense coding over ``uses`` channel uses.

    Each use shares one Bell pair; Alice encodes with the first
    ``messages_per_use`` of (I, X, Z, Y) and Bob reads the Bell outcome as the
    message.  A use succeeds iff the noise leaves the Bell state unmoved, so
    ``p_succ = p_I^n``.
    """
    if messages_per_use not in (1, 2, 3, 4):
        raise ValidationError("messages per use must be 1, 2, 3 or 4")
    if int(uses) != uses or uses < 1:
        raise ValidationError(f"number of channel uses must be a positive integer, got {uses}")
    probs = pauli_probabilities(n)
    rate = math.log2(messages_per_use)
    p_succ = probs["I"] ** uses
    bound = success_prob_bound(n, uses, rate, profile=profile)
    if p_succ > bound + 1e-12:
        raise ArithmeticError(f"success probability {p_succ!r} exceeds the converse bound {bound!r}")
    return CodeSimResult(uses, messages_per_use ** uses, rate, p_succ, bound)
