"""Seeded property checks behind ``renyi-channels verify`` and the acceptance tests.

Each check returns a ``CheckResult`` whose ``worst`` is the largest violation
(or residual) seen, compared against ``tol``.  Sizes are parameters so the
CLI can run a quick battery and the test suite the full one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.optimize import minimize

from . import channels as ch
from .channel_info import cb_norm, ea_capacity, minimax_gap, sandwiched_channel_mi
from .converse import RenyiProfile, simulate_superdense, strong_converse_exponent
from .divergences import (
    mutual_information,
    renyi_mi_explicit,
    sandwiched_renyi,
    sibson_log_trace,
    sibson_sigma_star,
    traditional_renyi,
)
from .linalg import fractional_power_psd, kron, partial_trace, random_density, random_psd


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    cases: int
    lower_is_better: bool = True

    def with_tol(self, tol: float) -> "CheckResult":
        return _result(self.name, self.worst, tol, self.cases, self.lower_is_better)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.name}: worst={self.worst:.6e} tol={self.tol:.6e} cases={self.cases}"


def _result(name, worst, tol, cases, lower_is_better=True):
    worst = float(worst)
    ok = worst < tol if lower_is_better else worst > tol
    return CheckResult(name, bool(ok), worst, float(tol), int(cases), lower_is_better)


def catalog(settings: int = 1) -> list[tuple[str, ch.CPMap]]:
    """Named catalog channels; ``settings=3`` gives three parameters per family."""
    params = {
        1: {"depolarizing": [0.2], "dephasing": [0.5], "amplitude_damping": [0.3], "erasure": [0.3]},
        3: {"depolarizing": [0.1, 0.5, 0.9], "dephasing": [0.2, 0.5, 1.0],
            "amplitude_damping": [0.1, 0.3, 0.7], "erasure": [0.1, 0.3, 0.6]},
    }[settings]
    out = [("identity", ch.identity(2))]
    for fam, values in params.items():
        for v in values:
            out.append((f"{fam}({v})", getattr(ch, fam)(v)))
    return out


def _random_state(d, rng):
    return random_density(d, rng)


def sibson_identity(seed=0, n_states=100, n_sigma=10, alphas=(1.3, 2.0, 3.0), tol=1e-8):
    """``D(rho_AB||rho_A x s) = D(s*||s) + D(rho_AB||rho_A x s*)`` for traditional Renyi."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    cases = 0
    for _ in range(n_states):
        rho = _random_state(4, rng)
        rho_a = partial_trace(rho, (2, 2), 1)
        for alpha in alphas:
            star = sibson_sigma_star(rho, (2, 2), alpha)
            base = traditional_renyi(rho, kron(rho_a, star), alpha)
            for _ in range(n_sigma):
                s = _random_state(2, rng)
                lhs = traditional_renyi(rho, kron(rho_a, s), alpha)
                rhs = traditional_renyi(star, s, alpha) + base
                worst = max(worst, abs(lhs - rhs))
                cases += 1
    return _result("sibson-identity", worst, tol, cases)


def _bloch_state(v):
    r = np.asarray(v, dtype=float)
    norm = np.linalg.norm(r)
    if norm > 0:
        r = r * math.tanh(norm) / norm
    return 0.5 * (np.eye(2) + r[0] * ch.pauli("X") + r[1] * ch.pauli("Y") + r[2] * ch.pauli("Z"))


def brute_force_renyi_mi(rho_ab, alpha, starts=4, seed=0):
    """``min_sigma D_alpha(rho_AB || rho_A x sigma)`` by Nelder-Mead over the Bloch ball."""
    rho_a = partial_trace(rho_ab, (2, 2), 1)
    rng = np.random.default_rng(seed)

    def f(v):
        return traditional_renyi(rho_ab, kron(rho_a, _bloch_state(v)), alpha)

    best = math.inf
    for k in range(starts):
        v0 = np.zeros(3) if k == 0 else rng.normal(scale=0.5, size=3)
        res = minimize(f, v0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 20000, "maxfev": 40000})
        best = min(best, float(res.fun))
    return best


def closed_form_minimum(seed=0, n_states=50, alphas=(1.5, 2.0), tol=1e-6):
    rng = np.random.default_rng(seed)
    worst = 0.0
    cases = 0
    for _ in range(n_states):
        rho = _random_state(4, rng)
        for alpha in alphas:
            worst = max(worst, abs(renyi_mi_explicit(rho, (2, 2), alpha) - brute_force_renyi_mi(rho, alpha)))
            cases += 1
    return _result("closed-form-vs-brute-force", worst, tol, cases)


def minimax_exchange(seed=0, alphas=(1.5, 2.0), tol=1e-6):
    worst = 0.0
    cases = 0
    for _, n in catalog():
        for alpha in alphas:
            worst = max(worst, minimax_gap(n, alpha, seed=seed))
            cases += 1
    return _result("minimax-exchange", worst, tol, cases)


def additivity(seed=0, n_pairs=10, alpha=2.0, tol=1e-4):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pairs):
        n1 = ch.random_channel(2, 2, int(rng.integers(1, 5)), rng)
        n2 = ch.random_channel(2, 2, int(rng.integers(1, 5)), rng)
        v1 = sandwiched_channel_mi(n1, alpha, check_minimax=False).value
        v2 = sandwiched_channel_mi(n2, alpha, check_minimax=False).value
        v12 = sandwiched_channel_mi(ch.tensor(n1, n2), alpha, check_minimax=False).value
        worst = max(worst, abs(v12 - v1 - v2))
    return _result("additivity", worst, tol, n_pairs)


def cb_multiplicativity(seed=0, n_pairs=20, alphas=(1.5, 2.0, 3.0), tol=1e-5):
    rng = np.random.default_rng(seed)
    worst = 0.0
    cases = 0
    for _ in range(n_pairs):
        m1 = ch.random_cp_map(2, 2, int(rng.integers(1, 5)), rng)
        m2 = ch.random_cp_map(2, 2, int(rng.integers(1, 5)), rng)
        m12 = ch.tensor(m1, m2)
        for alpha in alphas:
            prod = cb_norm(m1, alpha) * cb_norm(m2, alpha)
            worst = max(worst, abs(cb_norm(m12, alpha) - prod) / prod)
            cases += 1
    return _result("cb-multiplicativity", worst, tol, cases)


def cb_anchors(tol=1e-8):
    worst = max(abs(cb_norm(ch.identity(2), 2.0) - math.sqrt(2)),
                abs(cb_norm(ch.depolarizing(1.0), 2.0) - 2 ** -0.5))
    return _result("cb-anchors", worst, tol, 2)


def lieb_thirring(seed=0, n=500, tol=1e-10):
    """``Tr (C B C^dag)^a <= Tr (C^dag C)^a B^a``; worst is the largest violation."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(n):
        d = int(rng.integers(2, 5))
        alpha = float(rng.uniform(1.0, 5.0))
        b = random_psd(d, rng)
        b /= np.trace(b).real
        c = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        c /= np.linalg.norm(c)
        lhs = np.trace(fractional_power_psd(c @ b @ c.conj().T, alpha)).real
        rhs = np.trace(fractional_power_psd(c.conj().T @ c, alpha) @ fractional_power_psd(b, alpha)).real
        worst = max(worst, lhs - rhs)
    return _result("lieb-thirring", worst, tol, n)


def sandwiched_below_traditional(seed=0, n=500, tol=1e-10):
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(n):
        d = int(rng.integers(2, 5))
        alpha = float(rng.uniform(1.01, 5.0))
        rho, sigma = _random_state(d, rng), _random_state(d, rng)
        worst = max(worst, sandwiched_renyi(rho, sigma, alpha) - traditional_renyi(rho, sigma, alpha))
    return _result("sandwiched<=traditional", worst, tol, n)


def data_processing(seed=0, n=200, alphas=(1.2, 1.5, 2.0, 3.0), tol=1e-8):
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for k in range(n):
        lam = ch.random_channel(2, 2, int(rng.integers(1, 5)), rng)
        alpha = alphas[k % len(alphas)]
        rho, sigma = _random_state(2, rng), _random_state(2, rng)
        before = sandwiched_renyi(rho, sigma, alpha)
        after = sandwiched_renyi(lam(rho), lam(sigma), alpha)
        worst = max(worst, after - before)
    return _result("data-processing", worst, tol, n)


def ea_limit(alpha=1.001, tol=1e-2):
    worst = 0.0
    cases = catalog()
    for _, n in cases:
        gap = sandwiched_channel_mi(n, alpha, check_minimax=False).value - ea_capacity(n).value
        worst = max(worst, abs(gap))
    return _result("renyi-to-ea-limit", worst, tol, len(cases))


def sibson_derivative(seed=0, n_states=50, h=1e-4, tol=1e-3):
    """Central difference of ``log2 Tr{...}`` around ``alpha = 1 + h`` against ``I(A;B)``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_states):
        rho = _random_state(4, rng)
        deriv = (sibson_log_trace(rho, (2, 2), 1 + 2 * h) - sibson_log_trace(rho, (2, 2), 1.0)) / (2 * h)
        worst = max(worst, abs(deriv - mutual_information(rho, (2, 2))))
    return _result("sibson-derivative", worst, tol, n_states)


def exponent_threshold(margin=0.1, settings=1, names=None):
    """``E(I + margin) > 0`` and ``E(I - margin) = 0``.

    ``worst`` is the smallest exponent above capacity, or minus the exponent
    found below it; the check passes when it is positive.
    """
    chosen = [(k, n) for k, n in catalog(settings) if names is None or k in names]
    smallest = math.inf
    for _, n in chosen:
        cap = ea_capacity(n).value
        prof = RenyiProfile(n)
        above = strong_converse_exponent(n, cap + margin, profile=prof).exponent
        below = strong_converse_exponent(n, max(cap - margin, 0.0), profile=prof).exponent
        smallest = min(smallest, above if below == 0.0 else -below)
    return _result(f"exponent-threshold(+-{margin:g})", smallest, 0.0, len(chosen), lower_is_better=False)


def superdense_sweep(ps=tuple(np.linspace(0.05, 0.5, 10)), uses=range(1, 11), tol=1e-12):
    """Largest ``p_succ - bound`` over depolarizing channels at rate 2."""
    worst = -math.inf
    cases = 0
    for p in ps:
        n = ch.depolarizing(float(p))
        prof = RenyiProfile(n)
        for k in uses:
            res = simulate_superdense(n, k, 4, profile=prof)
            worst = max(worst, res.p_succ - res.bound)
            cases += 1
    return _result("superdense-bound", worst, tol, cases)


QUICK_NAMES = (
    "sibson-identity", "closed-form-vs-brute-force", "minimax-exchange", "additivity", "cb-multiplicativity",
    "cb-anchors", "lieb-thirring", "sandwiched<=traditional", "data-processing", "renyi-to-ea-limit",
    "sibson-derivative", "exponent-threshold(+-0.1)", "superdense-bound",
)


def quick_battery(seed: int):
    """Small instances of every suite; what ``verify`` runs."""
    return [
        partial(sibson_identity, seed, n_states=10, n_sigma=3),
        partial(closed_form_minimum, seed, n_states=3),
        partial(minimax_exchange, seed),
        partial(additivity, seed, n_pairs=1),
        partial(cb_multiplicativity, seed, n_pairs=2),
        partial(cb_anchors),
        partial(lieb_thirring, seed, n=50),
        partial(sandwiched_below_traditional, seed, n=50),
        partial(data_processing, seed, n=20),
        partial(ea_limit),
        partial(sibson_derivative, seed, n_states=10),
        partial(exponent_threshold, 0.1, names=("identity", "depolarizing(0.2)", "dephasing(0.5)")),
        partial(superdense_sweep, ps=(0.05, 0.2, 0.5), uses=(1, 5, 10)),
    ]
