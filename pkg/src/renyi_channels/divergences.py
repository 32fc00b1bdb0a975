"""Renyi and von Neumann divergences and the state-level mutual informations.

All values are in bits.  A divergence is ``math.inf`` when the first
argument leaks more than ``LEAK_TOL`` of its mass outside the support of the
second.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import _kernel
from .channels import check_bipartite, check_density
from .linalg import (
    ValidationError,
    _eigh,
    check_hermitian,
    fractional_power_psd,
    hermitize,
    kron,
    log2_psd,
    partial_trace,
    schatten_norm,
    support_cutoff,
)

LEAK_TOL = 1e-9
NORM_FORM_ATOL = 1e-9
OPTIMIZER_RESTARTS = 5


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 1.0:
        raise ValidationError(f"Renyi order must satisfy alpha > 1, got {alpha}")
    return alpha


def _pair(rho, sigma) -> tuple[np.ndarray, np.ndarray]:
    rho = check_density(rho, name="rho")
    sigma = check_density(sigma, rho.shape[0], name="sigma")
    return rho, sigma


def support_leak(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``Tr(P rho)`` for ``P`` the projector onto the numerical kernel of ``sigma``."""
    w, v = _eigh(sigma)
    kernel = v[:, w <= support_cutoff(w)]
    if kernel.shape[1] == 0:
        return 0.0
    return float(np.trace(kernel.conj().T @ rho @ kernel).real)


def _log2_trace_power(x: np.ndarray, alpha: float) -> float:
    """``log2 Tr x^alpha`` for PSD ``x``, immune to overflow at large alpha."""
    w = np.clip(np.linalg.eigvalsh(hermitize(x)), 0.0, None)
    top = w.max()
    if top <= 0.0:
        return -math.inf
    return alpha * math.log2(top) + math.log2(float(np.sum((w / top) ** alpha)))


def sandwiched_renyi(rho, sigma, alpha: float, check: bool = True) -> float:
    """Sandwiched Renyi divergence ``D~_alpha(rho||sigma)`` for ``alpha > 1``.

    Evaluated on the support of sigma.  With ``check`` the Schatten-norm form
    is computed through an SVD as well and both must agree to 1e-9.
    """
    alpha = _check_alpha(alpha)
    rho, sigma = _pair(rho, sigma)
    if support_leak(rho, sigma) > LEAK_TOL:
        return math.inf
    s = fractional_power_psd(sigma, (1 - alpha) / (2 * alpha))
    x = s @ rho @ s
    value = _log2_trace_power(x, alpha) / (alpha - 1)
    if check:
        other = sandwiched_renyi_norm_form(rho, sigma, alpha, _validated=True)
        if abs(value - other) > NORM_FORM_ATOL * max(1.0, abs(value)):
            raise ArithmeticError(f"trace and norm forms disagree: {value!r} vs {other!r}")
    return value


def sandwiched_renyi_norm_form(rho, sigma, alpha: float, _validated: bool = False) -> float:
    """``alpha/(alpha-1) log2 ||sigma^g rho sigma^g||_alpha`` with ``g = (1-alpha)/2alpha``."""
    if not _validated:
        alpha = _check_alpha(alpha)
        rho, sigma = _pair(rho, sigma)
        if support_leak(rho, sigma) > LEAK_TOL:
            return math.inf
    s = fractional_power_psd(sigma, (1 - alpha) / (2 * alpha))
    norm = schatten_norm(s @ rho @ s, alpha)
    return alpha / (alpha - 1) * math.log2(norm)


def traditional_renyi(rho, sigma, alpha: float) -> float:
    """Petz-type ``D_alpha(rho||sigma) = log2 Tr{rho^alpha sigma^(1-alpha)} / (alpha-1)``."""
    alpha = _check_alpha(alpha)
    rho, sigma = _pair(rho, sigma)
    if support_leak(rho, sigma) > LEAK_TOL:
        return math.inf
    q = np.trace(fractional_power_psd(rho, alpha) @ fractional_power_psd(sigma, 1 - alpha)).real
    return math.log2(q) / (alpha - 1)


def von_neumann_entropy(rho) -> float:
    w = np.linalg.eigvalsh(hermitize(check_hermitian(rho)))
    w = w[w > support_cutoff(w)]
    return float(-np.sum(w * np.log2(w)))


def relative_entropy(rho, sigma) -> float:
    """Umegaki relative entropy ``Tr rho (log2 rho - log2 sigma)``."""
    rho, sigma = _pair(rho, sigma)
    if support_leak(rho, sigma) > LEAK_TOL:
        return math.inf
    return float(np.trace(rho @ (log2_psd(rho) - log2_psd(sigma))).real)


def marginals(rho_ab, dims) -> tuple[np.ndarray, np.ndarray]:
    return partial_trace(rho_ab, dims, 1), partial_trace(rho_ab, dims, 0)


def mutual_information(rho_ab, dims: Sequence[int]) -> float:
    """``I(A;B) = D(rho_AB || rho_A (x) rho_B)``."""
    rho_ab, dims = check_bipartite(rho_ab, dims)
    rho_a, rho_b = marginals(rho_ab, dims)
    return max(relative_entropy(rho_ab, kron(rho_a, rho_b)), 0.0)


def _sibson_operator(rho_ab: np.ndarray, dims, alpha: float) -> np.ndarray:
    """``Tr_A{rho_A^(1-alpha) rho_AB^alpha}`` in its manifestly positive form."""
    rho_a = partial_trace(rho_ab, dims, 1)
    half = np.kron(fractional_power_psd(rho_a, (1 - alpha) / 2), np.eye(dims[1]))
    inner = half @ fractional_power_psd(rho_ab, alpha) @ half
    return hermitize(partial_trace(inner, dims, 0))


def sibson_sigma_star(rho_ab, dims: Sequence[int], alpha: float) -> np.ndarray:
    """The minimiser of ``D_alpha(rho_AB || rho_A (x) sigma_B)`` over states sigma_B."""
    alpha = _check_alpha(alpha)
    rho_ab, dims = check_bipartite(rho_ab, dims)
    root = fractional_power_psd(_sibson_operator(rho_ab, dims, alpha), 1 / alpha)
    return hermitize(root / np.trace(root).real)


def sibson_log_trace(rho_ab, dims, alpha: float) -> float:
    """``log2 Tr{(Tr_A{rho_A^(1-alpha) rho_AB^alpha})^(1/alpha)}``, no alpha check."""
    t = _sibson_operator(np.asarray(rho_ab, dtype=complex), dims, alpha)
    return math.log2(np.trace(fractional_power_psd(t, 1 / alpha)).real)


def renyi_mi_explicit(rho_ab, dims: Sequence[int], alpha: float) -> float:
    """Closed form of ``min_sigma D_alpha(rho_AB || rho_A (x) sigma)``."""
    alpha = _check_alpha(alpha)
    rho_ab, dims = check_bipartite(rho_ab, dims)
    return max(alpha / (alpha - 1) * sibson_log_trace(rho_ab, dims, alpha), 0.0)


def sandwiched_mi_state(rho_ab, dims: Sequence[int], alpha: float, seed: int = 0,
                        restarts: int = OPTIMIZER_RESTARTS, gtol: float = 1e-10):
    """``min_sigma D~_alpha(rho_AB || rho_A (x) sigma_B)``.

    Convex in sigma.  Solved by BFGS from ``rho_B`` and ``restarts - 1``
    seeded perturbations of ``I/d_B``; returns ``(value, sigma)`` for the best
    run.
    """
    alpha = _check_alpha(alpha)
    rho_ab, dims = check_bipartite(rho_ab, dims)
    da, db = dims
    rho_a, rho_b = marginals(rho_ab, dims)
    obj = _kernel.NormObjective(rho_ab, dims, alpha)
    p = fractional_power_psd(rho_a, (1 - alpha) / alpha)
    sig = _kernel.StatePower(db, (1 - alpha) / alpha)
    scale = alpha / ((alpha - 1) * math.log(2))

    def fun(x):
        sigma, s, cache = sig.unpack(x)
        phi, _, gs = obj.value_and_grads(p, s, need="s")
        return scale * phi, scale * sig.pullback(gs, sigma, cache)

    rng = np.random.default_rng(seed)
    # keep the first start full rank; negative powers of sigma blow up on a kernel
    first = 0.9 * rho_b + 0.1 * np.eye(db) / db
    starts = [first] +[_kernel.perturbed_start(db, rng) for _ in range(max(restarts, 1) - 1)]
    best = None
    for start in starts:
        x, val, _ = _kernel.bfgs(fun, _kernel.pack(start), gtol, 2000)
        if best is None or val < best[0]:
            best = (val, sig.unpack(x)[0])
    value, sigma = best
    return max(value, 0.0), sigma


def classical_renyi(p: np.ndarray, q: np.ndarray, alpha: float) -> float:
    """``log2 sum p^alpha q^(1-alpha) / (alpha - 1)`` with the +inf convention."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return math.inf
    return math.log2(float(np.sum(p[mask] ** alpha * q[mask] ** (1 - alpha)))) / (alpha - 1)


def classical_kl(p: np.ndarray, q: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if np.any(q[mask] <= 0):
        return math.inf
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def binary_divergence(family: str, p: float, q: float, alpha: float | None = None) -> float:
    """``delta(p||q)`` for ``diag(p, 1-p)`` against ``diag(q, 1-q)``.

    ``family`` is ``"kl"``, ``"sandwiched"`` or ``"traditional"``; both Renyi
    families reduce to the classical formula on commuting inputs.
    """
    for name, val in (("p", p), ("q", q)):
        if not 0.0 <= val <= 1.0:
            raise ValidationError(f"{name}={val} is not a probability")
    pv = np.array([p, 1 - p])
    qv = np.array([q, 1 - q])
    family = family.lower()
    if family == "kl":
        return max(classical_kl(pv, qv), 0.0)
    if family in ("sandwiched", "traditional"):
        if alpha is None:
            raise ValidationError(f"family {family!r} needs alpha")
        return max(classical_renyi(pv, qv, _check_alpha(alpha)), 0.0)
    raise ValidationError(f"unknown divergence family {family!r}")
