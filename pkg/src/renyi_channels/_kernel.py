"""Objective and gradients behind every sandwiched-Renyi optimisation.

All of them reduce to

    phi(P, S) = log || C^{1/2} (P (x) S) C^{1/2} ||_alpha

for a fixed PSD bipartite ``C`` (a Choi matrix or a state), with
``P = rho^a`` and ``S = sigma^b`` matrix powers of density operators.  States
are parametrised as ``rho = G G^dagger / Tr(G G^dagger)`` with an
unconstrained complex ``G`` so that scipy's quasi-Newton solvers apply.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .linalg import fractional_power_psd, hermitize, pullback_gradient

# eigenvalue floor inside the optimiser; keeps negative powers finite
_EIG_FLOOR = 1e-300


class NormObjective:
    def __init__(self, c: np.ndarray, dims: tuple[int, int], alpha: float):
        self.c_half = fractional_power_psd(c, 0.5)
        self.dims = dims
        self.alpha = float(alpha)

    def value_and_grads(self, p: np.ndarray, s: np.ndarray, need: str = "ps"):
        """``phi`` and its Hermitian gradients with respect to ``P`` and ``S``."""
        da, db = self.dims
        a = self.alpha
        x = self.c_half @ np.kron(p, s) @ self.c_half
        w, v = np.linalg.eigh(hermitize(x))
        w = np.clip(w, 0.0, None)
        top = w.max()
        if top <= 0.0:
            return -np.inf, None, None
        r = w / top
        if np.isinf(a):
            weights = (r >= 1.0 - 1e-12).astype(float)
            total = weights.sum()
            phi = np.log(top)
            powered = weights
        else:
            powered = r ** a
            total = powered.sum()
            phi = np.log(top) + np.log(total) / a
            weights = r ** (a - 1) if a != 1 else np.ones_like(r)
        # d phi = Tr(M dX) with M = X^{a-1} / Tr X^a
        m = (v * (weights / (top * total))) @ v.conj().T
        k = self.c_half @ m @ self.c_half
        k4 = k.reshape(da, db, da, db)
        gp = gs = None
        if "p" in need:
            # Tr_B[(I (x) S) K]
            gp = hermitize(np.einsum("ij,ajbi->ab", s, k4))
        if "s" in need:
            # Tr_A[(P (x) I) K]
            gs = hermitize(np.einsum("ac,cxay->xy", p, k4))
        return phi, gp, gs


def _power_fns(t: float):
    return (lambda x: x ** t), (lambda x: t * x ** (t - 1))


class StatePower:
    """A density operator parametrised by ``G``, raised to a fixed power."""

    def __init__(self, d: int, t: float):
        self.d = d
        self.t = t
        self.f, self.fprime = _power_fns(t)

    def unpack(self, x: np.ndarray):
        d = self.d
        g = (x[: d * d] + 1j * x[d * d:]).reshape(d, d)
        gg = g @ g.conj().T
        tr = np.trace(gg).real
        rho = hermitize(gg / tr)
        w, v = np.linalg.eigh(rho)
        w = np.clip(w, _EIG_FLOOR, None)
        powered = (v * self.f(w)) @ v.conj().T
        return rho, powered, (g, tr, w, v)

    def pullback(self, grad_power: np.ndarray, rho: np.ndarray, cache, extra=None) -> np.ndarray:
        """Gradient with respect to the flat real parameter vector.

        ``extra`` is an additional gradient taken directly with respect to rho.
        """
        g, tr, w, v = cache
        grad_rho = pullback_gradient(w, v, self.f, self.fprime, grad_power)
        if extra is not None:
            grad_rho = grad_rho + extra
        shift = np.trace(grad_rho @ rho).real
        gg = 2.0 * (grad_rho @ g - shift * g) / tr
        return np.concatenate([gg.real.ravel(), gg.imag.ravel()])


def pack(rho: np.ndarray) -> np.ndarray:
    """Parameters ``G`` with ``G G^dagger = rho`` (Hermitian square root)."""
    w, v = np.linalg.eigh(hermitize(rho))
    g = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return np.concatenate([g.real.ravel(), g.imag.ravel()])


def perturbed_start(d: int, rng: np.random.Generator, strength: float = 0.3) -> np.ndarray:
    """A full-rank state near ``I/d``."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    g = np.eye(d) + strength * z / np.sqrt(2 * d)
    gg = g @ g.conj().T
    return hermitize(gg / np.trace(gg).real)


def bfgs(fun, x0: np.ndarray, gtol: float, maxiter: int):
    """scipy BFGS with analytic gradient; returns ``(x, f, iterations)``."""
    res = minimize(fun, x0, jac=True, method="BFGS", options={"gtol": gtol, "maxiter": maxiter})
    return res.x, float(res.fun), int(res.nit)
