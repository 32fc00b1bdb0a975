"""Channel-level information quantities.

The sandwiched channel mutual information is a saddle-point problem: the
norm objective ``||Gamma^{1/2}(rho^{1/alpha} (x) sigma^{(1-alpha)/alpha})Gamma^{1/2}||_alpha``
is concave in rho and convex in sigma.  Both orders (max-min and min-max) are
solved as nested quasi-Newton problems, the outer gradient coming from the
inner optimum (Danskin).  Their difference is the reported minimax gap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _kernel
from .channels import CPMap, check_density
from .divergences import _check_alpha, sandwiched_renyi, sibson_log_trace, sibson_sigma_star
from .linalg import (
    ValidationError,
    fractional_power_psd,
    hermitize,
    kron,
    log2_psd,
    lp_norm,
    partial_trace,
)

INNER_GTOL = 1e-10
OUTER_GTOL = 1e-9
MAX_ROUNDS = 500
DEFAULT_RESTARTS = 5
MAX_INPUT_DIM = 16
# entropy smoothing for the min-max order, in bits
MU_SCHEDULE = (1e-2, 1e-4, 1e-6, 1e-8)


@dataclass(frozen=True)
class ChannelMIReport:
    value: float
    rho: np.ndarray
    sigma: np.ndarray | None
    iterations: int
    residual: float
    minmax_value: float | None = None
    restart_values: tuple[float, ...] = field(default=())

    @property
    def gap(self) -> float | None:
        if self.minmax_value is None:
            return None
        return abs(self.value - self.minmax_value)


def _require_channel(n: CPMap) -> None:
    if not isinstance(n, CPMap):
        raise ValidationError("expected a CPMap")
    if not n.trace_preserving:
        raise ValidationError("this quantity is defined for trace-preserving maps only")
    if n.d_in > MAX_INPUT_DIM or n.d_out > MAX_INPUT_DIM:
        raise ValidationError(f"dimensions above {MAX_INPUT_DIM} are out of range")


def omega(n: CPMap, rho) -> np.ndarray:
    """``rho^{1/2} Gamma^N rho^{1/2}`` (rho acting on the input copy A)."""
    r = np.kron(fractional_power_psd(rho, 0.5), np.eye(n.d_out))
    return hermitize(r @ n.choi @ r)


def sandwiched_objective(n: CPMap, rho, sigma, alpha: float) -> float:
    """``D~_alpha(omega_AB || rho (x) sigma)`` evaluated directly."""
    rho = check_density(rho, n.d_in, "rho")
    sigma = check_density(sigma, n.d_out, "sigma")
    return sandwiched_renyi(omega(n, rho), kron(rho, sigma), alpha)


def norm_objective(m: CPMap, rho, sigma, alpha: float) -> float:
    """``||Gamma^{1/2}(rho^{1/alpha} (x) sigma^{(1-alpha)/alpha})Gamma^{1/2}||_alpha``."""
    alpha = _check_alpha(alpha)
    c_half = fractional_power_psd(m.choi, 0.5)
    mid = np.kron(fractional_power_psd(rho, 1 / alpha), fractional_power_psd(sigma, (1 - alpha) / alpha))
    x = c_half @ mid @ c_half
    return lp_norm(np.linalg.eigvalsh(hermitize(x)), alpha)


def cb_objective(m: CPMap, rho, alpha: float) -> float:
    """``||(rho^{1/2alpha} (x) I) Gamma^M (rho^{1/2alpha} (x) I)||_alpha``."""
    r = np.kron(fractional_power_psd(rho, 1 / (2 * alpha)), np.eye(m.d_out))
    return lp_norm(np.linalg.eigvalsh(hermitize(r @ m.choi @ r)), alpha)


class SaddleSolver:
    """Nested solver for ``max_rho min_sigma`` and ``min_sigma max_rho``.

    Works on any CP map; values are returned in bits,
    ``alpha/(alpha-1) * log2`` of the norm objective.
    """

    def __init__(self, m: CPMap, alpha: float, inner_gtol: float = INNER_GTOL,
                 outer_gtol: float = OUTER_GTOL, maxiter: int = MAX_ROUNDS):
        self.m = m
        self.alpha = alpha
        self.obj = _kernel.NormObjective(m.choi, m.dims, alpha)
        self.rho_side = _kernel.StatePower(m.d_in, 1 / alpha)
        self.sig_side = _kernel.StatePower(m.d_out, (1 - alpha) / alpha)
        self.scale = alpha / ((alpha - 1) * math.log(2))
        self.inner_gtol = inner_gtol
        self.outer_gtol = outer_gtol
        self.maxiter = maxiter

    def _phi(self, xr, xs, need, mu=0.0):
        """Objective in bits plus ``mu H(rho)``; gradients in parameter space."""
        rho, p, cr = self.rho_side.unpack(xr)
        sigma, s, cs = self.sig_side.unpack(xs)
        phi, gp, gs = self.obj.value_and_grads(p, s, need)
        value = self.scale * phi
        extra = None
        if mu:
            w, v = cr[2], cr[3]
            value -= mu * float(np.sum(w * np.log2(w)))
            extra = mu * (v * -(np.log2(w) + 1 / math.log(2))) @ v.conj().T
        grad_r = self.rho_side.pullback(self.scale * gp, rho, cr, extra) if gp is not None else None
        grad_s = self.scale * self.sig_side.pullback(gs, sigma, cs) if gs is not None else None
        return value, grad_r, grad_s

    # -- inner problems --------------------------------------------------------

    def min_sigma(self, xr, xs0):
        def fun(xs):
            v, _, gs = self._phi(xr, xs, "s")
            return v, gs
        xs, v, _ = _kernel.bfgs(fun, xs0, self.inner_gtol, 4 * self.maxiter)
        return xs, v

    def max_rho(self, xs, xr0, mu=0.0):
        # the rho-maximiser can sit on a face (classical channels); warm starts
        # there stall because G G^dagger has zero gradient along empty columns
        xr0 = self._interior(self.rho_side, xr0)

        def fun(xr):
            v, gr, _ = self._phi(xr, xs, "p", mu)
            return -v, -gr
        xr, v, _ = _kernel.bfgs(fun, xr0, self.inner_gtol, 4 * self.maxiter)
        return xr, -v

    @staticmethod
    def _interior(side, x, weight=0.1):
        rho = side.unpack(x)[0]
        return _kernel.pack((1 - weight) * rho + weight * np.eye(side.d) / side.d)

    # -- outer problems --------------------------------------------------------

    def maxmin(self, rho0, sigma0=None):
        """Returns ``(value, rho, sigma, iterations)``."""
        state = {"xs": _kernel.pack(sigma0 if sigma0 is not None else np.eye(self.m.d_out) / self.m.d_out)}

        def fun(xr):
            xs, v = self.min_sigma(xr, state["xs"])
            state["xs"] = xs
            _, gr, _ = self._phi(xr, xs, "p")
            return -v, -gr

        xr, v, nit = _kernel.bfgs(fun, _kernel.pack(rho0), self.outer_gtol, self.maxiter)
        xs, v = self.min_sigma(xr, state["xs"])
        return v, self.rho_side.unpack(xr)[0], self.sig_side.unpack(xs)[0], nit

    def minmax(self, sigma0, rho0=None):
        """Returns ``(value, rho, sigma, iterations)``.

        ``sigma -> max_rho`` has kinks wherever the rho-maximiser is not unique
        (e.g. classical channels at the optimum), which stalls BFGS.  The outer
        problem is therefore solved for ``max_rho [phi + mu H(rho)]`` along
        ``MU_SCHEDULE``, each stage warm-starting the next; that bounds the
        smoothing error by ``mu log2 d``.  The returned value is the plain
        ``max_rho phi`` at the final sigma.
        """
        state = {"xr": _kernel.pack(rho0 if rho0 is not None else np.eye(self.m.d_in) / self.m.d_in)}
        xs = _kernel.pack(sigma0)
        nit = 0
        for mu in MU_SCHEDULE:
            def fun(xs_):
                xr, v = self.max_rho(xs_, state["xr"], mu)
                state["xr"] = xr
                _, _, gs = self._phi(xr, xs_, "s")
                return v, gs

            xs, _, k = _kernel.bfgs(fun, xs, self.outer_gtol, self.maxiter)
            nit += k
        xr, v = self.max_rho(xs, state["xr"])
        return v, self.rho_side.unpack(xr)[0], self.sig_side.unpack(xs)[0], nit


def _starts(d: int, restarts: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [np.eye(d) / d] + [_kernel.perturbed_start(d, rng) for _ in range(max(restarts, 1) - 1)]


def sandwiched_channel_mi(n: CPMap, alpha: float, seed: int = 0, restarts: int = 1,
                          check_minimax: bool = True, initial=None) -> ChannelMIReport:
    """``I~_alpha(N) = max_rho min_sigma D~_alpha(rho^{1/2} Gamma^N rho^{1/2} || rho (x) sigma)``.

    ``restarts`` counts the rho starts: ``I/d`` then seeded interior
    perturbations.  The reported maximiser is the one from ``I/d``.  With
    ``check_minimax`` the min-max order is solved as well and the residual is
    the gap between the two orders.  ``initial=(rho, sigma)`` warm-starts the
    first run.
    """
    _require_channel(n)
    alpha = _check_alpha(alpha)
    solver = SaddleSolver(n, alpha)
    starts = _starts(n.d_in, restarts, seed)
    sigma0 = None
    if initial is not None:
        starts[0], sigma0 = initial
    runs = [solver.maxmin(r0, sigma0) for r0 in starts]
    value, rho, sigma, nit = runs[0]
    restart_values = tuple(r[0] for r in runs)
    best = max(restart_values)
    residual = best - min(restart_values)
    minmax_value = None
    if check_minimax:
        cold = _kernel.perturbed_start(n.d_out, np.random.default_rng(seed + 1))
        minmax_value, _, _, nit2 = solver.minmax(cold)
        nit += nit2
        residual = max(residual, abs(best - minmax_value))
    return ChannelMIReport(max(best, 0.0), rho, sigma, nit, residual, minmax_value, restart_values)


def minimax_gap(n: CPMap, alpha: float, seed: int = 0) -> float:
    """``|max_rho min_sigma - min_sigma max_rho|`` with both orders started cold."""
    _require_channel(n)
    alpha = _check_alpha(alpha)
    solver = SaddleSolver(n, alpha)
    lo = solver.maxmin(np.eye(n.d_in) / n.d_in)[0]
    rng = np.random.default_rng(seed)
    hi = solver.minmax(_kernel.perturbed_start(n.d_out, rng))[0]
    return abs(hi - lo)


def cb_norm_solve(m: CPMap, alpha: float, restarts: int = 1, seed: int = 0):
    """``(||M||_{CB,1->alpha}, maximising rho)``."""
    if not isinstance(m, CPMap):
        raise ValidationError("expected a CPMap")
    alpha = float(alpha)
    if alpha < 1:
        raise ValidationError(f"CB norm needs alpha >= 1, got {alpha}")
    if alpha == 1:
        w, v = np.linalg.eigh(hermitize(partial_trace(m.choi, m.dims, 1)))
        rho = np.outer(v[:, -1], v[:, -1].conj())
        return float(w[-1]), rho
    obj = _kernel.NormObjective(m.choi, m.dims, alpha)
    side = _kernel.StatePower(m.d_in, 1 / alpha)
    s = np.eye(m.d_out)

    def fun(xr):
        rho, p, cache = side.unpack(xr)
        phi, gp, _ = obj.value_and_grads(p, s, "p")
        return -phi, -side.pullback(gp, rho, cache)

    best = None
    for r0 in _starts(m.d_in, restarts, seed):
        xr, v, _ = _kernel.bfgs(fun, _kernel.pack(r0), INNER_GTOL, 4 * MAX_ROUNDS)
        if best is None or -v > best[0]:
            best = (-v, side.unpack(xr)[0])
    return math.exp(best[0]), best[1]


def cb_norm(m: CPMap, alpha: float, restarts: int = 1, seed: int = 0) -> float:
    """Completely bounded ``1 -> alpha`` norm.

    ``max_rho ||(rho^{1/2alpha} (x) I) Gamma^M (rho^{1/2alpha} (x) I)||_alpha``;
    concave in rho, so ascent from ``I/d`` finds the maximum.  At
    ``alpha = 1`` this is ``max_rho Tr M(rho)``, the largest eigenvalue of
    ``Tr_B Gamma^M``.
    """
    return cb_norm_solve(m, alpha, restarts, seed)[0]


# -- von Neumann and traditional Renyi -------------------------------------------

def _entropy_grad(y: np.ndarray) -> np.ndarray:
    """``-(log2 y + 1/ln 2)`` on the support of ``y``: gradient of ``H(y)``."""
    return -(log2_psd(y) + fractional_power_psd(y, 0.0) / math.log(2))


def _ea_objective(n: CPMap):
    c_half = fractional_power_psd(n.choi, 0.5)
    d_in, d_out = n.dims
    side = _kernel.StatePower(d_in, 1.0)
    eye_b = np.eye(d_out)

    def info(rho):
        y = hermitize(c_half @ np.kron(rho, eye_b) @ c_half)
        w_b = hermitize(partial_trace(np.kron(rho, eye_b) @ n.choi, n.dims, 0))
        return y, w_b

    def fun(x):
        rho, _, cache = side.unpack(x)
        y, w_b = info(rho)
        value = _h(rho) + _h(w_b) - _h(y)
        g_b = partial_trace(n.choi @ np.kron(np.eye(d_in), _entropy_grad(w_b)), n.dims, 1)
        g_y = partial_trace(c_half @ _entropy_grad(y) @ c_half, n.dims, 1)
        grad = hermitize(_entropy_grad(rho) + g_b - g_y)
        return -value, -side.pullback(grad, rho, cache)

    return fun, side


def _h(y: np.ndarray) -> float:
    w = np.linalg.eigvalsh(hermitize(y))
    w = w[w > 1e-300]
    return float(-np.sum(w * np.log2(w)))


def ea_capacity(n: CPMap, restarts: int = 1, seed: int = 0) -> ChannelMIReport:
    """Entanglement-assisted capacity ``max_rho I(A;B)_omega`` in bits."""
    _require_channel(n)
    fun, side = _ea_objective(n)
    runs = []
    for r0 in _starts(n.d_in, restarts, seed):
        x, v, nit = _kernel.bfgs(fun, _kernel.pack(r0), 1e-10, 4 * MAX_ROUNDS)
        runs.append((-v, side.unpack(x)[0], nit))
    values = [r[0] for r in runs]
    best = max(values)
    rho = runs[0][1]
    omega_b = partial_trace(omega(n, rho), n.dims, 0)
    return ChannelMIReport(max(best, 0.0), rho, hermitize(omega_b), runs[0][2], best - min(values),
                           restart_values=tuple(values))


def renyi_state_mi(n: CPMap, rho, alpha: float) -> float:
    """``I_alpha(A;B)`` of ``omega_AB`` in closed (Sibson) form."""
    return alpha / (alpha - 1) * sibson_log_trace(omega(n, rho), n.dims, alpha)


def renyi_channel_mi(n: CPMap, alpha: float, restarts: int = DEFAULT_RESTARTS, seed: int = 0) -> ChannelMIReport:
    """Traditional Renyi channel mutual information via the Sibson closed form.

    Not known to be concave in rho, so the maximum is taken over ``restarts``
    BFGS runs (finite-difference gradients).
    """
    _require_channel(n)
    alpha = _check_alpha(alpha)
    d = n.d_in
    side = _kernel.StatePower(d, 1.0)

    def fun(x):
        rho = side.unpack(x)[0]
        return -renyi_state_mi(n, rho, alpha)

    runs = []
    for r0 in _starts(d, restarts, seed):
        res = minimize(fun, _kernel.pack(r0), method="BFGS", options={"gtol": 1e-9, "maxiter": 4 * MAX_ROUNDS})
        runs.append((-float(res.fun), side.unpack(res.x)[0], int(res.nit)))
    values = [r[0] for r in runs]
    k = int(np.argmax(values))
    value, rho, nit = runs[k]
    sigma = sibson_sigma_star(omega(n, rho), n.dims, alpha)
    return ChannelMIReport(max(value, 0.0), rho, sigma, nit, value - min(values), restart_values=tuple(values))
