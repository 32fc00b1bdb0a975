"""Dense Hermitian linear algebra on small matrices.

Everything here works on plain ``numpy`` arrays.  Fractional and negative
powers are support-restricted: eigenvalues at or below the support cutoff
are mapped to zero whatever the exponent.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

HERMITIAN_ATOL = 1e-12
PSD_ATOL = 1e-10
SUPPORT_RTOL = 1e-10


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _as_square(x, name="matrix") -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {x.shape}")
    return x


def check_hermitian(h, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    h = _as_square(h, "Hermitian operator")
    dev = np.abs(h - h.conj().T).max() if h.size else 0.0
    if dev > atol:
        raise ValidationError(f"operator is not Hermitian (max deviation {dev:.3g})")
    return h


def hermitize(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.conj().T)


def _eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # LAPACK zheevd is deterministic for identical input bits
    return np.linalg.eigh(hermitize(h))


def eig_hermitian(h) -> SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    h = check_hermitian(h)
    w, v = _eigh(h)
    return SpectralDecomposition(w, v)


def support_cutoff(eigenvalues: np.ndarray) -> float:
    top = float(eigenvalues.max()) if eigenvalues.size else 0.0
    return SUPPORT_RTOL * max(top, 1.0)


def _psd_eigh(a, name="operator") -> tuple[np.ndarray, np.ndarray]:
    a = check_hermitian(a)
    w, v = _eigh(a)
    if w.size and w.min() < -PSD_ATOL:
        raise ValidationError(f"{name} is not positive semidefinite (eigenvalue {w.min():.3g})")
    return w, v


def apply_psd_function(w: np.ndarray, v: np.ndarray, f) -> np.ndarray:
    """``V f(w) V^dagger`` with ``f`` applied only on the numerical support."""
    keep = w > support_cutoff(w)
    fw = np.zeros_like(w)
    fw[keep] = f(w[keep])
    return (v * fw) @ v.conj().T


def fractional_power_psd(a, t: float) -> np.ndarray:
    """Support-restricted power ``a**t`` of a PSD matrix."""
    w, v = _psd_eigh(a)
    return apply_psd_function(w, v, lambda x: x ** t)


def support_projector(a) -> np.ndarray:
    w, v = _psd_eigh(a)
    return apply_psd_function(w, v, np.ones_like)


def log2_psd(a) -> np.ndarray:
    """Support-restricted binary logarithm of a PSD matrix."""
    w, v = _psd_eigh(a)
    return apply_psd_function(w, v, np.log2)


def schatten_norm(x, alpha: float) -> float:
    """Schatten ``alpha``-norm, i.e. the l_alpha norm of the singular values."""
    if not alpha >= 1:
        raise ValidationError(f"Schatten norm needs alpha >= 1, got {alpha}")
    s = np.linalg.svd(np.asarray(x, dtype=complex), compute_uv=False)
    return lp_norm(s, alpha)


def lp_norm(values: np.ndarray, alpha: float) -> float:
    """Overflow-safe ``(sum |v|**alpha)**(1/alpha)``."""
    s = np.abs(np.asarray(values, dtype=float))
    top = s.max() if s.size else 0.0
    if top == 0.0:
        return 0.0
    if np.isinf(alpha):
        return float(top)
    return float(top * np.sum((s / top) ** alpha) ** (1.0 / alpha))


def kron(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def _check_dims(x: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d <= 0 for d in dims):
        raise ValidationError(f"subsystem dimensions must be positive, got {dims}")
    if x.ndim != 2 or x.shape != (int(np.prod(dims)),) * 2:
        raise ValidationError(f"matrix of shape {x.shape} does not match subsystem dims {dims}")
    return dims


def partial_trace(x, dims: Sequence[int], traced) -> np.ndarray:
    """Trace out the subsystem(s) ``traced`` (indices into ``dims``).

    ``traced`` may be an int, a sequence of ints, or ``"A"``/``"B"`` for a
    bipartite operator.
    """
    x = np.asarray(x, dtype=complex)
    dims = _check_dims(x, dims)
    if isinstance(traced, str):
        traced = {"A": 0, "B": 1}[traced.upper()]
    traced = sorted({int(traced)} if np.isscalar(traced) else {int(i) for i in traced})
    n = len(dims)
    if any(i < 0 or i >= n for i in traced):
        raise ValidationError(f"subsystem index out of range for dims {dims}")
    keep = [i for i in range(n) if i not in traced]
    t = x.reshape(dims + dims)
    row = list(range(n))
    col = [n + i for i in range(n)]
    for i in traced:
        col[i] = row[i]
    out_idx = [row[i] for i in keep] + [col[i] for i in keep]
    out = np.einsum(t, row + col, out_idx)
    d = int(np.prod([dims[i] for i in keep]))
    return out.reshape(d, d)


def permute_subsystems(x, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: output factor ``k`` is input factor ``perm[k]``."""
    x = np.asarray(x, dtype=complex)
    dims = _check_dims(x, dims)
    perm = [int(p) for p in perm]
    n = len(dims)
    if sorted(perm) != list(range(n)):
        raise ValidationError(f"{perm} is not a permutation of {n} subsystems")
    t = x.reshape(dims + dims).transpose(perm + [n + p for p in perm])
    d = x.shape[0]
    return t.reshape(d, d)


def trace_distance(a, b) -> float:
    w = np.linalg.eigvalsh(hermitize(np.asarray(a) - np.asarray(b)))
    return 0.5 * float(np.abs(w).sum())


# -- random objects ------------------------------------------------------------

def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return hermitize(g)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_isometry(d_in: int, d_out: int, rng: np.random.Generator) -> np.ndarray:
    if d_out < d_in:
        raise ValidationError("isometry needs d_out >= d_in")
    return random_unitary(d_out, rng)[:, :d_in]


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt random density matrix (induced measure for ``rank < d``)."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)


def random_psd(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return hermitize(g @ g.conj().T)


# -- Frechet derivatives -------------------------------------------------------

def divided_differences(w: np.ndarray, f, fprime) -> np.ndarray:
    """First divided-difference matrix of ``f`` at the eigenvalues ``w``."""
    fw = f(w)
    dw = w[:, None] - w[None, :]
    df = fw[:, None] - fw[None, :]
    scale = max(float(np.abs(w).max()), 1e-300)
    close = np.abs(dw) <= 1e-9 * scale
    mid = 0.5 * (w[:, None] + w[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(close, fprime(mid), df / np.where(close, 1.0, dw))
    return out


def pullback_gradient(w: np.ndarray, v: np.ndarray, f, fprime, grad_f: np.ndarray) -> np.ndarray:
    """Gradient of ``X -> phi(f(X))`` given the gradient of ``phi`` at ``f(X)``.

    ``w, v`` diagonalise ``X``; ``grad_f`` is Hermitian with
    ``d phi = Tr(grad_f d f(X))``.  Uses the Daleckii-Krein formula.
    """
    lam = divided_differences(w, f, fprime)
    g = v.conj().T @ grad_f @ v
    return hermitize(v @ (lam * g) @ v.conj().T)
