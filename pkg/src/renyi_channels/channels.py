"""Completely positive maps in Kraus form, with cached Choi matrices.

The Choi matrix uses the unnormalised vector ``|Gamma> = sum_i |i>|i>``, so
for a channel ``Tr Choi = d_in`` and ``Tr_B Choi = I``.  Subsystem order is
always input (A) first, output (B) second.
"""
from __future__ import annotations

import json
from typing import Iterable, Mapping, Sequence

import numpy as np

from .linalg import (
    ValidationError,
    check_hermitian,
    fractional_power_psd,
    hermitize,
    partial_trace,
    permute_subsystems,
    random_isometry,
)

TP_ATOL = 1e-10
STATE_ATOL = 1e-10


def check_density(rho, dim: int | None = None, name: str = "state") -> np.ndarray:
    """Validate a density matrix (PSD to -1e-10, unit trace to 1e-10)."""
    rho = check_hermitian(rho)
    if dim is not None and rho.shape[0] != dim:
        raise ValidationError(f"{name} has dimension {rho.shape[0]}, expected {dim}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > STATE_ATOL:
        raise ValidationError(f"{name} must have unit trace, got {tr:.12g}")
    w = np.linalg.eigvalsh(hermitize(rho))
    if w.min() < -STATE_ATOL:
        raise ValidationError(f"{name} is not positive semidefinite (eigenvalue {w.min():.3g})")
    return rho


def check_bipartite(rho_ab, dims: Sequence[int]) -> tuple[np.ndarray, tuple[int, int]]:
    dims = tuple(int(d) for d in dims)
    if len(dims) != 2 or min(dims) <= 0:
        raise ValidationError(f"bipartite dims must be two positive integers, got {dims}")
    rho_ab = check_density(rho_ab, dims[0] * dims[1], "bipartite state")
    return rho_ab, dims


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


class CPMap:
    """A completely positive map ``X -> sum_k K_k X K_k^dagger``.

    Immutable.  ``trace_preserving=None`` detects the property; ``True``
    enforces it and raises if the Kraus operators are not complete.
    """

    __slots__ = ("kraus", "d_in", "d_out", "trace_preserving", "choi", "label")

    def __init__(self, kraus: Iterable, trace_preserving: bool | None = None, label: str = "kraus"):
        ops = [np.asarray(k, dtype=complex) for k in kraus]
        if not ops:
            raise ValidationError("a CP map needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise ValidationError("Kraus operators must be matrices of a common shape")
        d_out, d_in = shape
        completeness = sum(k.conj().T @ k for k in ops)
        tp = np.abs(completeness - np.eye(d_in)).max() <= TP_ATOL
        if trace_preserving and not tp:
            raise ValidationError("Kraus operators do not satisfy sum K^dagger K = I")
        object.__setattr__(self, "kraus", tuple(_freeze(k) for k in ops))
        object.__setattr__(self, "d_in", d_in)
        object.__setattr__(self, "d_out", d_out)
        object.__setattr__(self, "trace_preserving", bool(tp) if trace_preserving is None else bool(trace_preserving))
        object.__setattr__(self, "choi", _freeze(_choi_from_kraus(self.kraus, d_in)))
        object.__setattr__(self, "label", label)

    def __setattr__(self, name, value):
        raise AttributeError("CPMap is immutable")

    def __reduce__(self):
        return (CPMap, ([np.array(k) for k in self.kraus], self.trace_preserving, self.label))

    def __repr__(self) -> str:
        return f"CPMap({self.label}, d_in={self.d_in}, d_out={self.d_out}, kraus_rank={len(self.kraus)})"

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.d_in, self.d_out)


def _choi_from_kraus(kraus: Sequence[np.ndarray], d_in: int) -> np.ndarray:
    # (id (x) K)|Gamma> is the row-major vectorisation of K^T
    vecs = [k.T.reshape(-1) for k in kraus]
    return hermitize(sum(np.outer(v, v.conj()) for v in vecs))


def choi_of(m: CPMap) -> np.ndarray:
    return np.array(m.choi)


def apply(m: CPMap, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (m.d_in, m.d_in):
        raise ValidationError(f"input has shape {rho.shape}, map expects dimension {m.d_in}")
    return hermitize(sum(k @ rho @ k.conj().T for k in m.kraus))


def apply_via_choi(m: CPMap, rho) -> np.ndarray:
    """``Tr_A{(rho^T (x) I) Choi}``; an independent route to :func:`apply`."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (m.d_in, m.d_in):
        raise ValidationError(f"input has shape {rho.shape}, map expects dimension {m.d_in}")
    big = np.kron(rho.T, np.eye(m.d_out)) @ m.choi
    return hermitize(partial_trace(big, m.dims, 0))


def tensor(m1: CPMap, m2: CPMap) -> CPMap:
    kraus = [np.kron(k, l) for k in m1.kraus for l in m2.kraus]
    tp = m1.trace_preserving and m2.trace_preserving
    return CPMap(kraus, trace_preserving=tp or None, label=f"{m1.label}*{m2.label}")


def tensor_power(m: CPMap, n: int) -> CPMap:
    out = m
    for _ in range(n - 1):
        out = tensor(out, m)
    return out


def compose(outer: CPMap, inner: CPMap) -> CPMap:
    """``outer o inner``."""
    if outer.d_in != inner.d_out:
        raise ValidationError("dimension mismatch in composition")
    kraus = [a @ b for a in outer.kraus for b in inner.kraus]
    return CPMap(kraus, label=f"{outer.label}o{inner.label}")


def sandwich_map(x) -> CPMap:
    """The CP map ``Y -> x^{1/2} Y x^{1/2}`` for PSD ``x``."""
    return CPMap([fractional_power_psd(x, 0.5)], trace_preserving=False, label="sandwich")


def product_choi(m1: CPMap, m2: CPMap) -> np.ndarray:
    """Choi of ``m1 (x) m2`` assembled from the factor Chois (order A1 A2 B1 B2)."""
    big = np.kron(m1.choi, m2.choi)  # A1 B1 A2 B2
    return permute_subsystems(big, (m1.d_in, m1.d_out, m2.d_in, m2.d_out), (0, 2, 1, 3))


# -- catalog -------------------------------------------------------------------

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(name: str) -> np.ndarray:
    return _PAULI[name].copy()


def _check_prob(value, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"parameter {name}={value} must lie in [0, 1]")
    return value


def _check_dim(d) -> int:
    if isinstance(d, bool) or int(d) != d or int(d) < 1:
        raise ValidationError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def weyl_operators(d: int) -> list[np.ndarray]:
    """Generalised Paulis ``X^a Z^b``, ``(a, b)`` in row-major order."""
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            for a in range(d) for b in range(d)]


def identity(dim: int = 2) -> CPMap:
    dim = _check_dim(dim)
    return CPMap([np.eye(dim)], trace_preserving=True, label=f"identity(dim={dim})")


def depolarizing(p: float, dim: int = 2) -> CPMap:
    """``rho -> (1-p) rho + p Tr(rho) I/d``."""
    p = _check_prob(p, "p")
    dim = _check_dim(dim)
    ops = weyl_operators(dim)
    w = np.full(len(ops), p / dim**2)
    w[0] += 1.0 - p
    kraus = [np.sqrt(wk) * u for wk, u in zip(w, ops) if wk > 0]
    return CPMap(kraus, trace_preserving=True, label=f"depolarizing(p={p:g}, dim={dim})")


def dephasing(p: float) -> CPMap:
    """Qubit dephasing: coherences scaled by ``1 - p``."""
    p = _check_prob(p, "p")
    kraus = [np.sqrt(1 - p / 2) * _PAULI["I"], np.sqrt(p / 2) * _PAULI["Z"]]
    return CPMap(kraus, trace_preserving=True, label=f"dephasing(p={p:g})")


def amplitude_damping(gamma: float) -> CPMap:
    gamma = _check_prob(gamma, "gamma")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]])
    return CPMap([k0, k1], trace_preserving=True, label=f"amplitude_damping(gamma={gamma:g})")


def erasure(p: float, dim: int = 2) -> CPMap:
    """Erasure to a flag state ``|d>`` with probability ``p`` (output dim ``d+1``)."""
    p = _check_prob(p, "p")
    dim = _check_dim(dim)
    keep = np.zeros((dim + 1, dim))
    keep[:dim, :dim] = np.sqrt(1 - p) * np.eye(dim)
    kraus = [keep]
    for i in range(dim):
        k = np.zeros((dim + 1, dim))
        k[dim, i] = np.sqrt(p)
        kraus.append(k)
    return CPMap(kraus, trace_preserving=True, label=f"erasure(p={p:g}, dim={dim})")


def pauli_channel(probs: Sequence[float]) -> CPMap:
    """Qubit Pauli channel with probabilities for (I, X, Y, Z)."""
    probs = [float(q) for q in probs]
    if len(probs) != 4 or min(probs) < 0 or abs(sum(probs) - 1) > 1e-12:
        raise ValidationError("Pauli channel needs four probabilities summing to one")
    kraus = [np.sqrt(q) * _PAULI[k] for q, k in zip(probs, "IXYZ") if q > 0]
    return CPMap(kraus, trace_preserving=True, label="pauli({})".format(",".join(f"{q:g}" for q in probs)))


def random_channel(d_in: int, d_out: int, rank: int, rng: np.random.Generator) -> CPMap:
    """Channel from a Haar-random isometry ``C^{d_in} -> C^{d_out} (x) C^{rank}``."""
    v = random_isometry(d_in, d_out * rank, rng).reshape(d_out, rank, d_in)
    kraus = [v[:, k, :] for k in range(rank)]
    return CPMap(kraus, trace_preserving=True, label=f"random({d_in}->{d_out}, rank={rank})")


def random_cp_map(d_in: int, d_out: int, rank: int, rng: np.random.Generator) -> CPMap:
    """Generally non-trace-preserving map with Ginibre Kraus operators."""
    kraus = [(rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))) / np.sqrt(2 * d_in)
             for _ in range(rank)]
    return CPMap(kraus, trace_preserving=False, label=f"random_cp({d_in}->{d_out}, rank={rank})")


# -- JSON channel specs --------------------------------------------------------

def _field(spec: Mapping, name: str, default=None):
    if name not in spec:
        if default is None:
            raise ValidationError(f"channel spec is missing field '{name}'")
        return default
    return spec[name]


def _number(spec: Mapping, name: str, default=None) -> float:
    value = _field(spec, name, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"channel spec field '{name}' must be a number, got {value!r}")
    return float(value)


def _integer(spec: Mapping, name: str, default=None) -> int:
    value = _field(spec, name, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValidationError(f"channel spec field '{name}' must be a positive integer, got {value!r}")
    return value


def _parse_matrix(raw, d_out: int, d_in: int, index: int) -> np.ndarray:
    where = f"field 'matrices[{index}]'"
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"channel spec {where} must hold [re, im] pairs") from None
    if arr.ndim == 2 and arr.shape == (d_out * d_in, 2):
        arr = arr.reshape(d_out, d_in, 2)
    if arr.shape != (d_out, d_in, 2):
        raise ValidationError(f"channel spec {where} must be {d_out}x{d_in} [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_from_spec(spec) -> CPMap:
    """Build a map from a JSON object (or JSON text).

    ``{"kind": "depolarizing", "p": 0.25, "dim": 2}`` or
    ``{"kind": "kraus", "d_in": 2, "d_out": 2, "matrices": [...]}`` where each
    matrix is ``d_out`` rows of ``d_in`` ``[re, im]`` pairs (a flat row-major
    list of pairs is accepted too).
    """
    if isinstance(spec, (str, bytes)):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"channel spec is not valid JSON: {exc}") from None
    if not isinstance(spec, Mapping):
        raise ValidationError("channel spec must be a JSON object")
    kind = _field(spec, "kind")
    if kind == "identity":
        return identity(_integer(spec, "dim", 2))
    if kind == "depolarizing":
        return depolarizing(_number(spec, "p"), _integer(spec, "dim", 2))
    if kind == "dephasing":
        return dephasing(_number(spec, "p"))
    if kind == "amplitude_damping":
        return amplitude_damping(_number(spec, "gamma"))
    if kind == "erasure":
        return erasure(_number(spec, "p"), _integer(spec, "dim", 2))
    if kind == "pauli":
        probs = _field(spec, "probs")
        if not isinstance(probs, list):
            raise ValidationError("channel spec field 'probs' must be a list of four numbers")
        return pauli_channel(probs)
    if kind == "kraus":
        d_in = _integer(spec, "d_in")
        d_out = _integer(spec, "d_out")
        mats = _field(spec, "matrices")
        if not isinstance(mats, list) or not mats:
            raise ValidationError("channel spec field 'matrices' must be a non-empty list")
        kraus = [_parse_matrix(m, d_out, d_in, i) for i, m in enumerate(mats)]
        return CPMap(kraus, label="kraus")
    raise ValidationError(f"channel spec field 'kind' has unknown value {kind!r}")
