import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import fractional_matrix_power, logm
from scipy.optimize import minimize

from renyi_channels import channels as ch
from renyi_channels.divergences import (
    binary_divergence,
    mutual_information,
    relative_entropy,
    renyi_mi_explicit,
    sandwiched_mi_state,
    sandwiched_renyi,
    sandwiched_renyi_norm_form,
    sibson_log_trace,
    sibson_sigma_star,
    traditional_renyi,
)
from renyi_channels.linalg import ValidationError, kron, partial_trace, random_density, random_unitary

seeds = st.integers(0, 2**32 - 1)
BELL = np.outer([1, 0, 0, 1], [1, 0, 0, 1]) / 2


def _mpow(a, t):
    return fractional_matrix_power(a, t)


def oracle_sandwiched(rho, sigma, alpha):
    # full-rank inputs only
    s = _mpow(sigma, (1 - alpha) / (2 * alpha))
    return math.log2(np.trace(_mpow(s @ rho @ s, alpha)).real) / (alpha - 1)


def oracle_traditional(rho, sigma, alpha):
    return math.log2(np.trace(_mpow(rho, alpha) @ _mpow(sigma, 1 - alpha)).real) / (alpha - 1)


def bloch(v):
    r = np.asarray(v, float)
    n = np.linalg.norm(r)
    if n > 0:
        r = r * math.tanh(n) / n
    return 0.5 * (np.eye(2) + r[0] * ch.pauli("X") + r[1] * ch.pauli("Y") + r[2] * ch.pauli("Z"))


def brute_min(f, starts=5, seed=0):
    rng = np.random.default_rng(seed)
    best = math.inf
    for k in range(starts):
        v0 = np.zeros(3) if k == 0 else rng.normal(scale=0.7, size=3)
        res = minimize(lambda v: f(bloch(v)), v0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000, "maxfev": 40000})
        best = min(best, res.fun)
    return best


COMMUTING = (np.diag([0.5, 0.5]), np.diag([0.25, 0.75]))


def test_sandwiched_equal_states_zero():
    rho = random_density(3, np.random.default_rng(0))
    for a in (1.5, 2, 7):
        assert abs(sandwiched_renyi(rho, rho, a)) < 1e-12


def test_sandwiched_commuting_pair():
    assert abs(sandwiched_renyi(*COMMUTING, 2) - math.log2(4 / 3)) < 1e-12


def test_sandwiched_support_violation_is_inf():
    assert sandwiched_renyi(np.diag([0.0, 1.0]), np.diag([1.0, 0.0]), 2) == math.inf
    assert traditional_renyi(np.diag([0.0, 1.0]), np.diag([1.0, 0.0]), 2) == math.inf
    assert relative_entropy(np.diag([0.0, 1.0]), np.diag([1.0, 0.0])) == math.inf


def test_support_leak_below_threshold_is_finite():
    sigma = np.diag([1.0, 0.0])
    rho = np.diag([1 - 1e-11, 1e-11])
    assert math.isfinite(sandwiched_renyi(rho, sigma, 2))


def test_rank_deficient_sigma_on_support():
    # rho inside supp(sigma): the value is computed on the support
    rho = np.diag([0.3, 0.7, 0.0])
    sigma = np.diag([0.5, 0.5, 0.0])
    expected = math.log2(0.3**2 / 0.5 + 0.7**2 / 0.5)
    assert abs(sandwiched_renyi(rho, sigma, 2) - expected) < 1e-12


@pytest.mark.parametrize("fn", [sandwiched_renyi, traditional_renyi])
def test_alpha_domain(fn):
    with pytest.raises(ValidationError):
        fn(np.eye(2) / 2, np.eye(2) / 2, 1.0)
    with pytest.raises(ValidationError):
        fn(np.eye(2) / 2, np.eye(3) / 3, 2.0)


def test_rejects_non_state_sigma():
    with pytest.raises(ValidationError):
        sandwiched_renyi(np.eye(2) / 2, np.eye(2), 2)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 4), st.floats(1.05, 6))
def test_sandwiched_matches_oracle(seed, d, alpha):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(d, rng), random_density(d, rng)
    assert abs(sandwiched_renyi(rho, sigma, alpha) - oracle_sandwiched(rho, sigma, alpha)) < 1e-8
    assert abs(sandwiched_renyi_norm_form(rho, sigma, alpha) - sandwiched_renyi(rho, sigma, alpha)) < 1e-9
    assert abs(traditional_renyi(rho, sigma, alpha) - oracle_traditional(rho, sigma, alpha)) < 1e-8


def test_traditional_examples():
    rho = random_density(3, np.random.default_rng(1))
    assert abs(traditional_renyi(rho, rho, 2)) < 1e-12
    assert abs(traditional_renyi(*COMMUTING, 2) - math.log2(4 / 3)) < 1e-12
    rng = np.random.default_rng(2)
    r, s = random_density(2, rng), random_density(2, rng)
    assert traditional_renyi(r, s, 2) >= sandwiched_renyi(r, s, 2) - 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([1.2, 1.5, 2.0, 3.0]))
def test_data_processing(seed, alpha):
    rng = np.random.default_rng(seed)
    lam = ch.random_channel(2, 2, int(rng.integers(1, 5)), rng)
    rho, sigma = random_density(2, rng), random_density(2, rng)
    assert sandwiched_renyi(lam(rho), lam(sigma), alpha) <= sandwiched_renyi(rho, sigma, alpha) + 1e-8


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_monotone_in_alpha(seed):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(3, rng), random_density(3, rng)
    vals = [sandwiched_renyi(rho, sigma, a) for a in (1.1, 1.5, 2, 4, 10)]
    assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))


def test_limit_to_relative_entropy():
    rng = np.random.default_rng(3)
    rho, sigma = random_density(2, rng), random_density(2, rng)
    d = relative_entropy(rho, sigma)
    gaps = [abs(sandwiched_renyi(rho, sigma, 1 + h) - d) for h in (1e-2, 1e-3, 1e-4)]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-3


def test_relative_entropy_oracle():
    rng = np.random.default_rng(4)
    rho, sigma = random_density(3, rng), random_density(3, rng)
    ref = np.trace(rho @ (logm(rho) - logm(sigma))).real / math.log(2)
    assert abs(relative_entropy(rho, sigma) - ref) < 1e-10


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    rho, sigma, u = random_density(3, rng), random_density(3, rng), random_unitary(3, rng)
    for fn in (sandwiched_renyi, traditional_renyi):
        a = fn(rho, sigma, 2.5)
        b = fn(u @ rho @ u.conj().T, u @ sigma @ u.conj().T, 2.5)
        assert abs(a - b) < 1e-10


def test_mutual_information_examples():
    rng = np.random.default_rng(5)
    assert abs(mutual_information(kron(random_density(2, rng), random_density(2, rng)), (2, 2))) < 1e-12
    assert abs(mutual_information(BELL, (2, 2)) - 2) < 1e-12
    assert abs(mutual_information(np.diag([0.5, 0, 0, 0.5]), (2, 2)) - 1) < 1e-12


def test_sibson_star_examples():
    rng = np.random.default_rng(6)
    ra, rb = random_density(2, rng), random_density(3, rng)
    assert np.abs(sibson_sigma_star(kron(ra, rb), (2, 3), 2) - rb).max() < 1e-10
    assert np.abs(sibson_sigma_star(BELL, (2, 2), 2) - np.eye(2) / 2).max() < 1e-12


@pytest.mark.parametrize("alpha", [1.3, 2.0, 3.0])
def test_sibson_identity(alpha):
    rng = np.random.default_rng(7)
    rho = random_density(4, rng)
    rho_a = partial_trace(rho, (2, 2), 1)
    star = sibson_sigma_star(rho, (2, 2), alpha)
    assert abs(np.trace(star) - 1) < 1e-12
    base = oracle_traditional(rho, kron(rho_a, star), alpha)
    for _ in range(20):
        s = random_density(2, rng)
        lhs = oracle_traditional(rho, kron(rho_a, s), alpha)
        assert abs(lhs - oracle_traditional(star, s, alpha) - base) < 1e-8


def test_sibson_alpha_domain():
    with pytest.raises(ValidationError):
        sibson_sigma_star(BELL, (2, 2), 0.5)


def test_explicit_mi_examples():
    rng = np.random.default_rng(8)
    assert abs(renyi_mi_explicit(kron(random_density(2, rng), random_density(2, rng)), (2, 2), 2)) < 1e-10
    assert abs(renyi_mi_explicit(BELL, (2, 2), 2) - 2) < 1e-10


@pytest.mark.parametrize("seed", range(3))
def test_explicit_mi_is_the_minimum(seed):
    rng = np.random.default_rng(100 + seed)
    rho = random_density(4, rng)
    rho_a = partial_trace(rho, (2, 2), 1)
    brute = brute_min(lambda s: oracle_traditional(rho, np.kron(rho_a, s), 1.5))
    assert abs(renyi_mi_explicit(rho, (2, 2), 1.5) - brute) < 1e-6


def test_lemma6_derivative():
    rng = np.random.default_rng(9)
    h = 1e-4
    for _ in range(5):
        rho = random_density(4, rng)
        deriv = (sibson_log_trace(rho, (2, 2), 1 + 2 * h) - sibson_log_trace(rho, (2, 2), 1)) / (2 * h)
        assert abs(deriv - mutual_information(rho, (2, 2))) < 1e-3


def test_sandwiched_mi_state_examples():
    rng = np.random.default_rng(10)
    rb = random_density(2, rng)
    value, sigma = sandwiched_mi_state(kron(random_density(2, rng), rb), (2, 2), 2)
    assert abs(value) < 1e-8
    assert np.abs(sigma - rb).max() < 1e-5
    value, sigma = sandwiched_mi_state(BELL, (2, 2), 2)
    assert abs(value - 2) < 1e-8
    assert np.abs(sigma - np.eye(2) / 2).max() < 1e-5


@pytest.mark.parametrize("seed", range(3))
def test_sandwiched_mi_state_vs_brute_force(seed):
    rng = np.random.default_rng(200 + seed)
    rho = random_density(4, rng)
    rho_a = partial_trace(rho, (2, 2), 1)
    value, _ = sandwiched_mi_state(rho, (2, 2), 2.0)
    brute = brute_min(lambda s: oracle_sandwiched(rho, np.kron(rho_a, s), 2.0))
    assert abs(value - brute) < 1e-7
    assert value <= renyi_mi_explicit(rho, (2, 2), 2.0) + 1e-10


def test_sandwiched_mi_state_restart_stable():
    rho = random_density(4, np.random.default_rng(11))
    values = [sandwiched_mi_state(rho, (2, 2), 3.0, seed=s)[0] for s in range(5)]
    assert max(values) - min(values) < 1e-7


def test_sandwiched_mi_state_rank_deficient_marginal():
    psi = np.array([1, 0, 0, 0.0])
    value, _ = sandwiched_mi_state(np.outer(psi, psi), (2, 2), 2)
    assert abs(value) < 1e-8


def test_binary_divergence_examples():
    assert binary_divergence("kl", 0.3, 0.3) == 0
    n, r = 4, 0.75
    assert abs(binary_divergence("kl", 0, 1 - 2 ** (-n * r)) - n * r) < 1e-12
    assert abs(binary_divergence("traditional", 0.5, 0.25, 2) - math.log2(4 / 3)) < 1e-12
    assert abs(binary_divergence("sandwiched", 0.5, 0.25, 2) - sandwiched_renyi(*COMMUTING, 2)) < 1e-12
    assert binary_divergence("kl", 0.5, 1.0) == math.inf


def test_binary_divergence_errors():
    with pytest.raises(ValidationError):
        binary_divergence("kl", 1.2, 0.5)
    with pytest.raises(ValidationError):
        binary_divergence("sandwiched", 0.2, 0.5)
    with pytest.raises(ValidationError):
        binary_divergence("hellinger", 0.2, 0.5)
