"""Acceptance criteria, each at its stated size and tolerance.

One PASS/FAIL line per criterion is collected and printed in the pytest
terminal summary (also printed directly when run as a script).
"""
import subprocess
import sys

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from renyi_channels import channels as ch
from renyi_channels import verification as v
from renyi_channels.channel_info import ea_capacity, sandwiched_channel_mi
from renyi_channels.converse import RenyiProfile, strong_converse_exponent


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_01_sibson_identity():
    r = v.sibson_identity(seed=1, n_states=100, n_sigma=10, alphas=(1.3, 2.0, 3.0), tol=1e-8)
    report(1, "Sibson identity residual < 1e-8", r.passed, f"worst={r.worst:.3e} over {r.cases} cases")


def test_02_closed_form_vs_brute_force():
    r = v.closed_form_minimum(seed=2, n_states=50, alphas=(1.5, 2.0), tol=1e-6)
    report(2, "closed form = brute-force min within 1e-6", r.passed, f"worst={r.worst:.3e} over {r.cases} cases")


def test_03_minimax_exchange():
    worst = 0.0
    names = v.catalog(settings=3)
    for _, n in names:
        for alpha in (1.5, 2.0):
            worst = max(worst, v.minimax_gap(n, alpha))
    report(3, "minimax gap < 1e-6 on catalog", worst < 1e-6, f"worst={worst:.3e} over {2 * len(names)} cases")


def test_04_additivity():
    r = v.additivity(seed=4, n_pairs=10, alpha=2.0, tol=1e-4)
    report(4, "additivity residual < 1e-4", r.passed, f"worst={r.worst:.3e} over {r.cases} pairs")


def test_05_cb_multiplicativity():
    r = v.cb_multiplicativity(seed=5, n_pairs=20, alphas=(1.5, 2.0, 3.0), tol=1e-5)
    anchors = v.cb_anchors(tol=1e-8)
    ok = r.passed and anchors.passed
    report(5, "CB multiplicativity rel err < 1e-5, anchors within 1e-8", ok,
           f"worst rel={r.worst:.3e} over {r.cases} cases, anchor err={anchors.worst:.3e}")


def test_06_inequalities():
    lt = v.lieb_thirring(seed=6, n=500, tol=1e-10)
    order = v.sandwiched_below_traditional(seed=6, n=500, tol=1e-10)
    dpi = v.data_processing(seed=6, n=200, tol=1e-8)
    ok = lt.passed and order.passed and dpi.passed
    report(6, "Lieb-Thirring, D~ <= D, data processing", ok,
           f"max violation LT={lt.worst:.3e}, order={order.worst:.3e}, DPI={dpi.worst:.3e}")


def test_07_limits():
    worst = 0.0
    names = v.catalog(settings=3)
    for _, n in names:
        worst = max(worst, abs(sandwiched_channel_mi(n, 1.001, check_minimax=False).value - ea_capacity(n).value))
    deriv = v.sibson_derivative(seed=7, n_states=50, h=1e-4, tol=1e-3)
    ok = worst < 1e-2 and deriv.passed
    report(7, "alpha -> 1 limits", ok,
           f"max |I~_1.001 - I|={worst:.3e} over {len(names)} channels, derivative err={deriv.worst:.3e}")


def test_08_strong_converse():
    chans = [("identity", ch.identity(2)), ("depolarizing(0.2)", ch.depolarizing(0.2)),
             ("dephasing(0.5)", ch.dephasing(0.5)), ("amplitude_damping(0.3)", ch.amplitude_damping(0.3))]
    details = []
    ok = True
    for name, n in chans:
        cap = ea_capacity(n).value
        prof = RenyiProfile(n)
        above = strong_converse_exponent(n, cap + 0.1, profile=prof).exponent
        below = strong_converse_exponent(n, cap - 0.1, profile=prof).exponent
        ok &= above > 0 and below == 0
        details.append(f"{name}: E(I+0.1)={above:.4g}, E(I-0.1)={below:.4g}")
    e3 = strong_converse_exponent(ch.identity(2), 3.0).exponent
    renyi = [sandwiched_channel_mi(ch.identity(2), a).value for a in (1.5, 2.0, 3.0, 10.0)]
    anchor_err = max(abs(x - 2) for x in renyi)
    ok &= abs(e3 - 1) <= 1e-3 and anchor_err <= 1e-6
    details.append(f"E_id(3)={e3:.6f}, max |I~_alpha(id)-2|={anchor_err:.2e}")
    report(8, "strong-converse exponent threshold", ok, "; ".join(details))


def test_09_superdense_bound():
    r = v.superdense_sweep(ps=tuple(np.linspace(0.05, 0.5, 10)), uses=range(1, 11), tol=1e-12)
    report(9, "superdense p_succ <= bound", r.passed, f"max p_succ-bound={r.worst:.3e} over {r.cases} cases")


def test_10_verify_determinism():
    cmd = [sys.executable, "-m", "renyi_channels", "verify", "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    ok = a.returncode == 0 and b.returncode == 0 and a.stdout == b.stdout
    report(10, "verify --seed 7 byte-identical", ok, f"exit codes {a.returncode}/{b.returncode}, {len(a.stdout)} bytes")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
