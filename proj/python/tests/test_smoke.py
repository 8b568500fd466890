"""Smoke tests for the python extension module.

Run directly (python test_smoke.py) with the built module on PYTHONPATH, or
via ctest when the project is configured with -DPHASESKETCH_PYTHON=ON.
"""

import json
import math

try:
    import phasesketch as ps
except ImportError:
    import _phasesketch as ps


def test_model_and_coefficients():
    model = ps.build_model("tfim-1d", 4)
    assert model.n_sites == 4
    assert model.local_dim == 2
    assert model.n_subs == 4
    c = ps.coefficients(model, 1.0)
    assert len(c) == 4
    assert c[0] == -1.0  # J
    assert abs(c[3] - 1.0 / 16.0) < 1e-15  # h_z = 1/|V|^2


def test_ground_state_and_minimize():
    model = ps.build_model("tfim-1d", 4)
    e0, degeneracy, gap = ps.ground_state(model, 0.7)
    assert degeneracy == 1
    assert gap > 0
    rec = ps.minimize(model, 0.7, p=2, seed=3)
    assert rec.energy >= e0 - 1e-9  # variational bound
    assert rec.energy < 0
    assert len(rec.theta_final) == 2 * 4
    json.loads(rec.to_json())  # valid record JSON


def test_ssh_routes_to_the_gaussian_backend():
    model = ps.build_model("ssh-2d", 4)
    assert model.n_sites == 16
    e0, _, _ = ps.ground_state(model, 0.5)
    rec = ps.minimize(model, 0.5, p=2, seed=1)
    assert rec.energy >= e0 - 1e-9
    assert len(rec.sub_expectations) == 5


def test_run_sweep_and_exp_fit():
    config = {
        "model": {"kind": "tfim-1d", "size": 4},
        "g_grid": [0.4, 1.2],
        "p_grid": [1, 2],
        "n_restarts": 1,
        "base_seed": 5,
        "optimizer": {"max_iters": 60},
    }
    records = ps.run_sweep(json.dumps(config))
    # 2 g x 2 p x (1 restart + stage 2 + stage 3)
    assert len(records) == 12
    assert sum(1 for r in records if r.best) == 4

    p_values = [1, 2, 3, 4, 5]
    energies = [2.0 * math.exp(-0.5 * p) - 3.0 for p in p_values]
    a, gamma, e0_fit, residual = ps.exp_fit(p_values, energies)
    assert abs(a - 2.0) < 1e-5
    assert abs(gamma - 0.5) < 1e-5
    assert abs(e0_fit + 3.0) < 1e-5
    assert residual < 1e-8


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"{name}: ok")
    print("smoke tests passed")
