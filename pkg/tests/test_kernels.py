import os
import subprocess
import sys

import numpy as np

from vrpcast import init, kernels


def random_case(rng, n=40, p=5, h=7):
    model = init(p, h, int(rng.integers(0, 1000)))
    inputs = rng.uniform(-1, 1, (n, p))
    targets = rng.normal(size=n)
    return model, inputs, targets


def test_active_backend_matches_numpy_reference(rng):
    for _ in range(10):
        model, inputs, targets = random_case(rng)
        args = (model.w1, model.b1, model.w2, model.b2)
        out = kernels.forward_batch(inputs, *args)
        ref = kernels.forward_batch_numpy(inputs, *args)
        np.testing.assert_allclose(out, ref, rtol=1e-13, atol=1e-13)
        res, jac = kernels.residuals_and_jacobian(inputs, targets, *args)
        res_ref, jac_ref = kernels.residuals_and_jacobian_numpy(inputs, targets, *args)
        np.testing.assert_allclose(res, res_ref, rtol=1e-13, atol=1e-13)
        np.testing.assert_allclose(jac, jac_ref, rtol=1e-13, atol=1e-13)


def test_backend_name_is_valid():
    assert kernels.BACKEND in ("numba", "numpy")


def test_numpy_backend_env_flag():
    code = "import vrpcast.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, VRPCAST_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_bad_backend_env_flag_rejected():
    code = "import vrpcast.kernels"
    env = dict(os.environ, VRPCAST_BACKEND="gpu")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True)
    assert out.returncode != 0
