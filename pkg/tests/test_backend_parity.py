"""Compiled kernels vs the pure-Python fallback.

The fallback mirrors the compiled loops operation for operation, so the
simulation streams and series sums must match to the last bit (series
values may differ by one rounding in complex arithmetic).
"""
import json
import os
import subprocess
import sys

import pytest

from expolevy import backend_name

PROBE = r"""
import json
from expolevy import (LevyModel, JumpTerm, McConfig, backend_name, density,
                      hyper_pFq, params_from_model,
                      simulate_exponential_functional)
kou = LevyModel(0.3, 0.05, (JumpTerm(3.0, (2.0,)),), (JumpTerm(2.1, (1.5,)),))
p = params_from_model(kou, 2.2)
out = {"backend": backend_name()}
se = hyper_pFq((0.3 + 0.1j, 1.7), (2.4,), 0.62 - 0.28j)
out["pfq"] = [se.value.real, se.value.imag, se.abs_err, se.terms_used]
d = density(p, 3.7)
out["dens"] = [complex(d.value).real, d.abs_err, d.terms_used]
s = simulate_exponential_functional(kou, 2.2, McConfig(paths=300, seed=5))
out["mc"] = s.tolist()
print(json.dumps(out))
"""


def _run(pure: bool) -> dict:
    env = dict(os.environ)
    if pure:
        env["EXPOLEVY_PURE"] = "1"
    else:
        env.pop("EXPOLEVY_PURE", None)
    res = subprocess.run([sys.executable, "-c", PROBE], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


@pytest.fixture(scope="module")
def both():
    return _run(pure=False), _run(pure=True)


def test_compiled_backend_active_by_default(both):
    compiled, pure = both
    assert compiled["backend"] == "cython"
    assert pure["backend"] == "python"
    assert backend_name() in ("cython", "python")


def test_series_parity(both):
    compiled, pure = both
    assert compiled["pfq"][3] == pure["pfq"][3]  # same truncation point
    for a, b in zip(compiled["pfq"][:3], pure["pfq"][:3]):
        assert a == pytest.approx(b, rel=1e-14, abs=1e-300)


def test_density_parity(both):
    compiled, pure = both
    assert compiled["dens"][2] == pure["dens"][2]
    for a, b in zip(compiled["dens"][:2], pure["dens"][:2]):
        assert a == pytest.approx(b, rel=1e-13, abs=1e-300)


def test_simulation_stream_parity(both):
    compiled, pure = both
    assert compiled["mc"] == pure["mc"]  # bit-exact
