"""Parity between the compiled kernels and the numpy fallback."""

import numpy as np
import pytest

from submax._kernels import LINK_LOG1P, LINK_QGAIN, backend_name, backends


def random_term_arrays(rng, n, num_terms, num_comps=1):
    coeffs = rng.normal(size=num_terms)
    flat, offsets, term_comp = [], [0], []
    for t in range(num_terms):
        width = int(rng.integers(1, min(n, 5) + 1))
        flat.extend(
            sorted(rng.choice(n, size=width, replace=False).tolist())
        )
        offsets.append(len(flat))
        term_comp.append(min(int(t * num_comps / num_terms), num_comps - 1))
    return (
        np.asarray(coeffs, dtype=np.float64),
        np.asarray(flat, dtype=np.int64),
        np.asarray(offsets, dtype=np.int64),
        np.asarray(term_comp, dtype=np.int64),
    )


@pytest.fixture
def impls():
    available = backends()
    if len(available) < 2:
        pytest.skip("compiled backend not built; nothing to compare")
    return available


def test_backend_reports_name():
    assert backend_name() in ("python", "cython")


def test_poly_value_and_grad_parity(impls, rng):
    for complement in (False, True):
        for _ in range(20):
            n = int(rng.integers(2, 12))
            coeffs, flat, offsets, _ = random_term_arrays(
                rng, n, int(rng.integers(1, 12))
            )
            y = rng.random(n)
            # include boundary values that exercise the zero-factor paths
            y[rng.integers(n)] = 0.0
            y[rng.integers(n)] = 1.0
            values = {
                name: impl.poly_value(coeffs, flat, offsets, y, complement)
                for name, impl in impls.items()
            }
            grads = {
                name: impl.poly_grad(coeffs, flat, offsets, y, n, complement)
                for name, impl in impls.items()
            }
            assert values["python"] == pytest.approx(
                values["cython"], rel=1e-12, abs=1e-12
            )
            np.testing.assert_allclose(
                grads["python"], grads["cython"], rtol=1e-12, atol=1e-12
            )


def test_component_values_parity(impls, rng):
    for _ in range(20):
        n = int(rng.integers(2, 10))
        num_comps = int(rng.integers(1, 4))
        coeffs, flat, offsets, term_comp = random_term_arrays(
            rng, n, int(rng.integers(num_comps, 10)), num_comps
        )
        comp_const = rng.normal(size=num_comps)
        x = rng.integers(0, 2, size=n).astype(np.uint8)
        results = [
            impl.component_values(
                coeffs, flat, offsets, term_comp, comp_const, x
            )
            for impl in impls.values()
        ]
        np.testing.assert_allclose(results[0], results[1], rtol=1e-14)


def test_samp_mean_diffs_parity(impls, rng):
    for link in (LINK_LOG1P, LINK_QGAIN):
        for _ in range(10):
            n = int(rng.integers(3, 10))
            num_comps = int(rng.integers(1, 3))
            coeffs, flat, offsets, term_comp = random_term_arrays(
                rng, n, int(rng.integers(num_comps, 8)), num_comps
            )
            # Keep values in a link-safe range: small positive loads.
            coeffs = np.abs(coeffs) * 0.05
            comp_const = np.full(num_comps, 0.1)
            comp_of_var = np.full(n, -1, dtype=np.int64)
            for t in range(len(coeffs)):
                for e in range(offsets[t], offsets[t + 1]):
                    comp_of_var[flat[e]] = term_comp[t]
            X = rng.integers(0, 2, size=(13, n)).astype(np.uint8)
            results = [
                impl.samp_mean_diffs(
                    coeffs, flat, offsets, term_comp, comp_const,
                    comp_of_var, link, X,
                )
                for impl in impls.values()
            ]
            np.testing.assert_allclose(
                results[0], results[1], rtol=1e-11, atol=1e-12
            )


def test_forced_python_backend_env(tmp_path):
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c",
         "import submax; print(submax.backend_name())"],
        env={"PATH": "/usr/bin:/bin", "SUBMAX_PURE_PYTHON": "1"},
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
