import os
import subprocess
import sys

import numpy as np
import pytest

import s2net.backend as backend
import s2net.kernels as kernels

from conftest import make_rng

pytestmark = pytest.mark.skipif(
    not backend.NUMBA_AVAILABLE, reason="compiled backend not installed"
)


def _problem(seed, family, n=40, p=10, n_u=25):
    rng = make_rng(seed)
    xl = rng.standard_normal((n, p))
    if family == 0:
        yl = xl @ rng.standard_normal(p) + 0.1 * rng.standard_normal(n)
        ybar = 0.0
    else:
        yl = (rng.random(n) < 0.5).astype(float)
        ybar = float(yl.mean())
    tu = rng.standard_normal((n_u, p)) * 0.5
    beta0 = np.zeros(p)
    return dict(
        xl=xl, yl=yl, tu=tu, ybar=ybar, gamma1=0.7,
        lambda1=0.02, lambda2=0.01, beta0=beta0, family=family,
        max_iter=2000, tol=1e-9, t0=1.0, shrink=0.5, max_backtracks=50,
    )


def _run(solver, args):
    return solver(
        args["xl"], args["yl"], args["tu"], args["ybar"], args["gamma1"],
        args["lambda1"], args["lambda2"], args["beta0"], args["family"],
        args["max_iter"], args["tol"], args["t0"], args["shrink"],
        args["max_backtracks"],
    )


class TestTwinKernels:
    @pytest.mark.parametrize("family", [0, 1])
    def test_backends_agree(self, family):
        args = _problem(3, family)
        beta_np, it_np, obj_np, status_np, _ = _run(
            kernels.fista_solve_numpy, args)
        beta_nb, it_nb, obj_nb, status_nb, _ = _run(
            kernels.fista_solve_numba, args)
        assert status_np == status_nb
        # objectives agree to near machine precision; iterates may drift
        # apart by accumulated rounding on the logistic path
        assert obj_nb == pytest.approx(obj_np, rel=1e-10, abs=1e-12)
        assert np.max(np.abs(beta_nb - beta_np)) < 1e-5

    def test_linear_iterations_match(self):
        args = _problem(4, 0)
        _, it_np, _, _, _ = _run(kernels.fista_solve_numpy, args)
        _, it_nb, _, _, _ = _run(kernels.fista_solve_numba, args)
        assert it_np == it_nb

    def test_warmup_compiles_both_families(self):
        kernels.warmup()  # second call hits the dispatcher cache
        args = _problem(5, 1, n=10, p=4, n_u=5)
        args["max_iter"] = 5
        beta, *_ = _run(kernels.fista_solve_numba, args)
        assert beta.shape == (4,)


class TestBackendSelection:
    def test_active_backend_is_valid(self):
        assert backend.ACTIVE_BACKEND in backend.CHOICES

    def test_requested_backend_rejects_unknown(self, monkeypatch):
        monkeypatch.setenv(backend.ENV_VAR, "gpu")
        with pytest.raises(ValueError):
            backend.requested_backend()

    def test_requested_backend_reads_env(self, monkeypatch):
        monkeypatch.setenv(backend.ENV_VAR, "numpy")
        assert backend.requested_backend() == "numpy"
        monkeypatch.delenv(backend.ENV_VAR)
        assert backend.requested_backend() == "numba"

    def test_numpy_flag_selects_plain_solver(self):
        env = dict(os.environ, S2NET_BACKEND="numpy")
        code = (
            "import s2net.kernels as k\n"
            "assert k.fista_solve is k.fista_solve_numpy\n"
            "import s2net.backend as b\n"
            "assert b.ACTIVE_BACKEND == 'numpy'\n"
            "print('ok')\n"
        )
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True)
        assert out.returncode == 0, out.stderr
        assert out.stdout.strip() == "ok"

    def test_default_selects_compiled_solver(self):
        env = {k: v for k, v in os.environ.items() if k != "S2NET_BACKEND"}
        code = (
            "import s2net.kernels as k\n"
            "assert k.fista_solve is k.fista_solve_numba\n"
            "print('ok')\n"
        )
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True)
        assert out.returncode == 0, out.stderr
        assert out.stdout.strip() == "ok"

    def test_bad_flag_fails_import(self):
        env = dict(os.environ, S2NET_BACKEND="cuda")
        out = subprocess.run([sys.executable, "-c", "import s2net"],
                             env=env, capture_output=True, text=True)
        assert out.returncode != 0
        assert "S2NET_BACKEND" in out.stderr


class TestEndToEndParity:
    def test_fit_matches_across_backends(self, tmp_path):
        # a full fit through the public API in a numpy-flagged subprocess
        # reproduces the compiled backend's objective
        from s2net import Hyperparams, RawTable, build_dataset, fit

        rng = make_rng(6)
        x = rng.standard_normal((30, 5))
        y = x @ np.array([1.0, -1.0, 0.0, 0.5, 0.0]) + 0.1 * rng.standard_normal(30)
        ds = build_dataset(RawTable.from_matrix(x), y)
        model = fit(ds, Hyperparams(lambda1=0.05, lambda2=0.01))

        data = tmp_path / "xy.npz"
        np.savez(data, x=x, y=y)
        code = (
            "import numpy as np\n"
            "from s2net import Hyperparams, RawTable, build_dataset, fit\n"
            f"blob = np.load({str(data)!r})\n"
            "ds = build_dataset(RawTable.from_matrix(blob['x']), blob['y'])\n"
            "m = fit(ds, Hyperparams(lambda1=0.05, lambda2=0.01))\n"
            "print(repr(m.report.final_objective))\n"
        )
        env = dict(os.environ, S2NET_BACKEND="numpy")
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True)
        assert out.returncode == 0, out.stderr
        other = float(out.stdout.strip())
        assert other == pytest.approx(model.report.final_objective,
                                      rel=1e-10, abs=1e-12)
