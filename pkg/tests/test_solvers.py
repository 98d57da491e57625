import dataclasses
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from zominimax import (
    ConfigError,
    DivergenceError,
    EuclideanBall,
    Box,
    OracleCounter,
    Overrides,
    QuadraticSaddle,
    StochasticWrapper,
    WholeSpace,
    derive_params,
    estimate_gx,
    run_zo_gda,
    run_zo_gdmsa,
    run_zo_sgda,
    run_zo_sgdmsa,
    zo_inner_ascent,
)


def ball(d, r=1.0):
    return EuclideanBall(np.zeros(d), r)


# -- parameter derivation -------------------------------------------------------

def test_eta2_formula():
    p = derive_params("gda", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1)
    assert p.eta2 == 1.0 / 12.0
    p = derive_params("gdmsa", ell=3.0, tau=1.0, d1=4, d2=3, eps=0.1, diameter=2.0)
    assert p.eta2 == 1.0 / 18.0


def test_gda_eta1_exact_rational():
    # kappa=2, ell=2: 4 * 12^4 * 4 * 9 * 3 = 8957952
    p = derive_params("gda", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1)
    assert p.eta1 == 1.0 / 8957952.0
    assert p.S == 3200  # kappa^5 / eps^2


def test_gdmsa_eta1_from_lg():
    p = derive_params("gdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1, diameter=2.0)
    assert p.lg == 6.0
    assert p.eta1 == 1.0 / 72.0
    assert p.T == math.ceil(2 * math.log(10.0))


def test_deterministic_batch_sizes():
    p = derive_params("gda", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1)
    assert (p.q1, p.q2) == (20, 18)
    assert p.m1 is None and p.m2 is None


def test_stochastic_batch_sizes_exact():
    p = derive_params("sgda", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1, sigma1=1.0, sigma2=0.0)
    assert p.m1 == 8000  # 4 * 10 * 2 * 100
    assert p.m2 == 3600  # 4 * 9 * 1 * 100
    assert p.q1 is None and p.q2 is None


def test_mu_formulas_per_mode():
    gda = derive_params("gda", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1)
    assert gda.mu1 == pytest.approx(0.1 * 4**-1.5 * 0.25)
    assert gda.mu2 == pytest.approx(0.1 * 3**-1.5 * 0.25)
    msa = derive_params("gdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1, diameter=2.0)
    assert msa.mu1 == pytest.approx(0.1 * 4**-1.5)
    assert msa.mu2 == pytest.approx(0.1 * 2**-0.5 * 3**-1.5)


def test_overrides_applied():
    ov = Overrides(c_s=5.0, c_mu=0.5, c_t=12.0, eta1=0.01)
    p = derive_params("gdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1, diameter=2.0, overrides=ov)
    assert p.eta1 == 0.01
    assert p.S == math.ceil(5.0 * 2 * 100)
    assert p.T == math.ceil(12.0 * 2 * math.log(10.0))
    assert p.mu1 == pytest.approx(0.5 * 0.1 * 4**-1.5)


def test_derive_params_validation():
    with pytest.raises(ConfigError, match="eps"):
        derive_params("gda", ell=2.0, tau=1.0, d1=4, d2=3, eps=1.5)
    with pytest.raises(ConfigError, match="mode"):
        derive_params("newton", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1)
    with pytest.raises(ConfigError, match="bounded"):
        derive_params("gdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1, diameter=math.inf)
    with pytest.raises(ConfigError, match="bounded"):
        derive_params("sgdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1, diameter=math.inf)
    # descent-ascent admits the whole space
    derive_params("gda", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1, diameter=math.inf)


def test_describe_mentions_every_resolved_field():
    p = derive_params("sgdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.1, diameter=2.0)
    text = p.describe()
    for name in ("eta1", "eta2", "S", "T", "mu1", "mu2", "m1", "m2"):
        assert name in text


# -- run structure ----------------------------------------------------------------

def _gda_params(prob, eps=0.3, **ov):
    return derive_params(
        "gda",
        ell=prob.ell,
        tau=prob.tau,
        d1=prob.d1,
        d2=prob.d2,
        eps=eps,
        diameter=prob.set_y.diameter(),
        overrides=Overrides(**ov),
    )


def test_zero_iterations_trace(desk_trig):
    params = _gda_params(desk_trig, c_s=0.0)
    assert params.S == 0
    trace = run_zo_gda(desk_trig, params, np.ones(4), np.zeros(3), np.random.default_rng(0))
    assert trace.xs.shape == (1, 4)
    assert trace.counter.snapshot() == (0, 0, 0)


def test_trace_shapes_and_counter_monotone(desk_trig):
    params = _gda_params(desk_trig, c_s=3e-4, eta1=1e-3)
    trace = run_zo_gda(desk_trig, params, np.ones(4), np.zeros(3), np.random.default_rng(0))
    S = params.S
    assert trace.xs.shape == (S + 1, 4) and trace.ys.shape == (S + 1, 3)
    assert np.all(np.diff(trace.samples_x) >= 0)
    assert np.all(np.diff(trace.samples_y) >= 0)
    assert np.all(np.diff(trace.raw_evals) >= 0)
    assert trace.n_iterations == S


@pytest.mark.parametrize("mode", ["gda", "gdmsa", "sgda", "sgdmsa"])
def test_oracle_counts_match_closed_forms(mode, desk_trig):
    # randomized schedules; exact integer equality with the complexity formulas
    rng = np.random.default_rng(2024)
    wrapper = StochasticWrapper(desk_trig, 0.4, 0.4)
    for _ in range(4):
        S = int(rng.integers(0, 12))
        T = int(rng.integers(1, 6))
        q1, q2 = (int(v) for v in rng.integers(1, 30, 2))
        m1, m2 = (int(v) for v in rng.integers(1, 30, 2))
        stoch = mode in ("sgda", "sgdmsa")
        params = derive_params(
            mode,
            ell=desk_trig.ell,
            tau=desk_trig.tau,
            d1=4,
            d2=3,
            eps=0.2,
            diameter=2.0,
        )
        params = dataclasses.replace(
            params,
            S=S,
            T=T if mode.endswith("msa") else None,
            q1=None if stoch else q1,
            q2=None if stoch else q2,
            m1=m1 if stoch else None,
            m2=m2 if stoch else None,
            eta1=1e-3,
        )
        target = wrapper if stoch else desk_trig
        fn = {"gda": run_zo_gda, "gdmsa": run_zo_gdmsa, "sgda": run_zo_sgda, "sgdmsa": run_zo_sgdmsa}[mode]
        trace = fn(target, params, np.ones(4), np.zeros(3), np.random.default_rng(1))
        c = trace.counter
        if mode == "gda":
            assert (c.samples_x, c.samples_y) == (S * q1, S * q2)
        elif mode == "gdmsa":
            assert (c.samples_x, c.samples_y) == (S * q1, S * T * q2)
        elif mode == "sgda":
            assert (c.samples_x, c.samples_y) == (S * m1, S * m2)
        else:
            assert (c.samples_x, c.samples_y) == (S * m1, S * T * m2)


def test_seed_determinism_bitwise(desk_trig):
    params = _gda_params(desk_trig, c_s=2e-4, eta1=1e-3)
    t1 = run_zo_gda(desk_trig, params, np.ones(4), np.zeros(3), np.random.default_rng(77))
    t2 = run_zo_gda(desk_trig, params, np.ones(4), np.zeros(3), np.random.default_rng(77))
    assert np.array_equal(t1.xs, t2.xs) and np.array_equal(t1.ys, t2.ys)


@pytest.mark.parametrize(
    "set_y", [EuclideanBall(np.zeros(3), 0.6), Box([-0.3, -0.3, -0.3], [0.3, 0.3, 0.3])]
)
def test_iterates_stay_feasible(set_y):
    from zominimax import make_trig

    prob = make_trig(4, 3, tau=1.0, kappa=2.0, seed=11, set_y=set_y)
    params = derive_params(
        "gdmsa",
        ell=prob.ell,
        tau=prob.tau,
        d1=4,
        d2=3,
        eps=0.3,
        diameter=set_y.diameter(),
        overrides=Overrides(c_s=0.005, c_t=3.0),
    )
    y0 = set_y.project(np.ones(3))
    trace = run_zo_gdmsa(prob, params, np.ones(4), y0, np.random.default_rng(3))
    for _, _, y in trace.iterates():
        assert set_y.contains(y, tol=1e-10)


def test_zero_noise_stochastic_matches_deterministic_trajectory(desk_quadratic):
    det = _gda_params(desk_quadratic, c_s=2e-4, eta1=1e-3)
    sto = dataclasses.replace(
        derive_params(
            "sgda",
            ell=desk_quadratic.ell,
            tau=desk_quadratic.tau,
            d1=4,
            d2=3,
            eps=0.3,
            overrides=Overrides(c_s=2e-4, eta1=1e-3),
        ),
        m1=det.q1,
        m2=det.q2,
    )
    w = StochasticWrapper(desk_quadratic, 0.0, 0.0)
    t_det = run_zo_gda(desk_quadratic, det, np.ones(4), np.zeros(3), np.random.default_rng(5))
    t_sto = run_zo_sgda(w, sto, np.ones(4), np.zeros(3), np.random.default_rng(5))
    assert np.array_equal(t_det.xs, t_sto.xs)
    assert np.array_equal(t_det.ys, t_sto.ys)


def test_zero_noise_sgdmsa_matches_gdmsa(desk_trig):
    det = derive_params(
        "gdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.3, diameter=2.0,
        overrides=Overrides(c_s=0.005, c_t=2.0),
    )
    sto = dataclasses.replace(
        derive_params(
            "sgdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.3, diameter=2.0,
            overrides=Overrides(c_s=0.005, c_t=2.0),
        ),
        m1=det.q1,
        m2=det.q2,
    )
    w = StochasticWrapper(desk_trig, 0.0, 0.0)
    t_det = run_zo_gdmsa(desk_trig, det, np.ones(4), np.zeros(3), np.random.default_rng(6))
    t_sto = run_zo_sgdmsa(w, sto, np.ones(4), np.zeros(3), np.random.default_rng(6))
    assert np.array_equal(t_det.xs, t_sto.xs)
    assert np.array_equal(t_det.ys, t_sto.ys)


def test_gdmsa_with_t1_shares_y_path_with_gda(desk_trig):
    # same y-updates (same role substream), x differs only through its
    # evaluation point: y_{s+1} instead of y_s
    gda = _gda_params(desk_trig, c_s=1e-5, eta1=1e-3)
    msa = dataclasses.replace(
        derive_params(
            "gdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.3, diameter=2.0,
            overrides=Overrides(eta1=1e-3),
        ),
        S=gda.S,
        T=1,
        mu1=gda.mu1,
        mu2=gda.mu2,
    )
    assert gda.S == 1
    t_gda = run_zo_gda(desk_trig, gda, np.ones(4), np.zeros(3), np.random.default_rng(8))
    t_msa = run_zo_gdmsa(desk_trig, msa, np.ones(4), np.zeros(3), np.random.default_rng(8))
    assert np.array_equal(t_gda.ys[1], t_msa.ys[1])
    assert not np.array_equal(t_gda.xs[1], t_msa.xs[1])
    # the multi-step x-update is exactly the descent step taken at y_{s+1}
    rng_x, _ = np.random.default_rng(8).spawn(2)
    gx = estimate_gx(
        desk_trig, np.ones(4), t_msa.ys[1], msa.mu1, msa.q1, rng_x, OracleCounter()
    )
    assert_allclose(t_msa.xs[1], np.ones(4) - msa.eta1 * gx.vector, rtol=0, atol=0)


def test_descent_sanity_on_decoupled_quadratic():
    # B = 0, A > 0, kappa = 2: with tiny mu1 the x-updates decrease g in at
    # least 90% of iterations
    A = np.diag([1.0, 2.0])
    prob = QuadraticSaddle(A, np.zeros((2, 3)), tau=1.0, set_y=ball(3))
    assert prob.kappa == 2.0
    params = derive_params(
        "gda", ell=prob.ell, tau=prob.tau, d1=2, d2=3, eps=0.1,
        overrides=Overrides(eta1=1.0 / 72.0, c_s=1.0),
    )
    params = dataclasses.replace(params, S=500, mu1=1e-6)
    trace = run_zo_gda(prob, params, np.array([1.5, -1.0]), np.zeros(3), np.random.default_rng(12))
    g = 0.5 * np.einsum("ij,ij->i", trace.xs @ A, trace.xs)
    frac_down = np.mean(np.diff(g) < 0)
    assert frac_down >= 0.9
    # and the running min of the envelope gradient falls below eps^2
    grad_sq = np.einsum("ij,ij->i", trace.xs @ A, trace.xs @ A)
    assert grad_sq.min() <= 0.1**2


def test_inner_loop_reaches_eps_sq_within_derived_T(desk_quadratic):
    # worst-corner start on the ball; mean squared residual over 20 seeds
    # must reach eps^2 within T = ceil(c_t * kappa * ln(1/eps)), c_t = 12
    eps = 0.1
    params = derive_params(
        "gdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=eps, diameter=2.0,
        overrides=Overrides(c_t=12.0),
    )
    x = 0.2 * np.ones(4)
    ystar = desk_quadratic.y_star(x)
    corner = -ystar / np.linalg.norm(ystar)  # farthest boundary point
    residuals = []
    for seed in range(20):
        yT = zo_inner_ascent(
            desk_quadratic,
            x,
            corner,
            steps=params.T,
            eta2=params.eta2,
            mu2=params.mu2,
            q2=params.q2,
            rng=np.random.default_rng(seed),
            counter=OracleCounter(),
        )
        residuals.append(np.sum((yT - ystar) ** 2))
    assert np.mean(residuals) <= eps**2


def test_divergence_guard_reports_iteration(desk_quadratic):
    params = _gda_params(desk_quadratic, c_s=0.1, eta1=10.0)
    with pytest.raises(DivergenceError) as exc:
        run_zo_gda(desk_quadratic, params, 5.0 * np.ones(4), np.zeros(3), np.random.default_rng(1))
    assert exc.value.iteration is not None


def test_unbounded_set_rejected_by_multi_step():
    from zominimax import make_trig

    prob = make_trig(4, 3, tau=1.0, kappa=2.0, seed=11, set_y=WholeSpace(3))
    with pytest.raises(ConfigError, match="bounded"):
        derive_params(
            "gdmsa", ell=prob.ell, tau=prob.tau, d1=4, d2=3, eps=0.3,
            diameter=prob.set_y.diameter(),
        )
    # descent-ascent runs fine on the whole space
    params = derive_params(
        "gda", ell=prob.ell, tau=prob.tau, d1=4, d2=3, eps=0.3,
        diameter=prob.set_y.diameter(), overrides=Overrides(c_s=2e-4, eta1=1e-3),
    )
    trace = run_zo_gda(prob, params, np.ones(4), np.zeros(3), np.random.default_rng(0))
    assert trace.n_iterations == params.S


def test_start_point_validation(desk_trig):
    params = _gda_params(desk_trig, c_s=1e-5)
    with pytest.raises(ValueError, match="feasible"):
        run_zo_gda(desk_trig, params, np.ones(4), 2.0 * np.ones(3), np.random.default_rng(0))
    with pytest.raises(ValueError, match="dimensions"):
        run_zo_gda(desk_trig, params, np.ones(5), np.zeros(3), np.random.default_rng(0))
    msa = derive_params(
        "gdmsa", ell=2.0, tau=1.0, d1=4, d2=3, eps=0.3, diameter=2.0,
    )
    with pytest.raises(ConfigError, match="mode"):
        run_zo_gda(desk_trig, msa, np.ones(4), np.zeros(3), np.random.default_rng(0))
