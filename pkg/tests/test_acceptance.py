"""End-to-end acceptance suite.

Each test prints a single "CRITERION n: PASS/FAIL" line so the suite's
stdout doubles as a checklist. Budgets (trial counts, tolerances, wall-time
limits) are stated inline next to each criterion.
"""

import multiprocessing
import os
import time

import numpy as np

from gclab import autodiff as ad
from gclab.convolution import (
    FilterTensor,
    filter_response,
    gcn_as_mimo_stack,
    mimo_gc,
    mimo_gc_from_stack,
    mimo_gc_oracle,
    mimo_gc_pairwise,
    mimo_gc_vectorized_oracle,
    mimo_polynomial,
    polynomial_as_mimo_filter,
    sca_repeated_gcn,
    universality_filter,
    weight_stack_from_filter,
)
from gclab.graph import generate_erdos_renyi, laplacian, normalized_adjacency
from gclab.lmgc import Variant
from gclab.seeding import derive_seed
from gclab.spectral import eigendecompose_symmetric, graph_fourier
from gclab.train import (
    METHODS,
    ExperimentConfig,
    build_model,
    run_universality_experiment,
)
from gclab.verify import (
    COLLISION_RTOL,
    independence_trial,
    injectivity_trial,
    multiset_counterexample_outputs,
    parallel_control,
)

MASTER_SEED = 20260823


def report(number, ok, detail=""):
    print(f"CRITERION {number}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {number}: {detail}"


def random_basis(n, p, seed):
    g = generate_erdos_renyi(n, p, seed)
    return g, eigendecompose_symmetric(laplacian(g))


def test_criterion_1_route_equivalence():
    """100 random instances (n<=20, d,c<=8): four routes agree to 1e-9, <10 s."""
    start = time.perf_counter()
    worst = 0.0
    for t in range(100):
        rng = np.random.default_rng(derive_seed(MASTER_SEED, 1, t))
        n = int(rng.integers(4, 21))
        d = int(rng.integers(1, 9))
        c = int(rng.integers(1, 9))
        _, basis = random_basis(n, 0.4, derive_seed(MASTER_SEED, 1, t, 1))
        theta = FilterTensor(rng.standard_normal((n, c, d)), basis.basis_id)
        x = rng.standard_normal((n, d))
        ref = mimo_gc(theta, x, basis)
        stack = weight_stack_from_filter(theta, basis)
        for out in (
            mimo_gc_oracle(theta, x, basis),
            mimo_gc_pairwise(stack, x, basis),
            mimo_gc_vectorized_oracle(theta, x, basis),
        ):
            worst = max(worst, float(np.max(np.abs(ref - out))))
    wall = time.perf_counter() - start
    report(1, worst <= 1e-9 and wall < 10.0, f"worst {worst:.3e}, wall {wall:.1f}s")


def test_criterion_2_universality_construction():
    """50 instances at n=d=c=16: constructed filter hits the target to 1e-8, <5 s."""
    start = time.perf_counter()
    worst = 0.0
    n = 16
    for t in range(50):
        _, basis = random_basis(n, 0.4, derive_seed(MASTER_SEED, 2, t))
        rng = np.random.default_rng(derive_seed(MASTER_SEED, 2, t, 1))
        x = rng.standard_normal((n, n))
        # precondition: every spectral component of X stays well away from zero
        while np.min(np.abs(graph_fourier(basis, x))) <= 1e-3:
            x = rng.standard_normal((n, n))
        y = rng.standard_normal((n, n))
        theta = universality_filter(x, y, basis)
        out = mimo_gc(theta, x, basis)
        worst = max(worst, float(np.linalg.norm(out - y) / np.linalg.norm(y)))
    wall = time.perf_counter() - start
    report(2, worst <= 1e-8 and wall < 5.0, f"worst {worst:.3e}, wall {wall:.1f}s")


def test_criterion_3_polynomial_stacks():
    """50 instances: polynomial filters (degree <= 3) match their spectral stack
    to 1e-8, and the first-order special case is exact to 1e-10."""
    worst_poly = 0.0
    worst_gcn = 0.0
    for t in range(50):
        rng = np.random.default_rng(derive_seed(MASTER_SEED, 3, t))
        n = int(rng.integers(4, 17))
        d = int(rng.integers(1, 6))
        c = int(rng.integers(1, 6))
        g, basis = random_basis(n, 0.4, derive_seed(MASTER_SEED, 3, t, 1))
        a_sym = normalized_adjacency(g)
        x = rng.standard_normal((n, d))
        degree = int(rng.integers(1, 4))
        v_list = [rng.standard_normal((d, c)) for _ in range(degree + 1)]
        direct = mimo_polynomial(a_sym, x, v_list)
        spectral = mimo_gc_from_stack(polynomial_as_mimo_filter(v_list, basis), x, basis)
        worst_poly = max(worst_poly, float(np.max(np.abs(direct - spectral))))
        v = rng.standard_normal((d, c))
        gcn = mimo_gc_from_stack(gcn_as_mimo_stack(v, basis), x, basis)
        worst_gcn = max(worst_gcn, float(np.max(np.abs(gcn - a_sym @ x @ v))))
    report(
        3,
        worst_poly <= 1e-8 and worst_gcn <= 1e-10,
        f"poly {worst_poly:.3e}, gcn {worst_gcn:.3e}",
    )


def _fitting_job(args):
    method, lr, run = args
    config = ExperimentConfig(steps=40000, lr=lr, run=run)
    return run_universality_experiment(method, config)


def test_criterion_4_fitting_experiment():
    """Full target-fitting experiment on the reference instance: every method,
    rate grid {0.03, 0.01, 0.003}, three initializations, 40000 steps each.
    The multi-graph layer must reach 1e-6 while each baseline stalls above
    1e-2, on every run, within 10 minutes on four workers (30 minutes when
    fewer than four CPUs are available and the pool degenerates to serial
    execution)."""
    grid = (0.03, 0.01, 0.003)
    runs = (0, 1, 2)
    jobs = [(m, lr, r) for m in METHODS for lr in grid for r in runs]
    budget = 600.0 if (os.cpu_count() or 1) >= 4 else 1800.0
    start = time.perf_counter()
    with multiprocessing.Pool(4) as pool:
        results = pool.map(_fitting_job, jobs)
    wall = time.perf_counter() - start

    best = {}  # (method, run) -> best finite loss over the rate grid
    for res in results:
        if res.diverged:
            continue
        key = (res.method, res.run)
        best[key] = min(best.get(key, np.inf), res.min_mse)

    ok = wall < budget
    details = [f"wall {wall:.0f}s (budget {budget:.0f}s)"]
    for run in runs:
        lmgc = best.get(("lmgc", run), np.inf)
        details.append(f"run {run}: lmgc {lmgc:.3e}")
        if lmgc > 1e-6:
            ok = False
        for method in METHODS:
            if method == "lmgc":
                continue
            base = best.get((method, run), np.inf)
            details.append(f"run {run}: {method} {base:.3e}")
            if base < 1e-2 or lmgc >= base:
                ok = False
    report(4, ok, "; ".join(details))


def test_criterion_5_injectivity():
    """10^4 sampled pairs at K=1 and K=4: zero collisions at relative 1e-9,
    while the softmax counterexample collides for every seed; under 60 s."""
    start = time.perf_counter()
    ok = True
    details = []
    for k in (1, 4):
        rep = injectivity_trial(10_000, k=k, d=4, c=4, seed=derive_seed(MASTER_SEED, 5, k))
        details.append(f"K={k}: {rep.violations} collisions, min sep {rep.min_separation:.3e}")
        if not rep.ok():
            ok = False
    for seed in range(5):
        a, b = multiset_counterexample_outputs(Variant.GATV2_SOFTMAX, seed)
        if np.linalg.norm(a - b) > COLLISION_RTOL * max(np.linalg.norm(a), 1e-300):
            ok = False
            details.append(f"counterexample seed {seed} did not collide")
    wall = time.perf_counter() - start
    if wall >= 60.0:
        ok = False
    report(5, ok, "; ".join(details) + f"; wall {wall:.1f}s")


def test_criterion_6_independence():
    """10^4 sampled pairs at K=2 outside the integer-scaling family: output rows
    never parallel at relative 1e-9, and the scaling control is parallel; <60 s."""
    start = time.perf_counter()
    rep = independence_trial(10_000, k=2, d=4, c=4, seed=derive_seed(MASTER_SEED, 6))
    fa, fb = parallel_control(k=2, d=4, c=4, seed=derive_seed(MASTER_SEED, 6, 1))
    smax, smin = np.linalg.svd(np.stack([fa, fb]), compute_uv=False)
    control_parallel = smin / max(smax, 1e-300) < COLLISION_RTOL
    wall = time.perf_counter() - start
    ok = rep.ok() and control_parallel and wall < 60.0
    report(
        6,
        ok,
        f"{rep.violations} violations, min ratio {rep.min_separation:.3e}, "
        f"control parallel {control_parallel}, wall {wall:.1f}s",
    )


def test_criterion_7_spectral_collapse():
    """First-order stacks: every channel pair's normalized response follows the
    same curve to 1e-9, and the dominance ratio obeys r(k) = r(1)^k."""
    _, basis = random_basis(12, 0.4, derive_seed(MASTER_SEED, 7))
    rng = np.random.default_rng(derive_seed(MASTER_SEED, 7, 1))
    v = rng.standard_normal((4, 4))
    stack = gcn_as_mimo_stack(v, basis)
    mu = basis.adjacency_eigenvalues()
    reference = mu / np.max(np.abs(mu))
    worst_curve = 0.0
    for p in range(4):
        for q in range(4):
            resp = filter_response(stack, basis, p, q).response
            scale = resp[np.argmax(np.abs(resp))]
            worst_curve = max(worst_curve, float(np.max(np.abs(resp / scale - reference))))
    r1 = sca_repeated_gcn([1.0], basis).dominance_ratio()
    worst_ratio = 0.0
    for depth in (2, 4, 16):
        w = rng.standard_normal(depth)
        rk = sca_repeated_gcn(w, basis).dominance_ratio()
        worst_ratio = max(worst_ratio, abs(rk - r1**depth) / r1**depth)
    report(
        7,
        worst_curve <= 1e-9 and worst_ratio <= 1e-9,
        f"curve {worst_curve:.3e}, ratio {worst_ratio:.3e}",
    )


def _fd_gradient(f, arrays, index, h=1e-5):
    base = [np.array(a, dtype=float) for a in arrays]
    grad = np.zeros_like(base[index])
    flat_g = grad.reshape(-1)
    flat_v = base[index].reshape(-1)
    for i in range(flat_v.size):
        orig = flat_v[i]
        flat_v[i] = orig + h
        hi = f(*base)
        flat_v[i] = orig - h
        lo = f(*base)
        flat_v[i] = orig
        flat_g[i] = (hi - lo) / (2 * h)
    return grad


def _max_rel_gap(build, arrays):
    variables = [ad.Var(a) for a in arrays]
    loss = build(*variables)
    ad.backward(loss)

    def f(*values):
        return float(build(*[ad.Var(v) for v in values]).value)

    worst = 0.0
    for idx, var in enumerate(variables):
        fd = _fd_gradient(f, arrays, idx)
        got = var.grad if var.grad is not None else np.zeros_like(fd)
        scale = max(float(np.max(np.abs(fd))), 1.0)
        worst = max(worst, float(np.max(np.abs(got - fd))) / scale)
    return worst


def test_criterion_8_gradient_checks():
    """Every differentiation primitive passes a central-difference check at
    1e-4, and the full forward pass of every method passes at 1e-3 on a
    configuration with at most 200 parameters."""
    rng = np.random.default_rng(derive_seed(MASTER_SEED, 8))
    t34 = rng.standard_normal((3, 4))
    offsets = np.array([0, 3, 5, 7])
    cases = [
        ("matmul", lambda a, b: ad.mse(ad.matmul(a, b), t34),
         [rng.standard_normal((3, 5)), rng.standard_normal((5, 4))]),
        ("add", lambda a, b: ad.mse(ad.add(a, b), t34),
         [rng.standard_normal((3, 4)), rng.standard_normal(4)]),
        ("mul", lambda a, b: ad.mse(ad.mul(a, b), t34),
         [rng.standard_normal((3, 4)), rng.standard_normal((3, 1))]),
        ("scale", lambda a: ad.mse(ad.scale(a, -1.7), t34),
         [rng.standard_normal((3, 4))]),
        ("concat", lambda a, b: ad.mse(ad.concat([a, b], axis=1), t34),
         [rng.standard_normal((3, 1)), rng.standard_normal((3, 3))]),
        ("gather_rows", lambda a: ad.mse(ad.gather_rows(a, np.array([0, 2, 2])), t34),
         [rng.standard_normal((3, 4))]),
        ("scatter_sum",
         lambda a: ad.mse(ad.scatter_sum(a, np.array([0, 0, 1, 2, 2]), 3), t34),
         [rng.standard_normal((5, 4))]),
        ("reshape", lambda a: ad.mse(ad.reshape(a, (3, 4)), t34),
         [rng.standard_normal(12)]),
        ("tanh", lambda a: ad.mse(ad.tanh(a), t34), [rng.standard_normal((3, 4))]),
        ("leaky_relu", lambda a: ad.mse(ad.leaky_relu(a, 0.2), t34),
         [rng.standard_normal((3, 4)) + np.sign(rng.standard_normal((3, 4))) * 0.01]),
        ("relu", lambda a: ad.mse(ad.relu(a), t34),
         [rng.standard_normal((3, 4)) + np.sign(rng.standard_normal((3, 4))) * 0.01]),
        ("segment_softmax",
         lambda s: ad.mse(ad.segment_softmax(s, offsets), np.zeros(7)),
         [rng.standard_normal(7)]),
        ("mse", lambda a: ad.mse(a, t34), [rng.standard_normal((3, 4))]),
    ]
    ok = True
    details = []
    for name, build, arrays in cases:
        gap = _max_rel_gap(build, arrays)
        details.append(f"{name} {gap:.2e}")
        if gap > 1e-4:
            ok = False

    g = generate_erdos_renyi(6, 0.5, seed=derive_seed(MASTER_SEED, 8, 1))
    x = rng.standard_normal((6, 3))
    y = rng.standard_normal((6, 3))
    for method in METHODS:
        model = build_model(method, g, 3, 3, np.random.default_rng(derive_seed(MASTER_SEED, 8, 2)), heads=2)
        assert sum(p.value.size for p in model.params) <= 200
        loss = ad.mse(model.forward(ad.Var(x)), y)
        ad.backward(loss)
        worst = 0.0
        for p in model.params:
            got = p.grad if p.grad is not None else np.zeros_like(p.value)
            flat = p.value.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + 1e-5
                hi = float(ad.mse(model.forward(ad.Var(x)), y).value)
                flat[i] = orig - 1e-5
                lo = float(ad.mse(model.forward(ad.Var(x)), y).value)
                flat[i] = orig
                fd = (hi - lo) / 2e-5
                worst = max(worst, abs(got.reshape(-1)[i] - fd) / max(abs(fd), 1.0))
        details.append(f"{method} {worst:.2e}")
        if worst > 1e-3:
            ok = False
    report(8, ok, "; ".join(details))
