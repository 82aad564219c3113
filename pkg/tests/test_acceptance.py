"""Acceptance criteria 1-12.

Each criterion is a function returning ``(passed, detail)``; the runner
times it against its budget. The report prints one PASS/FAIL line per
criterion at the end of the pytest session, or when run directly with
``python3 tests/test_acceptance.py``.
"""
import contextlib
import io
import json
import math
import time

import numpy as np
import pytest

from modern_hopfield import binary, core, headmode, layers
from modern_hopfield.cli import main
from modern_hopfield.lambert import INV_E, LambertBranch, lambert_w

RESULTS = {}


def _cli_json(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    if code != 0:
        raise RuntimeError(f"exit code {code}")
    return json.loads(buf.getvalue())


def crit_capacity():
    base = ("capacity", "--beta", "1", "--p", "0.001")
    a = _cli_json(*base, "--K", "3", "--d", "20")["c_hat"]
    b = _cli_json(*base, "--K", "1", "--d", "75")["c_hat"]
    la = _cli_json(*base, "--K", "3", "--d", "20", "--method", "lower")["c_hat"]
    lb = _cli_json(*base, "--K", "1", "--d", "75", "--method", "lower")["c_hat"]
    checks = {"exact K=3": 3.1546 <= a <= 3.5, "exact K=1": 1.3718 <= b <= 1.6,
              "lower K=3": la >= 3.1444, "lower K=1": lb >= 1.2585}
    failed = [k for k, ok in checks.items() if not ok]
    detail = f"c_hat {a:.7f} {b:.7f}; lower {la:.7f} {lb:.7f}"
    if failed:
        detail += " (below threshold: " + ", ".join(failed) + ")"
    return not failed, detail


def crit_lambert():
    specials = [abs(lambert_w(0.0)), abs(lambert_w(math.e) - 1), abs(lambert_w(-INV_E, LambertBranch.LOWER) + 1)]
    x_up = np.linspace(-INV_E, 50.0, 10_000)
    w_up = lambert_w(x_up)
    r_up = np.max(np.abs(w_up * np.exp(w_up) - x_up) / np.maximum(1.0, np.abs(x_up)))
    x_lo = np.linspace(-INV_E, -1e-300, 10_000)
    w_lo = lambert_w(x_lo, LambertBranch.LOWER)
    r_lo = np.max(np.abs(w_lo * np.exp(w_lo) - x_lo))
    ok = max(specials) <= 1e-12 and r_up <= 1e-12 and r_lo <= 1e-12
    return ok, f"special {max(specials):.1e}, inverse residual W0 {r_up:.1e}, W-1 {r_lo:.1e}"


def crit_convergence():
    rng = np.random.default_rng(3)
    worst_rise, worst_updates, failures, monotone = -math.inf, 0, 0, 0
    for _ in range(100):
        X = rng.normal(size=(16, 32))
        xi = X @ rng.dirichlet(np.ones(32))
        energies = [core.energy(X, xi, 1.0)]
        steps = []
        for _t in range(100):
            new = core.update(X, xi, 1.0)
            steps.append(float(np.linalg.norm(new - xi)))
            xi = new
            energies.append(core.energy(X, xi, 1.0))
            if steps[-1] < 1e-6:
                break
        worst_rise = max(worst_rise, float(np.max(np.diff(energies))))
        worst_updates = max(worst_updates, len(steps))
        # early steps may grow while the state moves between basins; once the
        # step is below 1e-3 the state is in its final basin and must contract
        first_small = next(k for k, v in enumerate(steps + [0.0]) if v < 1e-3)
        tail = steps[first_small:]
        decreasing = all(b <= a for a, b in zip(tail, tail[1:]))
        monotone += all(b <= a for a, b in zip(steps, steps[1:]))
        if not (steps[-1] < 1e-6 and decreasing and np.all(np.diff(energies) <= 1e-12)):
            failures += 1
    return failures == 0, (f"{failures} failing instances, max energy rise {worst_rise:.1e}, "
                           f"max updates {worst_updates}, monotone from the first step in {monotone}/100")


def crit_one_update():
    rng = np.random.default_rng(4)
    d, N, beta = 20, 50, 1.0
    M = 3 * math.sqrt(d - 1)
    worst_err, worst_ratio, failures = 0.0, 0.0, 0
    for _ in range(100):
        X = rng.normal(size=(d, N))
        X *= M / np.linalg.norm(X, axis=0)
        i = int(rng.integers(N))
        v = rng.normal(size=d)
        xi = X[:, i] + v / np.linalg.norm(v) * rng.uniform(0, 1) / (beta * N * M)
        err = float(np.linalg.norm(core.update(X, xi, beta) - X[:, i]))
        bound = core.retrieval_error_bound(X, i, beta)
        worst_err = max(worst_err, err)
        worst_ratio = max(worst_ratio, err / bound)
        failures += not (err <= bound and err <= 1e-6)
    return failures == 0, f"max error {worst_err:.1e}, max error/bound {worst_ratio:.1e}"


def _reference_attention(R, Y, WQ, WK, WV, beta):
    out = np.empty((R.shape[0], WV.shape[1]))
    for s in range(R.shape[0]):
        q = R[s] @ WQ
        logits = np.array([beta * q @ (Y[n] @ WK) for n in range(Y.shape[0])])
        w = np.exp(logits - logits.max())
        w /= w.sum()
        out[s] = sum(w[n] * (Y[n] @ WK @ WV) for n in range(Y.shape[0]))
    return out


def crit_attention():
    rng = np.random.default_rng(5)
    cfg = layers.HopfieldConfig(normalization="none", updates=1)
    worst = 0.0
    for _ in range(200):
        S, N, d_r, d_y, d_k, d_v = rng.integers(1, 9, size=6)
        R, Y = rng.normal(size=(S, d_r)), rng.normal(size=(N, d_y))
        w = layers.ProjectionWeights(W_K=rng.normal(size=(d_y, d_k)), W_V=rng.normal(size=(d_k, d_v)),
                                     W_Q=rng.normal(size=(d_r, d_k)))
        ref = _reference_attention(R, Y, w.W_Q, w.W_K, w.W_V, 1 / math.sqrt(d_k))
        got = layers.hopfield_forward(R, Y, w, cfg)
        worst = max(worst, float(np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref)))))
    return worst <= 1e-12, f"max deviation {worst:.1e} over 200 shapes"


def _soft(z):
    e = np.exp(z - z.max())
    return e / e.sum()


def _fd(f, W):
    # five-point stencil keeps truncation error near 1e-12
    h = 1e-3
    G = np.zeros_like(W)
    for idx in np.ndindex(W.shape):
        E = np.zeros_like(W)
        E[idx] = h
        G[idx] = (-f(W + 2 * E) + 8 * f(W + E) - 8 * f(W - E) + f(W - 2 * E)) / (12 * h)
    return G


def crit_gradients():
    rng = np.random.default_rng(6)
    worst = 0.0
    for full in (False, True):
        for which in ("w", "wq", "wk"):
            for _ in range(50):
                N, d_r, d_y, d_k = (int(v) for v in rng.integers(2, 7, size=4))
                Y = rng.normal(size=(N, d_y))
                r = rng.normal(size=d_r)
                beta = rng.uniform(0.3, 1.5)
                WQ = rng.normal(size=(d_r, d_k)) * 0.5
                WK = rng.normal(size=(d_y, d_k)) * 0.5
                a = rng.normal(size=d_k if full else d_y)

                def f(wq, wk):
                    q = r if which == "w" else r @ wq
                    p = _soft(beta * (Y @ wk) @ q)
                    return a @ ((Y @ wk).T @ p if full else Y.T @ p)

                if which == "w":
                    WK = rng.normal(size=(d_y, d_r)) * 0.5
                    a = rng.normal(size=d_r if full else d_y)
                    g = layers.grad_w(r, Y, WK, a, beta, full)
                    fd = _fd(lambda W: f(None, W), WK)
                else:
                    w = layers.ProjectionWeights(W_K=WK, W_V=np.eye(d_k), W_Q=WQ)
                    if which == "wq":
                        g = layers.grad_wq(r, Y, w, a, beta, full)
                        fd = _fd(lambda W: f(W, WK), WQ)
                    else:
                        g = layers.grad_wk(r, Y, w, a, beta, full)
                        fd = _fd(lambda W: f(WQ, W), WK)
                worst = max(worst, float(np.max(np.abs(g - fd) / np.abs(fd))))
    return worst <= 1e-5, f"max entrywise relative error {worst:.1e} (300 instances)"


def crit_jacobian():
    rng = np.random.default_rng(7)
    sym = ones = spectral = 0.0
    min_eig = math.inf
    for _ in range(1000):
        n = int(rng.integers(1, 33))
        p = core.softmax(1.0, rng.normal(size=n) * rng.uniform(0.1, 10))
        beta = rng.uniform(0.1, 10)
        J = core.softmax_jacobian(p, beta)
        sym = max(sym, float(np.max(np.abs(J - J.T))))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(J).min()))
        ones = max(ones, float(np.max(np.abs(J @ np.ones(n)))))
        spectral = max(spectral, float(np.linalg.norm(J, 2) - beta / 2))
    ok = sym == 0 and min_eig >= -1e-10 and ones <= 1e-12 and spectral <= 1e-10
    return ok, f"asym {sym:.0e}, min eig {min_eig:.1e}, |J1| {ones:.1e}, ||J||-beta/2 {spectral:.1e}"


def crit_heads():
    n = 128
    one_hot = headmode.analyze_head(np.eye(n)).head_class
    uniform = headmode.analyze_head(np.full((4, n), 1 / n))
    bounds = [headmode.classify_k(k, n).value for k in (4, 16, 64)]
    ok = (one_hot is headmode.HeadClass.IV and uniform.k_median == 116
          and uniform.head_class is headmode.HeadClass.I and bounds == ["IV", "III", "II"])
    return ok, f"one-hot {one_hot.value}, uniform k={uniform.k_median:g} {uniform.head_class.value}, k=4/16/64 -> {bounds}"


def crit_gaussian():
    worst = 0.0
    for N in (2, 3, 128, 512):
        for scheme in ("supports", "random"):
            A = layers.gaussian_head_attention(layers.gaussian_head_init(N, scheme, seed=1), N)
            worst = max(worst, float(np.max(np.abs(A.sum(axis=1) - 1))))
    mu = layers.gaussian_head_init(3, "supports").mu
    ratio = layers.gaussian_param_ratio(768, 64, 512)
    ok = worst <= 1e-12 and np.array_equal(mu, [-1.0, 0.0, 1.0]) and ratio == 96.0
    return ok, f"row-sum error {worst:.1e}, mu {mu.tolist()}, ratio {ratio}"


def crit_mixture():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        d, N = int(rng.integers(1, 7)), int(rng.integers(1, 9))
        X = rng.normal(size=(d, N))
        beta = rng.uniform(0.2, 3)
        logs = []
        for _q in range(100):
            xi = rng.normal(size=d) * 2
            logs.append(-core.energy(X, xi, beta) - core.log_gaussian_mixture_form(X, xi, beta) / beta)
        logs = np.array(logs)
        worst = max(worst, float(np.max(np.abs(np.expm1(logs - logs[0])))))
    return worst <= 1e-8, f"max relative spread {worst:.1e}"


def crit_binary():
    rng = np.random.default_rng(9)
    all_fixed = restored = cases = 0
    for _ in range(100):
        X = rng.choice([-1, 1], size=(24, 10))
        all_fixed += all(np.array_equal(binary.binary_sweep(X, X[:, i]), X[:, i]) for i in range(10))
        for i in range(10):
            xi = X[:, i].copy()
            xi[rng.choice(24, size=2, replace=False)] *= -1
            restored += np.array_equal(binary.binary_sweep(X, xi), X[:, i])
            cases += 1
    ok = all_fixed >= 90 and restored >= 0.9 * cases
    return ok, f"all stored fixed in {all_fixed}/100 trials, restored {restored}/{cases}"


def _brute_separation(X):
    N = X.shape[1]
    return [X[:, i] @ X[:, i] - max(X[:, i] @ X[:, j] for j in range(N) if j != i) for i in range(N)]


def _brute_k(row, mass=0.9):
    total = 0.0
    for k, v in enumerate(sorted(row, reverse=True), start=1):
        total += v
        if total >= mass - 1e-12:
            return k
    return len(row)


def crit_oracles():
    rng = np.random.default_rng(10)
    sep = kc = fro = 0
    worst_sep = worst_fro = 0.0
    for N in range(2, 13):
        for _ in range(10):
            X = rng.normal(size=(int(rng.integers(1, 8)), N))
            diff = np.max(np.abs(core.separation(X).delta - _brute_separation(X)))
            worst_sep = max(worst_sep, float(diff))
            sep += diff > 1e-12
    for _ in range(300):
        n = int(rng.integers(1, 257))
        row = rng.dirichlet(np.ones(n) * rng.uniform(0.01, 3))
        kc += headmode.min_count_k(row) != _brute_k(row.tolist())
        dense = np.linalg.norm(np.diag(row) - np.outer(row, row), "fro")
        err = abs(headmode.softmax_jacobian_frobenius(row) - dense)
        worst_fro = max(worst_fro, err)
        fro += err > 1e-12
    ok = sep == 0 and kc == 0 and fro == 0
    return ok, f"separation mismatches {sep} (max {worst_sep:.1e}), k mismatches {kc}, Frobenius max {worst_fro:.1e}"


CRITERIA = [
    (1, "capacity constants", crit_capacity, 1.0),
    (2, "Lambert W", crit_lambert, 1.0),
    (3, "convergence suite", crit_convergence, 5.0),
    (4, "one-update retrieval", crit_one_update, 5.0),
    (5, "attention equivalence", crit_attention, 5.0),
    (6, "gradient checks", crit_gradients, 10.0),
    (7, "softmax Jacobian suite", crit_jacobian, 5.0),
    (8, "head classifier", crit_heads, 1.0),
    (9, "Gaussian head", crit_gaussian, None),
    (10, "spurious-state mixture", crit_mixture, None),
    (11, "binary network", crit_binary, None),
    (12, "oracle equivalences", crit_oracles, 5.0),
]


def evaluate(number, name, fn, budget):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if budget is not None and elapsed >= budget:
        ok = False
        detail += f"; runtime over {budget:g} s"
    line = f"[{'PASS' if ok else 'FAIL'}] {number:2d} {name}: {detail} ({elapsed:.2f} s)"
    RESULTS[number] = line
    return ok, line


@pytest.mark.parametrize("number,name,fn,budget", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, name, fn, budget):
    ok, line = evaluate(number, name, fn, budget)
    print(line)
    assert ok, line


if __name__ == "__main__":
    lines = [evaluate(*c)[1] for c in CRITERIA]
    print("\n".join(lines))
