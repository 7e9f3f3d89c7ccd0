"""Independent brute-force references shared by unit and acceptance tests."""

import numpy as np


def reference_peaks(g):
    """Exhaustive reference: decompose into flat runs, classify every run."""
    g = list(g)
    n = len(g)
    runs = []  # (first, last, value)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and g[j + 1] == g[i]:
            j += 1
        runs.append((i, j, g[i]))
        i = j + 1
    minima = {0, n - 1}
    for k, (a, b, v) in enumerate(runs):
        left_higher = k == 0 or runs[k - 1][2] > v
        right_higher = k == len(runs) - 1 or runs[k + 1][2] > v
        if left_higher and right_higher:
            minima.update(range(a, b + 1))
    out = []
    for k, (a, b, v) in enumerate(runs):
        if a == 0 or b == n - 1:
            continue
        if runs[k - 1][2] < v and runs[k + 1][2] < v:
            t_l = max(m for m in minima if m < a)
            t_r = min(m for m in minima if m > b)
            out.append((a, v - max(g[t_l], g[t_r])))
    return out


def frame_count_oracle(pred, gt, frame, T):
    """Scalar frame-by-frame counting, independent of the vectorized rasterizer."""
    tp = fp = fn = 0
    i = 0
    while i * frame < T - 1e-9:
        lo, hi = i * frame, (i + 1) * frame
        p = any(min(hi, e.end) - max(lo, e.start) > 1e-9 for e in pred)
        g = any(min(hi, e.end) - max(lo, e.start) > 1e-9 for e in gt)
        tp += p and g
        fp += p and not g
        fn += g and not p
        i += 1
    return tp, fp, fn


def random_events(rng, T, max_events=4):
    from weakstrong.timeline import EventList

    k = int(rng.integers(0, max_events + 1))
    cuts = np.sort(rng.choice(np.arange(1, int(T * 20)), size=2 * k, replace=False)) / 20
    return EventList.from_pairs(cuts.reshape(-1, 2).tolist(), T)


def finite_difference_error(loss_fn, params, h=1e-4):
    """Largest relative gap between analytic and central-difference gradients, per parameter."""
    _, grads = loss_fn(params)
    worst = {}
    for name, p in params.items():
        num = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + h
            up, _ = loss_fn(params)
            p[idx] = old - h
            down, _ = loss_fn(params)
            p[idx] = old
            num[idx] = (up - down) / (2 * h)
        worst[name] = float(np.max(np.abs(num - grads[name])) / max(np.max(np.abs(num)), 1e-8))
    return worst


def random_mlp_problem(draw):
    """Random small batch and parameters with no pre-activation near the ReLU kink."""
    from weakstrong.evalmodels import MlpModel

    rng = np.random.default_rng(draw)
    X = rng.standard_normal((12, 5))
    y = rng.integers(0, 2, 12)
    params = MlpModel.init(5, 7, rng).params()
    while np.min(np.abs(X @ params["W1"].T + params["b1"])) < 1e-2:
        params = MlpModel.init(5, 7, rng).params()
    return X, y, params
