"""Hot numeric kernels: batched forward and backward passes of the ReLU network.

Two implementations are provided: numba ``@njit`` loops (default) and a
vectorized pure-numpy path. Set ``DELAYED_BANDIT_PURE_NUMPY=1`` in the
environment to force the numpy path. Both paths implement the same math;
``benchmarks/bench_kernels.py`` compares their throughput.

Weight layout used throughout: ``w1`` of shape (m, d), ``wh`` of shape
(L-2, m, m) holding the hidden square layers, and ``wl`` of shape (m,).
Flat parameter vectors concatenate ``vec(w1)``, ``vec(w2)``, ...,
``vec(w_{L-1})`` (row-major) followed by ``wl``.
"""

import os

import numpy as np

_FLAG = os.environ.get("DELAYED_BANDIT_PURE_NUMPY", "").strip().lower()
USE_NUMBA = _FLAG not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def forward_batch_np(w1, wh, wl, xs):
    """Network outputs sqrt(m) * wl . relu(...relu(w1 x)) for each row of xs."""
    m = w1.shape[0]
    h = np.maximum(xs @ w1.T, 0.0)
    for layer in range(wh.shape[0]):
        h = np.maximum(h @ wh[layer].T, 0.0)
    return np.sqrt(m) * (h @ wl)


def grad_batch_np(w1, wh, wl, xs):
    """Per-row flattened parameter gradients; returns (n, p) with outputs (n,).

    ReLU subgradient at 0 is 0 (mask is a strict inequality).
    """
    n = xs.shape[0]
    m, d = w1.shape
    n_hidden = wh.shape[0]
    sqrt_m = np.sqrt(m)

    acts = [xs]
    z = xs @ w1.T
    acts.append(np.maximum(z, 0.0))
    masks = [z > 0.0]
    for layer in range(n_hidden):
        z = acts[-1] @ wh[layer].T
        acts.append(np.maximum(z, 0.0))
        masks.append(z > 0.0)
    out = sqrt_m * (acts[-1] @ wl)

    p = m * d + n_hidden * m * m + m
    grads = np.empty((n, p), dtype=np.float64)
    # gradient w.r.t. the output layer
    grads[:, p - m:] = sqrt_m * acts[-1]
    delta = (sqrt_m * wl) * masks[-1]
    offset = p - m
    for layer in range(n_hidden - 1, -1, -1):
        offset -= m * m
        grads[:, offset:offset + m * m] = (
            delta[:, :, None] * acts[layer + 1][:, None, :]
        ).reshape(n, m * m)
        delta = (delta @ wh[layer]) * masks[layer]
    grads[:, :m * d] = (delta[:, :, None] * xs[:, None, :]).reshape(n, m * d)
    return grads, out


if USE_NUMBA:

    @njit(cache=True)
    def _forward_batch_nb(w1, wh, wl, xs):
        n = xs.shape[0]
        m = w1.shape[0]
        n_hidden = wh.shape[0]
        out = np.empty(n, dtype=np.float64)
        sqrt_m = np.sqrt(m)
        for i in range(n):
            h = np.dot(w1, xs[i])
            for k in range(m):
                if h[k] < 0.0:
                    h[k] = 0.0
            for layer in range(n_hidden):
                h = np.dot(wh[layer], h)
                for k in range(m):
                    if h[k] < 0.0:
                        h[k] = 0.0
            out[i] = sqrt_m * np.dot(wl, h)
        return out

    @njit(cache=True)
    def _grad_batch_nb(w1, wh, wl, xs):
        n = xs.shape[0]
        m = w1.shape[0]
        d = w1.shape[1]
        n_hidden = wh.shape[0]
        p = m * d + n_hidden * m * m + m
        sqrt_m = np.sqrt(m)
        grads = np.empty((n, p), dtype=np.float64)
        out = np.empty(n, dtype=np.float64)
        acts = np.empty((n_hidden + 1, m), dtype=np.float64)
        for i in range(n):
            x = xs[i]
            h = np.dot(w1, x)
            for k in range(m):
                if h[k] < 0.0:
                    h[k] = 0.0
            acts[0] = h
            for layer in range(n_hidden):
                h = np.dot(wh[layer], acts[layer])
                for k in range(m):
                    if h[k] < 0.0:
                        h[k] = 0.0
                acts[layer + 1] = h
            out[i] = sqrt_m * np.dot(wl, acts[n_hidden])

            delta = np.empty(m, dtype=np.float64)
            for k in range(m):
                delta[k] = sqrt_m * wl[k] if acts[n_hidden][k] > 0.0 else 0.0
            for k in range(m):
                grads[i, p - m + k] = sqrt_m * acts[n_hidden][k]
            offset = p - m
            for layer in range(n_hidden - 1, -1, -1):
                offset -= m * m
                a_prev = acts[layer]
                for r in range(m):
                    dr = delta[r]
                    for c in range(m):
                        grads[i, offset + r * m + c] = dr * a_prev[c]
                new_delta = np.dot(delta, wh[layer])
                for k in range(m):
                    delta[k] = new_delta[k] if acts[layer][k] > 0.0 else 0.0
            for r in range(m):
                dr = delta[r]
                for c in range(d):
                    grads[i, r * d + c] = dr * x[c]
        return grads, out

    def forward_batch_nb(w1, wh, wl, xs):
        return _forward_batch_nb(
            np.ascontiguousarray(w1), np.ascontiguousarray(wh),
            np.ascontiguousarray(wl), np.ascontiguousarray(xs))

    def grad_batch_nb(w1, wh, wl, xs):
        return _grad_batch_nb(
            np.ascontiguousarray(w1), np.ascontiguousarray(wh),
            np.ascontiguousarray(wl), np.ascontiguousarray(xs))

    forward_batch = forward_batch_nb
    grad_batch = grad_batch_nb
else:
    forward_batch = forward_batch_np
    grad_batch = grad_batch_np
