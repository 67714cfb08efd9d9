"""Numba-compiled inner loop for per-sample SGD training.

Implements exactly the same update sequence as the numpy reference in
`neural`: bias in weight row 0, hidden layers use the selected activation,
the output layer is always logistic, and each sample's gradient is computed
against the pre-update weights. Falls back to None when numba is unavailable;
`neural.train` then uses its pure-numpy loop.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
    from numba.typed import List as TypedList
except ImportError:  # pragma: no cover - numba is an optional accelerator
    njit = None
    TypedList = None

ACT_IDS = {"Logistic": 0, "Tanh": 1, "ArcTan": 2, "Softplus": 3}


if njit is not None:

    @njit(cache=True)
    def _sgd_epoch(weights, x_all, t_all, perm, rho, act_id):
        """One epoch of per-sample updates; returns -1 or the position in
        `perm` where a non-finite value first appeared."""
        n_layers = len(weights)
        for pos in range(perm.shape[0]):
            idx = perm[pos]
            x = x_all[idx]
            t = t_all[idx]
            ys = TypedList()
            vs = TypedList()
            ys.append(x)
            for l in range(n_layers):
                w = weights[l]
                prev = ys[l]
                n_out = w.shape[1]
                v = np.empty(n_out)
                for i in range(n_out):
                    s = w[0, i]
                    for j in range(prev.shape[0]):
                        s += w[j + 1, i] * prev[j]
                    v[i] = s
                y = np.empty(n_out)
                if l == n_layers - 1 or act_id == 0:
                    for i in range(n_out):
                        y[i] = 1.0 / (1.0 + np.exp(-v[i]))
                elif act_id == 1:
                    for i in range(n_out):
                        y[i] = np.tanh(v[i])
                elif act_id == 2:
                    for i in range(n_out):
                        y[i] = np.arctan(v[i])
                else:
                    for i in range(n_out):
                        y[i] = np.log1p(np.exp(-abs(v[i]))) + max(v[i], 0.0)
                for i in range(n_out):
                    if not np.isfinite(y[i]):
                        return pos
                vs.append(v)
                ys.append(y)
            gammas = TypedList()
            for l in range(n_layers):
                gammas.append(np.empty(weights[l].shape[1]))
            for l in range(n_layers - 1, -1, -1):
                v = vs[l]
                y = ys[l + 1]
                g = gammas[l]
                for i in range(v.shape[0]):
                    if l == n_layers - 1 or act_id == 0:
                        d = y[i] * (1.0 - y[i])
                    elif act_id == 1:
                        d = 1.0 - y[i] * y[i]
                    elif act_id == 2:
                        d = 1.0 / (1.0 + v[i] * v[i])
                    else:
                        d = 1.0 / (1.0 + np.exp(-v[i]))
                    if l == n_layers - 1:
                        g[i] = (t[i] - y[i]) * d
                    else:
                        s = 0.0
                        wn = weights[l + 1]
                        gn = gammas[l + 1]
                        for k in range(wn.shape[1]):
                            s += gn[k] * wn[i + 1, k]
                        g[i] = d * s
                    if not np.isfinite(g[i]):
                        return pos
            for l in range(n_layers):
                w = weights[l]
                prev = ys[l]
                g = gammas[l]
                for i in range(g.shape[0]):
                    w[0, i] += rho * g[i]
                    for j in range(prev.shape[0]):
                        w[j + 1, i] += rho * g[i] * prev[j]
        return -1

    def run_epoch(weights, x_all, t_all, perm, rho, activation_name):
        wl = TypedList()
        for w in weights:
            wl.append(w)
        fail = _sgd_epoch(wl, x_all, t_all, perm, rho, ACT_IDS[activation_name])
        return int(fail)

else:  # pragma: no cover
    run_epoch = None
