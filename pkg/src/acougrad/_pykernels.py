"""Pure numpy time-marching loops (reference and fallback backend).

Both kernels work on time-major arrays ``a[j, i]`` and never touch column
``N`` (held at zero). With ``mirror=False`` node 0 is a copy of node 1.
They return ``(array, bad)`` where ``bad`` is the first checked row that
held a non-finite value, or -1.
"""

import numpy as np


def _lap(row):
    out = np.empty(row.size - 1)
    out[1:] = row[2:] - 2.0 * row[1:-1] + row[:-2]
    out[0] = 2.0 * (row[1] - row[0])
    return out


@np.errstate(over="ignore", invalid="ignore")
def forward_march(p, y0, M, r2, tau2, hat, taylor, mirror, check_every=64):
    n = p.size - 1
    lo = 0 if mirror else 1
    y = np.zeros((M + 1, n + 1))
    pa = p[lo:n]

    y[0, lo:n] = y0[lo:n]
    if not mirror:
        y[0, 0] = y[0, 1]
    if not taylor:
        y[1, lo:n] = y[0, lo:n]
    elif hat:
        y[1, lo:n] = (y[0, lo:n] + 0.5 * r2 * _lap(y[0])[lo:]) / (1.0 + 0.5 * tau2 * pa)
    else:
        y[1, lo:n] = y[0, lo:n] + 0.5 * (r2 * _lap(y[0])[lo:] - tau2 * pa * y[0, lo:n])
    if not mirror:
        y[1, 0] = y[1, 1]
    if not (np.all(np.isfinite(y[0])) and np.all(np.isfinite(y[1]))):
        return y, 1

    if hat:
        denom = 1.0 + tau2 * pa
    for j in range(1, M):
        rhs = 2.0 * y[j, lo:n] - y[j - 1, lo:n] + r2 * _lap(y[j])[lo:]
        if hat:
            y[j + 1, lo:n] = rhs / denom
        else:
            y[j + 1, lo:n] = rhs - tau2 * pa * y[j, lo:n]
        if not mirror:
            y[j + 1, 0] = y[j + 1, 1]
        k = j + 1
        if (k % check_every == 0 or k == M) and not np.all(np.isfinite(y[k])):
            return y, k
    return y, -1


@np.errstate(over="ignore", invalid="ignore")
def backward_march(p, src, nrows, r2, tau2, hat, taylor, mirror, initial_rule, check_every=64):
    n = p.size - 1
    lo = 0 if mirror else 1
    y = np.zeros((nrows, n + 1))
    pa = p[lo:n]

    for m in range(nrows - 3, -1, -1):
        if m == 0 and initial_rule:
            val = y[1, lo:n] - y[2, lo:n]
            if taylor:
                lap = r2 * _lap(y[1])[lo:]
                if not hat:
                    lap = lap - tau2 * pa * y[1, lo:n]
                val = val + 0.5 * lap
        else:
            val = 2.0 * y[m + 1, lo:n] - y[m + 2, lo:n] + r2 * _lap(y[m + 1])[lo:]
            val[0] += src[m]
            if hat:
                if m == 1 and initial_rule:
                    denom = 1.0 + 0.5 * tau2 * pa if taylor else 1.0
                else:
                    denom = 1.0 + tau2 * pa
                val = val / denom
            else:
                val = val - tau2 * pa * y[m + 1, lo:n]
        y[m, lo:n] = val
        if not mirror:
            y[m, 0] = y[m, 1]
        if (m % check_every == 0 or m == 0) and not np.all(np.isfinite(y[m])):
            return y, m
    return y, -1
