"""Scalar reference implementation used as an oracle on tiny grids.

Loops over plain Python numbers, so it also runs on ``fractions.Fraction``
for exact arithmetic. Covers the default scheme only (explicit potential,
Taylor start, mirror Neumann). Forward-mode sensitivities give exact
derivatives of the misfit without any adjoint.
"""


def _lap(row, i, N):
    right = row[i + 1] if i + 1 < N else 0
    if i == 0:
        return 2 * (row[1] - row[0])
    return right - 2 * row[i] + row[i - 1]


def forward(p, M, r2, tau2, y0=None):
    N = len(p) - 1
    y0 = p if y0 is None else y0
    y = [[0] * (N + 1) for _ in range(M + 1)]
    for i in range(N):
        y[0][i] = y0[i]
    for i in range(N):
        y[1][i] = y[0][i] + (r2 * _lap(y[0], i, N) - tau2 * p[i] * y[0][i]) / 2
    for j in range(1, M):
        for i in range(N):
            y[j + 1][i] = 2 * y[j][i] - y[j - 1][i] + r2 * _lap(y[j], i, N) - tau2 * p[i] * y[j][i]
    return y


def sensitivity(p, y, k, M, r2, tau2):
    """d y / d p_k (coefficient also used as initial displacement)."""
    N = len(p) - 1
    d = [[0] * (N + 1) for _ in range(M + 1)]
    if k < N:
        d[0][k] = 1
    for i in range(N):
        e = 1 if i == k else 0
        d[1][i] = d[0][i] + (r2 * _lap(d[0], i, N) - tau2 * (p[i] * d[0][i] + e * y[0][i])) / 2
    for j in range(1, M):
        for i in range(N):
            e = 1 if i == k else 0
            d[j + 1][i] = (2 * d[j][i] - d[j - 1][i] + r2 * _lap(d[j], i, N)
                           - tau2 * (p[i] * d[j][i] + e * y[j][i]))
    return d


def misfit(y, f, tau):
    return tau * sum((y[j][0] - f[j]) ** 2 for j in range(1, len(f)))


def exact_partials(p, f, M, r2, tau2, tau):
    """Exact ``dJ/dp_k`` for every node (Euclidean, not divided by h)."""
    y = forward(p, M, r2, tau2)
    out = []
    for k in range(len(p)):
        d = sensitivity(p, y, k, M, r2, tau2)
        out.append(tau * sum(2 * (y[j][0] - f[j]) * d[j][0] for j in range(1, M + 1)))
    return out
