"""Brute-force reference implementations.

Written with plain loops over nested lists and no imports from the
package under test, so they can check it independently.
"""

import math

EARTH_RADIUS_KM = 6371.0088


def cosine_law_distance(a, b, radius=EARTH_RADIUS_KM):
    p1, l1 = map(math.radians, a)
    p2, l2 = map(math.radians, b)
    c = math.sin(p1) * math.sin(p2) + math.cos(p1) * math.cos(p2) * math.cos(l2 - l1)
    return radius * math.acos(max(-1.0, min(1.0, c)))


def iai(c):
    n = len(c)
    return [sum(c[j][i] for j in range(n) if j != i) / c[i][i] for i in range(n)]


def iai_literal(c):
    n = len(c)
    return [sum(c[i][j] / c[j][j] for j in range(n) if j != i) for i in range(n)]


def oai(c):
    n = len(c)
    return [sum(c[i][j] for j in range(n) if j != i) / c[i][i] for i in range(n)]


def siai(c, w, allowed=None):
    n = len(c)
    out = []
    for i in range(n):
        total = 0.0
        for j in range(n):
            if j != i and (allowed is None or allowed[i][j]):
                total += c[j][i] * w[i][j]
        out.append(total / c[i][i])
    return out


def soai(c, w, allowed=None):
    n = len(c)
    out = []
    for i in range(n):
        total = 0.0
        for j in range(n):
            if j != i and (allowed is None or allowed[i][j]):
                total += c[i][j] * w[i][j]
        out.append(total / c[i][i])
    return out


def gai(c, g, pop):
    n = len(c)
    return [sum(c[j][i] * g[i][j] for j in range(n) if j != i) / pop[i] for i in range(n)]


def ts_share(c, w, i, j):
    """City i's share of j's weighted in-awareness (share form)."""
    n = len(c)
    denom = sum(c[k][j] * w[k][j] for k in range(n) if k != j)
    return c[i][j] * w[i][j] / denom


def te(gdp, w, i, j):
    n = len(gdp)
    return gdp[j] * w[i][j] / sum(gdp[k] * w[i][k] for k in range(n) if k != i)


def group_means(values, labels):
    sums, counts = {}, {}
    for v, g in zip(values, labels):
        sums[g] = sums.get(g, 0.0) + v
        counts[g] = counts.get(g, 0) + 1
    return {g: sums[g] / counts[g] for g in sums}
