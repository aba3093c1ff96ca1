"""Slow, direct reference implementations used as test oracles.

None of these share code with the package; they follow the definitions
literally with plain loops.
"""

import math

import numpy as np

# same integer guard as the package: a ratio within 1e-9 below an integer is that integer
INT_TOL = 1e-9


def ifloor(q):
    return math.floor(q + INT_TOL)


def dft_power(x, fs):
    """Single-sided power by an O(n^2) DFT of the de-meaned record."""
    x = np.asarray(x, dtype=float)
    n = x.size
    x = x - x.mean()
    t = np.arange(n)
    half = n // 2
    P = np.empty(half + 1)
    for k in range(half + 1):
        re = math.fsum(x * np.cos(2 * np.pi * k * t / n))
        im = math.fsum(-x * np.sin(2 * np.pi * k * t / n))
        p = (re * re + im * im) / n**2
        if k != 0 and not (n % 2 == 0 and k == half):
            p *= 2
        P[k] = p
    return P, np.arange(half + 1) * fs / n


def local_peaks(P, l, delta):
    """Bins k with P[k] above both neighbours and above mean(P[k-l..k+l]) + delta."""
    P = [float(v) for v in P]
    out = []
    for k in range(l, len(P) - l):
        if not (P[k] > P[k - 1] and P[k] > P[k + 1]):
            continue
        thr = math.fsum(P[k - l:k + l + 1]) / (2 * l + 1) + delta
        if P[k] > thr:
            out.append(k)
    return out


def project(freq, G, delta_G):
    """Full scan over every grid component; lowest index wins ties."""
    best_i, best_r = None, math.inf
    for i, g in enumerate(G):
        r = abs(freq - ifloor(freq / g) * g)
        if r < best_r:
            best_i, best_r = i, r
    if best_r < delta_G:
        return best_i, best_r
    return None, best_r


def sios(peak_bins, F, P, G, delta_G, delta_s, fs, dedupe=True):
    """Enumerate (candidate, order, peak) triples.

    For each candidate fundamental c at a peak, with component i from the
    full-scan projection, every peak within half a bin of j*c for
    j = 1..floor(fs / 2c) is accepted onto i when
    frac(F / G[i]) < j / (G[i] / delta_G).
    """
    N = [0] * len(G)
    contrib = [[] for _ in G]
    seen = set()
    for kc in peak_bins:
        c = float(F[kc])
        if c <= 0:
            continue
        i, _ = project(c, G, delta_G)
        if i is None:
            continue
        alpha = G[i] / delta_G
        for j in range(1, math.floor(fs / (2 * c)) + 1):
            for kp in peak_bins:
                f = float(F[kp])
                if not abs(f - j * c) < 0.5 * delta_s:
                    continue
                q = f / G[i]
                if not q - ifloor(q) < j / alpha:
                    continue
                if dedupe:
                    if (i, kp) in seen:
                        continue
                    seen.add((i, kp))
                N[i] += 1
                contrib[i].append(float(P[kp]))
    E = [math.fsum(c) for c in contrib]
    return np.array(N), np.array(E)
