"""Brute-force sup_t |sum_{n<=N} (-1)^n n^{-it}| on a fine uniform grid of [-100, 100] (plain numpy)."""
import numpy as np


def brute_sup(N, points=40001, chunk=2000):
    n = np.arange(1, N + 1)
    a = (-1.0) ** n
    lam = np.log(n)
    best = 0.0
    t = np.linspace(-100, 100, points)
    for i in range(0, points, chunk):
        tt = t[i:i + chunk]
        best = max(best, float(np.abs(np.exp(-1j * np.outer(tt, lam)) @ a).max()))
    return best


if __name__ == "__main__":
    for N in (2**10, 2**12):
        s = brute_sup(N)
        print(N, repr(s), repr(np.log(s) / np.log(N)))
