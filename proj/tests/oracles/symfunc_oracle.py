"""Exact rational values for the symmetric-function unit tests."""
from fractions import Fraction as Fr
from itertools import combinations


def sigma(w, k):
    if k == 0:
        return Fr(1)
    total = Fr(0)
    for c in combinations(w, k):
        p = Fr(1)
        for x in c:
            p *= x
        total += p
    return total


def polar(x, y):
    return sum(x[i] * y[j] for i in range(len(x)) for j in range(len(y)) if i != j)


def bounds(w, wm):
    n = len(w)
    s1, s2 = sigma(w, 1), sigma(w, 2)
    d2 = polar(w, wm)
    d1 = sigma(wm, 1)
    lhs = -polar(wm, wm)
    b1 = -2 * d2 * d1 / s1 + d1 * d1 * polar(w, w) / (s1 * s1)
    b2 = -2 * d2 * d1 / s1 + d2 * d2 * polar([1] * n, [1] * n) / ((n - 1) * s1) ** 2
    return lhs, b1, b2


if __name__ == "__main__":
    w = [Fr(1), Fr(2), Fr(3), Fr(4)]
    print("sigma_k(1,2,3,4):", [sigma(w, k) for k in range(5)])
    x, y = [Fr(1), Fr(-2), Fr(5)], [Fr(3), Fr(1, 2), Fr(-1)]
    print("polar:", polar(x, y))
    w = [Fr(2), Fr(1), Fr(1, 2)]
    wm = [Fr(1, 3), Fr(-1), Fr(2)]
    print("lemma (2,1,1/2),(1/3,-1,2):", [float(v) for v in bounds(w, wm)], bounds(w, wm))
    w = [Fr(3), Fr(3), Fr(0), Fr(-1)]
    wm = [Fr(1), Fr(0), Fr(2), Fr(1, 4)]
    print("lemma n=4:", [float(v) for v in bounds(w, wm)])
