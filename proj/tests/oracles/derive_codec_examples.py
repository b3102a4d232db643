"""Brute-force re-derivation of the frozen codec and metric values used in the
C++ unit tests. Exact rational arithmetic; independent of the library."""
from fractions import Fraction as F


def fit_paper(bounds, u, centering):
    delta = max(b - a for a, b in bounds)
    k = [i * u * delta for i in range(len(bounds))]
    pre = [(a + ki, b + ki) for (a, b), ki in zip(bounds, k)]
    shift = F(1, 2) * (max(b for _, b in pre) - min(a for a, _ in pre)) if centering else 0
    return delta, k, pre, shift, [(a - shift, b - shift) for a, b in pre]


def nearest(tb, x):
    best, best_d = None, None
    for i, (a, b) in enumerate(tb):
        d = a - x if x < a else (x - b if x > b else 0)
        if best_d is None or d < best_d:
            best, best_d = i + 1, d
    return best


if __name__ == "__main__":
    b1 = [(F(0), F(2)), (F(10), F(11)), (F(20), F(24))]
    d, k, pre, s, tb = fit_paper(b1, F(1), True)
    print("ex1 delta", d, "k", k, "pre", pre, "shift", s, "tb", tb)
    print("ex1 encode(1,1)", 1 + k[0] - s, "encode(3,20)", 20 + k[2] - s)
    print("ex1 gaps", [pre[i + 1][0] - pre[i][1] for i in range(2)])
    gap_mid = (tb[0][1] + tb[1][0]) / 2
    print("ex1 gap midpoint", gap_mid, "->", nearest(tb, gap_mid))
    d, k, pre, s, tb = fit_paper([(F(0), F(10)), (F(5), F(15))], F(3, 2), False)
    print("ex3 delta", d, "k", k, "tb", tb, "gap", tb[1][0] - tb[0][1])
    d, k, pre, s, tb = fit_paper([(F(0), F(2))], F(1), True)
    print("single", k, s, tb)
    print("mse", (F(9) + 16) / 2, "mape", (F(2, 100) + F(4, 200)) / 2)
