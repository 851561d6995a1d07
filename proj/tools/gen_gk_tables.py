#!/usr/bin/env python3
"""Generate Gauss-Kronrod node/weight tables on [-1, 1] as hex-exact doubles.

Kronrod nodes are the roots of the Stieltjes polynomial E_{n+1}, obtained in
the Legendre basis from the orthogonality conditions against x^k P_n(x).
Weights are fixed by exactness on P_0 .. P_{3n+1}. Everything runs in 80-digit
arithmetic and is rounded to double at the end.

usage: gen_gk_tables.py > src/quadrature_tables.inc
"""
import mpmath as mp

mp.mp.dps = 80


def legendre(k, x):
    return mp.legendre(k, x)


def kronrod(n):
    # E_{n+1} = P_{n+1} + sum_{j>=1} c_j P_{n+1-2j}; same parity as P_{n+1}.
    degs = [n + 1 - 2 * j for j in range(1, (n + 1) // 2 + 1) if n + 1 - 2 * j >= 0]
    # orthogonality against x^k P_n for k of parity matching (n+1)+n -> odd k
    ks = [k for k in range(0, n + 1) if (k + n + n + 1) % 2 == 0][: len(degs)]

    def ip(f, g):
        return mp.quad(lambda x: f(x) * g(x), [-1, 0, 1])

    A = mp.matrix(len(degs), len(degs))
    b = mp.matrix(len(degs), 1)
    for r, k in enumerate(ks):
        w = lambda x, k=k: x ** k * legendre(n, x)
        b[r] = -ip(lambda x: legendre(n + 1, x), w)
        for c, d in enumerate(degs):
            A[r, c] = ip(lambda x, d=d: legendre(d, x), w)
    coef = mp.lu_solve(A, b) if degs else []

    def E(x):
        return legendre(n + 1, x) + sum(coef[i] * legendre(d, x) for i, d in enumerate(degs))

    gauss = sorted(mp.polyroots(mp.taylor(lambda x: legendre(n, x), 0, n)[::-1], maxsteps=400, extraprec=400))
    gauss = [mp.re(g) for g in gauss]
    brackets = [-1] + gauss + [1]
    kr = []
    for lo, hi in zip(brackets[:-1], brackets[1:]):
        kr.append(mp.findroot(E, (lo + mp.mpf('1e-30'), hi - mp.mpf('1e-30')), solver='anderson'))
    nodes = sorted(gauss + kr)
    m = len(nodes)
    V = mp.matrix(m, m)
    rhs = mp.matrix(m, 1)
    for k in range(m):
        for i, x in enumerate(nodes):
            V[k, i] = legendre(k, x)
        rhs[k] = 2 if k == 0 else 0
    w = mp.lu_solve(V, rhs)
    return nodes, [w[i] for i in range(m)]


def main():
    print("// Generated by tools/gen_gk_tables.py (80-digit mpmath, rounded to double).")
    print("// Nodes ascending on [-1, 1]; weights of the Kronrod extension.")
    for n in (7, 10, 20, 30):
        nodes, weights = kronrod(n)
        m = len(nodes)
        print(f"// GK{m}: Kronrod extension of the {n}-point Gauss-Legendre rule.")
        print(f"inline constexpr std::array<double, {m}> kGk{m}Nodes = {{")
        for x in nodes:
            print(f"    {float(x).hex()},  // {mp.nstr(x, 20)}")
        print("};")
        print(f"inline constexpr std::array<double, {m}> kGk{m}Weights = {{")
        for x in weights:
            print(f"    {float(x).hex()},  // {mp.nstr(x, 20)}")
        print("};")


if __name__ == "__main__":
    main()
