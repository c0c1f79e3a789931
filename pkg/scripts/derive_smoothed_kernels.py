"""Derive the 5/6-point smoothed kernel coefficient tables.

Both kernels are fixed by linear moment constraints (zeroth/even-odd, first,
second = K, third = 0) plus a quadratic sum-of-squares closure.  On the
canonical interval the stencil values are affine in one free value t:

    y_m(r) = A_m(r) + B_m(r) * t,

with A_m, B_m polynomials in r.  The closure sum(y^2) = C is quadratic in t;
C itself is pinned by requiring the value at the support edge to vanish.
This script solves the systems symbolically and prints the Horner tables
embedded in ifed/kernels.py, along with the constants used by the tests.
"""

import sympy as sp


def derive(offsets, conditions_fn, K, edge_r, free_idx, name):
    r, t = sp.symbols("r t", real=True)
    ys = sp.symbols(f"y0:{len(offsets)}", real=True)
    s = [r - m for m in offsets]

    eqs = conditions_fn(ys, s, K)
    free = ys[free_idx]
    others = [y for i, y in enumerate(ys) if i != free_idx]
    sol = sp.solve(eqs, others, dict=True)
    assert len(sol) == 1
    sol = sol[0]

    # y_m = A_m(r) + B_m(r) t
    A, B = [], []
    for i, y in enumerate(ys):
        expr = sp.expand(sol.get(y, y).subs(free, t))
        A.append(sp.Poly(expr.coeff(t, 0), r))
        B.append(sp.Poly(expr.coeff(t, 1), r))

    # C from the support edge: free value is 0 there and the rest are unique.
    ys_edge = [a.as_expr().subs(r, edge_r) for a in A]
    C = sp.simplify(sum(y**2 for y in ys_edge))

    a = sp.expand(sum(b.as_expr() ** 2 for b in B))
    b = sp.expand(2 * sum(x.as_expr() * y.as_expr() for x, y in zip(A, B)))
    c = sp.expand(sum(x.as_expr() ** 2 for x in A) - C)
    disc = sp.expand(b**2 - 4 * a * c)

    print(f"# ---- {name} ----")
    print(f"K  = {sp.nsimplify(K)} = {float(K)!r}")
    print(f"C  = {sp.simplify(sp.nsimplify(C))} = {float(C)!r}")
    print(f"a  = {sp.simplify(a)}")
    print("A rows (highest power first):")
    for m, poly in zip(offsets, A):
        print(f"  m={m:+d}: {[float(v) for v in poly.all_coeffs()]}")
    print("B rows:")
    for m, poly in zip(offsets, B):
        print(f"  m={m:+d}: {[float(v) for v in poly.all_coeffs()]}")
    print("b poly:", [float(v) for v in sp.Poly(b, r).all_coeffs()])
    print("disc poly:", [float(v) for v in sp.Poly(disc, r).all_coeffs()])

    # Branch check: edge of the canonical interval needs t == 0.
    for sign in (+1, -1):
        texpr = (-b + sign * sp.sqrt(disc)) / (2 * a)
        val = complex(sp.N(texpr.subs(r, edge_r), 30))
        print(f"t({edge_r}) with sign {sign:+d}: {val}")
    print()


def five_point_conditions(ys, s, K):
    return [
        sp.Eq(sum(ys), 1),
        sp.Eq(sum(si * y for si, y in zip(s, ys)), 0),
        sp.Eq(sum(si**2 * y for si, y in zip(s, ys)), K),
        sp.Eq(sum(si**3 * y for si, y in zip(s, ys)), 0),
    ]


def six_point_conditions(ys, s, K):
    even = [ys[i] for i, m in enumerate(OFF6) if m % 2 == 0]
    odd = [ys[i] for i, m in enumerate(OFF6) if m % 2 != 0]
    return [
        sp.Eq(sum(even), sp.Rational(1, 2)),
        sp.Eq(sum(odd), sp.Rational(1, 2)),
        sp.Eq(sum(si * y for si, y in zip(s, ys)), 0),
        sp.Eq(sum(si**2 * y for si, y in zip(s, ys)), K),
        sp.Eq(sum(si**3 * y for si, y in zip(s, ys)), 0),
    ]


OFF5 = [-2, -1, 0, 1, 2]
OFF6 = [-2, -1, 0, 1, 2, 3]

K5 = sp.Rational(38, 60) - sp.sqrt(69) / 60
K6 = sp.Rational(59, 60) - sp.sqrt(29) / 20

# 5-point: canonical r in [-1/2, 1/2); sample r-2 hits the support edge -2.5
# at r = -1/2, so the free value t = y[m=+2] vanishes there.
derive(OFF5, five_point_conditions, K5, sp.Rational(-1, 2), OFF5.index(2), "five-point")

# 6-point: canonical r in [0, 1); sample r-3 hits the edge -3 at r = 0.
derive(OFF6, six_point_conditions, K6, 0, OFF6.index(3), "six-point")
