#!/usr/bin/env python3
"""Regenerates tests/support/scheme_reference.hpp.

Computes the scheme constants with exact rational arithmetic (sympy):
the E matrix entries int_0^1 A(c_i,z) l_j(z) dz, the cubic-weight tensor
int_0^1 A(c_i,z) l_a l_b l_c dz, and the eigenvalues of the 3x3 core of E.
These pin the quadrature-based runtime tables in the test suite.

Usage: python3 tools/exact_scheme_tables.py > tests/support/scheme_reference.hpp
"""
import sympy as sp

zeta = sp.symbols('zeta')
ALPHA1 = sp.Rational(-1425, 2)          # -300 * 19/8
NODES = [sp.Integer(0), sp.Rational(1, 3), sp.Rational(2, 3), sp.Integer(1)]


def a_poly(a1, tau, z):
    m = sp.Matrix([[a1 + 4, -6 * a1 - 6, 6 * a1],
                   [-6 * a1 - 6, 36 * a1 + 12, -36 * a1],
                   [6 * a1, -36 * a1, 36 * a1]])
    row = sp.Matrix([[tau, tau**2 / 2, tau**3 / 3]])
    col = sp.Matrix([1, z, z**2])
    return sp.expand((row * m * col)[0, 0])


def lagrange(i, z):
    v = sp.Integer(1)
    for j, nj in enumerate(NODES):
        if j != i:
            v *= (z - nj) / (NODES[i] - nj)
    return sp.expand(v)


def lit(x):
    return '%.17g' % float(sp.N(x, 30))


ls = [lagrange(i, zeta) for i in range(4)]
e = [[sp.integrate(a_poly(ALPHA1, NODES[i + 1], zeta) * ls[j], (zeta, 0, 1))
      for j in range(4)] for i in range(3)]
w = [[[[sp.integrate(a_poly(ALPHA1, NODES[i + 1], zeta) * ls[a] * ls[b] * ls[c], (zeta, 0, 1))
        for c in range(4)] for b in range(4)] for a in range(4)] for i in range(3)]

lam = sp.symbols('lam')
core = sp.Matrix([[e[i][j] for j in range(1, 4)] for i in range(3)])
roots = sorted(sp.Poly((core - lam * sp.eye(3)).det(), lam).all_roots(),
               key=lambda r: float(sp.N(r, 30)))

print('// Generated by tools/exact_scheme_tables.py -- do not edit by hand.')
print('#pragma once')
print()
print('namespace scheme_reference {')
print()
print('inline constexpr double kAlpha1 = %s;' % lit(ALPHA1))
print()
print('// E[i][j] = int_0^1 A(c_{i+1}, z) l_j(z) dz, exact rationals')
print('inline constexpr double kE[3][4] = {')
for i in range(3):
    print('    {%s},' % ', '.join(lit(e[i][j]) for j in range(4)))
print('};')
print()
print('inline constexpr double kEigenvalues[3] = {%s};' %
      ', '.join(lit(r) for r in roots))
print()
print('// W[i][a][b][c] = int_0^1 A(c_{i+1}, z) l_a l_b l_c dz, exact rationals')
print('inline constexpr double kW[3][4][4][4] = {')
for i in range(3):
    print('    {')
    for a in range(4):
        print('        {')
        for b in range(4):
            print('            {%s},' % ', '.join(lit(w[i][a][b][c]) for c in range(4)))
        print('        },')
    print('    },')
print('};')
print()
print('// A(1/2, 1/2) for the default alpha1')
print('inline constexpr double kAHalfHalf = %s;' %
      lit(a_poly(ALPHA1, sp.Rational(1, 2), sp.Rational(1, 2))))
print()
print('// l_3(1/2) over the nodes {0, 1/3, 2/3, 1}')
print('inline constexpr double kL3Half = %s;' % lit(ls[3].subs(zeta, sp.Rational(1, 2))))
print()
print('}  // namespace scheme_reference')
