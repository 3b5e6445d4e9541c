#!/usr/bin/env python3
"""High-precision reference values frozen into tests/unit/test_oracles.cpp.

Run: python3 tools/oracles.py   (needs mpmath)
Everything here is independent of the C++ code: Mittag-Leffler values from the
power series at 150 digits, integrals by mpmath.quad, kernel values from the
M-Wright series G_{2nu,1}(1, x) = M_nu(|x|) / 2.
"""
from mpmath import mp, mpf, gamma, rgamma, quad, sin, pi, inf, exp, factorial

mp.dps = 150


def ml(a, b, z):
    a, b, z = mpf(a), mpf(b), mpf(z)
    s, k, term = mpf(0), 0, mpf(1)
    while True:
        term = z**k * rgamma(a * k + b)
        s += term
        if k > 20 and abs(term) < mpf(10) ** (-140) * max(abs(s), mpf(10) ** -100):
            return s
        k += 1


def m_wright(nu, z, terms=400):
    # Direct partial sum; series acceleration (nsum) is unreliable here.
    nu, z = mpf(nu), mpf(z)
    return sum((-z) ** k / factorial(k) * rgamma(-nu * k + 1 - nu) for k in range(terms))


def show(name, v):
    print(f"{name} = {mp.nstr(v, 17, min_fixed=-30, max_fixed=30)}")


if __name__ == "__main__":
    # Mittag-Leffler E_{a,b}(-x)
    for a, b, x in [
        (mpf(4) / 3, 1, mpf(10) ** (mpf(4) / 3)),
        (mpf(5) / 3, mpf(5) / 3, mpf(5) ** (mpf(5) / 3)),
        (1.4, 1, 3),
        (1.5, 1, 0.5),
        (1.5, 1, 2),
        (1.5, 1, 10),
        (1.5, 1, 50),
        (1.5, 1, 400),
        (1.5, 1.5, 1),
        (1.5, 1.5, 30),
        (1.5, 2, 5),
        (1.9, 1, 20),
        (1.1, 1.1, 7),
    ]:
        show(f"E_{{{mp.nstr(mpf(a), 10)},{mp.nstr(mpf(b), 10)}}}(-{mp.nstr(mpf(x), 12)})", ml(a, b, -mpf(x)))

    # t^{beta-2} E_{1.5, beta-1}(-t^{1.5}) at beta=1, t=1.5
    t = mpf("1.5")
    show("weighted_derivative(0.5,1,-1,1.5,1)", t ** -1 * ml(1.5, 0, -t ** 1.5))
    show("weighted_derivative(0.5,2,-1,2,2)", mpf(2) ** -1 * ml(1.5, 0, -mpf(2) ** 1.5))

    # 1/Gamma
    show("rgamma(-1/3)", rgamma(-mpf(1) / 3))
    show("rgamma(-2.5)", rgamma(mpf("-2.5")))
    show("rgamma(7.25)", rgamma(mpf("7.25")))

    # J^{0.7} sin at t = 1 and 0.5
    for tt in ["1", "0.5"]:
        tt = mpf(tt)
        v = quad(lambda s: (tt - s) ** mpf("-0.3") * sin(s), [0, tt]) / gamma(mpf("0.7"))
        show(f"J^0.7 sin ({tt})", v)

    # Envelope integrals
    show("int (10-s)^-0.5 (1+s)^-2", quad(lambda s: (10 - s) ** mpf("-0.5") * (1 + s) ** -2, [0, 5, 10]))
    show("int (10-s)^-0.5 (1+s)^-1", quad(lambda s: (10 - s) ** mpf("-0.5") * (1 + s) ** -1, [0, 5, 10]))
    show("int (7-s)^0.4 (1+s)^-0.3", quad(lambda s: (7 - s) ** mpf("0.4") * (1 + s) ** mpf("-0.3"), [0, 7]))
    f = lambda s: min((20 - s) ** mpf("-0.2") * (1 + s) ** -2, (20 - s) ** mpf("-0.5") * (1 + s) ** mpf("-0.8"))
    # crossing point of the two envelopes, as a breakpoint
    from mpmath import findroot
    g = lambda s: (20 - s) ** mpf("0.3") * (1 + s) ** mpf("-1.2") - 1
    c = findroot(g, 1.5)
    show("crossing", c)
    show("int min-envelope(0.2,2,0.5,0.8,20)", quad(f, [0, c, 10, 19, 20]))

    # Remainder integral I_{j,m}(z), rho = 0.75, beta = 1, m = 1, j = 0, z = 2
    rho = mpf("0.75")
    def I(j, m, beta, z):
        return quad(lambda s: s ** ((m + j) / rho - beta) * exp(-z * s)
                    / (s ** (2 / rho) + 2 * mp.cos(pi / rho) * s ** (1 / rho) + 1), [0, 1, 10, inf])
    show("I_{0,1}(rho=.75,beta=1,z=2)", I(0, 1, 1, 2))
    show("I_{1,1}(rho=.75,beta=1,z=2)", I(1, 1, 1, 2))

    # Kernel G_{1+alpha,1}(1, x) = M_nu(|x|)/2 with nu = (1+alpha)/2
    for alpha, xs in [("0.5", ["0", "0.5", "1.5"]), ("0.9", ["0", "0.5"])]:
        nu = (1 + mpf(alpha)) / 2
        for x in xs:
            show(f"G_{{1+{alpha},1}}(1,{x})", m_wright(nu, mpf(x)) / 2)
