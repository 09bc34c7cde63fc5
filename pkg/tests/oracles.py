"""Independent high-precision reference values (mpmath), frozen into the tests.

    python tests/oracles.py

Nothing here imports divbound.
"""
import mpmath as mp

mp.mp.dps = 30


def f(x):
    with mp.workdps(120):
        x = mp.mpf(x)
        if x == 0:
            return mp.mpf(1)
        return +(3 * (mp.sin(x) - x * mp.cos(x)) / x**3) ** 2


def one_minus_f(x):
    with mp.workdps(120):
        return +(1 - f(x))


def correction(x, y, truncated=True, terms=400):
    x, y = mp.mpf(x), mp.mpf(y)
    lx = mp.log(x)
    s, j = mp.mpf(0), 1
    while j <= terms:
        a = j * mp.sqrt(y) * lx
        if truncated and a > 4:
            break
        s += lx / (1 + x**j) * f(a)
        j += 1
    return 4 * s


def poitou(r1, d, y):
    sy = mp.sqrt(y)
    g = lambda x: one_minus_f(x * sy) * (d / mp.sinh(x) + r1 / mp.cosh(x / 2))
    pts = [0] + [mp.pi * k / sy for k in range(1, 60)] + [mp.inf]
    return mp.quad(g, pts)


def base(r1, d, y):
    return r1 + d * (mp.euler + mp.log(4 * mp.pi)) - 12 * mp.pi / (5 * mp.sqrt(y)) - poitou(r1, d, y)


def odlyzko_root(d, lo=-6.0, hi=4.0):
    """Per-degree root and maximizer of the totally complex base term (golden section in log y)."""
    with mp.workdps(15):
        g = lambda t: base(0, d, mp.e**t)
        phi = (mp.sqrt(5) - 1) / 2
        a, b = mp.mpf(lo), mp.mpf(hi)
        c, e = b - phi * (b - a), a + phi * (b - a)
        fc, fe = g(c), g(e)
        while b - a > 1e-6:
            if fc > fe:
                b, e, fe = e, c, fc
                c = b - phi * (b - a)
                fc = g(c)
            else:
                a, c, fc = c, e, fe
                e = a + phi * (b - a)
                fe = g(e)
        t = (a + b) / 2
        return mp.e ** (g(t) / d), mp.e**t


if __name__ == "__main__":
    for x in ["1e-4", "0.005", "0.3", "1", "2.5", "4", "7.7"]:
        print("f", x, mp.nstr(f(x), 20))
    for x, y in [(2, 0.1), (2, 2), (41, 0.1), (41, 2), (37, 0.1), (9, 2), (11, 2), (7, 2), (13, 0.1),
                 (1000003, 0.1)]:
        print("C_h", x, y, mp.nstr(correction(x, y), 20))
    for x, y in [(2, 0.1), (3, 2), (5, 0.5)]:
        print("C_f", x, y, mp.nstr(correction(x, y, truncated=False), 20))
    for r1, d, y in [(0, 8, 1.7), (0, 2, 15.0), (2, 4, 0.5), (1, 3, 3.0), (0, 40, 0.3)]:
        print("I", r1, d, y, mp.nstr(poitou(r1, d, y), 20), "base", mp.nstr(base(r1, d, y), 20))
    for d in (2, 4, 8, 10, 40, 1000):
        root, y = odlyzko_root(d)
        print("odlyzko", d, mp.nstr(root, 8), mp.nstr(y, 6))
