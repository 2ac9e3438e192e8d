"""Reference values of E_{a,b}(z) by multiprecision power series.

Precision is raised with the size of the largest series term, so the
cancellation on the negative axis is resolved exactly. Output is a C++
initializer list consumed by tests/unit/test_mittag_leffler.cpp.
"""
import mpmath as mp

CASES = [
    (0.5, 1.0, -1.0, 0.0), (0.5, 1.0, -10.0, 0.0), (0.5, 1.0, -30.0, 0.0),
    (0.5, 1.0, 10.0, 0.0), (0.5, 0.5, 3.0, 4.0), (0.3, 1.0, -2.0, 0.0),
    (0.6, 1.0, -60.0, 0.0), (0.75, 1.0, 0.0, 20.0), (0.75, 0.75, 0.0, 20.0),
    (0.8, 1.3, 4.5, 0.0), (0.8, 1.3, 5.5, 0.0), (0.9, 2.0, -80.0, 5.0),
    (1.0, 1.0, -30.0, 0.0), (1.25, 1.0, -100.0, 0.0), (1.25, 2.25, 40.0, 30.0),
    (1.5, 1.0, -50.0, 3.0), (1.5, 1.0, 50.0, 0.0), (1.5, 2.5, -7.0, -1.0),
    (1.75, 1.0, -99.0, 0.0), (1.9, 1.2, -30.0, 0.1), (2.0, 1.0, -100.0, 0.0),
    (2.0, 2.0, -16.0, 0.0), (0.25, 1.0, 0.5, 0.5), (0.45, 0.9, -4.0, 3.0),
    (1.1, 3.5, -90.0, -40.0), (0.65, 1.0, 0.0, -75.0),
]


# Small a with large |z|: the series peak |z|^(1/a) is out of reach, so these
# use the Hankel integral along s = mu (1 + iu)^2 at 30 digits. Every pole of
# these cases has real part below -1e5, so no residue terms are needed.
CONTOUR_CASES = [
    (0.1203, 4.0459, 28.795, 0.3264), (0.1203, 4.1662, 28.795, 0.3264),
    (0.1965, 4.2773, 14.759, 0.4539), (0.1965, 4.4738, 14.759, 0.4539),
]


def ml_contour(a, b, r, theta, mu=6):
    mp.mp.dps = 30
    z = mp.mpf(r) * mp.exp(1j * mp.mpf(theta))

    def g(u):
        s = mu * (1 + 1j * u) ** 2
        return mp.exp(s) * s ** (a - b) / (s ** a - z) * 2j * mu * (1 + 1j * u)

    return mp.quad(g, [-mp.inf, -1, 0, 1, mp.inf]) / (2j * mp.pi), complex(z)


def ml_series(a, b, z):
    zabs = abs(z)
    # log of the largest term ~ |z|^(1/a)
    peak = float(zabs) ** (1.0 / a) if zabs > 0 else 0.0
    mp.mp.dps = 40 + int(peak / 2.3) + 10
    a = mp.mpf(a)
    b = mp.mpf(b)
    z = mp.mpc(z)
    s = mp.mpc(0)
    n = 0
    while True:
        t = z ** n * mp.rgamma(a * n + b)
        s += t
        if n > peak + 10 and abs(t) < mp.mpf(10) ** (-30) * abs(s):
            break
        n += 1
    return s


DERIV_CASES = [
    (0.5, 0.5, 2.0, 12.0, 25),
    (0.5, 1.0, -12.0, 0.0, 40),
    (0.9, 1.0, -6.0, 5.0, 1),
    (0.9, 1.0, -6.0, 5.0, 10),
    (0.9, 2.3, -12.0, 5.0, 25),
    (1.2, 1.0, -12.0, 12.0, 10),
    (1.5, 1.0, -19.0, 1.0, 3),
    (1.9, 2.3, 8.0, 0.0, 25),
]


def ml_derivative_series(a, b, z, k):
    """k-th derivative by the differentiated series in 300-digit arithmetic."""
    mp.mp.dps = 300
    a = mp.mpf(a)
    b = mp.mpf(b)
    z = mp.mpc(z)
    s = mp.mpc(0)
    m = 0
    while True:
        t = mp.factorial(m + k) / mp.factorial(m) * z ** m * mp.rgamma(a * (m + k) + b)
        s += t
        if m > 50 and abs(t) < mp.mpf(10) ** (-70) * abs(s):
            break
        m += 1
    return s


if __name__ == "__main__":
    for a, b, x, y in CASES:
        v = ml_series(a, b, complex(x, y))
        mp.mp.dps = 20
        print("    {%r, %r, {%r, %r}, {%s, %s}}," % (a, b, x, y, mp.nstr(v.real, 17), mp.nstr(v.imag, 17)))
    for a, b, r, th in CONTOUR_CASES:
        v, z = ml_contour(a, b, r, th)
        print("    {%r, %r, {%r, %r}, {%s, %s}}," % (a, b, z.real, z.imag, mp.nstr(v.real, 17), mp.nstr(v.imag, 17)))
    for a, b, x, y, k in DERIV_CASES:
        v = ml_derivative_series(a, b, complex(x, y), k)
        mp.mp.dps = 20
        print("    {%r, %r, {%r, %r}, %d, {%s, %s}}," % (a, b, x, y, k, mp.nstr(v.real, 17), mp.nstr(v.imag, 17)))
