"""Regenerate the Chebyshev tables behind ``nncoop.distributions.bessel_i0_scaled``.

Two regimes, each expanded on [-1, 1]:

* x in [0, 8]:   exp(-x) I0(x)           with t = x / 4 - 1
* x > 8:         sqrt(x) exp(-x) I0(x)   with t = 16 / x - 1

Coefficients are computed at 50 significant digits from interpolation at
Chebyshev points and truncated once they drop below 1e-18.

    python scripts/gen_i0e_coefficients.py
"""
import mpmath as mp

mp.mp.dps = 50
N = 80


def cheb_coefficients(f):
    theta = [mp.pi * (j + mp.mpf(1) / 2) / N for j in range(N)]
    fx = [f(mp.cos(t)) for t in theta]
    coefs = []
    for k in range(N):
        c = 2 * mp.fsum(fx[j] * mp.cos(k * theta[j]) for j in range(N)) / N
        coefs.append(c)
    coefs[0] /= 2
    while abs(coefs[-1]) < mp.mpf("1e-18"):
        coefs.pop()
    return coefs


def small(t):
    x = 4 * (t + 1)
    return mp.exp(-x) * mp.besseli(0, x)


def large(t):
    x = 16 / (t + 1)
    return mp.sqrt(x) * mp.exp(-x) * mp.besseli(0, x)


def show(name, coefs):
    print(f"{name} = np.array([")
    for c in coefs:
        print(f"    {mp.nstr(c, 20, min_fixed=1, max_fixed=0)},")
    print("])")


if __name__ == "__main__":
    show("_I0E_SMALL", cheb_coefficients(small))
    show("_I0E_LARGE", cheb_coefficients(large))
