"""Reference values for the width-velocity distributions.

P_M(y) = int_0^inf dk k^{-1/2} P_M(k) phi(y / sqrt(k)) and its CDF are
integrated with mpmath's tanh-sinh quadrature directly in the kappa variable
(the C++ code integrates in t = sqrt(kappa) with Gauss-Kronrod), so the two
routes share no code and no substitution.
"""
import mpmath as mp

mp.mp.dps = 30


def pt(k, m):
    return k ** (mp.mpf(m) / 2 - 1) * mp.exp(-k / 2) / (2 ** (mp.mpf(m) / 2) * mp.gamma(mp.mpf(m) / 2))


def phi_goe(y):
    return (4 + y * y) / (6 * (1 + y * y) ** mp.mpf(2.5))


def phi_pf(y):
    return mp.pi / (2 * (1 + mp.cosh(mp.pi * y)))


def cdf_goe(y):
    return mp.mpf(1) / 2 + (4 * y + 3 * y ** 3) / (6 * (1 + y * y) ** mp.mpf(1.5))


def cdf_pf(y):
    return 1 / (1 + mp.exp(-mp.pi * y))


def pdf(y, m, phi):
    return mp.quad(lambda k: pt(k, m) * phi(y / mp.sqrt(k)) / mp.sqrt(k), [0, mp.mpf(y) ** 2 / 4 + 1e-30, 1, m, 10 * m + y * y, mp.inf])


def cdf(y, m, cphi):
    return mp.quad(lambda k: pt(k, m) * cphi(y / mp.sqrt(k)), [0, 1, m, 10 * m + y * y, mp.inf])


def main():
    for name, phi, cphi in (("pf", phi_pf, cdf_pf), ("goe", phi_goe, cdf_goe)):
        for m in (1, 2, 5, 10):
            for y in (mp.mpf("0.01"), mp.mpf("0.5"), mp.mpf(1), mp.mpf(3), mp.mpf(10)):
                print(f"{{{m}, {float(y)!r}, {mp.nstr(pdf(y, m, phi), 17)}, {mp.nstr(cdf(y, m, cphi), 17)}}},  // {name}")
    # GOE tail at large y
    for y in (50, 500):
        print("goe M=2 y=", y, mp.nstr(pdf(mp.mpf(y), 2, phi_goe), 17))
    # phi_pf from the Fourier integral (1/pi) int_0^inf cos(w y) w / sinh(w) dw
    for y in (0, 0.5, 2, 5):
        ft = mp.quad(lambda w: mp.cos(w * y) * w / mp.sinh(w) if w != 0 else 1, [0, mp.inf]) / mp.pi
        print("fourier", y, mp.nstr(ft, 17), mp.nstr(phi_pf(mp.mpf(y)), 17))


if __name__ == "__main__":
    main()
