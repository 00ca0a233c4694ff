"""High-precision reference values for the two-level tests.

Evaluates the closed-form resonances, mixing parameter, nonorthogonality
matrix and parametric velocities with mpmath at 50 digits, and locates the
critical strengths independently of the C++ code (derivative root of the
width velocity, and an exact ratio for the orthogonality point).
"""
import mpmath as mp

mp.mp.dps = 50

DELTA, D, V, G1, G2, THETA = mp.mpf(1), mp.mpf(1), mp.mpf("0.75"), mp.mpf("0.5"), mp.mpf("0.5"), mp.pi / 10


def principal_sqrt(z):
    r = mp.sqrt(z)
    if r.real < 0 or (r.real == 0 and r.imag < 0):
        r = -r
    return r


def state(alpha, d=D, v=V):
    eps = DELTA + 2 * alpha * d - 0.5j * (G1 - G2)
    nu = mp.sqrt(G1 * G2) * mp.cos(THETA) + 2j * alpha * v
    s = principal_sqrt(eps * eps - nu * nu)
    f = nu / (eps + s)
    return eps, nu, s, f


def resonances(alpha, d=D, v=V):
    eps, nu, s, f = state(alpha, d, v)
    c = -0.25j * (G1 + G2)
    return c + s / 2, c - s / 2


def width_velocity(f, d=D, v=V):
    m = abs(f) ** 2
    return 4 * f.real * (v * (1 - m) - 2 * d * f.imag) / ((1 + m) ** 2 - 4 * f.real ** 2)


def energy_velocity(f, d=D, v=V):
    m = abs(f) ** 2
    return (1 + m) * (d * (1 - m) + 2 * v * f.imag) / ((1 + m) ** 2 - 4 * f.real ** 2)


def main():
    eps, nu, s, f = state(mp.mpf(0))
    e1, e2 = resonances(mp.mpf(0))
    n2 = 1 / abs(1 - f * f)
    print("E1 =", mp.nstr(e1, 20))
    print("E2 =", mp.nstr(e2, 20))
    print("f =", mp.nstr(f, 20))
    print("U11 =", mp.nstr(n2 * (1 + abs(f) ** 2), 20))
    print("U12_imag =", mp.nstr(-2 * f.real * n2, 20))
    print("offdiag_imag =", mp.nstr(-0.5 * mp.sqrt(G1 * G2) * mp.cos(THETA), 20))
    print("ep_distance =", mp.nstr(min(abs(eps - nu), abs(eps + nu)), 20))
    # velocities by exact differentiation of the closed form
    g1 = lambda a: -2 * mp.im(resonances(a)[0])
    en1 = lambda a: mp.re(resonances(a)[0])
    print("dGamma1 (diff) =", mp.nstr(mp.diff(g1, 0), 20), " formula =", mp.nstr(width_velocity(f), 20))
    print("dE1 (diff) =", mp.nstr(mp.diff(en1, 0), 20), " formula =", mp.nstr(energy_velocity(f), 20))

    # alpha_* : root of d|dGamma1/dalpha|/dalpha near the scan maximum
    gv = lambda a: width_velocity(state(a)[3])
    star = mp.findroot(lambda a: mp.diff(gv, a), mp.mpf("-0.175"))
    print("alpha_star =", mp.nstr(star, 20), " dGamma1 =", mp.nstr(gv(star), 20))
    ref = lambda a: state(a)[3].real
    ref_star = mp.findroot(lambda a: mp.diff(ref, a), mp.mpf("-0.176"))
    print("argmax Re f =", mp.nstr(ref_star, 20))
    circ = mp.findroot(ref, mp.mpf("-0.49"))
    print("alpha_circ =", mp.nstr(circ, 20))


if __name__ == "__main__":
    main()
