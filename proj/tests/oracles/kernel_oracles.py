"""High-precision reference values frozen into the C++ unit tests.

Run with: python3 tests/oracles/kernel_oracles.py
"""
from mpmath import mp, mpf, mpc, arg, pi, sqrt, cos, exp, fabs, legendre

mp.dps = 40


def arg0(z):
    a = arg(z)
    return a + 2 * pi if a < 0 else a


def hat_a(hbar, rho, B, V, tau):
    return mpc(V / (hbar**2 * B), 2 * rho / (tau * hbar * B))


def params(theta, h, tau, hbar=1, rho=1, B=2, V=0):
    a = hat_a(mpf(hbar), mpf(rho), mpf(B), mpf(V), mpf(tau))
    at = 2 + (1 - 4 * mpf(theta)) * h**2 * a
    ahat = 2 * a + (1 - 4 * mpf(theta)) * h**2 * a**2
    bhat = 2 * a.real + (1 - 4 * mpf(theta)) * h**2 * abs(a) ** 2
    c0 = -sqrt(abs(ahat)) / 2 * exp(-1j * arg0(ahat) / 2)
    kappa = -exp(1j * arg(ahat))
    mu = bhat / abs(ahat)
    return a, at, c0, kappa, mu


def table(kappa, mu, M):
    R = [mpc(1), -kappa * mu]
    for m in range(2, M + 1):
        R.append(mpf(2 * m - 3) / m * kappa * mu * R[m - 1] - mpf(m - 3) / m * kappa**2 * R[m - 2])
    return R[: M + 1]


if __name__ == "__main__":
    tau = mpf("2e-6")
    h = mpf("1.5") / 800
    a, at, c0, kappa, mu = params(0, h, tau)
    print("theta=0 alpha_tilde", at, "mu", mu, "kappa", kappa, "c0", c0)
    a, at, c0, kappa, mu = params(mpf(1) / 4, h, tau)
    print("theta=1/4 c0", c0, "kappa", kappa, "mu", mu)
    a, at, c0, kappa, mu = params(mpf(1) / 12, h, tau)
    print("theta=1/12 c0", c0, "kappa", kappa, "mu", mu)
    R = table(kappa, mu, 5)
    for m, r in enumerate(R):
        print(" R", m, r)
    print("cond2 theta=1/12", (1 - mpf(4) / 12) * mpf(1) / 2 * h**2 / tau)
    print("P2(0.3)", legendre(2, mpf("0.3")), "R2(kappa=1,mu=.3)", -(legendre(2, mpf("0.3")) - 1) / 3)
