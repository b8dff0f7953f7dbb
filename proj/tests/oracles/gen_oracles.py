"""Independent numpy/scipy reference values frozen into the C++ tests.

Run: python3 tests/oracles/gen_oracles.py
"""
import numpy as np
from scipy.linalg import eigh_tridiagonal


def grid(R, N):
    return np.linspace(-R, R, N)


def stencil(V, R, N):
    x = grid(R, N)
    h = x[1] - x[0]
    vmin = V(x).min()
    w = np.exp(-(V(x) - vmin))
    we = np.exp(-(V(0.5 * (x[1:] + x[:-1])) - vmin))
    mu = w / w.sum()
    # symmetrized -L = D(-L)D^{-1}, D = diag(sqrt(mu))
    diag = np.zeros(N)
    diag[:-1] += we / (w[:-1] * h * h)
    diag[1:] += we / (w[1:] * h * h)
    off = -we / (np.sqrt(w[:-1] * w[1:]) * h * h)
    return x, h, w, we, mu, diag, off


def gap(V, R, N):
    *_, diag, off = stencil(V, R, N)
    vals = eigh_tridiagonal(diag, off, select="i", select_range=(0, 2), eigvals_only=True)
    return vals[1], vals[2]


def chain(c, b, K, lam, mu0, t0):
    e = np.exp(-2 * K * t0)
    eta = c * (1 - e) / (2 * K)
    A = K + b - c * np.log(mu0) / (2 * K) + 3 * eta
    C1 = 2 * K * np.exp(2 * K * t0) / (c * (1 - e))
    C2 = 2 * b * K / (c * (1 - e))
    C3 = -np.log(mu0) / (1 - e)
    C4 = 2 * (np.exp(2 * K * t0) - 1) / K
    Cs = 1 + eta * (C1 + 2 * C4) + (A + eta * (2 + C2 + C3)) / lam
    return dict(eta=eta, A=A, C1=C1, C2=C2, C3=C3, C4=C4, C_step=Cs, C_lsi=Cs / eta)


gauss = lambda x: 0.5 * x * x
dwell = lambda x: 0.25 * x**4 - 0.5 * x * x

print("gaussian R=8 N=2001 nu1 nu2 = %.17g %.17g" % gap(gauss, 8, 2001))
print("gaussian R=8 N=1001 nu1 = %.17g" % gap(gauss, 8, 1001)[0])
print("double_well R=3.5 N=2001 nu1 = %.17g" % gap(dwell, 3.5, 2001)[0])
print("double_well R=3.5 N=1001 nu1 = %.17g" % gap(dwell, 3.5, 1001)[0])

x, h, w, we, mu, diag, off = stencil(gauss, 8, 2001)
mu0 = np.sum(mu * np.exp(-2 * 0.1 * x * x))
print("gaussian mu0(K=0.1) = %.17g" % mu0)
b = 2 * np.sum(mu * np.exp(0.25 * x * x))
print("gaussian b(c=1/4) = %.17g" % b)
rho, c = 0.25, 0.25
phi = rho * (b - c * x * x)
lam = eigh_tridiagonal(diag + phi, off, select="i", select_range=(0, 0), eigvals_only=True)[0]
print("gaussian lambda_min(H, rho=1/4, c=1/4) = %.17g" % lam)
print("gaussian entropy(e^x) = %.17g" % (lambda g: np.sum(mu * g * np.log(g)) - np.sum(mu * g) * np.log(np.sum(mu * g)))(np.exp(x)))

ch = chain(0.25, 0.5, 0.1, 1.0, 1.4**-0.5, 1.0)
for k, v in ch.items():
    print("chain(c=1/4,b=1/2,K=0.1,lam=1,mu0=1.4^-1/2,t0=1) %s = %.17g" % (k, v))
