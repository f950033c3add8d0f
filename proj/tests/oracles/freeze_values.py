# Copyright 2026 The hetcv Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent 50-digit reference values frozen into the C++ tests.

Run: python3 tests/oracles/freeze_values.py
"""

import mpmath as mp

mp.mp.dps = 50


def lag2d(k, l, z):
    z = mp.mpc(z)
    acc = mp.mpc(0)
    for p in range(min(k, l) + 1):
        c = mp.sqrt(mp.factorial(k) * mp.factorial(l)) * (-1) ** p / (
            mp.factorial(p) * mp.factorial(k - p) * mp.factorial(l - p))
        acc += c * z ** (l - p) * mp.conj(z) ** (k - p)
    return acc


def f_elem(k, l, z, eta):
    z = mp.mpc(z)
    eta = mp.mpf(eta)
    return (1 / eta) * mp.e ** ((1 - 1 / eta) * abs(z) ** 2) * eta ** (-mp.mpf(k + l) / 2) * lag2d(
        k, l, z / mp.sqrt(eta))


def coherent(alpha, n):
    alpha = mp.mpc(alpha)
    return mp.e ** (-abs(alpha) ** 2 / 2) * alpha ** n / mp.sqrt(mp.factorial(n))


def q_func(rho, alpha):
    d = len(rho)
    c = [coherent(alpha, n) for n in range(d)]
    acc = mp.mpc(0)
    for i in range(d):
        for j in range(d):
            acc += mp.conj(c[i]) * rho[i][j] * c[j]
    return acc.real / mp.pi


def expect_quad(rho, k, l, eta):
    # E[f_{|l><k|}] by polar quadrature
    def integrand(r, th):
        a = r * mp.e ** (1j * th)
        return q_func(rho, a) * f_elem(l, k, a, eta) * r
    mp.mp.dps = 20
    re = mp.quad(lambda r, th: mp.re(integrand(r, th)), [0, 2, 4, 8], [0, mp.pi, 2 * mp.pi])
    im = mp.quad(lambda r, th: mp.im(integrand(r, th)), [0, 2, 4, 8], [0, mp.pi, 2 * mp.pi])
    mp.mp.dps = 50
    return mp.mpc(re, im)


def m_bound(k, l):
    return mp.sqrt(mp.mpf(2) ** abs(l - k) * mp.binomial(max(k, l), min(k, l)))


def c_kl(k, l):
    return mp.mpf((k + 1) * (l + 1)) ** (1 + mp.mpf(k + l) / 2) * m_bound(k, l) ** 2


def k_psi(psi):
    d = len(psi)
    return mp.fsum(abs(psi[k]) * abs(psi[l]) * mp.sqrt((k + 1) * (l + 1)) for k in range(d) for l in range(d))


def c_psi(psi, eps, m, E):
    K = k_psi(psi)
    r = mp.mpf(eps) / m
    return mp.fsum(abs(psi[k] * psi[l]) * r ** (E - mp.mpf(k + l) / 2) * K ** (1 + mp.mpf(k + l) / 2) *
                   m_bound(k, l) for k in range(len(psi)) for l in range(len(psi)))


def tomo_failure(n, E, eps, epsp):
    eps, epsp = mp.mpf(eps), mp.mpf(epsp)
    return 4 * mp.fsum(mp.e ** (-n * eps ** (2 + k + l) * epsp ** 2 / (4 * c_kl(k, l)))
                       for k in range(E + 1) for l in range(k, E + 1))


def plan(E, eps, epsp, delta):
    lo, hi = 0, 1
    while tomo_failure(hi, E, eps, epsp) > delta:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tomo_failure(mid, E, eps, epsp) <= delta:
            hi = mid
        else:
            lo = mid
    return hi


def show(name, v):
    if isinstance(v, mp.mpc):
        print(f"{name} = ({mp.nstr(v.real, 17)}, {mp.nstr(v.imag, 17)})")
    else:
        print(f"{name} = {mp.nstr(v, 17)}")


if __name__ == "__main__":
    for k, l, z in [(2, 1, 0.3 + 0.7j), (3, 3, 1.1 - 0.4j), (0, 4, 0.5 + 0.5j), (5, 2, -0.8 + 0.2j)]:
        show(f"laguerre2d({k},{l},{z})", lag2d(k, l, z))
    for k, l, z, eta in [(1, 1, 0.4 + 0.2j, 0.3), (2, 0, 0.7 - 0.1j, 0.1), (0, 3, 1.2 + 0.5j, 0.05),
                         (4, 4, 0.25 + 0.1j, 0.2)]:
        show(f"f_elem({k},{l},{z},{eta})", f_elem(k, l, z, eta))
    rho = [[mp.mpf('0.5'), mp.mpc('0.1', '0.2'), mp.mpf('0.05')],
           [mp.mpc('0.1', '-0.2'), mp.mpf('0.3'), mp.mpc('0', '0.05')],
           [mp.mpf('0.05'), mp.mpc('0', '-0.05'), mp.mpf('0.2')]]
    for k, l in [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1)]:
        show(f"quad E[f_(|{l}><{k}|)] eta=0.2", expect_quad(rho, k, l, 0.2))
    show("q(rho, 0.3+0.4i)", q_func(rho, 0.3 + 0.4j))
    show("m_bound(2,5)", m_bound(2, 5))
    show("c_kl(2,3)", c_kl(2, 3))
    psi = [mp.mpf(0.6), mp.mpc(0, 0.8)]
    show("k_psi(0.6, 0.8i)", k_psi(psi))
    show("ln c_psi(0.6, 0.8i; eps=0.1, m=2, E=1)", mp.log(c_psi(psi, 0.1, 2, 1)))
    show("ln c_psi(0.6, 0.8i; eps=0.1, m=2, E=3)", mp.log(c_psi(psi + [0, 0], 0.1, 2, 3)))
    show("ln tomo_failure(1e5, E=1, 0.1, 0.1)", mp.log(tomo_failure(10 ** 5, 1, 0.1, 0.1)))
    show("ln tomo_failure(3e8, E=2, 0.2, 0.1)", mp.log(tomo_failure(3 * 10 ** 8, 2, 0.2, 0.1)))
    print("plan(0, .1, .1, .05) =", plan(0, 0.1, 0.1, 0.05))
    print("plan(1, .1, .1, .05) =", plan(1, 0.1, 0.1, 0.05))
    print("plan(2, .2, .2, .01) =", plan(2, 0.2, 0.2, 0.01))
    show("ln p_support_iid(0,100)", mp.log(mp.mpf(1) / 100 * mp.e ** (mp.mpf(1) / 101)))
    show("ln p_support_iid(3,1000)", mp.log(mp.mpf(4) ** 1.5 / 1000 * mp.e ** (mp.mpf(16) / 1001)))
    n, k, q, m, s, E, eps, epsp = 10 ** 12, 10 ** 12, 10 ** 6, 2, 1, 0, mp.mpf(0.5), mp.mpf(0.5)
    C = c_psi([mp.mpf(1)], eps, m, E)
    show("ln C_psi(|0>, eps=.5, m=2, E=0)", mp.log(C))
    show("ln p_support(n=k=1e12,q=1e6,s=1)",
         mp.log(8 * mp.mpf(k) ** 1.5) - mp.mpf(k) / 9 * (mp.mpf(q) / n - 2 * mp.mpf(s) / k) ** 2)
    show("ln p_definetti(q=1e6,E=0,n=1e12)", mp.log(mp.mpf(q) ** (mp.mpf(1) / 2)) - 2 * mp.mpf(q) * (q + 1) / n)
    show("ln p_choice(m=2,q=1e6,n=1e12)", mp.log(mp.mpf(m) * (4 * q + m - 1) / (n - 4 * q)))
    diff = eps * epsp / C - 8 * mp.mpf(q) * m ** 2 / (n - 4 * q - m)
    show("ln p_hoeffding(n=1e12,q=1e6,m=2,E=0,eps=eps'=.5)",
         mp.log(2) + mp.log(mp.binomial(n - 4 * q, 4 * q)) - mp.mpf(n - 8 * q) / (2 * m ** 4) * diff ** 2)
    show("ln p_definetti(q=10,E=1,n=1000)", mp.log(100 * mp.e ** mp.mpf('-0.22')))
