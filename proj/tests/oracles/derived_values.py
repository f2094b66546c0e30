"""Independent oracle computations for values frozen into the C++ tests.

Run with: python3 tests/oracles/derived_values.py
Uses mpmath / exact integer arithmetic only; shares no code with the library.
"""
import itertools
import math
from fractions import Fraction

import mpmath as mp

mp.mp.dps = 40


def moments(a):
    N = len(a)
    mu = sum(a) / N
    s2 = sum((v - mu) ** 2 for v in a) / N
    b3 = sum(abs(v - mu) ** 3 for v in a) / N / s2 ** 1.5
    md = max(abs(v - mu) for v in a)
    return mu, s2, b3, md


def standardized(a):
    mu, s2, _, _ = moments(a)
    s = math.sqrt(s2)
    return [(v - mu) / s for v in a]


print("== valid x range, a_k = k, N = 100, n = 25, A = 1")
a = list(range(1, 101))
mu, s2, b3, md = moments(a)
om = math.sqrt(100 * 0.25 * 0.75)
cap1 = om * math.sqrt(s2) / md
cap2 = min(cap1, (om / b3) ** (1 / 3))
print(f"envelope_cap={cap1!r} band_cap={cap2!r}")

print("== relative band / BE bound, same population, x = 2, A = 1")
x = 2.0
print(f"band={(1 + x) ** 3 * b3 / om!r} be={(1 + x) ** 2 * math.exp(-x * x / 2) * b3 / om!r}")

print("== sample stats, standardized a_k = k (N = 10), units 1 and 10, N-design n = 2")
a = standardized(list(range(1, 11)))
X = [a[0], a[9]]
n, N = 2, 10
q = 1 - n / N
S = sum(X)
xbar = S / n
V2 = sum(v * v for v in X)
ey = sum((v * v - 1) ** 2 for v in a) / N
V2n = sum((v * v - 1) ** 2 - ey for v in X)
sh2 = sum((v - xbar) ** 2 for v in X) / (n - 1)
t = math.sqrt(n) * xbar / (math.sqrt(sh2) * math.sqrt(q))
print(f"S={S!r} Vn2={V2!r} V1n={V2 - n!r} V2n={V2n!r} sh2={sh2!r} t={t!r}")
X = [a[2], a[9]]
S = sum(X); xbar = S / n
sh2 = sum((v - xbar) ** 2 for v in X) / (n - 1)
print(f"units 3,10: t={math.sqrt(n) * xbar / (math.sqrt(sh2) * math.sqrt(q))!r}")

print("== exact DP, a_k = k, N = 30, n = 10, P(S >= 160)")
N, n = 30, 10
cnt = [[0] * (sum(range(21, 31)) + 1) for _ in range(n + 1)]
cnt[0][0] = 1
for v in range(1, N + 1):
    for j in range(n, 0, -1):
        row, prev = cnt[j], cnt[j - 1]
        for s in range(len(row) - 1, v - 1, -1):
            row[s] += prev[s - v]
tot = math.comb(N, n)
hits = sum(cnt[n][160:])
print(f"hits={hits} total={tot} p={hits / tot!r}")

print("== mgf N = 2, b = {1,-1}, n = 1, u = 1")
# G = sqrt(2pi)*C(2,1)*(1/2)^2 = sqrt(2pi)/2; alpha = 0 by symmetry.
p = 0.5
K = lambda z: mp.log(p * mp.e ** ((1 - p) * z) + (1 - p) * mp.e ** (-p * z))
K2 = lambda z: mp.diff(K, z, 2)
G = mp.sqrt(2 * mp.pi) * 2 * mp.mpf(1) / 4
approx = (1 / G) * (K2(1) + K2(-1)) ** -0.5 * mp.e ** (K(1) + K(-1))
print(f"approx={float(approx)!r} ratio_to_cosh1={float(approx / mp.cosh(1))!r}")

print("== normal tail and Mills ratio")
print(f"tail(2)={mp.nstr(mp.erfc(2 / mp.sqrt(2)) / 2, 30)}")
psi1 = mp.erfc(1 / mp.sqrt(2)) / 2 / (mp.e ** (-0.5) / mp.sqrt(2 * mp.pi))
print(f"psi(1)={mp.nstr(psi1, 25)}")
for xx in [0.5, 1, 3, 5, 8]:
    print(f"tail({xx})={mp.nstr(mp.erfc(xx / mp.sqrt(2)) / 2, 25)}")

print("== x0 transform x = 2, n = 250, q = 0.75")
print(repr(2 * math.sqrt(250) / math.sqrt(250 + 4 * 0.75 - 1)))

print("== implied A for the a_k = k, N = 1000, n = 250, x = 3 reference ratio 1.119")
a = list(range(1, 1001))
mu, s2, b3, md = moments(a)
om = math.sqrt(1000 * 0.25 * 0.75)
print(repr(abs(math.log(1.119)) * om / (4 ** 3 * b3)), "beta3N =", b3)
a2 = [k * k for k in range(1, 101)]
print("beta3N k^2 N=100:", moments(a2)[2], " k^2 N=1000:", moments([k * k for k in range(1, 1001)])[2])

print("== tilt coefficients, standardized a_k = k, N = 100, n = 25, x = 1, lambda=1, theta=1/2, theta1=36")
a = standardized(list(range(1, 101)))
N, q = 100, 0.75
b = 1 / math.sqrt(N * 0.25 * q)
y = [v * v - 1 for v in a]
m = sum(v * v for v in y) / N
bk = [b * v - 0.5 * b * b * q * w + 36 * b ** 4 * q * q * (w * w - m) for v, w in zip(a, y)]
print({k: bk[k] for k in (0, 1, 49, 50, 99)})

print("== enumeration, N = 4, n = 2, {1,2,3,4}, sum >= 6")
subs = list(itertools.combinations([1, 2, 3, 4], 2))
print(Fraction(sum(1 for s in subs if sum(s) >= 6), len(subs)))
