"""Independent high-precision oracle for the frozen constants in the test suite.

Run with `python3 oracle.py`; every printed value is pasted into the tests.
"""
from mpmath import mp, mpf, log, sqrt, ceil, floor

mp.dps = 50


def log2ceil(x):
    return int(ceil(log(x, 2)))


def l_max(n, d, delta):
    nd = mpf(n) * d
    return log2ceil(16 * nd * log(4 * log(8 * nd) / mpf(delta)))


def tilde_l_max(d, delta):
    return log2ceil(16 * mpf(d) * log(4 * log(8 * mpf(d)) / mpf(delta)))


def lemma1_l(d, alpha, s, size, delta):
    return log2ceil(16 * mpf(d) / (mpf(alpha) * s) * log(4 * log(8 * mpf(size) * d) / mpf(delta)))


def lemma1_t(L, h):
    return max(int(ceil(516 * mpf(L) ** 3 * 2 ** L / mpf(h) ** 2)), 2 ** (L + 1) * L)


def cr_threshold(k, delta):
    return sqrt(4 * mpf(2) ** k * log(mpf(k) ** 3 / (mpf("0.15") * delta)))


def csh_spend(L, T):
    return sum(2 ** (L - l + 1) * 2 * (T // (2 ** (L - l + 2) * L)) for l in range(1, L + 1))


def cr_trace(n, d, gap, delta):
    """Zero-noise loop of the candidate search with a single-feature gap."""
    lmax = l_max(n, d, delta)
    spent = 0
    k = 1
    while True:
        T = 2 ** (k + 1)
        for L in range(1, lmax + 1):
            if L * 2 ** (L + 1) > T:
                break
            spent += csh_spend(L, T) + 2 * 2 ** k
            if abs(2 ** k * gap) > cr_threshold(k, delta):
                return k, spent
        k += 1


def cbc_trace(n, d, gap, delta):
    lmax = tilde_l_max(d, delta)
    k = int(ceil(log(n, 2)))
    spent = 0
    while True:
        T = 2 ** (k + 1)
        m = 2 ** k // n
        eps = sqrt(4 * m * log(n * mpf(k) ** 3 / (mpf("0.15") * delta)))
        for L in range(1, lmax + 1):
            if L * 2 ** (L + 1) > T:
                break
            spent += csh_spend(L, T) + 2 * m
            if abs(m * gap) >= 3 * eps:
                spent += 2 * (n - 1) * m
                return k, spent
        k += 1


def lower_bound(n, d, theta, gaps, delta):
    g1 = max(abs(mpf(g)) for g in gaps)
    norm2 = sum(mpf(g) ** 2 for g in gaps)
    a = 2 * (n - 2) / g1 ** 2 * log(1 / (mpf("4.8") * delta))
    b = 2 * mpf(d) / (mpf(theta) * norm2) * log(1 / (6 * mpf(delta)))
    return a, b


def labeling_threshold(m, n, k, delta):
    return sqrt(4 * m * log(n * mpf(k) ** 3 / (mpf("0.15") * delta)))


def complexity(n, theta, gaps):
    d = len(gaps)
    mags = sorted((abs(mpf(g)) for g in gaps if g != 0), reverse=True)
    profile = [(s + 1) * g ** 2 for s, g in enumerate(mags)]
    s_star = profile.index(max(profile)) + 1
    norm2 = sum(g ** 2 for g in mags)
    detect = d / mpf(theta) * (1 / norm2 + mpf(1) / s_star)
    trade = min((mpf(d) / (s + 1) + n) * (1 / g ** 2 + 1) for s, g in enumerate(mags))
    return detect + trade


if __name__ == "__main__":
    print("lemma1_L(64,1,1,1,0.1) =", lemma1_l(64, 1, 1, 1, mpf("0.1")))
    L = lemma1_l(64, 1, 1, 1, mpf("0.1"))
    print("lemma1_T(L, 2) =", lemma1_t(L, 2))
    print("lemma1_T(1, 1) =", lemma1_t(1, 1))
    print("l_max(20,1000,0.4) =", l_max(20, 1000, mpf("0.4")), "raw", log(16 * 20000 * log(4 * log(160000) / mpf("0.4")), 2))
    print("tilde_l_max(1000,0.4) =", tilde_l_max(1000, mpf("0.4")))
    print("l_max(2,1,0.5) =", l_max(2, 1, mpf("0.5")))
    for delta in ("0.05", "0.5"):
        print("thresholds", delta, [mp.nstr(cr_threshold(k, mpf(delta)), 17) for k in range(1, 21)])
    print("cr_trace(2,1,1,0.5) =", cr_trace(2, 1, 1, mpf("0.5")))
    print("cbc_trace(2,1,1,0.5) =", cbc_trace(2, 1, 1, mpf("0.5")))
    print("cr_trace(2,1,1,0.25) =", cr_trace(2, 1, 1, mpf("0.25")))
    print("cbc_trace(2,1,1,0.25) =", cbc_trace(2, 1, 1, mpf("0.25")))
    a, b = lower_bound(20, 1000, "0.5", [15] + [0] * 999, mpf("0.1"))
    print("lower_bound terms", mp.nstr(a, 17), mp.nstr(b, 17))
    for m, n, k, delta in ((1, 2, 10, "0.25"), (51, 20, 10, "0.4"), (1000, 100, 20, "0.05")):
        print("labeling_threshold", m, n, k, delta, mp.nstr(labeling_threshold(m, n, k, mpf(delta)), 17))
    cases = {
        "a": (20, "0.5", [1] * 5 + [0] * 95),
        "b": (10, "0.5", [mpf("0.8")] * 50),
        "c": (12, 1 / mpf(12), [2] + [0] * 59),
        "exp1_s1": (20, "0.5", [15] + [0] * 999),
        "exp1_s1000": (20, "0.5", [15 / sqrt(1000)] * 1000),
    }
    for name, (n, theta, gaps) in cases.items():
        print("complexity", name, mp.nstr(complexity(n, theta, gaps), 17))
