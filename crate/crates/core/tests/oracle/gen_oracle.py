"""Extended-precision reference values for the special-function tests.

Every value is a direct power-series summation carried out with mpmath at a
working precision chosen from the size of the largest series term, then
re-run at twice that precision; a value is only emitted when both runs agree
to 30 digits. Nothing here shares code or algorithms with the Rust crate.

Usage: python3 gen_oracle.py > values.txt
"""

import mpmath as mp


def ml_series(alpha, beta, z, dps):
    mp.mp.dps = dps
    a, b, z = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)
    total = mp.mpf(0)
    k = 0
    small = 0
    tiny = mp.mpf(10) ** (-dps)
    while True:
        term = z**k * mp.rgamma(a * k + b)
        total += term
        if abs(term) < tiny * max(abs(total), mp.mpf(1)) and k > 5:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        k += 1
    return total


def ml(alpha, beta, z):
    x = abs(z)
    digits = int(float(x) ** (1.0 / alpha) / 2.302585 + 40)
    v1 = ml_series(alpha, beta, z, digits)
    v2 = ml_series(alpha, beta, z, 2 * digits)
    mp.mp.dps = 40
    assert abs(v1 - v2) <= mp.mpf(10) ** -30 * max(abs(v2), mp.mpf(10) ** -60), (alpha, beta, z)
    return v2


def wright_series(gamma, z, dps):
    mp.mp.dps = dps
    g, z = mp.mpf(gamma), mp.mpf(z)
    total = mp.mpf(0)
    n = 0
    small = 0
    tiny = mp.mpf(10) ** (-dps)
    while True:
        term = (-z) ** n / mp.factorial(n) * mp.rgamma(1 - g - g * n)
        total += term
        if abs(term) < tiny * max(abs(total), mp.mpf(10) ** (-dps // 2)) and n > 5:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        n += 1
    return total


def wright(gamma, z):
    if z == 0:
        mp.mp.dps = 40
        return mp.rgamma(1 - mp.mpf(gamma))
    zf = float(z)
    grow = (1 - gamma) * zf ** (1.0 / (1 - gamma)) if zf > 0 else 0.0
    digits = int(grow / 2.302585 + 60)
    v1 = wright_series(gamma, z, digits)
    v2 = wright_series(gamma, z, 2 * digits)
    mp.mp.dps = 40
    assert abs(v1 - v2) <= mp.mpf(10) ** -30 * max(abs(v2), mp.mpf(10) ** -80), (gamma, z)
    return v2


def fmt(v):
    mp.mp.dps = 40
    return mp.nstr(v, 20, min_fixed=-1, max_fixed=-1).replace("e", "e")


if __name__ == "__main__":
    print("# mittag_leffler: alpha beta z value")
    alphas = [1.1, 1.25, 1.5, 1.75, 1.9, 2.0]
    zs = [-10000.0, -1000.0, -100.0, -30.0, -10.0, -5.5, -5.0, -4.99, -2.0, -0.5, 0.5, 2.0, 5.0]
    for a in alphas:
        for b in ["1", "2", "a"]:
            beta = a if b == "a" else float(b)
            for z in zs:
                if a < 1.2 and z < -1000.0:
                    continue
                v = ml(a, beta, z)
                print(f"ML {a!r} {beta!r} {z!r} {fmt(v)}")
    print(f"ML 1.5 1.5 -2.0 {fmt(ml(1.5, 1.5, -2.0))}")

    print("# wright: gamma z value")
    gammas = [0.25, 0.5, 0.6, 0.625, 0.75, 0.875, 0.9, 0.95]
    zgrid = [0.0, 0.1, 0.5, 1.0, 1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 4.0, 5.0, 7.0]
    for g in gammas:
        for z in zgrid:
            v = wright(g, z)
            mp.mp.dps = 40
            if z > 0 and abs(v) < mp.mpf(10) ** -40:
                continue
            print(f"WR {g!r} {z!r} {fmt(v)}")
