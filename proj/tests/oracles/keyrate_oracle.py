"""Straight-line reimplementation of the decoy-state key rate, used to freeze
reference values in the C++ unit tests. Run: python3 keyrate_oracle.py"""

from mpmath import mp, mpf, exp, log, sqrt, log as ln

mp.dps = 40


def h2(p):
    if p <= 0 or p >= 1:
        return mpf(0)
    return -p * log(p, 2) - (1 - p) * log(1 - p, 2)


def rate(eta, y0, e_det, finite=True, session=mpf(1200)):
    mu, n1, n2 = mpf("0.5"), mpf("0.1"), mpf("0.0007")
    pr = [mpf("0.7"), mpf("0.2"), mpf("0.1")]
    pz = mpf("0.9")
    f = mpf("1.15")
    eps = mpf("1e-10") / 8
    clock = mpf("1e9")
    pulses = session * clock

    def qe(k):
        d = 1 - exp(-eta * k)
        q = y0 + d - y0 * d
        return q, (y0 / 2 * (1 - d) + e_det * d) / q

    (qm, em), (q1, e1), (q2, e2) = qe(mu), qe(n1), qe(n2)

    def dev(n):
        return sqrt(ln(2 / eps) / (2 * n)) if finite else mpf(0)

    dq = [dev(pulses * p) for p in pr]
    px2 = (1 - pz) ** 2
    de1 = dev(pulses * pr[1] * px2 * q1)
    de2 = dev(pulses * pr[2] * px2 * q2)

    # Adversarial shifts stay inside [0, 1].
    def up(v, d):
        return min(v + d, mpf(1))

    def down(v, d):
        return max(v - d, mpf(0))

    y0l = max(mpf(0), (n1 * down(q2, dq[2]) * exp(n2) - n2 * up(q1, dq[1]) * exp(n1)) / (n1 - n2))
    y1l = mu / (mu * n1 - mu * n2 - n1**2 + n2**2) * (
        down(q1, dq[1]) * exp(n1) - up(q2, dq[2]) * exp(n2)
        - (n1**2 - n2**2) / mu**2 * (up(qm, dq[0]) * exp(mu) - y0l))
    e1u = (up(e1, de1) * up(q1, dq[1]) * exp(n1) - down(e2, de2) * down(q2, dq[2]) * exp(n2)) / ((n1 - n2) * y1l)
    e1u = min(max(e1u, mpf(0)), mpf("0.5"))

    dez = dev(pulses * pr[0] * pz**2 * qm)
    sift = clock * pr[0] * pz**2
    r = sift * (y1l * mu * exp(-mu) * (1 - h2(e1u)) - f * up(qm, dq[0]) * h2(min(em + dez, mpf("0.5"))))
    if finite:
        r -= 3 * log(2 / eps, 2) / session
    return r, sift * qm


if __name__ == "__main__":
    for finite in (True, False):
        r, s = rate(mpf("0.1"), mpf("1e-6"), mpf("0.01"), finite)
        print("finite" if finite else "asymptotic", mp.nstr(r, 17), "sifted", mp.nstr(s, 17))
    r, s = rate(mpf("0.01"), mpf("1e-4"), mpf("0.015"), True)
    print("noisy finite", mp.nstr(r, 17), "sifted", mp.nstr(s, 17))
