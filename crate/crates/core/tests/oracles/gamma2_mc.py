"""Independent Monte Carlo estimate of the two-photon star norm for the sharp
cutoff on the unit ball, spinor (1, 0). Prints value and standard error.

    python3 gamma2_mc.py [samples] [seed]
"""
import sys
import numpy as np

N = int(float(sys.argv[1])) if len(sys.argv) > 1 else 10_000_000
SEED = int(sys.argv[2]) if len(sys.argv) > 2 else 20261016
CHUNK = 500_000
VOL = 4.0 / 3.0 * np.pi

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
CHI = np.array([1, 0], dtype=complex)


def ball(rng, n):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * rng.random(n)[:, None] ** (1.0 / 3.0)


def pols(k):
    r = np.linalg.norm(k, axis=1)
    rho = np.hypot(k[:, 0], k[:, 1])
    e1 = np.stack([k[:, 1], -k[:, 0], np.zeros(len(k))], axis=1) / rho[:, None]
    e2 = np.cross(k / r[:, None], e1)
    return [e1, e2]


def sdot(v, chi):
    # sigma . v applied to spinors; v complex (n,3), chi (n,2)
    m = v[:, 0, None, None] * SX + v[:, 1, None, None] * SY + v[:, 2, None, None] * SZ
    return np.einsum("nab,nb->na", m, chi)


def gamma1(k, eps, g, r):
    chi = np.broadcast_to(CHI, (len(k), 2))
    c = np.cross(k, eps).astype(complex)
    return (1j * g / (r + r * r))[:, None] * sdot(c, chi)


def u(k1, e1, g1, r1, k2, e2, g2, r2):
    chi = np.broadcast_to(CHI, (len(k1), 2))
    G = gamma1(k2, e2, g2, r2)
    c1 = (g1[:, None] * np.cross(k1, e1)).astype(complex)
    a1 = g1[:, None] * e1
    a2 = g2[:, None] * e2
    t = -1j * sdot(c1, G)
    t += 2.0 * np.sum(a1 * k2, axis=1)[:, None] * G
    t += np.sum(a1 * a2, axis=1)[:, None] * chi
    return t


def main():
    rng = np.random.default_rng(SEED)
    s1 = s2 = 0.0
    done = 0
    while done < N:
        n = min(CHUNK, N - done)
        k1, k2 = ball(rng, n), ball(rng, n)
        r1, r2 = np.linalg.norm(k1, axis=1), np.linalg.norm(k2, axis=1)
        g1, g2 = 1 / (2 * np.pi * np.sqrt(r1)), 1 / (2 * np.pi * np.sqrt(r2))
        D = r1 + r2 + np.sum((k1 + k2) ** 2, axis=1)
        P1, P2 = pols(k1), pols(k2)
        f = np.zeros(n)
        for l1 in range(2):
            for l2 in range(2):
                S = (u(k1, P1[l1], g1, r1, k2, P2[l2], g2, r2)
                     + u(k2, P2[l2], g2, r2, k1, P1[l1], g1, r1)) / np.sqrt(2)
                f += np.sum(np.abs(S) ** 2, axis=1) / D
        f *= VOL * VOL
        s1 += f.sum()
        s2 += (f * f).sum()
        done += n
    mean = s1 / N
    var = s2 / N - mean * mean
    print(f"{mean:.12e} {np.sqrt(var / N):.6e}")


if __name__ == "__main__":
    main()
