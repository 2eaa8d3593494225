"""Independent pilot for the trend bands used by the acceptance suite.

Uses numpy's generator and LAPACK eigenvalues, so nothing is shared with
the Rust implementation. Prints the quantities each band constrains.
"""
import numpy as np

rng = np.random.default_rng(20240601)


def wigner(p, eta):
    a = rng.standard_normal((p, p))
    w = np.triu(a, 1)
    w = w + w.T
    w[np.diag_indices(p)] = np.sqrt(eta) * rng.standard_normal(p)
    return w


def max_pair_lambda1(w):
    d = np.diag(w)
    i, j = np.triu_indices(len(d), 1)
    a, b, c = d[i], d[j], w[i, j]
    return np.max(0.5 * (a + b) + np.sqrt(0.25 * (a - b) ** 2 + c * c))


def wigner_band(eta, reps=200):
    out = {}
    for p in (16, 64, 256, 1024):
        t = np.array([max_pair_lambda1(wigner(p, eta)) for _ in range(reps)])
        level = np.sqrt((4.0 + 2.0 * eta) * np.log(p))
        ratio = t / level
        med = np.median(ratio)
        z = t - level
        out[p] = med
        print(f"wigner eta={eta} p={p}: median ratio {med:.4f}, mad {np.median(abs(ratio - med)):.4f}, "
              f"var z {z.var(ddof=1):.4f}, trunc moment {np.mean(np.exp(abs(z)) * (abs(z) >= 3)):.4f}")
    return out


def wishart_band(n=5000, p=200, reps=200):
    zs = []
    for _ in range(reps):
        x = rng.standard_normal((n, p))
        w = x.T @ x
        zs.append((max_pair_lambda1(w) - n) / np.sqrt(n) - 2 * np.sqrt(2 * np.log(p)))
    zs = np.array(zs)
    print(f"wishart n={n} p={p}: median |Z| {np.median(abs(zs)):.4f}")


def rip_bracket(n=60, p=20, m=4, seeds=20):
    from itertools import combinations
    pred = 2 * np.sqrt(m * np.log(p) / n)
    ratios = []
    for _ in range(seeds):
        x = rng.standard_normal((n, p)) / np.sqrt(n)
        w = x.T @ x
        hi, lo = -np.inf, np.inf
        for s in combinations(range(p), m):
            ev = np.linalg.eigvalsh(w[np.ix_(s, s)])
            hi, lo = max(hi, ev[-1]), min(lo, ev[0])
        ratios.append(max(hi - 1, 1 - lo) / pred)
    print(f"rip delta ratio range [{min(ratios):.3f}, {max(ratios):.3f}]")


if __name__ == "__main__":
    wigner_band(2.0)
    wigner_band(0.0)
    wishart_band()
    rip_bracket()
