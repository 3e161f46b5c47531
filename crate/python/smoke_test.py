"""Smoke test for the numcarry Python bindings.

Build and install first:
    pip install --no-build-isolation -e crates/py
"""

import math

import numcarry_py as nc


def zeckendorf(n, terms):
    """Greedy digits of n, most significant first."""
    k = max(i for i, g in enumerate(terms) if g <= n) if n else -1
    out = []
    for g in reversed(terms[: k + 1]):
        out.append(n // g)
        n %= g
    return out


def carry(u, v):
    """Positions that change from u to v, counted on the longer word."""
    if len(u) != len(v):
        return max(len(u), len(v))
    lcp = next((i for i, (a, b) in enumerate(zip(u, v)) if a != b), len(u))
    return len(u) - lcp


def main():
    # Binary carries against bit counting.
    b2 = nc.System.builtin("base(2)")
    expect = [(((i + 1) ^ i).bit_length()) for i in range(1, 2000)]
    assert b2.carries(2000)[1:] == expect
    r = b2.estimate(1_000_000)
    assert abs(r["mean"] - 2.0) < 1e-3, r["mean"]
    assert r["theory"]["exact"] == "2"

    # Fibonacci carries against a Zeckendorf oracle.
    fib = [1, 2]
    while fib[-1] < 10**6:
        fib.append(fib[-1] + fib[-2])
    words = [zeckendorf(n, fib) for n in range(5001)]
    oracle = [carry(words[i], words[i + 1]) for i in range(5000)]
    g = nc.System.greedy(name="fibonacci")
    assert g.carries(5000) == oracle
    phi = (1 + math.sqrt(5)) / 2
    assert abs(g.theory()["value"] - phi / (phi - 1)) < 1e-12

    # Existence verdicts.
    assert nc.analyze("K1")["verdict"]["verdict"] == "undetermined"
    fv = nc.analyze("fibonacci")["verdict"]
    assert fv["verdict"] == "exists" and abs(fv["value"] - phi / (phi - 1)) < 1e-12

    # Language H: probes at 3*2^l - 1 stay near 11/6, filtered means near 2.
    h = nc.System.builtin("H")
    pts = [3 * 2**l - 1 for l in range(1, 19)]
    last = h.probe(pts)[-1]
    assert abs(last["mean"] - 11 / 6) < 1e-3, last
    assert h.filtered(16)["points"][-1]["mean"] > 1.95

    # Rational base 3/2 tends to 3.
    rb = nc.System.rational("3/2")
    assert abs(rb.estimate(200_000)["mean"] - 3.0) < 0.05

    # Tribonacci layers and the Parry profile.
    psi = nc.beta_profile("1 -1 -1 -1", 8)
    assert psi["class"] == "simple" and psi["quasi_greedy"] == "(110)^w"
    assert psi["basis"][:6] == ["1", "2", "4", "7", "13", "24"]
    lay = nc.layers("1 -1 -1 -1", 30, 1_000_000)
    b = 1.839286755214161
    assert abs(lay["estimate"] - b / (b - 1)) < 1e-2, lay["estimate"]
    cyl = nc.cylinder("tribonacci", "1", 200_000)
    assert abs(cyl["measure"] - (1 - 1 / b)) < 1e-2

    try:
        nc.System.rational("2/3")
    except ValueError:
        pass
    else:
        raise AssertionError("p <= q must be rejected")

    print("smoke test passed")


if __name__ == "__main__":
    main()
