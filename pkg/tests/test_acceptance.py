"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines print even under
capture) or ``python tests/test_acceptance.py`` for the lines alone.
"""

from __future__ import annotations

import math
import random
import subprocess
import sys
import time
from fractions import Fraction


from cfw import fixtures
from cfw.automatic import period_doubling, thue_morse
from cfw.cli import load_spec
from cfw.contfrac import (
    check_approx_bound,
    check_growth_bound,
    cylinder,
    mirror_formula,
    periodic_value,
)
from cfw.criteria import (
    Witness,
    detect_chain,
    pigeonhole_extract,
    quasi_periodic_witnesses,
)
from cfw.errors import NotFoundError
from cfw.sources import AutomaticSource, LiteralSource, QuasiPeriodicSpec
from cfw.witness import PASS, exponent_fit, verify, verify_mirror, verify_repeat
from cfw.words import FiniteWord, fibonacci_word, mirror

SEED = 20240601


def _line(request, number, title, ok, elapsed, limit, detail=""):
    status = "PASS" if ok else "FAIL"
    budget = f"{elapsed:.2f}s / {limit}s limit" if limit else f"{elapsed:.2f}s"
    text = f"[{status}] criterion {number}: {title} ({budget}){' ' + detail if detail else ''}"
    capman = request.config.pluginmanager.getplugin("capturemanager") if request else None
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print("\n" + text)
    else:
        print(text)
    assert ok, text


# independent oracles: plain recurrences and right-to-left nested evaluation
def _denominators(a):
    q = [0, 1]                      # q_{-1}, q_0
    for x in a:
        q.append(x * q[-1] + q[-2])
    return q                         # q[ell + 1] is q_ell


def _numerators(a):
    p = [1, 0]
    for x in a:
        p.append(x * p[-1] + p[-2])
    return p


def _nested(a):
    num, den = 0, 1
    for q in reversed(a):
        num, den = den, q * den + num
    return Fraction(num, den)


def test_exact_identities(request):
    rng = random.Random(SEED)
    start = time.perf_counter()
    ok = True
    for _ in range(1000):
        a = [rng.randint(1, 10**6) for _ in range(rng.randint(1, 50))]
        q = _denominators(a)
        for ell in range(1, len(a) + 1):
            oracle = Fraction(q[ell], q[ell + 1]) == _nested(a[:ell][::-1])
            ok &= oracle and mirror_formula(a, ell)
    elapsed = time.perf_counter() - start
    _line(request, 1, "mirror formula on 1000 random words", ok and elapsed < 10, elapsed, 10)


def test_classical_bounds(request):
    rng = random.Random(SEED + 1)
    start = time.perf_counter()
    ok = True
    checks = 0
    for _ in range(1000):
        a = [rng.randint(1, 50) for _ in range(rng.randint(3, 40))]
        p, q = _numerators(a), _denominators(a)
        for ell in range(0, len(a) + 1):
            ok &= abs(p[ell] * q[ell + 1] - p[ell + 1] * q[ell]) == 1
        for ell in range(1, len(a) - 1):
            verdict, slack = check_approx_bound(a, ell)
            ok &= verdict and slack > 0
            checks += 1
        for ell in range(1, len(a)):
            for h in {1, 2, len(a) - ell}:
                if ell + h <= len(a):
                    ok &= check_growth_bound(a, ell, h)
                    # oracle in floating point with a generous margin
                    ok &= q[ell + h + 1] >= q[ell + 1] * math.sqrt(2) ** (h - 1) * (1 - 1e-12)
                    checks += 1
    elapsed = time.perf_counter() - start
    _line(request, 2, "approximation and growth bounds, determinant", ok and elapsed < 10,
          elapsed, 10, f"{checks} exact checks")


def test_quadratic_approximants(request):
    rng = random.Random(SEED + 2)
    start = time.perf_counter()
    ok = True
    for _ in range(100):
        W = [rng.randint(1, 5) for _ in range(rng.randint(0, 6))]
        period = [rng.randint(1, 5) for _ in range(rng.randint(1, 6))]
        cut = rng.randint(1, len(period))
        U, V = period[:cut], period[cut:]
        reps = 200 // len(period) + 1
        deep = W + period * reps
        # root of the approximant polynomial lies in the 200-term cylinder
        qa = periodic_value(W, period)
        ok &= qa.value_interval(Fraction(1, 10**80)).intersects(cylinder(deep[: max(200, len(W) + len(period))]))
        # the witness W U V U on a source continuing with a random tail
        tail = [rng.randint(1, 5) for _ in range(24)]
        letters = W + U + V + U + tail
        rec = verify_repeat(LiteralSource(letters), Witness("repeat", W, U, V))
        q = _denominators(letters)
        w, T = len(W), len(W) + len(U) + len(V)
        A, B, C = (int(x) for x in rec.secondary["polynomial"])
        ok &= max(abs(A), abs(B), abs(C)) <= 2 * q[w + 1] * q[T + 1]
        ok &= (A, B, C) == (qa.a, qa.b, qa.c)
        ok &= rec.bound("approximant_gap").status == PASS
        ok &= rec.bound("height").status == PASS
    elapsed = time.perf_counter() - start
    _line(request, 3, "periodic approximants: root, height, gap", ok and elapsed < 30, elapsed, 30)


def _low_complexity_word(rng, length):
    choice = rng.randrange(4)
    if choice == 0:
        per = [rng.randint(1, 4) for _ in range(rng.randint(1, 8))]
        return (per * (length // len(per) + 1))[:length]
    off = rng.randint(0, 200)
    if choice == 1:
        return list(thue_morse().prefix(off + length))[off:]
    if choice == 2:
        return list(period_doubling().prefix(off + length))[off:]
    return list(fibonacci_word(off + length))[off:]


def test_pigeonhole(request):
    from cfw.words import complexity

    rng = random.Random(SEED + 3)
    start = time.perf_counter()
    ok, tested = True, 0
    while tested < 500:
        c = rng.choice([2, 3, 4])
        n = rng.randint(1, 24)
        word = _low_complexity_word(rng, (c + 1) * n + rng.randint(0, 10))
        if complexity(word[: (c + 1) * n], n) > c * n:
            continue                 # hypothesis not met at this n
        try:
            w = pigeonhole_extract(word, n, c)
        except NotFoundError:
            ok = False
            continue
        tested += 1
        built = list(w.W) + list(w.U) + list(w.V) + list(w.U)
        ok &= built == word[: len(built)]
        ok &= len(w.W) + len(w.V) <= (3 * c + 1) * len(w.U)
        ok &= 3 * len(w.U) >= n
    elapsed = time.perf_counter() - start
    _line(request, 4, "pigeonhole extraction on 500 words", ok and elapsed < 30, elapsed, 30)


def test_automatic_chains(request):
    start = time.perf_counter()
    ok, sizes = True, []
    for dfao in (thue_morse(), period_doubling()):
        src = AutomaticSource(dfao)
        chain = detect_chain(src, "either", 4096, 8)
        word = list(src.prefix(4096))
        lens = [len(w.U) for w in chain]
        ok &= len(chain) >= 5 and all(x < y for x, y in zip(lens, lens[1:]))
        ok &= all(w.reconstructs(word) for w in chain)
        sizes.append(len(chain))
    elapsed = time.perf_counter() - start
    _line(request, 5, "Thue-Morse and period-doubling chains to 4096", ok and elapsed < 60,
          elapsed, 60, f"chain lengths {sizes}")


def _palindromic_chain(rng, steps=5):
    W = FiniteWord([rng.randint(1, 4) for _ in range(rng.randint(0, 3))])
    Z = FiniteWord([rng.randint(1, 4) for _ in range(rng.randint(1, 3))])
    wits = []
    for _ in range(steps):
        V = FiniteWord([rng.randint(1, 4) for _ in range(rng.randint(0, 2))])
        wits.append(Witness("mirror", W, Z, V))
        Z = Z + V + mirror(Z)
    tail = FiniteWord([rng.randint(1, 4) for _ in range(48)])
    return LiteralSource(W + Z + tail), wits


def test_mirror_chains(request):
    rng = random.Random(SEED + 4)
    start = time.perf_counter()
    ok, stepwise, eps = True, 0, []
    for _ in range(50):
        src, wits = _palindromic_chain(rng)
        recs = [verify_mirror(src, w, guard_depth=32) for w in wits]
        ok &= all(b.status == PASS for r in recs for b in r.bounds)
        prods = [r.product.hi for r in recs]
        half = len(prods) // 2
        ok &= prods[-1] < prods[0] and max(prods[half:]) < max(prods[:half])
        stepwise += all(x > y for x, y in zip(prods, prods[1:]))
        e = exponent_fit(recs)
        eps.append(e)
        ok &= e > 0
    elapsed = time.perf_counter() - start
    _line(request, 6, "quasi-palindromic chains: mirror bounds, product decay, fitted exponent",
          ok and elapsed < 60, elapsed, 60,
          f"min eps_hat {min(eps):.3f}; strictly decreasing at every step in {stepwise}/50")


def _quasi_spec(rng, eps):
    lams = [rng.randint(3, 4)]
    for _ in range(4):
        lams.append(math.ceil((1 + eps) * lams[-1]) + rng.randint(0, 1))
    r, blocks = 1, []
    for lam in lams:
        r = min(4, r + rng.randint(0, 1))
        block = [rng.randint(1, 3) for _ in range(r)]
        blocks.append((FiniteWord(block), lam))
    return QuasiPeriodicSpec(FiniteWord(), tuple(blocks))


def test_quasi_periodic(request):
    rng = random.Random(SEED + 5)
    start = time.perf_counter()
    ok, exercised = True, 0
    for k in range(20):
        eps = (Fraction(1, 4), Fraction(1, 2), Fraction(1))[k % 3]
        spec = _quasi_spec(rng, eps)
        lams = spec.repeats
        ok &= all(Fraction(b, a) >= 1 + eps for a, b in zip(lams, lams[1:]))
        chain, report = quasi_periodic_witnesses(spec, eps)
        word = list(spec.word())
        ok &= report.all_ok
        for row in report.rows:
            W = word[: row.start - 1]
            U = word[row.start - 1: row.start - 1 + row.u_len]
            ok &= word[: len(W) + 2 * len(U)] == W + U + U
            ok &= 4 * row.u_len >= row.repeat * row.block_len
            if row.preconditions:
                exercised += 1
                ok &= row.w_len <= 2 * row.block_len * row.repeat / eps
        ok &= all(w.reconstructs(word) for w in chain)
    ok &= exercised > 0
    elapsed = time.perf_counter() - start
    _line(request, 7, "quasi-periodic squares and length bounds", ok and elapsed < 30,
          elapsed, 30, f"{exercised} rows met the growth preconditions")


def _fixture_witnesses():
    for name in fixtures.spec_names():
        spec = load_spec(fixtures.path(name))
        src = spec.source()
        wits = list(spec.witnesses) or list(detect_chain(src, "either", 512, 8))
        yield name, src, wits


def test_refinement_monotone(request):
    start = time.perf_counter()
    ok, decided = True, 0
    for _, src, wits in _fixture_witnesses():
        for w in wits:
            prev = verify(src, w, guard_depth=0)
            for g in (1, 2, 4, 8, 16, 32):
                cur = verify(src, w, guard_depth=g)
                for x, y in zip(prev.bounds, cur.bounds):
                    if x.decided:
                        decided += 1
                        ok &= y.status == x.status
                prev = cur
    elapsed = time.perf_counter() - start
    _line(request, 8, "doubling the guard depth never flips a decided flag", ok, elapsed,
          None, f"{decided} decided flags compared")


def test_determinism(request):
    import tempfile
    from pathlib import Path

    start = time.perf_counter()
    ok = True
    with tempfile.TemporaryDirectory() as tmp:
        for name in fixtures.spec_names():
            outs = []
            for k in range(2):
                out = Path(tmp) / f"{name}-{k}.json"
                proc = subprocess.run(
                    [sys.executable, "-m", "cfw", "all", "--spec", str(fixtures.path(name)),
                     "--out", str(out)], capture_output=True)
                ok &= proc.returncode == 0
                outs.append(out.read_bytes() if out.exists() else b"")
            ok &= bool(outs[0]) and outs[0] == outs[1]
    elapsed = time.perf_counter() - start
    _line(request, 9, "two full pipeline runs are byte-identical", ok, elapsed, None)


if __name__ == "__main__":
    failed = 0
    for fn in (test_exact_identities, test_classical_bounds, test_quadratic_approximants,
               test_pigeonhole, test_automatic_chains, test_mirror_chains, test_quasi_periodic,
               test_refinement_monotone, test_determinism):
        try:
            fn(None)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
