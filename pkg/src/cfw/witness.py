"""Certified inequality checks attached to repeat and mirror witnesses.

The target ``alpha = [0; a_1, a_2, ...]`` is only ever known through the
cylinder of a finite prefix of its expansion, so every check is an interval
computation with three outcomes: pass, fail, indeterminate.  Inequalities
with explicit constants get a verdict.  Estimates that only hold up to an
unspecified constant are reported as exact ratio enclosures and never judged.

Logarithms only show up in the ``diagnostics`` of a record (delta, eps
estimates); they are floats and no verdict depends on them.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from cfw.contfrac import (
    ConvergentTable,
    RationalInterval,
    decide,
    fraction_str,
    last_convergent,
    periodic_value,
    quadratic_at,
)
from cfw.criteria import Witness
from cfw.errors import ContractError
from cfw.sources import LiteralSource, SequenceSource
from cfw.words import FiniteWord

DEFAULT_GUARD_DEPTH = 16

PASS, FAIL, INDETERMINATE = "pass", "fail", "indeterminate"


@dataclass(frozen=True)
class BoundResult:
    """``lhs <= rhs`` (or ``<`` when ``strict``) decided over an enclosure of ``lhs``."""

    name: str
    lhs: RationalInterval
    rhs: Fraction
    strict: bool
    status: str

    @classmethod
    def check(cls, name: str, lhs, rhs, strict: bool) -> BoundResult:
        if not isinstance(lhs, RationalInterval):
            lhs = RationalInterval.point(lhs)
        rhs = Fraction(rhs)
        verdict = decide(lhs, rhs, strict)
        status = INDETERMINATE if verdict is None else (PASS if verdict else FAIL)
        return cls(name, lhs, rhs, strict, status)

    @property
    def decided(self) -> bool:
        return self.status != INDETERMINATE

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs.to_json(),
            "rhs": fraction_str(self.rhs),
            "relation": "<" if self.strict else "<=",
            "status": self.status,
        }


@dataclass(frozen=True)
class VerificationRecord:
    witness: Witness
    w: int
    u: int
    v: int
    depth: int
    convergents: dict
    bounds: tuple[BoundResult, ...]
    ratios: dict                # name -> RationalInterval, estimates with implied constants
    forms: dict                 # name -> RationalInterval
    product: RationalInterval
    base: int                   # product is compared with base ** -eps
    secondary: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        states = {b.status for b in self.bounds}
        if FAIL in states:
            return FAIL
        if INDETERMINATE in states:
            return INDETERMINATE
        return PASS

    def bound(self, name: str) -> BoundResult:
        for b in self.bounds:
            if b.name == name:
                return b
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "witness": self.witness.to_json(),
            "lengths": {"w": self.w, "u": self.u, "v": self.v},
            "alpha_prefix_depth": self.depth,
            "convergents": {k: [str(p), str(q)] for k, (p, q) in self.convergents.items()},
            "bounds": [b.to_json() for b in self.bounds],
            "ratios": {k: iv.to_json() for k, iv in self.ratios.items()},
            "forms": {k: iv.to_json() for k, iv in self.forms.items()},
            "product": self.product.to_json(),
            "product_base": str(self.base),
            "secondary": {
                k: (v.to_json() if isinstance(v, RationalInterval) else v)
                for k, v in self.secondary.items()
            },
            "diagnostics": self.diagnostics,
            "status": self.status,
        }


def _alpha(source, need: int, guard_depth: int) -> tuple[ConvergentTable, int]:
    if guard_depth < 0:
        raise ContractError(f"guard_depth must be non-negative, got {guard_depth}")
    src = source if isinstance(source, SequenceSource) else LiteralSource(source)
    depth = need + guard_depth
    if src.length is not None:
        depth = min(depth, src.length)
    return ConvergentTable(src.prefix(depth)), depth


def _product(*ivs: RationalInterval) -> RationalInterval:
    out = RationalInterval.point(1)
    for iv in ivs:
        out = out * abs(iv)
    return out


def _log_exponent(product: RationalInterval, base: int) -> float | None:
    if product.hi <= 0 or base <= 1:
        return None
    return -(_log(product.hi)) / math.log(base)


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def verify_repeat(source, w: Witness, guard_depth: int = DEFAULT_GUARD_DEPTH) -> VerificationRecord:
    """Certify the approximation chain of a ``W U V U`` prefix.

    ``alpha_n = [0; W, (U V)^inf]`` is a root of ``P(X) = A X^2 - B X + C``
    built from convergents at indices ``w-1, w, T-1, T`` (``T = w+u+v``).
    Checked with explicit constants:

    * ``|alpha - alpha_n| <= 2 / q_t^2`` with ``t = w + 2u + v``
    * ``|A alpha - (q_{w-1} p_T - q_w p_{T-1})| <= 2 q_w / q_T``
    * ``|A alpha - (p_{w-1} q_T - p_w q_{T-1})| <= 2 q_T / q_w``
    * ``H(P) <= 2 q_w q_T``

    ``|P(alpha)|`` is reported relative to ``q_T / (q_w q_t^2)`` and the four
    linear forms are evaluated at ``(A, B_1, B_2, C)``.
    """
    if w.kind != "repeat":
        raise ContractError(f"verify_repeat needs a repeat witness, got {w.kind}")
    w.check_against(source)
    lw, lu, lv = len(w.W), len(w.U), len(w.V)
    T, t = lw + lu + lv, lw + 2 * lu + lv
    tab, depth = _alpha(source, t, guard_depth)
    alpha = tab.cylinder()

    qa = periodic_value(w.W, w.U + w.V)
    A, C = qa.a, qa.c
    B1 = tab.q(lw - 1) * tab.p(T) - tab.q(lw) * tab.p(T - 1)
    B2 = tab.p(lw - 1) * tab.q(T) - tab.p(lw) * tab.q(T - 1)
    if B1 + B2 != qa.b:
        raise AssertionError("middle coefficient disagrees with the convergent table")
    alpha_n = qa.value_interval(alpha.width)

    qw, qT, qt = tab.q(lw), tab.q(T), tab.q(t)
    bounds = (
        BoundResult.check("approximant_gap", abs(alpha - alpha_n), Fraction(2, qt * qt), False),
        BoundResult.check("form_q_side", abs(A * alpha - B1), Fraction(2 * qw, qT), False),
        BoundResult.check("form_p_side", abs(A * alpha - B2), Fraction(2 * qT, qw), False),
        BoundResult.check("height", qa.height, 2 * qw * qT, False),
    )
    L1 = quadratic_at(A, -qa.b, C, alpha)
    forms = {
        "L1": L1,
        "L2": A * alpha - B1,
        "L3": A * alpha - B2,
        "L4": RationalInterval.point(A),
    }
    product = _product(*forms.values())
    base = qw * qT
    ratios = {"poly_at_alpha": abs(L1) * Fraction(qw * qt * qt, qT)}

    _, delta = estimate_delta(tab.word)
    eps_hat = delta * lu / (2 * lw + lu + lv)
    diagnostics = {
        "delta_hat": delta,
        "eps_hat": eps_hat,
        "product_exponent": _log_exponent(product, base),
    }
    snap = {
        f"{name}": (tab.p(i), tab.q(i))
        for name, i in (("w-1", lw - 1), ("w", lw), ("w+u+v-1", T - 1),
                        ("w+u+v", T), ("w+2u+v", t))
    }
    return VerificationRecord(
        witness=w, w=lw, u=lu, v=lv, depth=depth, convergents=snap, bounds=bounds,
        ratios=ratios, forms=forms, product=product, base=base,
        secondary={"polynomial": [str(A), str(qa.b), str(C)]},
        diagnostics=diagnostics,
    )


def verify_mirror(source, w: Witness, guard_depth: int = DEFAULT_GUARD_DEPTH) -> VerificationRecord:
    """Certify the approximation chain of a ``W U V Ū`` prefix.

    ``P/Q = [0; W U V Ū W̄]`` and ``P'/Q'`` is its previous convergent; with
    ``r = |W|``, ``s = |W U|``, ``t = |W U V Ū|`` the checks are

    * ``|Q alpha - P| < Q / q_t^2`` and ``|Q' alpha - P'| < Q / q_t^2``
    * ``|Q alpha - Q'| < Q / q_s^2``
    * ``Q <= 2 q_r q_t <= 2 q_s q_t``

    The forms ``L2..L5`` are evaluated at ``(Q, Q', P, P')``.  When
    ``Q' == P`` (``V`` a palindrome makes the whole word one) the three
    forms of the reduced system are evaluated at ``(Q, Q', P')`` too.
    """
    if w.kind != "mirror":
        raise ContractError(f"verify_mirror needs a mirror witness, got {w.kind}")
    w.check_against(source)
    lw, lu, lv = len(w.W), len(w.U), len(w.V)
    r, s, t = lw, lw + lu, lw + 2 * lu + lv
    tab, depth = _alpha(source, t, guard_depth)
    alpha = tab.cylinder()

    pal = w.word() + w.W.mirror()
    pt = ConvergentTable(pal)
    P, Q = pt.p(len(pal)), pt.q(len(pal))
    P1, Q1 = last_convergent(pal)
    qr, qs, qt = tab.q(r), tab.q(s), tab.q(t)

    bounds = (
        BoundResult.check("palindrome_approx", abs(Q * alpha - P), Fraction(Q, qt * qt), True),
        BoundResult.check("previous_approx", abs(Q1 * alpha - P1), Fraction(Q, qt * qt), True),
        BoundResult.check("mirror_approx", abs(Q * alpha - Q1), Fraction(Q, qs * qs), True),
        BoundResult.check("denominator_size", Q, 2 * qr * qt, False),
        BoundResult.check("denominator_order", 2 * qr * qt, 2 * qs * qt, False),
    )
    L5 = quadratic_at(Q, -(Q1 + P), P1, alpha)
    forms = {
        "L1": Q * alpha - P,
        "L2": Q1 * alpha - P1,
        "L3": Q * alpha - Q1,
        "L4": RationalInterval.point(Q1),
        "L5": L5,
    }
    product = _product(forms["L2"], forms["L3"], forms["L4"], forms["L5"])
    ratios = {"quadratic_form": abs(L5) * Q}
    secondary = {"palindromic_symmetry": Q1 == P}
    if Q1 == P:
        M1 = quadratic_at(Q, -2 * Q1, P1, alpha)
        M2 = Q1 * alpha - P1
        secondary["reduced_forms"] = [M1.to_json(), M2.to_json(),
                                      RationalInterval.point(Q).to_json()]
        secondary["reduced_product"] = _product(M1, M2, RationalInterval.point(Q))
        ratios["reduced_quadratic_form"] = abs(M1) * Q

    _, delta = estimate_delta(tab.word)
    eps_hat = delta * (lu + lv - r) / (r + t) if lu + lv > r else 0.0
    diagnostics = {
        "delta_hat": delta,
        "eps_hat": eps_hat,
        "product_exponent": _log_exponent(product, Q),
    }
    snap = {"r": (tab.p(r), tab.q(r)), "s": (tab.p(s), tab.q(s)), "t": (tab.p(t), tab.q(t)),
            "P/Q": (P, Q), "P'/Q'": (P1, Q1)}
    return VerificationRecord(
        witness=w, w=lw, u=lu, v=lv, depth=depth, convergents=snap, bounds=bounds,
        ratios=ratios, forms=forms, product=product, base=Q,
        secondary=secondary, diagnostics=diagnostics,
    )


def verify(source, w: Witness, guard_depth: int = DEFAULT_GUARD_DEPTH) -> VerificationRecord:
    if w.kind == "repeat":
        return verify_repeat(source, w, guard_depth)
    return verify_mirror(source, w, guard_depth)


def _iroot_ceil(x: int, n: int) -> int:
    """Smallest integer ``m >= 0`` with ``m**n >= x``."""
    if x <= 1:
        return x
    lo, hi = 1 << ((x.bit_length() - 1) // n), 1 << (x.bit_length() // n + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**n >= x:
            hi = mid
        else:
            lo = mid + 1
    return lo


def estimate_delta(a: Sequence[int], bits: int = 32) -> tuple[Fraction, float]:
    """Finite-range stand-in for ``M = 1 + limsup q_l^(1/l)`` and
    ``delta = log 2 / log M``.

    ``M`` is ``1 + max q_l^(1/l)`` over ``l = 1 .. len(a)``, each root rounded
    up to a multiple of ``2**-bits`` exactly, so the returned ``M`` is an
    upper bound for the finite maximum.  ``delta`` is a float.
    """
    a = FiniteWord(a)
    if not a:
        raise ContractError("need at least one partial quotient")
    tab = ConvergentTable(a)
    logs = [math.log(tab.q(ell)) / ell for ell in range(1, len(a) + 1)]
    top = max(logs)
    # certify every index whose float estimate is close to the maximum
    candidates = [ell for ell, x in enumerate(logs, start=1) if x >= top - 1e-6 * max(top, 1)]
    root = max(Fraction(_iroot_ceil(tab.q(ell) << (bits * ell), ell), 1 << bits)
               for ell in candidates)
    m_hat = 1 + root
    return m_hat, math.log(2) / _log(m_hat)


def exponent_fit(records: Sequence[VerificationRecord]) -> float:
    """Least-squares slope of ``log(product)`` on ``log(base)``, negated.

    Uses the upper end of each product enclosure.  Positive when products
    shrink as bases grow.
    """
    pts = [(math.log(r.base), _log(r.product.hi)) for r in records
           if r.product.hi > 0 and r.base > 1]
    if len(pts) < 2 or len({x for x, _ in pts}) < 2:
        raise ContractError("need at least two records with positive products and distinct bases")
    n = len(pts)
    mx = sum(x for x, _ in pts) / n
    my = sum(y for _, y in pts) / n
    sxx = sum((x - mx) ** 2 for x, _ in pts)
    sxy = sum((x - mx) * (y - my) for x, y in pts)
    return -sxy / sxx
