"""Independent equality oracle via a truncated matrix representation.

Words map to upper-triangular pairs (s, m): s a polynomial in X_0..X_{d-1}
truncated at total degree k, m a length-d vector of polynomials truncated at
degree k-1, with product (s1, m1)*(s2, m2) = (s1*s2, s1*m2 + m1) and
generator images a_i -> (1 + X_i, e_i).  The module coordinates behave like
first derivatives, which is why their degree cap sits one below the scalar
cap; with these caps the kernel is expected to be exactly the defining
relations of the class-k metabelian quotient.  That exactness is *checked*,
not assumed: see kernel_selfcheck.  The oracle shares no code with the
collector in :mod:`metanil.core`, so agreement between the two is meaningful
evidence for both.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Basic, binom, enumerate_basics
from .words import DomainError, GroupParams, Word, parse_word


class TruncPoly:
    """Sparse integer polynomial in nvars variables, total degree <= cap."""

    __slots__ = ("nvars", "cap", "terms")

    def __init__(self, nvars: int, cap: int, terms: dict | None = None):
        self.nvars = nvars
        self.cap = cap
        self.terms = {}
        if terms:
            for key, c in terms.items():
                if c and sum(key) <= cap:
                    self.terms[key] = c

    @classmethod
    def const(cls, nvars: int, cap: int, c: int) -> "TruncPoly":
        return cls(nvars, cap, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, cap: int, i: int) -> "TruncPoly":
        key = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, cap, {key: 1})

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TruncPoly)
            and self.nvars == other.nvars
            and self.cap == other.cap
            and self.terms == other.terms
        )

    def __add__(self, other: "TruncPoly") -> "TruncPoly":
        out = dict(self.terms)
        for key, c in other.terms.items():
            v = out.get(key, 0) + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        res = TruncPoly(self.nvars, self.cap)
        res.terms = out
        return res

    def __neg__(self) -> "TruncPoly":
        res = TruncPoly(self.nvars, self.cap)
        res.terms = {key: -c for key, c in self.terms.items()}
        return res

    def __sub__(self, other: "TruncPoly") -> "TruncPoly":
        return self + (-other)

    def __mul__(self, other: "TruncPoly") -> "TruncPoly":
        cap = self.cap
        out: dict = {}
        left = [(key, sum(key), c) for key, c in self.terms.items()]
        right = [(key, sum(key), c) for key, c in other.terms.items()]
        for k1, d1, c1 in left:
            for k2, d2, c2 in right:
                if d1 + d2 > cap:
                    continue
                key = tuple(a + b for a, b in zip(k1, k2))
                v = out.get(key, 0) + c1 * c2
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        res = TruncPoly(self.nvars, cap)
        res.terms = out
        return res

    def recap(self, cap: int) -> "TruncPoly":
        return TruncPoly(self.nvars, cap, self.terms)

    def inv(self) -> "TruncPoly":
        """Inverse of a unit (constant term +-1) by the geometric series."""
        c = self.constant_term()
        if c not in (1, -1):
            raise DomainError("only units with constant term +-1 are invertible")
        n = self - TruncPoly.const(self.nvars, self.cap, c)
        q = n * TruncPoly.const(self.nvars, self.cap, c)
        out = TruncPoly.const(self.nvars, self.cap, 1)
        term = out
        for _ in range(self.cap):
            term = -(term * q)
            if term.is_zero():
                break
            out = out + term
        return out * TruncPoly.const(self.nvars, self.cap, c)

    def __repr__(self) -> str:
        return f"TruncPoly({self.terms!r})"


@dataclass(frozen=True, eq=False)
class MagnusMatrix:
    scalar: TruncPoly
    module: tuple[TruncPoly, ...]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MagnusMatrix)
            and self.scalar == other.scalar
            and self.module == other.module
        )

    def is_identity(self) -> bool:
        return self.scalar.constant_term() == 1 and not (
            self.scalar - TruncPoly.const(self.scalar.nvars, self.scalar.cap, 1)
        ).terms and all(m.is_zero() for m in self.module)


def mm_identity(params: GroupParams) -> MagnusMatrix:
    d, k = params.rank, params.nilclass
    return MagnusMatrix(
        TruncPoly.const(d, k, 1), tuple(TruncPoly(d, k - 1) for _ in range(d))
    )


def mm_mul(a: MagnusMatrix, b: MagnusMatrix) -> MagnusMatrix:
    s = a.scalar * b.scalar
    s_low = a.scalar.recap(a.module[0].cap)
    module = tuple(s_low * mb + ma for ma, mb in zip(a.module, b.module))
    return MagnusMatrix(s, module)


def mm_inv(a: MagnusMatrix) -> MagnusMatrix:
    s_inv = a.scalar.inv()
    s_inv_low = s_inv.recap(a.module[0].cap)
    return MagnusMatrix(s_inv, tuple(-(s_inv_low * m) for m in a.module))


def mm_comm(a: MagnusMatrix, b: MagnusMatrix) -> MagnusMatrix:
    return mm_mul(mm_mul(mm_inv(a), mm_inv(b)), mm_mul(a, b))


def _gen_power(params: GroupParams, i: int, e: int) -> MagnusMatrix:
    """Closed form of the i-th generator image raised to any integer power."""
    d, k = params.rank, params.nilclass
    scalar = TruncPoly(d, k, {})
    for r in range(k + 1):
        c = binom(e, r)
        if c:
            key = tuple(r if j == i else 0 for j in range(d))
            scalar.terms[key] = c
    mod = TruncPoly(d, k - 1, {})
    for r in range(k):
        c = binom(e, r + 1)
        if c:
            key = tuple(r if j == i else 0 for j in range(d))
            mod.terms[key] = c
    module = tuple(mod if j == i else TruncPoly(d, k - 1) for j in range(d))
    return MagnusMatrix(scalar, module)


def magnus_of_word(w: Word, params: GroupParams) -> MagnusMatrix:
    acc = mm_identity(params)
    for g, e in w.letters:
        if not 0 <= g < params.rank:
            raise DomainError(f"generator index {g} out of range for rank {params.rank}")
        acc = mm_mul(acc, _gen_power(params, g, e))
    return acc


def oracle_equal(w1: Word, w2: Word, params: GroupParams) -> bool:
    return magnus_of_word(w1, params) == magnus_of_word(w2, params)


def _basic_matrix(seq: Basic, params: GroupParams) -> MagnusMatrix:
    acc = _gen_power(params, seq[0], 1)
    for g in seq[1:]:
        acc = mm_comm(acc, _gen_power(params, g, 1))
    return acc


@dataclass(frozen=True)
class SelfCheckReport:
    ok: bool
    checks: int
    failures: tuple[str, ...]


# products of two derived-subgroup brackets: dead in any metabelian quotient
_SECOND_DERIVED_WITNESSES = (
    "[[b,a],[b,a,a]]",
    "[[b,a],[b,a,b]]",
    "[[b,a,a],[b,a,b]]",
    "[[b,a],[c,a]]",
    "[[c,b],[c,a,a]]",
    "[[c,a],[c,b,b]]",
)


def kernel_selfcheck(params: GroupParams) -> SelfCheckReport:
    """Desk-scale audit that the truncation caps pin down the intended kernel.

    Checks (a) no basic commutator of weight <= k dies, (b) every left-normed
    generator bracket of weight k+1 dies, (c) fixed second-derived witness
    words die.  Intended for rank <= 3, class <= 6.
    """
    d, k = params.rank, params.nilclass
    if d > 3 or k > 6:
        raise DomainError("self-check is a desk-scale audit: rank <= 3, class <= 6")
    failures = []
    checks = 0
    for w in range(2, k + 1):
        for seq in enumerate_basics(params, w):
            checks += 1
            if _basic_matrix(seq, params).is_identity():
                failures.append(f"basic commutator {list(seq)} maps to the identity")
    # depth-first extension by one generator at a time; identity nodes stay
    # identity under further bracketing and can be pruned
    def extend(mat: MagnusMatrix, depth: int):
        nonlocal checks
        if depth == k + 1:
            checks += 1
            if not mat.is_identity():
                failures.append(f"a weight-{k + 1} bracket survives truncation")
            return
        for g in range(d):
            nxt = mm_comm(mat, _gen_power(params, g, 1))
            if nxt.is_identity() and depth + 1 < k + 1:
                checks += 1
                continue
            extend(nxt, depth + 1)

    if k >= 1:
        for g1 in range(d):
            extend(_gen_power(params, g1, 1), 1)
    if d >= 2:
        for text in _SECOND_DERIVED_WITNESSES:
            if d < 3 and "c" in text:
                continue
            checks += 1
            if not magnus_of_word(parse_word(text, params), params).is_identity():
                failures.append(f"second-derived witness {text} does not die")
    return SelfCheckReport(not failures, checks, tuple(failures))
