"""Canonical forms and exact group arithmetic in free metabelian nilpotent groups.

Fix the rank-d free group on a0 < a1 < ... < a(d-1) and kill both the second
derived subgroup and all commutators of weight > k.  In the quotient every
element has a unique collected form

    a0^e0 a1^e1 ... a(d-1)^e(d-1) * c1^m1 c2^m2 ...

where the ci run over the *basic commutators*: left-normed brackets
[b1, b2, ..., bw] of generators with b1 > b2 <= b3 <= ... <= bw and
2 <= w <= k.  The derived subgroup is free abelian on these, so we store it
as a sparse integer vector.  Conjugation by a generator a_j acts on that
vector as the unipotent map 1 + D_j, where D_j appends j to a bracket and
re-expresses the result in the basis; D_j raises weight, hence is nilpotent,
and all the product formulas below reduce to finite binomial series in the
D_j.  Everything is exact integer arithmetic; the only "truncation" is the
defining relation weight > k = trivial.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

from .words import DomainError, GroupParams, Word, generator_name, parse_word

Basic = tuple[int, ...]
DVec = dict[Basic, int]


def binom(n: int, r: int) -> int:
    """Binomial coefficient, extended to negative upper argument."""
    if r < 0:
        return 0
    if n >= 0:
        return math.comb(n, r)
    return (-1) ** r * math.comb(-n + r - 1, r)


# --- the basic-commutator vocabulary ----------------------------------------


def is_basic(seq: Basic) -> bool:
    """Shape test: b1 > b2 <= b3 <= ... <= bw with w >= 2."""
    if len(seq) < 2 or seq[0] <= seq[1]:
        return False
    return all(seq[i] <= seq[i + 1] for i in range(1, len(seq) - 1))


@lru_cache(maxsize=None)
def _basics_of_weight(d: int, w: int) -> tuple[Basic, ...]:
    out = []
    for b1 in range(d):
        for b2 in range(b1):
            for tail in combinations_with_replacement(range(b2, d), w - 2):
                out.append((b1, b2) + tail)
    return tuple(out)


def enumerate_basics(params: GroupParams, w: int) -> tuple[Basic, ...]:
    """All basic commutators of weight w, in canonical (lexicographic) order."""
    if not 2 <= w <= params.nilclass:
        raise DomainError(f"weight {w} out of range 2..{params.nilclass}")
    return _basics_of_weight(params.rank, w)


@lru_cache(maxsize=None)
def _all_basics(d: int, k: int) -> tuple[Basic, ...]:
    out = []
    for w in range(2, k + 1):
        out.extend(_basics_of_weight(d, w))
    return tuple(out)


def all_basics(params: GroupParams) -> tuple[Basic, ...]:
    """Every basic commutator of weight 2..k, weight ascending then lexicographic."""
    return _all_basics(params.rank, params.nilclass)


# --- rewriting a left-normed generator bracket into the basis ---------------
#
# Entries of a left-normed bracket at positions >= 3 commute with each other
# (the prefix lies in the derived subgroup, where [t, x, y] = [t, y, x]), so
# the tail may be sorted freely.  If the smallest tail entry still beats the
# second entry the bracket is already basic; otherwise one application of
#   [x, y, z] = [y, z, x]^-1 [x, z, y]      (z the smallest entry)
# lands on two basic brackets.


@lru_cache(maxsize=1 << 16)
def _normalize_raw(seq: Basic) -> tuple[tuple[Basic, int], ...]:
    c1, c2 = seq[0], seq[1]
    if c1 == c2:
        return ()
    sign = 1
    if c1 < c2:
        c1, c2, sign = c2, c1, -1
    tail = sorted(seq[2:])
    if not tail or c2 <= tail[0]:
        return (((c1, c2) + tuple(tail), sign),)
    z, rest = tail[0], tail[1:]
    first = (c2, z) + tuple(sorted([c1] + rest))
    second = (c1, z) + tuple(sorted([c2] + rest))
    return ((first, -sign), (second, sign))


def normalize_left_normed(seq, params: GroupParams) -> DVec:
    """Expansion of the left-normed bracket of generators [seq] in the basis.

    Total: sequences of weight > k map to the empty vector.
    """
    seq = tuple(seq)
    if len(seq) < 2:
        raise DomainError("left-normed bracket needs at least two entries")
    for g in seq:
        if not 0 <= g < params.rank:
            raise DomainError(f"generator index {g} out of range")
    if len(seq) > params.nilclass:
        return {}
    return {s: c for s, c in _normalize_raw(seq)}


# --- action of the generators on the derived subgroup -----------------------


def _vadd(acc: DVec, src: DVec, scale: int = 1) -> None:
    if not scale:
        return
    for s, c in src.items():
        v = acc.get(s, 0) + scale * c
        if v:
            acc[s] = v
        else:
            acc.pop(s, None)


_APPEND_CACHE: dict[tuple[Basic, int], tuple[tuple[Basic, int], ...]] = {}


def _apply_d(vec: DVec, j: int, k: int) -> DVec:
    """D_j: weight-graded map sending a bracket c to [c, a_j] in the basis."""
    out: DVec = {}
    cache = _APPEND_CACHE
    for seq, c in vec.items():
        if len(seq) >= k:
            continue
        hit = cache.get((seq, j))
        if hit is None:
            hit = cache[(seq, j)] = _normalize_raw(seq + (j,))
        for s2, sgn in hit:
            v = out.get(s2, 0) + sgn * c
            if v:
                out[s2] = v
            else:
                out.pop(s2, None)
    return out


@lru_cache(maxsize=1 << 17)
def _act_basis(seq: Basic, j: int, e: int, k: int) -> tuple[tuple[Basic, int], ...]:
    """(1 + D_j)^e = sum_r binom(e, r) D_j^r applied to one basis bracket."""
    out: DVec = {seq: 1}
    cur: DVec = {seq: 1}
    r = 1
    while True:
        cur = _apply_d(cur, j, k)
        if not cur:
            return tuple(out.items())
        _vadd(out, cur, binom(e, r))
        r += 1


def _act_gen_pow(vec: DVec, j: int, e: int, k: int) -> DVec:
    """Conjugation of a derived vector by a_j^e."""
    if not vec or not e:
        return dict(vec)
    out: DVec = {}
    for seq, coef in vec.items():
        for s2, c2 in _act_basis(seq, j, e, k):
            v = out.get(s2, 0) + coef * c2
            if v:
                out[s2] = v
            else:
                out.pop(s2, None)
    return out


def _hockey(vec: DVec, j: int, e: int, k: int) -> DVec:
    """sum_{r>=0} binom(e, r+1) D_j^r applied to vec (a truncated geometric sum)."""
    out: DVec = {}
    cur = vec
    r = 0
    while cur:
        _vadd(out, cur, binom(e, r + 1))
        cur = _apply_d(cur, j, k)
        r += 1
    return out


@lru_cache(maxsize=1 << 15)
def _gen_comm_cached(
    m: int, em: int, j: int, ej: int, k: int
) -> tuple[tuple[Basic, int], ...]:
    base: DVec = {(m, j): 1} if m > j else {(j, m): -1}
    inner = _hockey(base, j, ej, k)
    return tuple(_hockey(inner, m, em, k).items())


def _gen_comm(m: int, em: int, j: int, ej: int, k: int) -> DVec:
    """[a_m^em, a_j^ej] as a derived vector, for arbitrary integer exponents."""
    if m == j or em == 0 or ej == 0 or k < 2:
        return {}
    return dict(_gen_comm_cached(m, em, j, ej, k))


# --- elements ----------------------------------------------------------------


@dataclass(frozen=True)
class Element:
    """Collected canonical form: generator exponents plus a derived vector.

    `derived` is stored as a tuple of (bracket, coefficient) pairs sorted by
    weight then lexicographically, with no zero coefficients, so equality and
    hashing are plain componentwise comparisons.
    """

    params: GroupParams
    exp: tuple[int, ...]
    derived: tuple[tuple[Basic, int], ...] = ()

    def __post_init__(self):
        if len(self.exp) != self.params.rank:
            raise DomainError("exponent vector length does not match rank")
        prev = None
        for seq, c in self.derived:
            if not is_basic(seq) or max(seq) >= self.params.rank:
                raise DomainError(f"{seq} is not a basic commutator here")
            if len(seq) > self.params.nilclass:
                raise DomainError(
                    f"bracket {seq} exceeds the nilpotency class {self.params.nilclass}"
                )
            if c == 0:
                raise DomainError("derived vector stores a zero coefficient")
            key = (len(seq), seq)
            if prev is not None and key <= prev:
                raise DomainError("derived vector not in canonical order")
            prev = key

    def dmap(self) -> DVec:
        return dict(self.derived)

    @property
    def is_identity(self) -> bool:
        return not self.derived and not any(self.exp)

    def in_derived_subgroup(self) -> bool:
        return not any(self.exp)

    def min_weight(self) -> int:
        """Least nonzero layer: 1 if the exponent part moves, else the lightest bracket."""
        if any(self.exp):
            return 1
        if self.derived:
            return min(len(s) for s, _ in self.derived)
        return self.params.nilclass + 1

    def __mul__(self, other: "Element") -> "Element":
        return mul(self, other)

    def inv(self) -> "Element":
        return inverse(self)

    def __pow__(self, n: int) -> "Element":
        return power(self, n)

    def __str__(self) -> str:
        parts = []
        for i, e in enumerate(self.exp):
            if e:
                name = generator_name(i)
                parts.append(name if e == 1 else f"{name}^{e}")
        for seq, c in self.derived:
            br = "[" + ",".join(generator_name(b) for b in seq) + "]"
            parts.append(br if c == 1 else f"{br}^{c}")
        return " ".join(parts) if parts else "1"


def _mk(params: GroupParams, exp, dvec: DVec) -> Element:
    # trusted constructor: inputs come from the engine, skip re-validation
    derived = tuple(
        sorted(((s, c) for s, c in dvec.items() if c), key=lambda p: (len(p[0]), p[0]))
    )
    obj = object.__new__(Element)
    object.__setattr__(obj, "params", params)
    object.__setattr__(obj, "exp", tuple(exp))
    object.__setattr__(obj, "derived", derived)
    return obj


def truncate_weight(x: Element, w: int) -> Element:
    """Drop derived components of weight above w, keeping the same parameters.

    Sound whenever the discarded layers cannot influence the surrounding
    computation (they sit in gamma_{w+1}); for w = 0 the exponent part is
    dropped too.
    """
    if w >= x.params.nilclass or not x.derived or len(x.derived[-1][0]) <= w:
        return x
    if w < 1:
        return identity(x.params)
    return _mk(x.params, x.exp, {s: c for s, c in x.derived if len(s) <= w})


def identity(params: GroupParams) -> Element:
    return _mk(params, (0,) * params.rank, {})


def gen_element(params: GroupParams, i: int, e: int = 1) -> Element:
    if not 0 <= i < params.rank:
        raise DomainError(f"generator index {i} out of range")
    exp = [0] * params.rank
    exp[i] = e
    return _mk(params, exp, {})


def derived_element(params: GroupParams, dvec: DVec) -> Element:
    return _mk(params, (0,) * params.rank, dvec)


def _check_params(x: Element, y: Element) -> None:
    if x.params != y.params:
        raise DomainError(f"parameter mismatch: {x.params} vs {y.params}")


def _rmul_block(exp: list[int], vec: DVec, j: int, c: int, params: GroupParams) -> DVec:
    """Right-multiply the state (exp, vec) by a_j^c, in place for exp.

    Moving a_j^c left past the heavier generator blocks costs the correction
    [a_{j+1}^{e_{j+1}} ... a_{d-1}^{e_{d-1}}, a_j^c], itself pushed to the far
    right; the old derived part is conjugated by a_j^c.
    """
    if c == 0:
        return vec
    d, k = params.rank, params.nilclass
    out = _act_gen_pow(vec, j, c, k)
    for m in range(j + 1, d):
        g = _gen_comm(m, exp[m], j, c, k)
        for p in range(m + 1, d):
            g = _act_gen_pow(g, p, exp[p], k)
        _vadd(out, g)
    exp[j] += c
    return out


def collect(w: Word, params: GroupParams) -> Element:
    """Image of a free-group word under the quotient map, in collected form."""
    exp = [0] * params.rank
    vec: DVec = {}
    for g, e in w.letters:
        if not 0 <= g < params.rank:
            raise DomainError(f"generator index {g} out of range for rank {params.rank}")
        vec = _rmul_block(exp, vec, g, e, params)
    return _mk(params, exp, vec)


def collect_text(text: str, params: GroupParams) -> Element:
    return collect(parse_word(text, params), params)


@lru_cache(maxsize=1 << 15)
def mul(x: Element, y: Element) -> Element:
    _check_params(x, y)
    exp = list(x.exp)
    vec = x.dmap()
    for j in range(x.params.rank):
        vec = _rmul_block(exp, vec, j, y.exp[j], x.params)
    _vadd(vec, y.dmap())
    return _mk(x.params, exp, vec)


@lru_cache(maxsize=1 << 14)
def inverse(x: Element) -> Element:
    d = x.params.rank
    exp = [0] * d
    vec: DVec = {}
    for m in reversed(range(d)):
        vec = _rmul_block(exp, vec, m, -x.exp[m], x.params)
    head = _mk(x.params, (0,) * d, {s: -c for s, c in x.derived})
    return mul(head, _mk(x.params, exp, vec))


def power(x: Element, n: int) -> Element:
    if n < 0:
        return power(inverse(x), -n)
    out = identity(x.params)
    base = x
    while n:
        if n & 1:
            out = mul(out, base)
        base = mul(base, base)
        n >>= 1
    return out


@lru_cache(maxsize=1 << 14)
def _comm_exp_parts(
    params: GroupParams, e: tuple[int, ...], f: tuple[int, ...]
) -> tuple[tuple[Basic, int], ...]:
    """[a0^e0 ... , a0^f0 ...] for two sorted generator-power products."""
    ae = _mk(params, e, {})
    af = _mk(params, f, {})
    return mul(mul(inverse(ae), inverse(af)), mul(ae, af)).derived


def commutator(x: Element, y: Element) -> Element:
    """[x, y] in closed form: with x = A s and y = B t (s, t derived),

        [x, y] = [A, B] + (conj_B - 1) s - (conj_A - 1) t,

    every term a derived vector, no general products needed.
    """
    _check_params(x, y)
    params = x.params
    k = params.nilclass
    out: DVec = dict(_comm_exp_parts(params, x.exp, y.exp))
    if x.derived:
        s = x.dmap()
        conj = s
        for j in range(params.rank):
            conj = _act_gen_pow(conj, j, y.exp[j], k)
        _vadd(out, conj)
        _vadd(out, s, -1)
    if y.derived:
        t = y.dmap()
        conj = t
        for j in range(params.rank):
            conj = _act_gen_pow(conj, j, x.exp[j], k)
        _vadd(out, conj, -1)
        _vadd(out, t)
    return _mk(params, (0,) * params.rank, out)


def left_normed(xs: list[Element]) -> Element:
    if not xs:
        raise DomainError("left-normed bracket of an empty list")
    acc = xs[0]
    for y in xs[1:]:
        acc = commutator(acc, y)
    return acc


def left_normed_rep(x: Element, n: int, y: Element) -> Element:
    """[x, n*y]: bracket with y appended n times; n = 0 returns x."""
    if n < 0:
        raise DomainError("repetition count must be >= 0")
    acc = x
    for _ in range(n):
        acc = commutator(acc, y)
    return acc


def equals(x: Element, y: Element) -> bool:
    _check_params(x, y)
    return x == y


def is_identity(x: Element) -> bool:
    return x.is_identity


def reduce_class(x: Element, j: int) -> Element:
    """Image of x in the class-j quotient: drop brackets of weight > j."""
    if not 1 <= j <= x.params.nilclass:
        raise DomainError(f"class {j} out of range 1..{x.params.nilclass}")
    params = GroupParams(x.params.rank, j)
    return _mk(params, x.exp, {s: c for s, c in x.derived if len(s) <= j})


def gamma_layer(x: Element, w: int) -> list[int]:
    """Coordinates of x on the weight-w layer, for x supported on weight >= w."""
    if not 2 <= w <= x.params.nilclass:
        raise DomainError(f"weight {w} out of range 2..{x.params.nilclass}")
    for i, e in enumerate(x.exp):
        if e:
            raise DomainError(
                f"element not in the weight-{w} layer: generator {generator_name(i)} "
                f"has exponent {e}"
            )
    coords = {s: 0 for s in enumerate_basics(x.params, w)}
    for seq, c in x.derived:
        if len(seq) < w:
            raise DomainError(
                f"element not in the weight-{w} layer: bracket {list(seq)} has "
                f"weight {len(seq)}"
            )
        if len(seq) == w:
            coords[seq] = c
    return list(coords.values())


# --- JSON --------------------------------------------------------------------


def element_to_json(x: Element) -> dict:
    return {
        "rank": x.params.rank,
        "class": x.params.nilclass,
        "exp": list(x.exp),
        "derived": [{"seq": list(s), "coef": c} for s, c in x.derived],
    }


def element_from_json(obj, params: GroupParams | None = None) -> Element:
    """Accepts the Element schema, or a plain word string when params are given."""
    if isinstance(obj, str):
        if params is None:
            raise DomainError("a word string needs explicit group parameters")
        return collect_text(obj, params)
    if not isinstance(obj, dict):
        raise DomainError("element JSON must be an object or a word string")
    if "rank" in obj or "class" in obj or params is None:
        params = GroupParams(int(obj["rank"]), int(obj["class"]))
    vec: DVec = {}
    for t in obj.get("derived", []):
        seq = tuple(int(b) for b in t["seq"])
        vec[seq] = vec.get(seq, 0) + int(t["coef"])
    exp = [int(e) for e in obj.get("exp", [0] * params.rank)]
    derived = tuple(
        sorted(((s, c) for s, c in vec.items() if c), key=lambda p: (len(p[0]), p[0]))
    )
    # the public constructor validates shape, weight and order
    return Element(params, tuple(exp), derived)


def element_from_text(text: str, params: GroupParams) -> Element:
    """Parse either JSON or word syntax, whichever fits."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return element_from_json(json.loads(stripped), params)
    return collect_text(stripped, params)
