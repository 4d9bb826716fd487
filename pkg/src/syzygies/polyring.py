"""Multivariate polynomial rings with monomial orders and (multi)gradings.

Monomials are exponent tuples; polynomials are {exponent tuple: coefficient}
maps over the ring's field. Gradings are per-variable degree vectors of a
common length (length 1 = standard or weighted, length 2 = bigraded).
"""

from __future__ import annotations

import itertools
import re

from .errors import MalformedInputError, RingMismatchError
from .exactalg import QQ

GREVLEX = "grevlex"


def _grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


class Ring:
    """A polynomial ring: variable names, grading, monomial order, field."""

    __slots__ = ("names", "degrees", "order", "field", "_name_index", "nvars",
                 "elim_block")

    def __init__(self, names, degrees=None, order=GREVLEX, field=QQ, elim_block=0):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise MalformedInputError("variable names must be distinct")
        self.names = names
        self.nvars = len(names)
        if degrees is None:
            degrees = tuple((1,) for _ in names)
        degrees = tuple(tuple(d) for d in degrees)
        if len(degrees) != len(names):
            raise MalformedInputError("one degree vector per variable")
        glen = {len(d) for d in degrees}
        if len(glen) > 1:
            raise MalformedInputError("degree vectors must share a length")
        for d in degrees:
            if sum(d) <= 0:
                raise MalformedInputError("degree vectors need positive total degree")
            if any(c < 0 for c in d):
                raise MalformedInputError("negative grading components unsupported")
        self.degrees = degrees
        self.order = order
        self.field = field
        # elim_block = k means the first k variables dominate (block order);
        # 0 means plain grevlex on all variables.
        self.elim_block = elim_block
        self._name_index = {n: i for i, n in enumerate(names)}

    @property
    def grading_length(self):
        return len(self.degrees[0])

    def monomial_key(self, m):
        """Sort key; larger key = larger monomial in the ring's order."""
        k = self.elim_block
        if k:
            return (_grevlex_key(m[:k]), _grevlex_key(m[k:]))
        return _grevlex_key(m)

    def monomial_degree(self, m):
        """Multidegree of an exponent tuple, as a tuple."""
        acc = [0] * self.grading_length
        for e, dv in zip(m, self.degrees):
            if e:
                for i, c in enumerate(dv):
                    acc[i] += e * c
        return tuple(acc)

    def variable(self, i):
        m = [0] * self.nvars
        m[i] = 1
        return Polynomial(self, {tuple(m): self.field.one})

    def variables(self):
        return [self.variable(i) for i in range(self.nvars)]

    def zero(self):
        return Polynomial(self, {})

    def one(self):
        return Polynomial(self, {(0,) * self.nvars: self.field.one})

    def constant(self, c):
        c = self.field.coerce(c)
        if c == self.field.zero:
            return self.zero()
        return Polynomial(self, {(0,) * self.nvars: c})

    def monomial(self, exps, coeff=1):
        exps = tuple(exps)
        if len(exps) != self.nvars or any(e < 0 for e in exps):
            raise MalformedInputError(f"bad exponent tuple {exps}")
        return Polynomial(self, {exps: self.field.coerce(coeff)})

    def __eq__(self, other):
        return (isinstance(other, Ring) and self.names == other.names
                and self.degrees == other.degrees and self.order == other.order
                and self.field == other.field and self.elim_block == other.elim_block)

    def __hash__(self):
        return hash((self.names, self.degrees, self.order, self.field, self.elim_block))

    def __repr__(self):
        return f"Ring({','.join(self.names)}; {self.field!r})"


def monomials_of_degree(ring: Ring, d):
    """All monomials of multidegree d, sorted descending in the ring's order.

    d may be an int (coerced to a length-1 vector) or a tuple.
    """
    if isinstance(d, int):
        d = (d,)
    d = tuple(d)
    if len(d) != ring.grading_length:
        raise MalformedInputError("degree vector length mismatch")
    if any(c < 0 for c in d):
        raise MalformedInputError("componentwise nonnegative degree required")
    out = []
    exps = [0] * ring.nvars

    def rec(i, remaining):
        if i == ring.nvars:
            if all(c == 0 for c in remaining):
                out.append(tuple(exps))
            return
        dv = ring.degrees[i]
        cap = None
        for c, rc in zip(dv, remaining):
            if c > 0:
                q = rc // c
                cap = q if cap is None else min(cap, q)
        if cap is None:
            # zero degree vector is excluded by Ring invariants
            cap = 0
        for e in range(cap, -1, -1):
            exps[i] = e
            rec(i + 1, tuple(rc - e * c for rc, c in zip(remaining, dv)))
        exps[i] = 0

    rec(0, d)
    out.sort(key=ring.monomial_key, reverse=True)
    return out


def mul_monomials(a, b):
    return tuple(x + y for x, y in zip(a, b))


def monomial_divides(a, b):
    """True iff a | b componentwise."""
    return all(x <= y for x, y in zip(a, b))


def monomial_div(b, a):
    return tuple(y - x for x, y in zip(a, b))


def monomial_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


class Polynomial:
    """Element of a Ring; terms maps exponent tuples to nonzero coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # -- construction helpers ------------------------------------------------
    @classmethod
    def from_terms(cls, ring, terms):
        clean = {}
        z = ring.field.zero
        for m, c in terms.items():
            c = ring.field.coerce(c)
            if c != z:
                clean[tuple(m)] = c
        return cls(ring, clean)

    # -- structure ----------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_homogeneous(self):
        degs = {self.ring.monomial_degree(m) for m in self.terms}
        return len(degs) <= 1

    def degree(self):
        """Multidegree; raises on inhomogeneous or zero input."""
        degs = {self.ring.monomial_degree(m) for m in self.terms}
        if len(degs) != 1:
            raise MalformedInputError("degree of zero or inhomogeneous polynomial")
        return degs.pop()

    def leading_monomial(self):
        if not self.terms:
            raise MalformedInputError("zero polynomial has no leading term")
        return max(self.terms, key=self.ring.monomial_key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def monic(self):
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        if lc == self.ring.field.one:
            return self
        return self.scale(_invert(self.ring.field, lc))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: self.ring.monomial_key(t[0]),
                      reverse=True)

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other):
        if self.ring != other.ring:
            raise RingMismatchError("polynomials from different rings")

    def __add__(self, other):
        self._check(other)
        z = self.ring.field.zero
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, z) + c
            s = _normalize(self.ring.field, s)
            if s == z:
                out.pop(m, None)
            else:
                out[m] = s
        return Polynomial(self.ring, out)

    def __neg__(self):
        f = self.ring.field
        return Polynomial(self.ring, {m: _normalize(f, -c) for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        f = self.ring.field
        c = f.coerce(c)
        if c == f.zero:
            return self.ring.zero()
        return Polynomial(self.ring, {m: _normalize(f, v * c) for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        f = self.ring.field
        z = f.zero
        out = {}
        if len(self.terms) > len(other.terms):
            a, b = other, self
        else:
            a, b = self, other
        for ma, ca in a.terms.items():
            for mb, cb in b.terms.items():
                m = mul_monomials(ma, mb)
                s = out.get(m, z) + ca * cb
                s = _normalize(f, s)
                if s == z:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise MalformedInputError("negative polynomial power")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.ring == other.ring
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return format_polynomial(self)


def _normalize(field, value):
    if hasattr(field, "p"):
        return value % field.p
    return value


def _invert(field, value):
    if hasattr(field, "p"):
        return field.inv(value)
    return 1 / value


class RingMap:
    """Graded ring map S -> T given by one homogeneous image per S-variable.

    All images must be homogeneous of one common target multidegree.
    """

    __slots__ = ("source", "target", "images", "image_degree")

    def __init__(self, source: Ring, target: Ring, images):
        if len(images) != source.nvars:
            raise MalformedInputError("one image per source variable")
        if source.field != target.field:
            raise MalformedInputError("source and target fields differ")
        degs = set()
        for p in images:
            if p.ring != target:
                raise RingMismatchError("image not in the target ring")
            if p.is_zero():
                raise MalformedInputError("zero image")
            degs.add(p.degree())
        if len(degs) != 1:
            raise MalformedInputError("images must share one target degree")
        self.source = source
        self.target = target
        self.images = list(images)
        self.image_degree = degs.pop()


def apply_map(f: RingMap, p: Polynomial) -> Polynomial:
    """Substitute f's images into p (p homogeneous in f.source)."""
    if p.ring != f.source:
        raise RingMismatchError("polynomial not in the map's source ring")
    out = f.target.zero()
    pow_cache = {}

    def power(i, e):
        key = (i, e)
        got = pow_cache.get(key)
        if got is None:
            got = f.images[i] ** e
            pow_cache[key] = got
        return got

    for m, c in p.terms.items():
        term = f.target.constant(c)
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
        out = out + term
    return out


# -- textual syntax ----------------------------------------------------------

_TOKEN = re.compile(r"\s*([+-]|\*|\^|[A-Za-z_][A-Za-z_0-9]*|\d+(?:/\d+)?)")


def parse_polynomial(ring: Ring, text: str) -> Polynomial:
    """Parse `3*x0^2*x1 - 1/2*x2^3` style syntax over the ring's variables."""
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise MalformedInputError(f"bad polynomial syntax at {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    result = ring.zero()
    i = 0
    n = len(tokens)
    while i < n:
        sign = 1
        while i < n and tokens[i] in "+-":
            if tokens[i] == "-":
                sign = -sign
            i += 1
        if i >= n:
            raise MalformedInputError("dangling sign")
        coeff = ring.field.coerce(sign)
        exps = [0] * ring.nvars
        expect_factor = True
        while i < n:
            tok = tokens[i]
            if tok in "+-":
                break
            if tok == "*":
                i += 1
                expect_factor = True
                continue
            if not expect_factor:
                raise MalformedInputError(f"unexpected token {tok!r}")
            if tok[0].isdigit():
                coeff = coeff * ring.field.coerce(tok)
                i += 1
            else:
                if tok not in ring._name_index:
                    raise MalformedInputError(f"unknown variable {tok!r}")
                vi = ring._name_index[tok]
                i += 1
                e = 1
                if i < n and tokens[i] == "^":
                    i += 1
                    if i >= n or not tokens[i].isdigit():
                        raise MalformedInputError("exponent expected after ^")
                    e = int(tokens[i])
                    i += 1
                exps[vi] += e
            expect_factor = False
        coeff = _normalize(ring.field, coeff)
        result = result + Polynomial.from_terms(ring, {tuple(exps): coeff})
    return result


def format_polynomial(p: Polynomial) -> str:
    """Deterministic inverse of parse_polynomial (terms in descending order)."""
    if p.is_zero():
        return "0"
    ring = p.ring
    parts = []
    for m, c in p.sorted_terms():
        factors = []
        for name, e in zip(ring.names, m):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        cs = ring.field.format(c)
        neg = cs.startswith("-")
        mag = cs[1:] if neg else cs
        if factors:
            body = "*".join(factors) if mag == "1" else mag + "*" + "*".join(factors)
        else:
            body = mag
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)
