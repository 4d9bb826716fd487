"""Groebner bases, normal forms, elimination and image ideals of ring maps.

Buchberger with the coprime and chain criteria, reduced bases, a content-
addressed on-disk cache, and two routes to the homogeneous ideal of an
embedded variety: graph-ideal elimination (the default) and a certified
degree-by-degree linear-algebra kernel for fixtures where elimination is
beyond desk scale. The linear-algebra route requires an externally supplied
bound on generator degrees (the Mumford regularity, computed independently
by the checks module): an m-regular saturated ideal sheaf is generated in
degrees <= m.
"""

from __future__ import annotations

import hashlib
import heapq
import math
import os

from .errors import (MalformedInputError, ResourceLimitError, RingMismatchError)
from . import exactalg
from .exactalg import Matrix, SpanSolver
from .polyring import (GREVLEX, Polynomial, Ring, RingMap, apply_map,
                       format_polynomial, monomial_div, monomial_divides,
                       monomial_lcm, monomials_of_degree, mul_monomials,
                       parse_polynomial)

DEFAULT_DEGREE_CAP = 30
DEFAULT_PAIR_CAP = 1_000_000


class Ideal:
    """A homogeneous ideal given by generators."""

    __slots__ = ("ring", "gens")

    def __init__(self, ring: Ring, gens):
        for g in gens:
            if g.ring != ring:
                raise RingMismatchError("generator outside the ideal's ring")
            if g.is_zero():
                raise MalformedInputError("zero generator")
            if not g.is_homogeneous():
                raise MalformedInputError("inhomogeneous generator")
        self.ring = ring
        self.gens = list(gens)

    def __repr__(self):
        return f"Ideal({len(self.gens)} gens in {self.ring!r})"


class GroebnerBasis:
    """A reduced Groebner basis for the ring's order."""

    __slots__ = ("ring", "basis", "reduced")

    def __init__(self, ring, basis, reduced=True):
        self.ring = ring
        self.basis = basis
        self.reduced = reduced

    def leading_monomials(self):
        return [g.leading_monomial() for g in self.basis]

    def __repr__(self):
        return f"GroebnerBasis({len(self.basis)} elements)"


def _reduce_full(p: Polynomial, basis, lead_mons) -> Polynomial:
    """Full division remainder of p by basis (basis elements monic)."""
    ring = p.ring
    key = ring.monomial_key
    work = dict(p.terms)
    remainder = {}
    zero = ring.field.zero
    while work:
        m = max(work, key=key)
        c = work.pop(m)
        hit = None
        for lm, g in zip(lead_mons, basis):
            if monomial_divides(lm, m):
                hit = (lm, g)
                break
        if hit is None:
            remainder[m] = c
            continue
        lm, g = hit
        shift = monomial_div(m, lm)
        for gm, gc in g.terms.items():
            if gm == lm:
                continue
            mm = mul_monomials(gm, shift)
            s = work.get(mm, zero) + (-c) * gc
            if hasattr(ring.field, "p"):
                s %= ring.field.p
            if s == zero:
                work.pop(mm, None)
            else:
                work[mm] = s
    return Polynomial(ring, remainder)


def normal_form(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    """Remainder of p modulo gb; zero iff p lies in the ideal."""
    if p.ring != gb.ring:
        raise RingMismatchError("polynomial not in the basis ring")
    return _reduce_full(p, gb.basis, gb.leading_monomials())


def buchberger(ideal: Ideal, *, degree_cap=DEFAULT_DEGREE_CAP,
               pair_cap=DEFAULT_PAIR_CAP, cache=None) -> GroebnerBasis:
    """Reduced Groebner basis under the ideal ring's order.

    Raises ResourceLimitError when the exponent-degree cap or the processed
    S-pair cap is exceeded; never truncates silently.
    """
    ring = ideal.ring
    if cache is not None:
        hit = cache.get(ideal)
        if hit is not None:
            return hit
    key = ring.monomial_key
    gens = sorted((g.monic() for g in ideal.gens),
                  key=lambda g: (sum(g.leading_monomial()), key(g.leading_monomial())))
    basis = []
    lead = []

    pairs = []  # heap of (lcm degree, lcm key-inverse breaker, i, j)
    processed = set()

    def push_pair(i, j):
        lm = monomial_lcm(lead[i], lead[j])
        heapq.heappush(pairs, (sum(lm), lm, i, j))

    def add_poly(g):
        g = g.monic()
        basis.append(g)
        lead.append(g.leading_monomial())
        n = len(basis) - 1
        for i in range(n):
            push_pair(i, n)

    for g in gens:
        if sum(g.leading_monomial()) > degree_cap:
            raise ResourceLimitError("generator degree exceeds cap")
        r = _reduce_full(g, basis, lead)
        if not r.is_zero():
            add_poly(r)

    count = 0
    while pairs:
        _, lm, i, j = heapq.heappop(pairs)
        if (i, j) in processed:
            continue
        processed.add((i, j))
        count += 1
        if count > pair_cap:
            raise ResourceLimitError(f"S-pair cap {pair_cap} exceeded")
        li, lj = lead[i], lead[j]
        lcm = monomial_lcm(li, lj)
        # coprime criterion
        if lcm == mul_monomials(li, lj):
            continue
        # chain criterion: some k with LT_k | lcm and both pairs already done
        skip = False
        for k in range(len(basis)):
            if k in (i, j) or not monomial_divides(lead[k], lcm):
                continue
            a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
            if a in processed and b in processed:
                skip = True
                break
        if skip:
            continue
        if sum(lcm) > degree_cap:
            raise ResourceLimitError(f"S-pair degree {sum(lcm)} exceeds cap {degree_cap}")
        gi, gj = basis[i], basis[j]
        si = {mul_monomials(m, monomial_div(lcm, li)): c for m, c in gi.terms.items()}
        sj = {mul_monomials(m, monomial_div(lcm, lj)): c for m, c in gj.terms.items()}
        spoly = Polynomial(ring, si) - Polynomial(ring, sj)
        r = _reduce_full(spoly, basis, lead)
        if not r.is_zero():
            if sum(r.leading_monomial()) > degree_cap:
                raise ResourceLimitError("basis degree exceeds cap")
            add_poly(r)

    gb = GroebnerBasis(ring, _interreduce(basis), reduced=True)
    if cache is not None:
        cache.put(ideal, gb)
    return gb


def _interreduce(basis):
    """Turn a Groebner basis into the reduced one (unique for the order)."""
    if not basis:
        return []
    ring = basis[0].ring
    key = ring.monomial_key
    # drop elements whose LT is divisible by another's LT
    basis = sorted(basis, key=lambda g: (sum(g.leading_monomial()), key(g.leading_monomial())))
    kept = []
    for g in basis:
        lm = g.leading_monomial()
        if not any(monomial_divides(h.leading_monomial(), lm) for h in kept):
            kept.append(g)
    # reduce each tail against the others
    out = []
    for idx, g in enumerate(kept):
        others = kept[:idx] + kept[idx + 1:]
        lead = [h.leading_monomial() for h in others]
        out.append(_reduce_full(g, others, lead).monic())
    out.sort(key=lambda g: (sum(g.leading_monomial()), key(g.leading_monomial())))
    return out


# -- minimal generators by graded linear algebra ------------------------------

def minimal_generators(ring: Ring, polys):
    """Minimal homogeneous generating subset of the span-ideal of polys.

    Assumes standard single grading. Deterministic: sorts by (degree, order
    key) and keeps the earliest independent ones.
    """
    if not polys:
        return []
    def sort_key(p):
        return (p.degree()[0], tuple(sorted(p.terms)))
    polys = sorted(polys, key=sort_key)
    by_degree = {}
    for p in polys:
        by_degree.setdefault(p.degree()[0], []).append(p)
    chosen = []
    field = ring.field
    for d in sorted(by_degree):
        mons = monomials_of_degree(ring, d)
        index = {m: i for i, m in enumerate(mons)}
        span = SpanSolver(Matrix(len(mons), 0, field))
        for g in chosen:
            gd = g.degree()[0]
            for m in monomials_of_degree(ring, d - gd):
                col = {index[mul_monomials(t, m)]: c for t, c in g.terms.items()}
                span.insert(col)
        for p in by_degree[d]:
            col = {index[t]: c for t, c in p.terms.items()}
            if span.insert(col) is None:
                chosen.append(p.monic())
    return chosen


# -- image ideal of a ring map -------------------------------------------------

def _combined_ring(f: RingMap):
    t, s = f.target, f.source
    glen = t.grading_length
    sdeg = f.image_degree
    if len(sdeg) != glen:
        raise MalformedInputError("grading length mismatch between map rings")
    # synthetic names: lifting works by exponent position, and source/target
    # rings may share variable names (e.g. the identity map)
    names = [f"e{i}" for i in range(t.nvars)] + [f"k{i}" for i in range(s.nvars)]
    degrees = t.degrees + tuple(sdeg for _ in s.names)
    return Ring(names, degrees, order=GREVLEX, field=s.field, elim_block=t.nvars)


def _lift(ring_combined, poly, offset, nvars_total):
    terms = {}
    for m, c in poly.terms.items():
        e = [0] * nvars_total
        for i, ei in enumerate(m):
            e[offset + i] = ei
        terms[tuple(e)] = c
    return Polynomial(ring_combined, terms)


def kernel_of_map(f: RingMap, source_relations: Ideal | None = None, *,
                  method="elimination", gen_degree_bound=None,
                  degree_cap=DEFAULT_DEGREE_CAP, pair_cap=DEFAULT_PAIR_CAP,
                  cache=None) -> Ideal:
    """The homogeneous ideal ker(f) = I_X of the closed image of the map.

    method "elimination": graph-ideal block-order elimination (z_i - f_i plus
    source_relations, eliminate target variables).
    method "linalg": degree-by-degree kernels of Sym^d V -> (T/rel)_d, complete
    through gen_degree_bound, which the caller must certify (Mumford
    regularity of the image).
    """
    if method == "elimination":
        ker_gens = _kernel_by_elimination(f, source_relations, degree_cap,
                                          pair_cap, cache)
    elif method == "linalg":
        if gen_degree_bound is None:
            raise MalformedInputError("linalg method needs gen_degree_bound")
        ker_gens = _kernel_by_linalg(f, source_relations, gen_degree_bound)
    else:
        raise MalformedInputError(f"unknown method {method!r}")
    gens = minimal_generators(f.source, ker_gens)
    # postcondition: every generator maps into the source relations' ideal
    gb_rel = _relations_gb(f, source_relations)
    for g in gens:
        image = apply_map(f, g)
        if gb_rel is not None:
            image = normal_form(image, gb_rel)
        if not image.is_zero():
            raise MalformedInputError("kernel generator fails to map to zero")
    return Ideal(f.source, gens)


def _relations_gb(f, source_relations):
    if source_relations is None or not source_relations.gens:
        return None
    return buchberger(source_relations)


def _kernel_by_elimination(f, source_relations, degree_cap, pair_cap, cache):
    comb = _combined_ring(f)
    nt = f.target.nvars
    total = comb.nvars
    gens = []
    for i in range(f.source.nvars):
        z = [0] * total
        z[nt + i] = 1
        zi = Polynomial(comb, {tuple(z): comb.field.one})
        gens.append(zi - _lift(comb, f.images[i], 0, total))
    if source_relations is not None:
        for r in source_relations.gens:
            gens.append(_lift(comb, r, 0, total))
    gb = buchberger(Ideal(comb, gens), degree_cap=degree_cap,
                    pair_cap=pair_cap, cache=cache)
    out = []
    for g in gb.basis:
        if all(all(m[i] == 0 for i in range(nt)) for m in g.terms):
            terms = {m[nt:]: c for m, c in g.terms.items()}
            out.append(Polynomial(f.source, terms))
    return out


def quotient_monomial_basis(f: RingMap, gb_rel, degree):
    """Monomial basis of (T / source relations) in the given multidegree."""
    mons = monomials_of_degree(f.target, degree)
    if gb_rel is None:
        return mons
    leads = gb_rel.leading_monomials()
    return [m for m in mons if not any(monomial_divides(l, m) for l in leads)]


def section_matrix(f: RingMap, source_relations: Ideal | None, d: int,
                   field=None):
    """Matrix of Sym^d(source variables) -> (T/rel) in degree d*image_degree.

    Columns are indexed by monomials_of_degree(source, d); rows by the
    quotient monomial basis. Returns (matrix, source_monomials, row_basis).
    """
    src = f.source
    if field is None:
        field = src.field
    gb_rel = _relations_gb(f, source_relations)
    tdeg = tuple(d * c for c in f.image_degree)
    rows = quotient_monomial_basis(f, gb_rel, tdeg)
    row_index = {m: i for i, m in enumerate(rows)}
    cols = monomials_of_degree(src, (d,) * src.grading_length)
    columns = []
    # cache products along the lexicographic enumeration by peeling one variable
    prod_cache = {}

    def image_of(mono):
        got = prod_cache.get(mono)
        if got is not None:
            return got
        if sum(mono) == 0:
            p = f.target.one()
        else:
            i = next(k for k, e in enumerate(mono) if e)
            rest = list(mono)
            rest[i] -= 1
            p = image_of(tuple(rest)) * f.images[i]
            if gb_rel is not None:
                p = normal_form(p, gb_rel)
        prod_cache[mono] = p
        return p

    for mono in cols:
        p = image_of(mono)
        col = {}
        for m, c in p.terms.items():
            col[row_index[m]] = field.coerce(c)
        columns.append(col)
    return Matrix.from_columns(len(rows), field, columns), cols, rows


def _kernel_by_linalg(f, source_relations, gen_degree_bound):
    src = f.source
    out = []
    for d in range(1, gen_degree_bound + 1):
        mat, cols, _rows = section_matrix(f, source_relations, d)
        ker = exactalg.kernel_basis(mat)
        for kcol in ker.columns():
            terms = {cols[i]: c for i, c in kcol.items()}
            out.append(Polynomial(src, terms))
    return out


# -- Hilbert functions ---------------------------------------------------------

def hilbert_function(ideal, d, *, gb: GroebnerBasis | None = None) -> int:
    """dim of the degree-d piece of S/I.

    Uses the leading-term monomial count when a Groebner basis is supplied,
    else a direct rank computation on the span of generator multiples.
    """
    ring = ideal.ring
    dvec = (d,) * ring.grading_length if isinstance(d, int) else tuple(d)
    if any(c < 0 for c in dvec):
        raise MalformedInputError("negative degree")
    mons = monomials_of_degree(ring, dvec)
    if gb is not None:
        leads = gb.leading_monomials()
        return sum(1 for m in mons if not any(monomial_divides(l, m) for l in leads))
    index = {m: i for i, m in enumerate(mons)}
    columns = []
    for g in ideal.gens:
        gd = g.degree()
        shift = tuple(x - y for x, y in zip(dvec, gd))
        if any(c < 0 for c in shift):
            continue
        for m in monomials_of_degree(ring, shift):
            columns.append({index[mul_monomials(t, m)]: c for t, c in g.terms.items()})
    if not columns:
        return len(mons)
    return len(mons) - exactalg.rank(Matrix.from_columns(len(mons), ring.field, columns))


def is_isomorphic_embedding(v, *, bound=None) -> bool:
    """Certify that a fixture's chosen subsystem embeds the source isomorphically.

    Compares the image Hilbert function against dim H^0(L^d) on a window of
    dim(X)+2 degrees above the predicted regularity, which pins the Hilbert
    polynomial of the image to the source's. Acceptance is certified by a
    full rank mod the default prime (ranks only drop under reduction, so a
    full modular rank is exact); a deficient modular rank rejects, which at
    worst costs the caller a redraw.
    """
    if v.codim_t == 0:
        return True
    if bound is None:
        bound = v.predicted_regularity_bound() + v.dim_X + 2
    for d in range(bound - v.dim_X - 1, bound + 1):
        h0 = v.oracle_h(0, d)
        if math.comb(v.ambient_dim + d, d) < h0:
            return False
        if v.section_rank(d, field=exactalg.PrimeField()) != h0:
            return False
    return True


# -- on-disk cache ---------------------------------------------------------------

class GroebnerCache:
    """Content-addressed cache of reduced bases in the textual syntax.

    Key = hash of the ring signature, field tag, order data and the sorted
    generator texts. Cache hits are bit-identical to recomputation because
    serialization is deterministic.
    """

    def __init__(self, directory):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    @staticmethod
    def _ring_signature(ring: Ring) -> str:
        return "|".join([",".join(ring.names),
                         ";".join(",".join(map(str, dv)) for dv in ring.degrees),
                         ring.order, str(ring.elim_block), ring.field.tag])

    def key(self, ideal: Ideal) -> str:
        sig = self._ring_signature(ideal.ring)
        gens = sorted(format_polynomial(g) for g in ideal.gens)
        blob = sig + "\n" + "\n".join(gens)
        return hashlib.sha256(blob.encode()).hexdigest()

    def _path(self, key):
        return os.path.join(self.directory, key + ".gb")

    def serialize(self, gb: GroebnerBasis) -> str:
        lines = [self._ring_signature(gb.ring)]
        lines += [format_polynomial(g) for g in gb.basis]
        return "\n".join(lines) + "\n"

    def get(self, ideal: Ideal):
        path = self._path(self.key(ideal))
        if not os.path.exists(path):
            return None
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        if not lines or lines[0] != self._ring_signature(ideal.ring):
            return None
        basis = [parse_polynomial(ideal.ring, line) for line in lines[1:] if line]
        return GroebnerBasis(ideal.ring, basis, reduced=True)

    def put(self, ideal: Ideal, gb: GroebnerBasis):
        path = self._path(self.key(ideal))
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(self.serialize(gb))
        os.replace(tmp, path)
