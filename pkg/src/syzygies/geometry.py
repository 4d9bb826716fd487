"""Fixture constructors, linear projections and exact cohomology oracles.

Three source geometries cover the corpus: projective space with a Veronese
twist, rational normal scrolls over P^1, and genus-2 hyperelliptic curves
y^2 = f(x) polarized by multiples of the hyperelliptic class at infinity.
Each source realizes its section ring concretely (monomial bases, or
weighted forms modulo the single relation w^2 = F), so section modules and
restriction matrices come out of honest polynomial arithmetic, while sheaf
cohomology dimensions come from closed forms.

Projection centers are seeded random integer functionals, certified a
posteriori by the Hilbert-polynomial test; genericity is never assumed.
"""

from __future__ import annotations

import itertools
import math
import random

from gmpy2 import mpq

from .errors import (MalformedInputError, NotFoundWithinBoundError,
                     RetriesExhaustedError, UnsupportedFixtureError)
from . import exactalg, groebner
from .exactalg import Matrix, QQ
from .koszul import GradedModuleData
from .polyring import (Polynomial, Ring, RingMap, monomials_of_degree,
                       parse_polynomial)

PROJECTION_COEFF_BOUND = 101
PROJECTION_RETRIES = 5


class CohomologyOracle:
    """Fixture-bound exact function (i, k) -> dim H^i(X, L^k)."""

    def __init__(self, fn, dim_X, description=""):
        self._fn = fn
        self.dim_X = dim_X
        self.description = description

    def __call__(self, i, k):
        if i < 0:
            raise UnsupportedFixtureError("negative cohomology index")
        if i > self.dim_X:
            return 0
        v = self._fn(i, k)
        if v < 0:
            raise MalformedInputError("oracle returned a negative dimension")
        return v


# -- sources -------------------------------------------------------------------


class VeroneseSource:
    """(P^n, O(d)): sections of L^k are the degree d*k monomials."""

    kind = "veronese"

    def __init__(self, n, d):
        if n < 1 or d < 1:
            raise MalformedInputError("veronese needs n >= 1, d >= 1")
        self.n = n
        self.d = d
        self.ring = Ring([f"x{i}" for i in range(n + 1)])
        self.dim_X = n
        self.degree = d ** n
        self.relations = None

    def basis(self, level):
        return monomials_of_degree(self.ring, self.d * level)

    def reduce(self, p):
        return p

    def monomial_multidegree(self, mono):
        return mono

    def oracle(self):
        n, d = self.n, self.d

        def h(i, k):
            e = d * k
            if i == 0:
                return math.comb(n + e, n) if e >= 0 else 0
            if i == n:
                return math.comb(-e - 1, n) if -e - 1 >= n else 0
            return 0

        return CohomologyOracle(h, n, f"P^{n} line bundle cohomology")

    def describe(self):
        return f"veronese({self.n},{self.d})"


class ScrollSource:
    """P(O(a_1) + ... + O(a_k)) over P^1 with the tautological class H.

    Cox coordinates s, t (fiber class) and y_1..y_k, bigraded so that all
    sections of H share bidegree (1, K) with K = max a_i: deg s = deg t =
    (0, 1), deg y_i = (1, K - a_i). Sections of l*H are the bidegree
    (l, K*l) monomials.
    """

    kind = "scroll"

    def __init__(self, twists):
        twists = tuple(twists)
        if not twists or any(a < 1 for a in twists):
            raise MalformedInputError("scroll twists must be >= 1")
        self.twists = tuple(sorted(twists, reverse=True))
        self.K = max(twists)
        names = ["s", "t"] + [f"y{i+1}" for i in range(len(twists))]
        degrees = [(0, 1), (0, 1)] + [(1, self.K - a) for a in self.twists]
        self.ring = Ring(names, degrees)
        self.dim_X = len(twists)
        self.degree = sum(twists)
        self.relations = None

    def basis(self, level):
        return monomials_of_degree(self.ring, (level, self.K * level))

    def reduce(self, p):
        return p

    def monomial_multidegree(self, mono):
        return mono

    def oracle(self):
        twists = self.twists
        rank = len(twists)
        n = self.dim_X
        canonical_c = sum(twists) - 2  # K_X = -rank*H + (sum a - 2)F over P^1

        def h(i, k):
            if k >= 0:
                return _scroll_h(twists, i, k, 0)
            if -rank < k < 0:
                return 0
            # Serre duality: h^i(kH) = h^(n-i)((-rank-k)H + (sum a - 2)F)
            return _scroll_h(twists, n - i, -rank - k, canonical_c)

        return CohomologyOracle(h, self.dim_X,
                                "H^i(P^1, Sym^k) for the split bundle")

    def describe(self):
        return f"scroll({','.join(map(str, self.twists))})"


def _scroll_h(twists, i, m, c):
    """h^i(X, m*H + c*F) for m >= 0 via pushforward to P^1 (Sym^m splits)."""
    if m < 0 or i < 0:
        return 0
    if i == 0:
        return sum(max(0, s + c + 1) for s in _sym_degrees(twists, m))
    if i == 1:
        return sum(max(0, -(s + c) - 1) for s in _sym_degrees(twists, m))
    return 0


def _sym_degrees(twists, k):
    for gamma in itertools.combinations_with_replacement(range(len(twists)), k):
        yield sum(twists[g] for g in gamma)


class HyperellipticSource:
    """Genus-2 curve y^2 = f(x), f squarefree sextic; L = m * (P+ + P-).

    Section ring realized as weighted forms Q[s,t,w]/(w^2 - F), weights
    (1, 1, 3), F the homogenized sextic. The weighted-degree-n piece has
    basis {s^a t^(n-a)} u {s^b t^(n-3-b) w}, i.e. {x^i} u {x^j y} after
    dividing by t^n.
    """

    kind = "hyperelliptic"

    def __init__(self, sextic_coeffs, m):
        if m < 2:
            raise MalformedInputError("need m >= 2 (very ample multiple)")
        coeffs = [mpq(c) for c in sextic_coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) != 7:
            raise MalformedInputError("sextic must have degree exactly 6")
        if not _squarefree(coeffs):
            raise MalformedInputError("sextic is not squarefree (singular curve)")
        self.f = coeffs
        self.m = m
        self.ring = Ring(["s", "t", "w"], degrees=[(1,), (1,), (3,)])
        self.dim_X = 1
        self.degree = 2 * m
        self.genus = 2
        # w^2 - F(s, t) with F = sum f_i s^i t^(6-i)
        terms = {(0, 0, 2): QQ.one}
        for i, c in enumerate(coeffs):
            if c != 0:
                terms[(i, 6 - i, 0)] = terms.get((i, 6 - i, 0), mpq(0)) - c
        rel = Polynomial.from_terms(self.ring, terms)
        self.relation = rel
        self.relations = groebner.Ideal(self.ring, [rel])

    def basis(self, level):
        n = self.m * level
        out = [(a, n - a, 0) for a in range(n, -1, -1)]
        out += [(b, n - 3 - b, 1) for b in range(n - 3, -1, -1)]
        return out

    def reduce(self, p):
        """Rewrite w^c for c >= 2 via w^2 = F(s, t)."""
        ring = self.ring
        while True:
            high = {m: c for m, c in p.terms.items() if m[2] >= 2}
            if not high:
                return p
            rest = {m: c for m, c in p.terms.items() if m[2] < 2}
            acc = Polynomial(ring, rest)
            F = self.relation  # w^2 - F; so w^2 = w^2 - (w^2 - F)
            for mono, c in high.items():
                lower = (mono[0], mono[1], mono[2] - 2)
                wpart = Polynomial(ring, {lower: c})
                # w^2 * rest = F_part * rest where F_part = w^2 - relation
                f_poly = Polynomial(ring, {(0, 0, 2): QQ.one}) - F
                acc = acc + wpart * f_poly
            p = acc

    def monomial_multidegree(self, mono):
        return None

    def oracle(self):
        m, g = self.m, self.genus

        def h(i, k):
            deg = 2 * m * k
            if i == 0:
                if k < 0:
                    return 0
                if k == 0:
                    return 1
                return deg - g + 1
            if i == 1:
                if k >= 1:
                    return 0
                if k == 0:
                    return g
                return -deg + g - 1
            return 0

        return CohomologyOracle(h, 1, "Riemann-Roch on the genus-2 curve")

    def describe(self):
        return f"hyperelliptic(m={self.m})"


def _squarefree(coeffs):
    """gcd(f, f') constant, exact rational Euclid."""
    def strip(v):
        v = list(v)
        while v and v[-1] == 0:
            v.pop()
        return v

    a = strip(coeffs)
    b = strip([i * c for i, c in enumerate(coeffs)][1:])
    while b:
        # a mod b
        a = list(a)
        while len(a) >= len(b):
            f = a[-1] / b[-1]
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[i + shift] -= f * c
            a = strip(a)
            if not a:
                break
        a, b = b, a
    return len(a) <= 1


# -- embedded varieties -----------------------------------------------------------


class EmbeddedVariety:
    """A source geometry with a chosen subsystem V and ambient ring Sym(V)."""

    def __init__(self, source, v_polys, *, seed=None, retry_count=0,
                 parent_description=None):
        self.source = source
        self.V = list(v_polys)
        self.oracle = source.oracle()
        self.dim_X = source.dim_X
        self.degree = source.degree
        h0 = self.oracle(0, 1)
        self.codim_t = h0 - len(self.V)
        if self.codim_t < 0:
            raise MalformedInputError("V larger than H^0(L)")
        self.ambient_dim = len(self.V) - 1
        self.ambient_ring = Ring([f"z{i}" for i in range(len(self.V))],
                                 field=source.ring.field)
        self.ring_map = RingMap(self.ambient_ring, source.ring, self.V)
        self.seed = seed
        self.retry_count = retry_count
        self._parent_description = parent_description
        self._section_cache = {}
        self._ideal_cache = {}
        self._E_cache = {}

    # -- description ---------------------------------------------------------
    def describe(self):
        base = self._parent_description or self.source.describe()
        if self.codim_t:
            return f"{base}/t={self.codim_t},seed={self.seed}"
        return base

    def __repr__(self):
        return f"EmbeddedVariety({self.describe()} in P^{self.ambient_dim})"

    # -- oracles ---------------------------------------------------------------
    def oracle_h(self, i, k):
        return self.oracle(i, k)

    def reg_OX_wrt_L(self, search_bound=12):
        """min m >= 1 with H^i(X, L^(m-i)) = 0 for all i >= 1, via the oracle."""
        for m in range(1, search_bound + 1):
            if all(self.oracle(i, m - i) == 0 for i in range(1, self.dim_X + 1)):
                return m
        raise NotFoundWithinBoundError("regularity of O_X not found within bound")

    def predicted_regularity_bound(self):
        return max(self.reg_OX_wrt_L() + 1, self.codim_t + 2)

    # -- restriction maps --------------------------------------------------------
    def section_matrix(self, d, field=None) -> Matrix:
        """Matrix of Sym^d V -> H^0(X, L^d) over the source's section basis."""
        f = field or self.ambient_ring.field
        key = (d, f.tag)
        if key not in self._section_cache:
            mat, _, _ = groebner.section_matrix(self.ring_map,
                                                self.source.relations, d, field=f)
            self._section_cache[key] = mat
        return self._section_cache[key]

    def section_rank(self, d, field=None) -> int:
        """Rank of Sym^d V -> E_d over `field` (default: exact over Q).

        The exact path first ranks the matrix mod the default prime: a full
        modular rank pins the rational rank (ranks only drop under
        reduction), which avoids large exact eliminations precisely in the
        common full-rank case. Deficient modular ranks fall back to honest
        rational elimination.
        """
        if field is not None:
            return exactalg.rank(self.section_matrix(d, field))
        mat = self.section_matrix(d)
        full = min(mat.nrows, mat.ncols)
        try:
            r_p = exactalg.rank(self.section_matrix(d, exactalg.PrimeField()))
        except MalformedInputError:
            r_p = -1
        if r_p == full:
            return full
        return exactalg.rank(mat)

    def normality_defect(self, d, field=None) -> int:
        """dim H^1(I_X(d)) = dim E_d - rank(Sym^d V -> E_d); 0 for d <= 0."""
        if d <= 0:
            return 0
        return self.oracle(0, d) - self.section_rank(d, field)

    # -- image ideal -----------------------------------------------------------------
    def image_ideal(self, method="auto", *, gen_degree_bound=None, cache=None):
        if method == "auto":
            method = "elimination" if self._elimination_desk_scale() else "linalg"
        key = method
        if key in self._ideal_cache:
            return self._ideal_cache[key]
        if method == "linalg" and gen_degree_bound is None:
            from . import checks
            gen_degree_bound = checks.mumford_regularity(
                self, search_bound=self.predicted_regularity_bound() + 4).mumford
        ideal = groebner.kernel_of_map(self.ring_map, self.source.relations,
                                       method=method,
                                       gen_degree_bound=gen_degree_bound,
                                       cache=cache)
        self._ideal_cache[key] = ideal
        return ideal

    def _elimination_desk_scale(self):
        nvars = self.source.ring.nvars + self.ambient_ring.nvars
        monomial_images = all(len(p.terms) == 1 for p in self.V)
        return nvars <= 10 or (monomial_images and nvars <= 14)

    # -- section modules ----------------------------------------------------------
    def build_E(self, degree_bound) -> GradedModuleData:
        if degree_bound < 2:
            raise MalformedInputError("degree_bound must be >= 2")
        if degree_bound in self._E_cache:
            return self._E_cache[degree_bound]
        src = self.source
        field = src.ring.field
        bases = {l: src.basis(l) if l else [(0,) * src.ring.nvars]
                 for l in range(degree_bound + 1)}
        dims = {}
        for l, bs in bases.items():
            dims[l] = len(bs)
            expected = self.oracle(0, l)
            if len(bs) != expected:
                raise MalformedInputError(
                    f"source basis at level {l} has {len(bs)} elements, oracle "
                    f"says {expected}")
        index = {l: {m: i for i, m in enumerate(bs)} for l, bs in bases.items()}
        mult = {}
        for l in range(degree_bound):
            per_v = []
            for v in self.V:
                entries = {}
                for c, mono in enumerate(bases[l]):
                    prod = src.reduce(v * Polynomial(src.ring, {mono: field.one}))
                    for pm, pc in prod.terms.items():
                        entries[(index[l + 1][pm], c)] = pc
                per_v.append(Matrix(dims[l + 1], dims[l], field, entries))
            mult[l] = per_v
        v_md, piece_md = self._multidegrees(bases)
        data = GradedModuleData(len(self.V), dims, mult, field,
                                v_multidegrees=v_md, piece_multidegrees=piece_md)
        self._E_cache[degree_bound] = data
        return data

    def _multidegrees(self, bases):
        if any(len(p.terms) != 1 for p in self.V):
            return None, None
        src = self.source
        v_md = []
        for p in self.V:
            mono = next(iter(p.terms))
            md = src.monomial_multidegree(mono)
            if md is None:
                return None, None
            v_md.append(md)
        piece_md = {l: [src.monomial_multidegree(m) for m in bs]
                    for l, bs in bases.items()}
        return v_md, piece_md

    def build_birkenhake(self, degree_bound) -> GradedModuleData:
        """Birkenhake's module R = k + V + H^0(L^2) + ... as module data.

        The degree-1 piece is V itself (not all of H^0(L)); higher pieces
        are complete.
        """
        e = self.build_E(degree_bound)
        field = e.field
        src = self.source
        dims = dict(e.pieces)
        dims[1] = len(self.V)
        mult = {l: list(ms) for l, ms in e.mult.items()}
        # degree 0 -> 1: the unit maps to each v, expressed in the V basis
        mult[0] = [Matrix(len(self.V), 1, field, {(vi, 0): field.one})
                   for vi in range(len(self.V))]
        # degree 1 -> 2: products v*w expanded in the E_2 basis
        basis2 = {m: i for i, m in enumerate(src.basis(2))}
        per_v = []
        for v in self.V:
            entries = {}
            for c, w in enumerate(self.V):
                prod = src.reduce(v * w)
                for pm, pc in prod.terms.items():
                    entries[(basis2[pm], c)] = pc
            per_v.append(Matrix(dims[2], len(self.V), field, entries))
        mult[1] = per_v
        return GradedModuleData(len(self.V), dims, mult, field)


# -- constructors --------------------------------------------------------------------


def veronese(n, d) -> EmbeddedVariety:
    """(P^n, O(d)) embedded by all degree-d monomials (t = 0)."""
    src = VeroneseSource(n, d)
    field = src.ring.field
    forms = [Polynomial(src.ring, {m: field.one})
             for m in monomials_of_degree(src.ring, d)]
    return EmbeddedVariety(src, forms)


def rational_scroll(*twists) -> EmbeddedVariety:
    """P(O(a_1) + ... + O(a_k)) embedded by the tautological class."""
    src = ScrollSource(twists)
    field = src.ring.field
    forms = [Polynomial(src.ring, {m: field.one}) for m in src.basis(1)]
    return EmbeddedVariety(src, forms)


def hyperelliptic_g2(sextic=None, m=3) -> EmbeddedVariety:
    """Genus-2 curve y^2 = f(x) embedded by the full system |m(P+ + P-)|.

    sextic: coefficient list [f_0, ..., f_6] or a univariate polynomial
    string in x; defaults to x^6 - 1.
    """
    if sextic is None:
        coeffs = [-1, 0, 0, 0, 0, 0, 1]
    elif isinstance(sextic, str):
        xr = Ring(["x"])
        p = parse_polynomial(xr, sextic)
        coeffs = [mpq(0)] * 7
        for mono, c in p.terms.items():
            if mono[0] > 6:
                raise MalformedInputError("sextic has degree > 6")
            coeffs[mono[0]] = c
    else:
        coeffs = list(sextic)
    src = HyperellipticSource(coeffs, m)
    field = src.ring.field
    forms = [Polynomial(src.ring, {mono: field.one}) for mono in src.basis(1)]
    return EmbeddedVariety(src, forms)


def project(v: EmbeddedVariety, t, seed, *, retries=PROJECTION_RETRIES) -> EmbeddedVariety:
    """Replace V by the kernel of t seeded-random rational functionals.

    Certifies is_isomorphic_embedding and redraws up to `retries` times;
    raises RetriesExhaustedError when the family admits no generic center
    at this codimension (e.g. the secant variety fills the ambient space).
    """
    if t == 0:
        return v
    if t < 0:
        raise MalformedInputError("negative projection codimension")
    if not t < len(v.V) - v.dim_X - 1:
        raise MalformedInputError(
            f"t = {t} too large: image could not stay a {v.dim_X}-fold")
    if seed is None:
        raise MalformedInputError("projection requires a seed")
    rng = random.Random(seed)
    field = v.ambient_ring.field
    for attempt in range(retries):
        func = Matrix.from_triplets(
            t, len(v.V), field,
            [(r, c, rng.randint(-PROJECTION_COEFF_BOUND, PROJECTION_COEFF_BOUND))
             for r in range(t) for c in range(len(v.V))])
        if exactalg.rank(func) != t:
            continue
        combos = exactalg.kernel_basis(func)
        forms = []
        for col in combos.columns():
            p = v.source.ring.zero()
            for r, c in sorted(col.items()):
                p = p + v.V[r].scale(c)
            forms.append(p)
        candidate = EmbeddedVariety(v.source, forms, seed=seed,
                                    retry_count=attempt,
                                    parent_description=v.source.describe())
        if groebner.is_isomorphic_embedding(candidate):
            return candidate
    raise RetriesExhaustedError(
        f"no isomorphic codimension-{t} projection found for "
        f"{v.describe()} after {retries} draws (secant locus obstruction "
        f"or non-generic family)")


def oracle_h(v: EmbeddedVariety, i, k):
    """Module-level alias for the fixture's exact cohomology oracle."""
    return v.oracle_h(i, k)


def build_E(v: EmbeddedVariety, degree_bound) -> GradedModuleData:
    return v.build_E(degree_bound)


# -- fixture config files -----------------------------------------------------------


def parse_fixture_config(text):
    """Plain-text `key = value` fixture configs.

    Keys: kind (veronese | scroll | hyperelliptic), n, d, twists, sextic, m,
    t, seed, field, degree_bound. Returns (EmbeddedVariety, options dict).
    """
    opts = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise MalformedInputError(f"bad config line {line!r}")
        key, _, value = line.partition("=")
        opts[key.strip()] = value.strip()
    kind = opts.get("kind")
    if kind == "veronese":
        base = veronese(int(opts.get("n", 2)), int(opts.get("d", 3)))
    elif kind == "scroll":
        twists = [int(x) for x in opts.get("twists", "1,2").split(",") if x]
        base = rational_scroll(*twists)
    elif kind == "hyperelliptic":
        base = hyperelliptic_g2(opts.get("sextic"), int(opts.get("m", 3)))
    else:
        raise MalformedInputError(f"unknown fixture kind {kind!r}")
    t = int(opts.get("t", 0))
    if t:
        seed = opts.get("seed")
        if seed is None:
            raise MalformedInputError("projection fixtures need a seed")
        base = project(base, t, int(seed))
    extras = {"field": opts.get("field", "Q"),
              "degree_bound": int(opts["degree_bound"]) if "degree_bound" in opts else None}
    return base, extras
