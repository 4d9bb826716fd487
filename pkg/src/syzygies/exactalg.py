"""Exact field arithmetic and sparse linear algebra over Q and GF(p).

Every computation in this package bottoms out here: ranks, kernels and
cokernel dimensions of sparse matrices with exact entries. Floating point
is never used. Rationals are gmpy2.mpq (always reduced, positive
denominator); prime-field residues are plain ints in [0, p).
"""

from __future__ import annotations

import math

from gmpy2 import mpq

from .errors import MalformedInputError

DEFAULT_PRIME = 32003


class FpElement(int):
    """A residue tagged with its modulus, for API-boundary field checks."""

    def __new__(cls, value, p):
        obj = super().__new__(cls, value % p)
        obj.p = p
        return obj


class RationalField:
    """The field Q. Elements are gmpy2.mpq."""

    tag = "Q"
    zero = mpq(0)
    one = mpq(1)

    def coerce(self, x):
        if isinstance(x, FpElement):
            raise MalformedInputError("prime-field element in a rational matrix")
        if isinstance(x, (int, mpq)) or type(x).__name__ == "Fraction":
            return mpq(x)
        if isinstance(x, str):
            return mpq(x)
        raise MalformedInputError(f"cannot coerce {x!r} into Q")

    def format(self, x) -> str:
        return str(x)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """GF(p) for a fixed prime p. Elements are ints in [0, p)."""

    def __init__(self, p=DEFAULT_PRIME):
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise MalformedInputError(f"{p} is not prime")
        self.p = p
        self.tag = f"F{p}"
        self.zero = 0
        self.one = 1

    def coerce(self, x):
        p = self.p
        if isinstance(x, FpElement):
            if x.p != p:
                raise MalformedInputError(f"residue mod {x.p} in a GF({p}) matrix")
            return int(x)
        if isinstance(x, int):
            return x % p
        if isinstance(x, mpq) or type(x).__name__ == "Fraction":
            num, den = int(x.numerator), int(x.denominator)
            if den % p == 0:
                raise MalformedInputError(f"denominator divisible by {p}")
            return num * pow(den, p - 2, p) % p
        if isinstance(x, str):
            return self.coerce(mpq(x))
        raise MalformedInputError(f"cannot coerce {x!r} into GF({p})")

    def inv(self, x):
        return pow(x, self.p - 2, self.p)

    def format(self, x) -> str:
        return str(x)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()


def field_from_tag(tag: str):
    """Inverse of field.tag: "Q" or "F<p>"."""
    if tag == "Q":
        return QQ
    if tag.startswith("F"):
        return PrimeField(int(tag[1:]))
    raise MalformedInputError(f"unknown field tag {tag!r}")


class Matrix:
    """Sparse exact matrix: entries maps (row, col) -> nonzero field element."""

    __slots__ = ("nrows", "ncols", "field", "entries")

    def __init__(self, nrows, ncols, field, entries=None):
        if nrows < 0 or ncols < 0:
            raise MalformedInputError("negative matrix dimensions")
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        self.entries = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < nrows and 0 <= c < ncols):
                    raise MalformedInputError(f"entry ({r},{c}) out of bounds")
                fv = field.coerce(v)
                if fv != field.zero:
                    self.entries[(r, c)] = fv

    @classmethod
    def from_triplets(cls, nrows, ncols, field, triplets):
        m = cls(nrows, ncols, field)
        for r, c, v in triplets:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise MalformedInputError(f"entry ({r},{c}) out of bounds")
            fv = field.coerce(v)
            if fv != field.zero:
                m.entries[(r, c)] = fv
        return m

    @classmethod
    def from_columns(cls, nrows, field, columns):
        """columns: list of dicts row -> value."""
        m = cls(nrows, len(columns), field)
        for c, col in enumerate(columns):
            for r, v in col.items():
                fv = field.coerce(v)
                if fv != field.zero:
                    m.entries[(r, c)] = fv
        return m

    @classmethod
    def identity(cls, n, field):
        return cls(n, n, field, {(i, i): field.one for i in range(n)})

    def transpose(self):
        t = Matrix(self.ncols, self.nrows, self.field)
        t.entries = {(c, r): v for (r, c), v in self.entries.items()}
        return t

    def columns(self):
        cols = [dict() for _ in range(self.ncols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    def rows(self):
        rows = [dict() for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def column(self, c):
        return {r: v for (r, cc), v in self.entries.items() if cc == c}

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.field == other.field
                and self.entries == other.entries)

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols} over {self.field!r}, {len(self.entries)} nonzero)"


def _axpy_q(dst, src, factor):
    """dst -= factor * src, sparse dicts over mpq."""
    for c, v in src.items():
        w = dst.get(c)
        if w is None:
            dst[c] = -factor * v
        else:
            w = w - factor * v
            if w:
                dst[c] = w
            else:
                del dst[c]


def _make_axpy_p(p):
    def axpy(dst, src, factor):
        for c, v in src.items():
            w = (dst.get(c, 0) - factor * v) % p
            if w:
                dst[c] = w
            else:
                dst.pop(c, None)
    return axpy


def _scale_row(row, inv_pivot, field):
    if isinstance(field, RationalField):
        return {c: v * inv_pivot for c, v in row.items()}
    p = field.p
    return {c: (v * inv_pivot) % p for c, v in row.items()}


def _field_ops(field):
    if isinstance(field, RationalField):
        return _axpy_q, (lambda x: 1 / x)
    return _make_axpy_p(field.p), field.inv


def triangularize(rows, field):
    """Sparse forward elimination on row dicts; returns list of (pivot_col, row).

    Rows are bucketed by leading column; only rows sharing a leading column
    interact, pivoting on the sparsest row. Destroys the input dicts.
    Deterministic for a fixed input order.
    """
    axpy, inv = _field_ops(field)
    buckets = {}
    order = 0
    heap = []
    for row in rows:
        if row:
            lead = min(row)
            buckets.setdefault(lead, []).append((order, row))
            order += 1
    pivots = []
    while buckets:
        col = min(buckets)
        bucket = buckets.pop(col)
        bucket.sort(key=lambda item: (len(item[1]), item[0]))
        piv_order, piv = bucket[0]
        inv_p = inv(piv[col])
        piv = _scale_row(piv, inv_p, field)
        pivots.append((col, piv))
        for o, row in bucket[1:]:
            axpy(row, piv, row[col])
            if row:
                buckets.setdefault(min(row), []).append((o, row))
    return pivots


_DENSE_MODP_MIN = 24
_DENSE_MODP_MAX_ENTRIES = 60_000_000

# primes just under 2^31: residue products stay below 2^63 in int64
CERT_PRIMES = (2147483647, 2147483629, 2147483587, 2147483579)


def _dense_rank_modp(m: Matrix) -> int:
    """Row-echelon rank mod p with vectorized exact int64 arithmetic.

    Valid because p < 2^31.5 keeps every product below 2^63; no floating
    point is involved.
    """
    import numpy as np

    p = m.field.p
    a = np.zeros((m.nrows, m.ncols), dtype=np.int64)
    for (r, c), v in m.entries.items():
        a[r, c] = v
    rank_ = 0
    rows, cols = a.shape
    for c in range(cols):
        if rank_ == rows:
            break
        col = a[rank_:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = rank_ + int(nz[0])
        if piv != rank_:
            a[[rank_, piv]] = a[[piv, rank_]]
        inv = pow(int(a[rank_, c]), p - 2, p)
        a[rank_] = (a[rank_] * inv) % p
        below = a[rank_ + 1:, c]
        hit = np.nonzero(below)[0]
        if hit.size:
            idx = rank_ + 1 + hit
            a[idx] = (a[idx] - np.outer(a[idx, c], a[rank_])) % p
        rank_ += 1
    return rank_


def rank(m: Matrix) -> int:
    """Rank over the matrix's field; exact and deterministic."""
    if (isinstance(m.field, PrimeField)
            and min(m.nrows, m.ncols) >= _DENSE_MODP_MIN
            and m.nrows * m.ncols <= _DENSE_MODP_MAX_ENTRIES):
        return _dense_rank_modp(m)
    return len(triangularize(m.rows(), m.field))


def rref(m: Matrix):
    """Reduced row echelon form: (pivot_cols, rows) with rows fully reduced.

    pivot_cols[i] is the pivot column of rows[i]; pivot entries are 1 and
    are the only nonzeros in their column.
    """
    pivots = triangularize(m.rows(), m.field)
    pivots.sort(key=lambda pr: pr[0])
    axpy, _ = _field_ops(m.field)
    # back-substitute: eliminate each pivot column from all earlier rows
    for i in range(len(pivots) - 1, -1, -1):
        col, row = pivots[i]
        for j in range(i):
            other = pivots[j][1]
            f = other.get(col)
            if f is not None:
                axpy(other, row, f)
    return [c for c, _ in pivots], [r for _, r in pivots]


def _columns_to_modp_array(columns, nrows, p):
    """Stack sparse rational/integer columns into an int64 array mod p.

    Raises MalformedInputError when a denominator is divisible by p.
    """
    import numpy as np

    a = np.zeros((nrows, len(columns)), dtype=np.int64)
    for j, col in enumerate(columns):
        for r, v in col.items():
            if isinstance(v, int):
                a[r, j] = v % p
            else:
                num, den = int(v.numerator), int(v.denominator)
                if den % p == 0:
                    raise MalformedInputError("denominator divisible by prime")
                a[r, j] = num * pow(den, p - 2, p) % p
    return a


def _modp_rref(a, p):
    """In-place full RREF mod p; returns pivot column list."""
    import numpy as np

    rows, cols = a.shape
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), p - 2, p)) % p
        other = np.nonzero(a[:, c])[0]
        other = other[other != r]
        if other.size:
            a[other] = (a[other] - np.outer(a[other, c], a[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def _modp_echelon(a, p):
    """In-place forward elimination mod p (below pivots only); pivot columns.

    Pivot columns agree with full RREF (leftmost-greedy independence), at
    half the cost; use when only ranks or pivot positions are needed.
    """
    import numpy as np

    rows, cols = a.shape
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), p - 2, p)) % p
        below = a[r + 1:, c]
        hit = np.nonzero(below)[0]
        if hit.size:
            idx = r + 1 + hit
            a[idx] = (a[idx] - np.outer(a[idx, c], a[r])) % p
        pivots.append(c)
        r += 1
    return pivots


def _rat_reconstruct(r, m):
    """Rational number n/d with n = r*d mod m and |n|, d <= sqrt(m/2), or None."""
    bound = math.isqrt(m // 2)
    a0, a1 = m, r % m
    b0, b1 = 0, 1
    while a1 > bound:
        q = a0 // a1
        a0, a1 = a1, a0 - q * a1
        b0, b1 = b1, b0 - q * b1
    if b1 == 0 or abs(b1) > bound:
        return None
    if b1 < 0:
        a1, b1 = -a1, -b1
    if math.gcd(a1, b1) != 1:
        return None
    return mpq(a1, b1)


def _is_prime(n):
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_prime_pool = list(CERT_PRIMES)


def certification_prime(index):
    """index-th prime of the deterministic descending pool below 2^31."""
    while len(_prime_pool) <= index:
        q = _prime_pool[-1] - 2
        while not _is_prime(q):
            q -= 2
        _prime_pool.append(q)
    return _prime_pool[index]


def _dot_is_zero(rows, vec):
    for row in rows:
        acc = mpq(0)
        for c, rv in row.items():
            v = vec.get(c)
            if v is not None:
                acc += rv * v
        if acc:
            return False
    return True


def kernel_columns_certified(m: Matrix, *, max_primes=256):
    """Certified exact kernel basis of a rational matrix, as column dicts.

    Kernel mod large primes, entries lifted by rational reconstruction (CRT
    across primes as needed), membership verified exactly. Lifted vectors
    carry a unit at distinct free columns so they are independent over Q;
    verified membership plus the modular dimension bound (the modular
    kernel is at least as big as the rational one) makes them a basis.
    """
    if not isinstance(m.field, RationalField):
        raise MalformedInputError("certified kernels are for rational matrices")
    cols = m.columns()
    rows_of = m.rows()
    modulus = 1
    residues = None
    structure = None
    attempt_at = 1
    used = 0
    idx = 0
    while idx < max_primes:
        p = certification_prime(idx)
        idx += 1
        try:
            a = _columns_to_modp_array(cols, m.nrows, p)
        except MalformedInputError:
            continue
        pivots = tuple(_modp_rref(a, p))
        if structure is not None and pivots != structure:
            if len(pivots) > len(structure) or (len(pivots) == len(structure)
                                                and pivots < structure):
                structure, residues, modulus, used = pivots, None, 1, 0
            else:
                continue
        structure = pivots
        pset = set(pivots)
        free_cols = [c for c in range(m.ncols) if c not in pset]
        new = {}
        for fc in free_cols:
            for i, pc in enumerate(pivots):
                v = int(a[i, fc])
                if v:
                    new[(fc, pc)] = (-v) % p
        if residues is None:
            residues, modulus = new, p
        else:
            inv = pow(modulus % p, p - 2, p)
            merged = {}
            for key in set(residues) | set(new):
                r0 = residues.get(key, 0)
                t = (new.get(key, 0) - r0) % p * inv % p
                merged[key] = r0 + modulus * t
            residues, modulus = merged, modulus * p
        used += 1
        if used < attempt_at:
            continue
        attempt_at *= 2
        vectors = []
        ok = True
        for fc in free_cols:
            vec = {fc: QQ.one}
            for pc in pivots:
                r = residues.get((fc, pc))
                if r:
                    val = _rat_reconstruct(r, modulus)
                    if val is None:
                        ok = False
                        break
                    if val:
                        vec[pc] = val
            if not ok:
                break
            vectors.append(vec)
        if ok and all(_dot_is_zero(rows_of, vec) for vec in vectors):
            return vectors
    raise MalformedInputError("certified kernel lifting failed")


def certified_kernel_selection(diff_columns, nrows, kernel_dim, old_columns,
                               field, *, lift=True, max_primes=512):
    """Minimal new generators of ker(A) modulo span(old_columns), certified.

    A is given by exact sparse columns; its rank is known to be
    len(diff_columns) - kernel_dim (exact bookkeeping supplied by the
    caller), which removes all modular rank luck: primes not attaining that
    rank are discarded. old_columns are exact vectors inside ker(A). The
    count of new generators and their selection run mod p; only the
    selected vectors are CRT-lifted and verified (A . v = 0 exactly).

    Why this is exact: a chosen candidate rationally dependent on earlier
    columns would reduce to a modular dependency (scale the dependency
    integer-primitive), contradicting its modular pivot, so chosen
    candidates are rationally independent of everything earlier. They and
    span(old) lie in ker(A), whose dimension is known, so
    rank(old) + n_new = kernel_dim pins both the count and the minimality.

    Returns (n_new, lifted_vectors). Over a prime field everything is the
    plain exact computation.
    """
    import numpy as np

    ncols = len(diff_columns)
    if ncols == 0 or kernel_dim == 0:
        return 0, []
    expected_rank = ncols - kernel_dim
    if isinstance(field, PrimeField):
        p = field.p
        a = _columns_to_modp_array(diff_columns, nrows, p)
        pivots = _modp_rref(a, p)
        if len(pivots) != expected_rank:
            raise MalformedInputError(
                f"matrix rank {len(pivots)} differs from bookkeeping "
                f"{expected_rank} over {field!r}")
        kmat, free_cols = _modp_kernel_block(a, pivots, ncols, p)
        stacked = np.concatenate(
            [_columns_to_modp_array(old_columns, ncols, p), kmat], axis=1)
        piv2 = _modp_echelon(stacked, p)
        n_old = len(old_columns)
        sel = [c - n_old for c in piv2 if c >= n_old]
        vectors = []
        for k in sel:
            col = kmat[:, k]
            vec = {int(r): int(col[r]) for r in np.nonzero(col)[0]}
            vectors.append(vec)
        return len(sel), vectors

    structure = None
    sel_frees = None
    residues = None
    modulus = 1
    used = 0
    attempt_at = 1
    idx = 0
    while idx < max_primes:
        p = certification_prime(idx)
        idx += 1
        try:
            a = _columns_to_modp_array(diff_columns, nrows, p)
            old_p = _columns_to_modp_array(old_columns, ncols, p)
        except MalformedInputError:
            continue
        pivots = tuple(_modp_rref(a, p))
        if len(pivots) != expected_rank:
            continue
        if structure is None:
            structure = pivots
        elif pivots != structure:
            if pivots < structure:
                structure, sel_frees, residues, modulus, used = pivots, None, None, 1, 0
            else:
                continue
        kmat, free_cols = _modp_kernel_block(a, pivots, ncols, p)
        stacked = np.concatenate([old_p, kmat], axis=1)
        piv2 = _modp_echelon(stacked, p)
        n_old = len(old_columns)
        rank_old = sum(1 for c in piv2 if c < n_old)
        sel = tuple(c - n_old for c in piv2 if c >= n_old)
        if rank_old + len(sel) != kernel_dim:
            # old multiples plus a kernel basis must fill the kernel mod p
            continue
        if not sel:
            return 0, []
        if not lift:
            # count is already certified: the certificate above pins
            # rank(old) over Q, hence the number of new generators
            return len(sel), None
        if sel_frees is None:
            sel_frees = sel
        elif sel != sel_frees:
            continue
        new = {}
        piv_index = {pc: i for i, pc in enumerate(pivots)}
        for k in sel_frees:
            fc = free_cols[k]
            for i, pc in enumerate(pivots):
                v = int(a[i, fc])
                if v:
                    new[(k, pc)] = (-v) % p
        if residues is None:
            residues, modulus = new, p
        else:
            inv = pow(modulus % p, p - 2, p)
            merged = {}
            for key in set(residues) | set(new):
                r0 = residues.get(key, 0)
                t = (new.get(key, 0) - r0) % p * inv % p
                merged[key] = r0 + modulus * t
            residues, modulus = merged, modulus * p
        used += 1
        if used < attempt_at:
            continue
        attempt_at *= 2
        vectors = []
        ok = True
        for k in sel_frees:
            fc = free_cols[k]
            vec = {fc: QQ.one}
            for pc in structure:
                r = residues.get((k, pc))
                if r:
                    val = _rat_reconstruct(r, modulus)
                    if val is None:
                        ok = False
                        break
                    if val:
                        vec[pc] = val
            if not ok:
                break
            vectors.append(vec)
        if ok and all(_dot_is_zero_cols(diff_columns, nrows, vec)
                      for vec in vectors):
            return len(sel_frees), vectors
    raise MalformedInputError("certified kernel selection failed")


def certified_span_selection(nrows, field, old_columns, candidate_columns,
                             span_dim, *, max_primes=64):
    """Which candidates minimally extend span(old) inside a known subspace.

    All columns are exact and lie in a common subspace of dimension
    span_dim, which [old | candidates] is known to span (the caller's
    completeness guarantee). Selection runs mod p; a prime is accepted only
    when the stacked modular rank equals span_dim, which certifies the
    selection over Q by the pivot-independence argument. Returns selected
    candidate indices.
    """
    import numpy as np

    if not candidate_columns:
        return []
    if isinstance(field, PrimeField):
        p = field.p
        stacked = np.concatenate(
            [_columns_to_modp_array(old_columns, nrows, p),
             _columns_to_modp_array(candidate_columns, nrows, p)], axis=1)
        piv = _modp_echelon(stacked, p)
        n_old = len(old_columns)
        return [c - n_old for c in piv if c >= n_old]
    for idx in range(max_primes):
        p = certification_prime(idx)
        try:
            stacked = np.concatenate(
                [_columns_to_modp_array(old_columns, nrows, p),
                 _columns_to_modp_array(candidate_columns, nrows, p)], axis=1)
        except MalformedInputError:
            continue
        piv = _modp_echelon(stacked, p)
        if len(piv) != span_dim:
            continue
        n_old = len(old_columns)
        return [c - n_old for c in piv if c >= n_old]
    raise MalformedInputError("certified span selection failed")


def _modp_kernel_block(a, pivots, ncols, p):
    """Kernel basis mod p as a dense block, from a full RREF array."""
    import numpy as np

    pset = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pset]
    kmat = np.zeros((ncols, len(free_cols)), dtype=np.int64)
    if free_cols:
        fidx = np.array(free_cols, dtype=np.int64)
        kmat[fidx, np.arange(len(free_cols))] = 1
        if pivots:
            pidx = np.array(pivots, dtype=np.int64)
            kmat[pidx[:, None], np.arange(len(free_cols))[None, :]] = \
                (-a[:len(pivots)][:, fidx]) % p
    return kmat, free_cols


def _dot_is_zero_cols(columns, nrows, vec):
    acc = {}
    for c, val in vec.items():
        for r, mv in columns[c].items():
            acc[r] = acc.get(r, mpq(0)) + mv * val
    return all(v == 0 for v in acc.values())


def kernel_basis(m: Matrix) -> Matrix:
    """Matrix whose columns are a basis of ker(m); column count = ncols - rank."""
    pivot_cols, rows = rref(m)
    pivot_set = set(pivot_cols)
    free = [c for c in range(m.ncols) if c not in pivot_set]
    field = m.field
    out = Matrix(m.ncols, len(free), field)
    for k, fc in enumerate(free):
        out.entries[(fc, k)] = field.one
        for pc, row in zip(pivot_cols, rows):
            v = row.get(fc)
            if v is not None:
                out.entries[(pc, k)] = -v if isinstance(field, RationalField) else (-v) % field.p
    return out


def cokernel_dim(m: Matrix) -> int:
    """dim coker = nrows - rank (the matrix maps into k^nrows)."""
    return m.nrows - rank(m)


class SpanSolver:
    """Echelonized span of a fixed set of columns, supporting membership
    queries and coordinate extraction against the original generators."""

    def __init__(self, basis: Matrix):
        self.field = basis.field
        self.ncols = basis.ncols
        self.axpy, self.inv = _field_ops(basis.field)
        # reduce the columns, remembering the combination of originals
        self._rows = []   # list of (lead_row_index, column dict, combo dict)
        for c, col in enumerate(basis.columns()):
            self.insert(col, {c: basis.field.one})

    def insert(self, col, combo=None):
        """Reduce col against the span; if independent, add it and return None,
        else return the combination of original columns expressing it."""
        col = dict(col)
        combo = dict(combo) if combo is not None else {}
        for lead, b, bc in self._rows:
            f = col.get(lead)
            if f is not None:
                self.axpy(col, b, f)
                self.axpy(combo, bc, f)
        if not col:
            neg = {k: -v if isinstance(self.field, RationalField) else (-v) % self.field.p
                   for k, v in combo.items()}
            return neg
        lead = min(col)
        ip = self.inv(col[lead])
        col = _scale_row(col, ip, self.field)
        combo = _scale_row(combo, ip, self.field)
        self._rows.append((lead, col, combo))
        self._rows.sort(key=lambda t: t[0])
        return None

    def contains(self, col) -> bool:
        col = dict(col)
        for lead, b, _ in self._rows:
            f = col.get(lead)
            if f is not None:
                self.axpy(col, b, f)
        return not col

    def coordinates(self, col):
        """Coordinates of col over the original generating columns.

        Raises MalformedInputError if col is outside the span.
        """
        col = dict(col)
        combo = {}
        for lead, b, bc in self._rows:
            f = col.get(lead)
            if f is not None:
                self.axpy(col, b, f)
                self.axpy(combo, bc, f)
        if col:
            raise MalformedInputError("vector not in span")
        if isinstance(self.field, RationalField):
            return {k: -v for k, v in combo.items()}
        return {k: (-v) % self.field.p for k, v in combo.items()}

    @property
    def dim(self):
        return len(self._rows)
