"""Minimal graded free resolutions and Betti tables.

The resolution path: given a graded presentation, the minimal resolution is
built degree by degree with exact linear algebra. At every homological step
the kernel of the previous differential is computed on each graded piece and
new free generators are chosen as a complement of the span of multiples of
generators already found; by the graded Nakayama lemma this produces the
minimal resolution directly, so the Betti numbers are read off the chosen
generator degrees. Every table records the window it was computed on;
nothing outside the window is ever claimed to vanish.
"""

from __future__ import annotations

import json

from .errors import (IncompletePresentationError, InsufficientDataError,
                     MalformedInputError, RangeTooSmallError)
from . import exactalg
from .exactalg import Matrix, SpanSolver
from .polyring import Polynomial, Ring, monomials_of_degree, mul_monomials


class BettiTable:
    """Graded Betti numbers k_{i,j} on an explicit rectangular window.

    Entries outside the window are absent, never implicitly zero; consumers
    must check the window instead of assuming vanishing.
    """

    __slots__ = ("entries", "i_max", "j_max", "path", "field_tag")

    def __init__(self, entries, i_max, j_max, path, field_tag):
        self.entries = {k: v for k, v in entries.items() if v}
        for (i, j), k in self.entries.items():
            if k < 0:
                raise MalformedInputError("negative Betti number")
            if i < 0 or i > i_max or j < 0 or j > j_max:
                raise MalformedInputError(f"entry ({i},{j}) outside window")
        self.i_max = i_max
        self.j_max = j_max
        self.path = path
        self.field_tag = field_tag

    def get(self, i, j) -> int:
        if not (0 <= i <= self.i_max and 0 <= j <= self.j_max):
            raise RangeTooSmallError(f"cell ({i},{j}) outside computed window "
                                     f"i<={self.i_max}, j<={self.j_max}")
        return self.entries.get((i, j), 0)

    def max_nonzero_j(self):
        return max((j for (_, j), v in self.entries.items() if v), default=None)

    def to_json(self) -> str:
        cells = [{"i": i, "j": j, "k": self.entries[(i, j)]}
                 for (i, j) in sorted(self.entries)]
        doc = {"path": self.path, "field": self.field_tag,
               "imax": self.i_max, "jmax": self.j_max, "entries": cells}
        return json.dumps(doc, separators=(", ", ": "))

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        entries = {(c["i"], c["j"]): c["k"] for c in doc["entries"]}
        return cls(entries, doc["imax"], doc["jmax"], doc["path"], doc["field"])

    def cells(self):
        return dict(self.entries)

    def __eq__(self, other):
        return (isinstance(other, BettiTable) and self.entries == other.entries
                and self.i_max == other.i_max and self.j_max == other.j_max)

    def __repr__(self):
        rows = []
        for j in range(self.j_max + 1):
            row = " ".join(str(self.entries.get((i, j), 0)).rjust(4)
                           for i in range(self.i_max + 1))
            rows.append(f"j={j}: {row}")
        return "\n".join(rows)


class GradedPresentation:
    """Presentation of a graded module: free cover plus relation columns.

    relations is a list of (column_degree, {row_index: Polynomial}) with every
    entry homogeneous of degree column_degree - gen_degrees[row].
    complete_through: internal degree through which the relation list is
    known to generate the full kernel (None = fully presented).
    module_hilbert: optional exact callable d -> dim M_d. When present it
    anchors the kernel-dimension bookkeeping that lets the resolution run
    its selections modulo large primes with full rational certificates.
    """

    __slots__ = ("ring", "gen_degrees", "relations", "complete_through",
                 "module_hilbert")

    def __init__(self, ring: Ring, gen_degrees, relations, complete_through=None,
                 module_hilbert=None):
        if ring.grading_length != 1:
            raise MalformedInputError("presentations use the standard grading")
        self.ring = ring
        self.gen_degrees = list(gen_degrees)
        self.relations = []
        for coldeg, col in relations:
            col = {r: p for r, p in col.items() if not p.is_zero()}
            if not col:
                continue
            for r, p in col.items():
                if p.ring != ring:
                    raise MalformedInputError("relation entry outside the ring")
                if p.degree()[0] != coldeg - self.gen_degrees[r]:
                    raise MalformedInputError(
                        f"entry at row {r} not homogeneous of degree "
                        f"{coldeg - self.gen_degrees[r]}")
            self.relations.append((coldeg, col))
        self.complete_through = complete_through
        self.module_hilbert = module_hilbert


def _cancel_units(gen_degrees, relations, field):
    """Remove free-cover redundancy: columns with a constant entry.

    Returns (gen_degrees, relations) of an equivalent presentation whose
    relation columns all lie in S_+ . F_0.
    """
    gen_degrees = list(gen_degrees)
    relations = [(d, dict(col)) for d, col in relations]
    while True:
        hit = None
        for ci, (coldeg, col) in enumerate(relations):
            for r, p in col.items():
                if coldeg == gen_degrees[r]:
                    hit = (ci, r, p)
                    break
            if hit:
                break
        if hit is None:
            return gen_degrees, relations
        ci, r, p = hit
        unit = p.terms[(0,) * p.ring.nvars]
        pivot_deg, pivot = relations.pop(ci)
        inv = 1 / unit if not hasattr(field, "p") else field.inv(unit)
        pivot = {rr: q.scale(inv) for rr, q in pivot.items()}
        new_rel = []
        for coldeg, col in relations:
            q = col.get(r)
            if q is not None:
                col = dict(col)
                del col[r]
                for rr, pv in pivot.items():
                    if rr == r:
                        continue
                    upd = col.get(rr, pv.ring.zero()) - q * pv
                    if upd.is_zero():
                        col.pop(rr, None)
                    else:
                        col[rr] = upd
            if col:
                new_rel.append((coldeg, col))
        # drop generator r, shifting row indices
        def shift(col):
            return {(rr if rr < r else rr - 1): v for rr, v in col.items()}
        relations = [(d, shift(c)) for d, c in new_rel]
        del gen_degrees[r]


class _Piece:
    """Index bookkeeping for the degree-d piece of a free module."""

    def __init__(self, ring, gen_degrees, d):
        self.index = {}
        self.items = []
        for g, dg in enumerate(gen_degrees):
            if d - dg < 0:
                continue
            for m in monomials_of_degree(ring, d - dg):
                self.index[(g, m)] = len(self.items)
                self.items.append((g, m))

    def __len__(self):
        return len(self.items)


def _shift_vector(vec, m):
    """Multiply a graded-piece vector {(g, mono): c} by the monomial m."""
    return {(g, mul_monomials(mono, m)): c for (g, mono), c in vec.items()}


def _exact_span_selection(nrows, field, old_cols, cands):
    """Plain incremental exact elimination; the certificate-free fallback."""
    span = SpanSolver(Matrix(nrows, 0, field))
    for col in old_cols:
        span.insert(col)
    selected = []
    for k, col in enumerate(cands):
        if span.insert(col) is None:
            selected.append(k)
    return selected


def _final_step_counts(ring, field, piece, ambient_degrees, lower_degrees,
                       differential, kdim, D):
    """New-generator counts of the final homological step, counts only.

    Per degree d the count is dim K(d) minus the rank of S_1 times the
    kernel at d-1. Both kernels are realized as modular blocks: they are
    the reductions of the exact RREF kernel bases (the dimensions agree by
    the rank checks, and reductions of RREF bases stay independent), so the
    modular pivot count certifies the rational count exactly as in
    certified_kernel_selection, without materializing anything over Q.
    """
    import numpy as np

    nvars = ring.nvars
    lo = min(ambient_degrees)
    max_primes = 32
    for idx in range(max_primes):
        if isinstance(field, exactalg.PrimeField):
            p = field.p
        else:
            p = exactalg.certification_prime(idx)
        counts = {}
        prev_block = None
        ok = True
        for d in range(lo, D + 1):
            need = kdim.get(d, 0)
            cur = piece(ambient_degrees, d)
            low = piece(lower_degrees, d)
            if len(cur) == 0:
                prev_block = None
                continue
            columns = []
            for (g, m) in cur.items:
                shifted = _shift_vector(differential[g], m)
                columns.append({low.index[key]: c for key, c in shifted.items()})
            try:
                a = exactalg._columns_to_modp_array(columns, len(low), p)
            except MalformedInputError:
                ok = False
                break
            pivots = exactalg._modp_rref(a, p)
            if len(columns) - len(pivots) != need:
                ok = False
                break
            kblock, _ = exactalg._modp_kernel_block(a, pivots, len(columns), p)
            if need == 0:
                prev_block = kblock
                continue
            old_parts = []
            if prev_block is not None and prev_block.shape[1]:
                prev_piece = piece(ambient_degrees, d - 1)
                for vi in range(nvars):
                    idxmap = np.zeros(len(prev_piece), dtype=np.int64)
                    evar = [0] * nvars
                    evar[vi] = 1
                    for k, (g, mono) in enumerate(prev_piece.items):
                        target = (g, mul_monomials(mono, tuple(evar)))
                        idxmap[k] = cur.index[target]
                    block = np.zeros((len(cur), prev_block.shape[1]), dtype=np.int64)
                    block[idxmap, :] = prev_block
                    old_parts.append(block)
            stacked = np.concatenate(old_parts + [kblock], axis=1) if old_parts \
                else kblock.copy()
            piv2 = exactalg._modp_echelon(stacked, p)
            if len(piv2) != need:
                ok = False
                break
            n_old_cols = sum(b.shape[1] for b in old_parts)
            counts[d] = sum(1 for c in piv2 if c >= n_old_cols)
            prev_block = kblock
        if ok:
            return counts
        if isinstance(field, exactalg.PrimeField):
            raise MalformedInputError(
                "kernel bookkeeping failed over the prime field")
    raise MalformedInputError("final-step counting failed for all primes")


def minimal_betti(pres: GradedPresentation, i_max, j_max) -> BettiTable:
    """Betti numbers of the minimal resolution, for i <= i_max, j <= j_max.

    Independent of the (possibly non-minimal) presentation supplied. New
    free generators at every step are chosen as complements of the span of
    multiples of generators already found (graded Nakayama), so the
    resolution is minimal by construction. Kernel dimensions come from
    exact bookkeeping (exactness of the complex built so far plus the
    module's Hilbert function when supplied), which lets the generator
    selection run modulo large primes with full rational certificates; only
    selected generators are ever lifted back to Q.
    """
    if i_max < 0 or j_max < 0:
        raise MalformedInputError("window bounds must be nonnegative")
    ring = pres.ring
    field = ring.field
    D = i_max + j_max
    if pres.complete_through is not None and D > pres.complete_through - 1:
        raise IncompletePresentationError(
            f"window needs internal degree {D} but relations are only "
            f"complete through {pres.complete_through} (valid: i+j <= "
            f"{pres.complete_through - 1})")

    gen_degrees, relations = _cancel_units(pres.gen_degrees, pres.relations, field)

    entries = {}
    for dg in gen_degrees:
        if 0 <= dg <= j_max:
            entries[(0, dg)] = entries.get((0, dg), 0) + 1

    rel_by_degree = {}
    for coldeg, col in relations:
        vec = {}
        for r, p in col.items():
            for mono, c in p.terms.items():
                vec[(r, mono)] = c
        rel_by_degree.setdefault(coldeg, []).append(vec)

    pieces = {}

    def piece(degs, d):
        key = (tuple(degs), d)
        if key not in pieces:
            pieces[key] = _Piece(ring, degs, d)
        return pieces[key]

    # dim K_1(d) = dim (F_0)_d - dim M_d; downstream kernels follow by
    # exactness: dim K_{s+1}(d) = dim (F_s)_d - dim K_s(d).
    k1dim = {}
    for d in range(D + 1):
        f0 = len(piece(gen_degrees, d))
        if pres.module_hilbert is not None:
            k1dim[d] = f0 - pres.module_hilbert(d)
        else:
            cols = []
            pc = piece(gen_degrees, d)
            for coldeg, vecs in rel_by_degree.items():
                if coldeg > d:
                    continue
                for vec in vecs:
                    for m in monomials_of_degree(ring, d - coldeg):
                        shifted = _shift_vector(vec, m)
                        cols.append({pc.index[key]: c for key, c in shifted.items()})
            k1dim[d] = exactalg.rank(Matrix.from_columns(f0, field, cols)) if cols else 0
        if k1dim[d] < 0:
            raise MalformedInputError("module Hilbert function inconsistent")

    ambient_degrees = gen_degrees   # degrees of F_{step-1}
    lower_degrees = None
    differential = None             # F_{step-1} generators over F_{step-2} pieces
    kdim = dict(k1dim)              # dim K_step(d) for the current step

    for step in range(1, i_max + 1):
        chosen = []
        chosen_degrees = []
        if not ambient_degrees:
            break
        if step >= 2 and step == i_max:
            # final step: only generator counts are needed, and they follow
            # from modular kernel blocks chained across degrees, with no
            # rational lifting at all
            counts = _final_step_counts(ring, field, piece, ambient_degrees,
                                        lower_degrees, differential, kdim, D)
            for d, n in counts.items():
                j = d - step
                if n and 0 <= j <= j_max:
                    entries[(step, j)] = entries.get((step, j), 0) + n
            break
        lo = min(ambient_degrees) + 1
        for d in range(lo, D + 1):
            if kdim.get(d, 0) <= 0:
                continue
            cur = piece(ambient_degrees, d)
            if len(cur) == 0:
                continue
            old_cols = []
            for dg, vec in zip(chosen_degrees, chosen):
                for m in monomials_of_degree(ring, d - dg):
                    shifted = _shift_vector(vec, m)
                    old_cols.append({cur.index[key]: c for key, c in shifted.items()})
            if step == 1:
                cands = [{cur.index[key]: c for key, c in vec.items()}
                         for vec in rel_by_degree.get(d, [])]
                if not cands:
                    continue
                try:
                    selected = exactalg.certified_span_selection(
                        len(cur), field, old_cols, cands, kdim[d])
                except MalformedInputError:
                    selected = _exact_span_selection(len(cur), field, old_cols, cands)
                new_vectors = [cands[k] for k in selected]
            else:
                low = piece(lower_degrees, d)
                columns = []
                for (g, m) in cur.items:
                    shifted = _shift_vector(differential[g], m)
                    columns.append({low.index[key]: c for key, c in shifted.items()})
                try:
                    _, new_vectors = exactalg.certified_kernel_selection(
                        columns, len(low), kdim[d], old_cols, field)
                except MalformedInputError:
                    mat = Matrix.from_columns(len(low), field, columns)
                    kcols = [dict(c) for c in exactalg.kernel_basis(mat).columns()]
                    sel = _exact_span_selection(len(cur), field, old_cols, kcols)
                    new_vectors = [kcols[k] for k in sel]
            for vec in new_vectors:
                keyed = {cur.items[i]: c for i, c in vec.items()}
                chosen.append(keyed)
                chosen_degrees.append(d)
                j = d - step
                if 0 <= j <= j_max:
                    entries[(step, j)] = entries.get((step, j), 0) + 1
        differential = chosen
        lower_degrees = ambient_degrees
        ambient_degrees = chosen_degrees
        if ambient_degrees:
            nxt = {}
            for d in range(D + 1):
                v = len(piece(ambient_degrees, d)) - kdim.get(d, 0)
                if v < 0:
                    raise MalformedInputError("kernel bookkeeping went negative")
                nxt[d] = v
            kdim = nxt   # dim K_{step+1}(d) = dim (F_step)_d - dim K_step(d)
        else:
            kdim = {}

    return BettiTable(entries, i_max, j_max, "resolution", field.tag)


def regularity_from_betti(bt: BettiTable) -> int:
    """min m with k_{i,j} = 0 for all j >= m within the computed window.

    This is a statement about the window: the table's ranges are part of the
    claim. Raises RangeTooSmallError when the top nonzero j touches j_max,
    since then the maximum may lie outside the window.
    """
    top = bt.max_nonzero_j()
    if top is None:
        return 0
    if top >= bt.j_max:
        raise RangeTooSmallError(
            f"nonzero entries at j = {top} touch the window edge j_max = {bt.j_max}")
    return top + 1


class NpVerdict:
    """Result of reading Property N_p / N^S_p off a Betti table window."""

    __slots__ = ("p_max", "exhausted_range", "failing_cell", "k01")

    def __init__(self, p_max, exhausted_range, failing_cell, k01):
        self.p_max = p_max
        self.exhausted_range = exhausted_range
        self.failing_cell = failing_cell
        self.k01 = k01

    @property
    def value(self):
        return "all computed" if self.exhausted_range else self.p_max

    def __repr__(self):
        return f"NpVerdict(p_max={self.p_max}, value={self.value!r})"


def np_from_betti(bt: BettiTable, linearly_normal: bool) -> NpVerdict:
    """Largest p within range such that the N^S_p table shape holds.

    Shape: k_{0,0} = 1, k_{i,0} = 0 for i >= 1, k_{0,1} = t (0 if linearly
    normal), and k_{i,j} = 0 for 0 <= i <= p, j >= 2 (j within the window).
    """
    if bt.j_max < 3:
        raise RangeTooSmallError("need j_max >= 3 to read N_p windows")
    if bt.get(0, 0) != 1:
        raise MalformedInputError("table does not start with k_{0,0} = 1")
    k01 = bt.get(0, 1)
    if linearly_normal and k01 != 0:
        return NpVerdict(-1, False, (0, 1), k01)
    p = -1
    for i in range(0, bt.i_max + 1):
        if i >= 1 and bt.get(i, 0) != 0:
            return NpVerdict(p, False, (i, 0), k01)
        bad = None
        for j in range(2, bt.j_max + 1):
            if bt.get(i, j) != 0:
                bad = (i, j)
                break
        if bad is not None:
            return NpVerdict(p, False, bad, k01)
        p = i
    return NpVerdict(p, True, None, k01)


def present_E(e, degree_bound) -> GradedPresentation:
    """Graded presentation of a section module from its multiplication data.

    Generators sit in the degrees where V . E_{l-1} -> E_l fails to surject
    (multiplicity = cokernel dimension); relations are complete through
    degree_bound, so downstream Betti windows are valid for
    i + j <= degree_bound - 1.
    """
    if degree_bound < 2:
        raise MalformedInputError("degree_bound must be >= 2")
    for l in range(degree_bound + 1):
        if e.dim(l) is None:
            raise InsufficientDataError(f"module data missing piece {l}")
        if l < degree_bound and e.multiplication(l) is None:
            raise InsufficientDataError(f"module data missing multiplication at {l}")
    field = e.field
    ring = Ring([f"z{i}" for i in range(e.dim_V)], field=field)

    # minimal generators: complement of the image of V . E_{l-1} in E_l
    gen_degrees = []
    gen_reps = {}      # (degree, local index) list per degree: rep vectors in E_l
    spans = {}
    for l in range(degree_bound + 1):
        dim_l = e.dim(l)
        if l == 0:
            image = SpanSolver(Matrix(dim_l, 0, field))
        else:
            cols = []
            for v in range(e.dim_V):
                mv = e.multiplication(l - 1)[v]
                cols.extend(mv.columns())
            image = SpanSolver(Matrix.from_columns(dim_l, field, cols))
        covered = {lead for lead, _, _ in image._rows}
        missing = [r for r in range(dim_l) if r not in covered]
        reps = []
        for r in missing:
            gen_degrees.append(l)
            reps.append({r: field.one})
        gen_reps[l] = reps
        spans[l] = image

    flat_reps = []
    for l in sorted(gen_reps):
        for rep in gen_reps[l]:
            flat_reps.append((l, rep))

    # multiply a rep vector up: cache (gen, monomial) -> vector in E_{deg}
    mono_cache = {}
    column_cache = {}

    def mult_columns(level, v):
        key = (level, v)
        got = column_cache.get(key)
        if got is None:
            got = e.multiplication(level)[v].columns()
            column_cache[key] = got
        return got

    def rep_times_monomial(g, mono):
        key = (g, mono)
        got = mono_cache.get(key)
        if got is not None:
            return got
        dg, rep = flat_reps[g]
        if sum(mono) == 0:
            vec = rep
        else:
            i = next(k for k, ei in enumerate(mono) if ei)
            lower = list(mono)
            lower[i] -= 1
            prev = rep_times_monomial(g, tuple(lower))
            level = dg + sum(mono) - 1
            vec = {}
            cols = mult_columns(level, i)
            for r, c in prev.items():
                for rr, vv in cols[r].items():
                    s = vec.get(rr, field.zero) + c * vv
                    if hasattr(field, "p"):
                        s %= field.p
                    if s == field.zero:
                        vec.pop(rr, None)
                    else:
                        vec[rr] = s
        mono_cache[key] = vec
        return vec

    # relations: kernel of (+)_g S(-dg) -> E, degree by degree, minimal choice;
    # the cover is surjective by construction, so dim ker = dim (F_0)_d - dim E_d
    relations = []
    chosen = []            # (degree, vector over (gen, monomial) keys)
    for d in range(degree_bound + 1):
        cols = []
        labels = []
        for g, dg in enumerate(gen_degrees):
            if d - dg < 0:
                continue
            for m in monomials_of_degree(ring, d - dg):
                labels.append((g, m))
                cols.append(rep_times_monomial(g, m))
        if not cols:
            continue
        kernel_dim = len(cols) - e.dim(d)
        if kernel_dim < 0:
            raise MalformedInputError("section module cover is not surjective")
        if kernel_dim == 0:
            continue
        label_index = {lab: i for i, lab in enumerate(labels)}
        old_cols = []
        for dg, vec in chosen:
            for m in monomials_of_degree(ring, d - dg):
                old_cols.append({label_index[(g, mul_monomials(mono, m))]: c
                                 for (g, mono), c in vec.items()})
        try:
            _, new_vectors = exactalg.certified_kernel_selection(
                cols, e.dim(d), kernel_dim, old_cols, field)
        except MalformedInputError:
            mat = Matrix.from_columns(e.dim(d), field, cols)
            kcols = [dict(c) for c in exactalg.kernel_basis(mat).columns()]
            sel = _exact_span_selection(len(labels), field, old_cols, kcols)
            new_vectors = [kcols[k] for k in sel]
        for vec in new_vectors:
            keyed = {labels[i]: c for i, c in vec.items()}
            chosen.append((d, keyed))
            poly_col = {}
            for (g, mono), c in keyed.items():
                p = poly_col.get(g, ring.zero())
                poly_col[g] = p + ring.monomial(mono, c)
            relations.append((d, poly_col))

    return GradedPresentation(ring, gen_degrees, relations,
                              complete_through=degree_bound,
                              module_hilbert=lambda d: e.dim(d) or 0)
