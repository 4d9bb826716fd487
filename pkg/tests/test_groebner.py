"""Groebner bases, normal forms, elimination kernels, Hilbert functions."""

import math

import pytest
from gmpy2 import mpq

from syzygies import exactalg, groebner
from syzygies.errors import MalformedInputError, ResourceLimitError
from syzygies.exactalg import Matrix, QQ
from syzygies.groebner import (GroebnerCache, Ideal, buchberger,
                               hilbert_function, kernel_of_map, normal_form)
from syzygies.polyring import (Ring, RingMap, format_polynomial,
                               monomials_of_degree, mul_monomials,
                               parse_polynomial)

P1 = Ring(["s", "t"])


def twisted_cubic_map():
    S = Ring(["z0", "z1", "z2", "z3"])
    imgs = [parse_polynomial(P1, t) for t in ("s^3", "s^2*t", "s*t^2", "t^3")]
    return RingMap(S, P1, imgs)


def veronese_map(n, d):
    src = Ring([f"x{i}" for i in range(n + 1)])
    mons = monomials_of_degree(src, d)
    S = Ring([f"z{i}" for i in range(len(mons))])
    imgs = [src.monomial(m) for m in mons]
    return RingMap(S, src, imgs)


def brute_force_sym_kernel_count(f, d):
    """Independent oracle: dim ker(Sym^d V -> target degree piece) by raw
    monomial expansion and exactalg.kernel_basis, no Groebner machinery."""
    import itertools

    src = f.source
    tgt = f.target
    tdeg = tuple(d * c for c in f.image_degree)
    rows = monomials_of_degree(tgt, tdeg)
    index = {m: i for i, m in enumerate(rows)}
    cols = []
    for combo in itertools.combinations_with_replacement(range(src.nvars), d):
        p = tgt.one()
        for i in combo:
            p = p * f.images[i]
        cols.append({index[m]: c for m, c in p.terms.items()})
    mat = Matrix.from_columns(len(rows), QQ, cols)
    return exactalg.kernel_basis(mat).ncols


def test_buchberger_principal_ideal():
    ring = Ring(["x", "y"])
    f = parse_polynomial(ring, "2*x^2 - 2*y^2")
    gb = buchberger(Ideal(ring, [f]))
    assert len(gb.basis) == 1
    assert format_polynomial(gb.basis[0]) == "x^2 - y^2"


def test_buchberger_linear_ideal():
    ring = Ring(["x", "y", "z"])
    gens = [parse_polynomial(ring, "x - y"), parse_polynomial(ring, "y - z")]
    gb = buchberger(Ideal(ring, gens))
    assert sorted(format_polynomial(g) for g in gb.basis) == ["x - z", "y - z"]


def test_buchberger_idempotent():
    f = twisted_cubic_map()
    ker = kernel_of_map(f)
    gb = buchberger(Ideal(f.source, ker.gens))
    gb2 = buchberger(Ideal(f.source, gb.basis))
    assert [g.terms for g in gb.basis] == [g.terms for g in gb2.basis]


def test_twisted_cubic_kernel_three_quadrics():
    f = twisted_cubic_map()
    # independent oracle: dim Sym^2 V - rank of restriction = 10 - 7 = 3
    assert brute_force_sym_kernel_count(f, 2) == 3
    ker = kernel_of_map(f)
    assert sorted(g.degree()[0] for g in ker.gens) == [2, 2, 2]


def test_normal_form_membership():
    f = twisted_cubic_map()
    ker = kernel_of_map(f)
    gb = buchberger(Ideal(f.source, ker.gens))
    member = parse_polynomial(f.source, "z0*z2 - z1^2")
    assert normal_form(member, gb).is_zero()
    for g in ker.gens:
        assert normal_form(g, gb).is_zero()
    one = f.source.one()
    assert normal_form(one, gb) == one


def test_kernel_identity_map_is_zero_ideal():
    ring = Ring(["x0", "x1"])
    f = RingMap(ring, ring, ring.variables())
    assert kernel_of_map(f).gens == []


def test_veronese23_kernel_27_quadrics():
    f = veronese_map(2, 3)
    # brute force: 55 - 28 = 27 via exact kernel of Sym^2 V -> H^0(O(6))
    assert brute_force_sym_kernel_count(f, 2) == 27
    ker = kernel_of_map(f)
    assert sorted(g.degree()[0] for g in ker.gens) == [2] * 27


def test_kernel_methods_agree():
    f = veronese_map(1, 3)
    by_elim = kernel_of_map(f, method="elimination")
    by_linalg = kernel_of_map(f, method="linalg", gen_degree_bound=2)
    assert sorted(map(format_polynomial, by_elim.gens)) == \
        sorted(map(format_polynomial, by_linalg.gens))


def test_kernel_methods_agree_hyperelliptic():
    from syzygies import geometry

    g2 = geometry.hyperelliptic_g2(m=3)
    a = groebner.kernel_of_map(g2.ring_map, g2.source.relations,
                               method="elimination")
    b = groebner.kernel_of_map(g2.ring_map, g2.source.relations,
                               method="linalg", gen_degree_bound=3)
    assert sorted(map(format_polynomial, a.gens)) == \
        sorted(map(format_polynomial, b.gens))


def test_hilbert_zero_ideal():
    ring = Ring([f"z{i}" for i in range(4)])
    ideal = Ideal(ring, [])
    for d in range(4):
        assert hilbert_function(ideal, d) == math.comb(3 + d, 3)


def test_hilbert_twisted_cubic_degree_2():
    f = twisted_cubic_map()
    ker = kernel_of_map(f)
    # derived: equals the rank of Sym^2 V -> H^0(O(6)), which is 10 - 3 = 7
    assert hilbert_function(ker, 2) == 7
    gb = buchberger(Ideal(f.source, ker.gens))
    assert hilbert_function(ker, 2, gb=gb) == 7


def test_hilbert_example1_image_degree_2():
    from syzygies import geometry

    g2 = geometry.hyperelliptic_g2(m=3)
    w = geometry.project(g2, 1, 11)
    ideal = w.image_ideal()
    # no quadric vanishes on the curve: full h^0(P^3, O(2)) = 10
    assert hilbert_function(ideal, 2) == 10
    gb = buchberger(Ideal(ideal.ring, ideal.gens))
    assert hilbert_function(ideal, 2, gb=gb) == 10


def test_hilbert_ties_to_section_rank():
    from syzygies import geometry

    v = geometry.veronese(2, 2)
    ideal = v.image_ideal()
    for d in range(1, 5):
        assert hilbert_function(ideal, d) == v.section_rank(d)


def test_degree_cap_raises():
    ring = Ring(["x", "y"])
    f = parse_polynomial(ring, "x^31 - y^31")
    with pytest.raises(ResourceLimitError):
        buchberger(Ideal(ring, [f]), degree_cap=30)


def test_kernel_generators_map_to_zero():
    from syzygies import geometry
    from syzygies.polyring import apply_map

    g2 = geometry.hyperelliptic_g2(m=3)
    ideal = g2.image_ideal()
    gb_rel = buchberger(g2.source.relations)
    for g in ideal.gens:
        assert normal_form(apply_map(g2.ring_map, g), gb_rel).is_zero()


def test_is_isomorphic_embedding_cases():
    from syzygies import geometry
    from syzygies.geometry import EmbeddedVariety, VeroneseSource

    v = geometry.veronese(2, 3)
    assert groebner.is_isomorphic_embedding(v)
    w = geometry.project(v, 1, 7)
    assert groebner.is_isomorphic_embedding(w)
    # projection of the conic from a point on itself: image is a line
    src = VeroneseSource(1, 2)
    field = src.ring.field
    bad = EmbeddedVariety(src, [src.ring.monomial((2, 0)),
                                src.ring.monomial((1, 1))])
    assert not groebner.is_isomorphic_embedding(bad)


def test_groebner_cache_bit_identical(tmp_path):
    cache = GroebnerCache(str(tmp_path))
    f = twisted_cubic_map()
    ker = kernel_of_map(f)
    ideal = Ideal(f.source, ker.gens)
    gb1 = buchberger(ideal, cache=cache)
    path = tmp_path / (cache.key(ideal) + ".gb")
    first = path.read_bytes()
    # force recomputation and rewrite
    gb2 = buchberger(ideal)
    cache.put(ideal, gb2)
    assert path.read_bytes() == first
    hit = cache.get(ideal)
    assert [g.terms for g in hit.basis] == [g.terms for g in gb1.basis]
