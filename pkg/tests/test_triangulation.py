import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dliouville import triangulation as tr
from dliouville.errors import ConfigurationError
from dliouville.triangulation import DecoratedTriangulation, GroupoidWord


def _flip_fixture(vals):
    """Quadrilateral i = (0,1,3), j = (1,2,3) with a glued ear on each outer side."""
    verts = [(0, 1, 3), (1, 2, 3), (1, 0, 4), (0, 3, 5), (2, 1, 6), (3, 2, 7)]
    glue = [[None] * 3 for _ in verts]
    pairs = [((0, 1), (1, 2)), ((0, 0), (2, 0)), ((0, 2), (3, 0)), ((1, 0), (4, 0)),
             ((1, 1), (5, 0))]
    for s, t in pairs:
        glue[s[0]][s[1]] = t
        glue[t[0]][t[1]] = s
    coords = {(0, 1): vals["e"], (0, 0): vals["c"], (0, 2): vals["a"], (1, 0): vals["d"],
              (1, 1): vals["b"]}
    return DecoratedTriangulation(tuple(verts), tuple(tuple(g) for g in glue), coords)


def test_flip_unit_coordinates():
    tri = tr.flip(_flip_fixture(dict(a=1.0, b=1.0, c=1.0, d=1.0, e=1.0)), 1, 2)
    # the ears keep their edges: side 0 of triangles 3..6 carry c, a, d, b
    got = {k: tri.coord(t, 0) for k, t in zip("cadb", range(2, 6))}
    assert got == {"a": 0.5, "b": 2.0, "c": 2.0, "d": 0.5}
    assert tri.coord(0, 0) == 1.0  # new diagonal e' = 1/e


def test_flip_general_values():
    v = dict(a=0.3, b=1.7, c=2.2, d=0.9, e=0.6)
    tri = tr.flip(_flip_fixture(v), 1, 2)
    e = v["e"]
    assert tri.coord(3, 0) == pytest.approx(v["a"] / (1 + 1 / e), rel=1e-15)
    assert tri.coord(5, 0) == pytest.approx(v["b"] * (1 + e), rel=1e-15)
    assert tri.coord(2, 0) == pytest.approx(v["c"] * (1 + e), rel=1e-15)
    assert tri.coord(4, 0) == pytest.approx(v["d"] / (1 + 1 / e), rel=1e-15)
    back = tr.flip_inverse(tri, 1, 2)
    assert back.same_structure(_flip_fixture(v))
    assert tr.coord_deviation(back, _flip_fixture(v)) < 1e-14


def test_flip_with_boundary_sides():
    q = tr.quadrilateral().with_coords([3.0])
    out = tr.flip(q, 1, 2)
    assert out.coord_vector() == [pytest.approx(1 / 3)]
    assert len(out.boundary_sides()) == 4


def test_flip_requires_configuration():
    with pytest.raises(ConfigurationError):
        tr.flip(tr.quadrilateral(), 2, 1)
    with pytest.raises(ConfigurationError):
        tr.flip(tr.quadrilateral(), 1, 1)
    with pytest.raises(IndexError):
        tr.rho(tr.quadrilateral(), 3)


def test_rho_cubed_and_coords_untouched():
    q = tr.quadrilateral().with_coords([0.7])
    once = tr.rho(q, 1)
    assert not once.same_structure(q)
    assert once.coord_vector() == [0.7]
    thrice = tr.rho(tr.rho(once, 1), 1)
    assert thrice.same_structure(q) and thrice.coords == q.coords


def test_permutation_composition():
    pent = tr.random_coords(tr.pentagon(), 3, seed=1)
    a, b = tr.as_permutation("(1 2 3)", 3), tr.as_permutation("(1 2)", 3)
    two = tr.permute(tr.permute(pent, [k + 1 for k in a]), [k + 1 for k in b])
    one = tr.permute(pent, [k + 1 for k in tr.compose(a, b)])
    assert two.same_structure(one) and tr.coord_deviation(two, one) == 0.0
    assert tr.cycles_of(tr.as_permutation("(1 3)", 3)) == ((1, 3),)
    with pytest.raises(ValueError):
        tr.as_permutation("(1 2)(2 3)", 3)


def test_word_parse_round_trip():
    text = "w(3,2v) r(1)^-1 p(1 2)"
    word = GroupoidWord.parse(text)
    assert str(word) == text
    assert GroupoidWord.parse(str(word)) == word
    assert str(GroupoidWord.parse("w(1^,4)^-1 p(1 2 3)(4 5)^-1")) == "w(1^,4)^-1 p(1 2 3)(4 5)^-1"


def test_word_parse_error_reports_offset():
    with pytest.raises(ConfigurationError) as e:
        GroupoidWord.parse("r(1) q(2)")
    assert e.value.position == 5


def test_apply_word_error_position():
    with pytest.raises(ConfigurationError) as e:
        tr.apply_word(tr.quadrilateral(), "r(1) r(1)^-1 w(1,2) w(1,2)")
    assert e.value.position == 3


def test_identity_and_inverse_words():
    start = tr.random_coords(tr.annulus(3), 20, seed=4)
    assert tr.apply_word(start, "") is start
    word = tr.dehn_word(3, 2) + "r(4) p(1 2)(3 6)"
    out = tr.apply_word(tr.apply_word(start, word), word.inverse())
    assert out.same_structure(start)
    assert tr.coord_deviation(out, start) < 1e-14


def test_inversion_relation_tight():
    assert tr.check_named_relation("inversion", tol=1e-14).ok


@pytest.mark.parametrize("name", tr.RELATIONS)
def test_named_relations(name):
    res = tr.check_named_relation(name, n_samples=50, seed=3)
    assert res.ok and res.combinatorics


def test_annulus_counts():
    for N in (1, 2, 5):
        a = tr.annulus(N)
        assert a.size == 2 * N
        assert len(a.interior_edges()) == 2 * N
        assert len(a.boundary_sides()) == 2 * N
    with pytest.raises(ValueError):
        tr.annulus(0)


def test_annulus_coords_round_trip():
    f = [0.5, 1.5, 2.5, 3.5]
    assert tr.read_annulus_coords(tr.annulus_coords(f)) == f


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_dehn_step_isomorphic_to_annulus(N):
    out = tr.apply_word(tr.annulus(N), tr.dehn_word(N, 1))
    assert out.isomorphic(tr.annulus(N))
    full = tr.apply_word(tr.annulus(N), tr.dehn_word(N, N))
    assert full.same_structure(tr.annulus(N))


def test_dehn_n1_unit_coords():
    out = tr.apply_word(tr.annulus_coords([1.0, 1.0]), tr.dehn_word(1, 1))
    assert tr.read_annulus_coords(out) == [4.0, 1.0]
    assert tr.lightcone_equivalence_check(1, [1.0, 1.0]) == 0.0


def test_lightcone_formula():
    rng = np.random.default_rng(5)
    N = 3
    f = np.exp(rng.uniform(-2, 2, 2 * N))
    g = tr.read_annulus_coords(tr.apply_word(tr.annulus_coords(f), tr.dehn_word(N, 1)))
    for j in range(1, N + 1):
        fm = lambda k: f[(k - 1) % (2 * N)]  # noqa: E731
        assert g[2 * j - 1] == pytest.approx(1 / fm(2 * j - 1), rel=1e-13)
        nxt = (2 * j) % (2 * N)
        assert g[nxt] == pytest.approx(fm(2 * j) * (1 + fm(2 * j - 1)) * (1 + fm(2 * j + 1)),
                                       rel=1e-13)


def test_iterated_lightcone():
    rng = np.random.default_rng(6)
    for N in (2, 3):
        f = np.exp(rng.uniform(-0.5, 0.5, 2 * N))
        assert tr.lightcone_equivalence_check(N, f, steps=2 * N) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda N: st.lists(st.floats(-2, 2), min_size=2 * N, max_size=2 * N)))
def test_lightcone_property(logs):
    N = len(logs) // 2
    assert tr.lightcone_equivalence_check(N, np.exp(logs)) < 1e-12


def test_word_identities_small():
    assert tr.word_identity_check("tilde_1", 2).ok
    assert tr.word_identity_check("tilde_n", 3, 2).ok
    assert tr.word_identity_check("power_any", 3, 1).ok
    assert tr.word_identity_check("power_N", 3).ok
    with pytest.raises(ValueError):
        tr.word_identity_check("tilde_n", 3, 3)


def test_negative_controls():
    # N-th power returns the same structure but moves the coordinates
    res = tr.check_relation(tr.dehn_word(2, 2), "", tr.annulus(2))
    assert res.combinatorics and not res.ok and res.deviation > 0.1
    # a perturbed flip target is not applicable
    with pytest.raises(ConfigurationError):
        tr.check_relation(tr.power_N_lhs(3), [tr.T("1v", "3^", inverse=True)], tr.refolded(3, 1))
    # reversing the relabeling cycle gives a different triangulation
    rhs = tr.tilde_1_rhs(3)
    bad = GroupoidWord(rhs.gens[:-1]) + [tr.p((1, 3, 5))]
    assert str(rhs.gens[-1]) != str(bad.gens[-1])
    assert not tr.check_relation(tr.tilde_n_lhs(3, 1), bad, tr.refolded(3, 1)).ok


def test_json_round_trip():
    tri = tr.random_coords(tr.annulus(2), 1, seed=2).with_coords([0.5, 1.5, 2.5, 3.5])
    back = DecoratedTriangulation.from_json(tri.dumps())
    assert back == tri and back.coords == tri.coords
    assert DecoratedTriangulation.from_json(back.to_json()).dumps() == tri.dumps()


def test_structure_validation():
    with pytest.raises(ConfigurationError):
        DecoratedTriangulation(((0, 1, 2),), (((0, 1), None, None),), {})
    q = tr.quadrilateral()
    with pytest.raises(ConfigurationError):
        DecoratedTriangulation(q.verts, q.glue, {})
