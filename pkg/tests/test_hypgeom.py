import random
from fractions import Fraction

import pytest

from vclab.words import Alphabet, WordError, enumerate_reduced, parse_word, reduce
from vclab.hypgeom import (
    BallCapExceeded,
    FiniteMetricSpace,
    PathSample,
    QGConstants,
    cayley_ball,
    check_concatenation_quasigeodesic,
    check_midpoint_inequality,
    divergence_experiment,
    estimate_delta_thin,
    free_tree_geodesic,
    free_word_metric,
    gromov_product,
    is_quasigeodesic,
    minimal_conjugation_split,
)

F2 = Alphabet(2)
F3 = Alphabet(3)


def p(text, alph=F2):
    return parse_word(text, alph)


def random_word(rng, max_len, alph=F2):
    letters = [(rng.randrange(alph.rank), rng.choice((1, -1))) for _ in range(rng.randint(0, max_len))]
    return reduce(letters, alph)


@pytest.fixture(scope="module")
def ball4():
    return cayley_ball([p("a"), p("b")], 4)


# -- balls ---------------------------------------------------------------------

def test_ball_sizes():
    gens = [p("a"), p("b")]
    assert len(cayley_ball(gens, 0)) == 1
    assert len(cayley_ball(gens, 1)) == 5
    assert len(cayley_ball(gens, 2)) == 17


def test_ball_cap():
    with pytest.raises(BallCapExceeded):
        cayley_ball([p("a"), p("b")], 4, cap=50)


def test_ball_metric_is_word_metric(ball4):
    rng = random.Random(3)
    pts = ball4.points
    for _ in range(300):
        u, v = rng.choice(pts), rng.choice(pts)
        assert ball4.dist(u, v) == free_word_metric(u, v)


def test_ball_nonstandard_generators():
    sp = cayley_ball([p("a^2"), p("b^2")], 2)
    # elements of <a^2, b^2> within distance 2
    assert p("a^2b^2") in sp.points
    assert sp.dist(p(""), p("a^2b^2")) == 2
    assert sp.dist(p(""), p("a^4")) == 2


def test_triangle_inequality_sampled(ball4):
    assert ball4.check_triangle_inequality(2000, seed=9)


# -- Gromov products --------------------------------------------------------------

def test_gromov_product_examples(ball4):
    one = p("")
    assert gromov_product(ball4, p("a"), p("b"), one) == 0
    assert gromov_product(ball4, p("ab"), p("a"), one) == 1
    assert gromov_product(ball4, p("a"), p("a"), p("b")) == ball4.dist(p("b"), p("a"))


def test_gromov_product_sum_identity(ball4):
    rng = random.Random(11)
    pts = ball4.points
    for _ in range(300):
        a, b, c = rng.choice(pts), rng.choice(pts), rng.choice(pts)
        assert gromov_product(ball4, a, b, c) + gromov_product(ball4, a, c, b) == ball4.dist(b, c)


def test_gromov_product_unknown_point(ball4):
    with pytest.raises(WordError):
        gromov_product(ball4, p("a^9"), p("a"), p(""))


# -- thin triangles ------------------------------------------------------------------

def test_tree_ball_is_zero_thin(ball4):
    assert estimate_delta_thin(ball4, free_tree_geodesic, 300, seed=7) == 0


def test_two_point_space():
    pts = (p(""), p("a"))
    sp = FiniteMetricSpace(pts, ((0, 1), (1, 0)))
    assert estimate_delta_thin(sp, lambda u, v: [u, v], 50, seed=1) == 0


def _perturbed_space():
    c, pp, q, a, b = p(""), p("a"), p("b"), p("a^2"), p("b^2")
    pts = (c, pp, q, a, b)
    idx = {x: i for i, x in enumerate(pts)}
    d = [[0] * 5 for _ in range(5)]

    def setd(u, v, val):
        d[idx[u]][idx[v]] = val
        d[idx[v]][idx[u]] = val

    setd(c, pp, 1); setd(c, q, 1); setd(c, a, 2); setd(c, b, 2)
    setd(pp, q, 2); setd(pp, a, 1); setd(pp, b, 2)
    setd(q, a, 2); setd(q, b, 1)
    setd(a, b, 2)  # tree value would be 4; perturbed to open the product
    sp = FiniteMetricSpace(pts, tuple(tuple(r) for r in d))
    geo = {(c, a): [c, pp, a], (a, c): [a, pp, c], (c, b): [c, q, b], (b, c): [b, q, c]}
    return sp, lambda u, v: geo.get((u, v), [u, v])


def test_perturbed_metric_gives_positive_delta():
    sp, oracle = _perturbed_space()
    n = len(sp.points)
    full = all(
        sp.dist_matrix[i][k] <= sp.dist_matrix[i][j] + sp.dist_matrix[j][k]
        for i in range(n) for j in range(n) for k in range(n)
    )
    assert full
    assert estimate_delta_thin(sp, oracle, 1000, seed=5) == 2


# -- quasi-geodesics -----------------------------------------------------------------

def test_geodesic_segment_is_one_zero_quasigeodesic():
    path = PathSample.from_vertices(free_tree_geodesic(p(""), p("a^3b^2")))
    assert is_quasigeodesic(path, QGConstants(Fraction(1), Fraction(0)))


def test_backtracking_path_fails():
    path = PathSample.from_vertices([p("a"), p("ab"), p("a")])
    verdict = is_quasigeodesic(path, QGConstants(Fraction(1), Fraction(0)))
    assert not verdict
    assert (verdict.worst_start, verdict.worst_end) == (0, 2)


def test_power_sequence_is_geodesic_for_cyclically_reduced():
    rng = random.Random(13)
    constants = QGConstants(Fraction(1), Fraction(0))
    for _ in range(30):
        g = random_word(rng, 5)
        core, _ = g.cyclic_reduce()
        if core.is_identity():
            continue
        vertices = [core ** i for i in range(6)]
        assert is_quasigeodesic(PathSample.from_vertices(vertices), constants)


def test_quasigeodesic_one_zero_iff_geodesic(ball4):
    rng = random.Random(17)
    constants = QGConstants(Fraction(1), Fraction(0))
    pts = ball4.points
    for _ in range(100):
        u, v, x = rng.choice(pts), rng.choice(pts), rng.choice(pts)
        path = PathSample.from_vertices([u, x, v])
        geodesic = free_word_metric(u, x) + free_word_metric(x, v) == free_word_metric(u, v)
        assert bool(is_quasigeodesic(path, constants)) == geodesic


# -- midpoint inequality -------------------------------------------------------------

def test_midpoint_example(ball4):
    a2, b2, one = p("a^2"), p("b^2"), p("")
    assert check_midpoint_inequality(
        ball4, a2, b2, one,
        free_tree_geodesic(a2, one), free_tree_geodesic(b2, one), Fraction(0),
    )


def test_midpoint_degenerate(ball4):
    a2, one = p("a^2"), p("")
    assert check_midpoint_inequality(
        ball4, a2, a2, one,
        free_tree_geodesic(a2, one), free_tree_geodesic(a2, one), Fraction(0),
    )


def test_midpoint_random_tree_triangles(ball4):
    rng = random.Random(19)
    pts = ball4.points
    for _ in range(1000):
        a, b, c = rng.choice(pts), rng.choice(pts), rng.choice(pts)
        assert check_midpoint_inequality(
            ball4, a, b, c,
            free_tree_geodesic(a, c), free_tree_geodesic(b, c), Fraction(0),
        )


# -- concatenation -----------------------------------------------------------------------

def _seg(u, v):
    return PathSample.from_vertices(free_tree_geodesic(u, v))


def test_concatenation_clean_joint():
    rep = check_concatenation_quasigeodesic(
        [_seg(p("A^2"), p("")), _seg(p(""), p("b^2"))],
        Fraction(0), QGConstants(Fraction(1), Fraction(0)), Fraction(1),
    )
    assert rep.hypotheses_ok
    assert rep.measured_epsilon0 == 0


def test_concatenation_backtracking_joint():
    rep = check_concatenation_quasigeodesic(
        [_seg(p("a^2"), p("")), _seg(p(""), p("ab"))],
        Fraction(0), QGConstants(Fraction(1), Fraction(0)), Fraction(1),
    )
    # Gromov product at the joint is 1, not below alpha = 1
    assert not rep.product_hypothesis_ok
    assert rep.measured_epsilon0 == 2  # the overlap costs exactly 2 alpha


def test_concatenation_three_segments():
    rep = check_concatenation_quasigeodesic(
        [_seg(p("a^2"), p("")), _seg(p(""), p("b^2")), _seg(p("b^2"), p("b^2a^2"))],
        Fraction(0), QGConstants(Fraction(1), Fraction(0)), Fraction(1),
    )
    assert rep.hypotheses_ok
    assert rep.measured_epsilon0 == 0


def test_concatenation_endpoint_mismatch():
    with pytest.raises(WordError):
        check_concatenation_quasigeodesic(
            [_seg(p(""), p("a")), _seg(p("b"), p("b^2"))],
            Fraction(0), QGConstants(Fraction(1), Fraction(0)), Fraction(1),
        )


# -- divergence ---------------------------------------------------------------------------

def test_divergence_no_cancellation():
    report = divergence_experiment(p("a"), p("b"), 8, 8)
    for n, m, length in report.rows:
        assert length == n + m
    assert report.observed_ratio_bound == Fraction(1, 2)
    assert report.observed_ratio_bound < 1
    assert report.power_growth_ok


def test_divergence_seam_cancellation():
    c, d = p("ab"), p("Ba")
    report = divergence_experiment(c, d, 4, 4)
    table = {(n, m): length for n, m, length in report.rows}
    for (n, m), length in table.items():
        assert length == len(c ** n * d ** m)
    assert table[(1, 1)] == 2  # ab * b^-1 a = a^2


def test_divergence_rejects_commensurable():
    with pytest.raises(WordError):
        divergence_experiment(p("a"), p("a^2"), 3, 3)


def test_divergence_csv_shape():
    report = divergence_experiment(p("a"), p("b"), 2, 2)
    lines = report.to_csv().strip().splitlines()
    assert lines[0] == "n,m,length,ratio"
    assert len(lines) == 5


# -- minimal conjugation split ---------------------------------------------------------------

def test_split_examples():
    assert minimal_conjugation_split(p("Bab"), 1) == (p("a"), p("b"))
    assert minimal_conjugation_split(p("Bab"), 3) == (p("Bab"), p(""))
    y, x = minimal_conjugation_split(parse_word("CBabc", F3), 2)
    assert (y, x) == (parse_word("a", F3), parse_word("bc", F3))


def test_split_bound_below_core():
    with pytest.raises(WordError):
        minimal_conjugation_split(p("ab"), 1)


def test_split_reverifies_and_is_minimal():
    rng = random.Random(23)
    conjugators = list(enumerate_reduced(F2, 4))
    for _ in range(60):
        w = random_word(rng, 8)
        core, _ = w.cyclic_reduce()
        if core.is_identity():
            continue
        bound = len(core) + rng.randint(0, 4)
        y, x = minimal_conjugation_split(w, bound)
        assert x.inverse() * y * x == w
        assert len(y) <= bound
        # no strictly shorter conjugator admits a short enough middle
        for cand in conjugators:
            if len(cand) < len(x):
                middle = cand * w * cand.inverse()
                assert len(middle) > bound
