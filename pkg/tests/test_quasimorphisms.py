import random
from fractions import Fraction

import pytest

from vclab.words import Alphabet, WordError, parse_word, reduce
from vclab.equations import EquationInstance, SolutionPair
from vclab.quasimorphisms import (
    QMKind,
    conjugacy_invariance_check,
    counting_qm,
    defect_estimate,
    exponent_sum_qm,
    homogenize,
    separation_report,
)

F2 = Alphabet(2)


def p(text):
    return parse_word(text, F2)


def random_word(rng, max_len, alph=F2):
    letters = [(rng.randrange(alph.rank), rng.choice((1, -1))) for _ in range(rng.randint(0, max_len))]
    return reduce(letters, alph)


def random_pairs(seed, count, max_len):
    rng = random.Random(seed)
    return [(random_word(rng, max_len), random_word(rng, max_len)) for _ in range(count)]


# -- evaluators ---------------------------------------------------------------

def test_exponent_sum_examples():
    qa = exponent_sum_qm(0)
    assert qa(p("a^2b^3")) == 2
    assert qa(p("b")) == 0
    assert qa(p("")) == 0


def test_exponent_sum_is_homogeneous():
    qa = exponent_sum_qm(0)
    rng = random.Random(31)
    for _ in range(100):
        g = random_word(rng, 8)
        m = rng.randint(-5, 5)
        assert qa(g ** m) == m * qa(g)


def test_counting_examples():
    q = counting_qm(p("ab"))
    assert q(p("abab")) == 2
    assert q(p("a")) == 0
    assert q(p("BA")) == -1
    assert q(p("")) == 0


def test_counting_pattern_validation():
    with pytest.raises(WordError):
        counting_qm(p(""))
    with pytest.raises(WordError):
        counting_qm(p("abA"))  # not cyclically reduced


def test_counting_antisymmetry():
    q = counting_qm(p("ab"))
    rng = random.Random(37)
    for _ in range(200):
        g = random_word(rng, 10)
        assert q(g.inverse()) == -q(g)


# -- defect -------------------------------------------------------------------

def test_defect_zero_for_homomorphisms():
    qa = exponent_sum_qm(0)
    est = defect_estimate(qa, random_pairs(41, 500, 10))
    assert est.lower_bound == 0


def test_defect_counting_example():
    q = counting_qm(p("ab"))
    est = defect_estimate(q, [(p("a"), p("b"))])
    assert est.lower_bound >= 1


def test_defect_empty_sample():
    q = counting_qm(p("ab"))
    est = defect_estimate(q, [])
    assert est.lower_bound == 0 and est.sample_count == 0


def test_counting_defect_stays_under_pattern_bound():
    # sampled quasimorphism axiom: gap bounded by 3 * pattern length
    q = counting_qm(p("ab"))
    pairs = random_pairs(43, 10_000, 10)
    est = defect_estimate(q, pairs)
    assert est.lower_bound <= 3 * len(p("ab"))
    assert est.sample_count == 10_000


# -- homogenization ------------------------------------------------------------

def test_homogenize_homomorphism_fixed_point():
    qa = exponent_sum_qm(0)
    for m in (1, 2, 4, 64):
        res = homogenize(qa, p("a^2b"), m, Fraction(0))
        assert res.value == 2 and res.error_bound == 0


def test_homogenize_identity_word():
    q = counting_qm(p("ab"))
    for m in (1, 4, 16):
        assert homogenize(q, p(""), m, Fraction(3)).value == 0


def test_homogenize_counting_converges():
    q = counting_qm(p("ab"))
    res = homogenize(q, p("ab"), 64, Fraction(3))
    assert res.value == 1
    assert res.error_bound == Fraction(3, 64)


def test_doubling_cauchy_property():
    q = counting_qm(p("ab"))
    pairs = random_pairs(47, 10_000, 10)
    d_hat = defect_estimate(q, pairs).lower_bound
    bound_defect = max(d_hat, Fraction(3 * len(p("ab"))))
    rng = random.Random(53)
    for _ in range(100):
        g = random_word(rng, 8)
        for m in (1, 2, 4, 8, 16, 32, 64):
            gap = abs(q(g ** (2 * m)) / (2 * m) - q(g ** m) / m)
            assert gap <= bound_defect / m


# -- conjugacy invariance ---------------------------------------------------------

def test_invariance_exact_for_homomorphisms():
    qa = exponent_sum_qm(0)
    rng = random.Random(59)
    for _ in range(100):
        g, u = random_word(rng, 8), random_word(rng, 6)
        check = conjugacy_invariance_check(qa, g, u, 16, Fraction(0))
        assert check.residual == 0


def test_invariance_trivial_conjugator():
    q = counting_qm(p("ab"))
    check = conjugacy_invariance_check(q, p("ab"), p(""), 8, Fraction(3))
    assert check.residual == 0


def test_invariance_bound_example():
    q = counting_qm(p("ab"))
    d = Fraction(3)
    check = conjugacy_invariance_check(q, p("ab"), p("a"), 64, d)
    assert check.bound == 2 * (abs(q(p("a"))) + d) / 64
    assert check.within_bound


def test_invariance_random_conjugators():
    q = counting_qm(p("ab"))
    pairs = random_pairs(61, 10_000, 10)
    d_hat = max(defect_estimate(q, pairs).lower_bound, Fraction(3 * 2))
    rng = random.Random(67)
    for _ in range(100):
        g, u = random_word(rng, 8), random_word(rng, 6)
        for m in (1, 4, 16, 64):
            check = conjugacy_invariance_check(q, g, u, m, d_hat)
            assert check.within_bound


# -- separation identities -----------------------------------------------------------

def test_separation_base_solution_is_aligned():
    inst = EquationInstance(p("a"), p("b"), 2, 3)
    rep = separation_report(inst, SolutionPair(p("a"), p("b")))
    assert rep.identity_a and rep.identity_b
    assert rep.aligned_consistent
    assert not rep.swapped_consistent
    assert not rep.vanishing_consistent


def test_separation_bezout_solution():
    inst = EquationInstance(p("a"), p("b"), 2, 3)
    g = inst.g
    rep = separation_report(inst, SolutionPair(g ** -1, g))
    # components are powers of g, with q_a(g^s) = s n
    assert rep.qa_x == -1 * inst.n and rep.qa_y == 1 * inst.n
    assert rep.identity_a and rep.identity_b
    assert not rep.aligned_consistent


def test_separation_swapped_pattern_records_constraints():
    # n = m = 1 admits the swapped solution (b, B a b)
    inst = EquationInstance(p("a"), p("b"), 1, 1)
    rep = separation_report(inst, SolutionPair(p("b"), p("Bab")))
    assert rep.swapped_constraints == {"t": 1, "s": 1, "n_eq_t_m": True, "m_eq_s_n": True}
    assert rep.swapped_consistent


def test_separation_identities_hold_for_all_bounded_solutions():
    from vclab.equations import brute_force_solutions

    inst = EquationInstance(p("a"), p("b"), 2, 3)
    for pair in brute_force_solutions(inst, 5):
        rep = separation_report(inst, pair)
        assert rep.identity_a and rep.identity_b


def test_separation_requires_generator_coefficients():
    inst = EquationInstance(p("ab"), p("b"), 2, 3)
    with pytest.raises(WordError):
        separation_report(inst, SolutionPair(p("ab"), p("b")))
