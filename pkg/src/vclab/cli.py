"""Command-line driver: one subcommand per experiment, JSON/CSV reports.

Exit codes: 0 success, 1 error, 2 findings (a run that succeeded but
discovered hypothesis violations: perfectness exceptions, test-word
violations, failed suite claims, failed retraction checks).

Reports are byte-deterministic for fixed flags and seed: canonical JSON
with sorted keys, no timestamps.  Timing is printed to stderr only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .words import Alphabet, Word, WordError, format_word, parse_word, reduce
from . import equations, finitegroups, hypgeom, oracles, presentations, quasimorphisms, testwords

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FINDING = 2


def _infer_rank(texts: Sequence[str], rank: Optional[int]) -> Alphabet:
    if rank is not None:
        return Alphabet(rank)
    probe = Alphabet(1000)
    used = -1
    for text in texts:
        for syl in parse_word(text, probe).syllables:
            used = max(used, syl.gen)
    return Alphabet(max(used + 1, 1))


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def _split_words(text: str) -> list[str]:
    # every segment counts; write the identity as '1' or an empty segment
    return [part.strip() for part in text.split(";")]


def _parse_matrix(text: str) -> list[list[int]]:
    rows = [row.strip() for row in text.split(";") if row.strip()]
    return [[int(x) for x in row.split()] for row in rows]


def _write_report(payload: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _json_payload(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _jobs(args) -> int:
    env = os.environ.get("VCL_JOBS")
    if env is not None:
        return max(1, int(env))
    return max(1, args.jobs)


# -- subcommand implementations ----------------------------------------------


def _cmd_solve_eq(args) -> tuple[int, str]:
    alph = _infer_rank([args.a, args.b], args.rank)
    inst = equations.EquationInstance(
        parse_word(args.a, alph), parse_word(args.b, alph), args.n, args.m
    )
    pairs = equations.brute_force_solutions(
        inst, args.bound, max_candidates=args.max_candidates, jobs=_jobs(args)
    )
    tagged = [(pair, equations.classify_solution(inst, pair)) for pair in pairs]
    findings = [t for t in tagged if t[1].tag is not equations.Tag.CONJUGATE_FAMILY]
    data = {
        "instance": {
            "a": format_word(inst.a),
            "b": format_word(inst.b),
            "n": inst.n,
            "m": inst.m,
            "g": format_word(inst.g),
        },
        "bound": args.bound,
        "solutions": [
            {
                "x": format_word(p.x),
                "y": format_word(p.y),
                "classification": c.tag.value,
                "witness": c.to_json_dict()["witness"],
            }
            for p, c in tagged
        ],
        "non_conjugate_family_count": len(findings),
    }
    return (EXIT_FINDING if findings else EXIT_OK), _json_payload(data)


def _cmd_verify_perfect(args) -> tuple[int, str]:
    alph = _infer_rank([args.a, args.b], args.rank)
    inst = equations.EquationInstance(
        parse_word(args.a, alph), parse_word(args.b, alph), args.n, args.m
    )
    report = equations.verify_perfect(
        inst,
        args.bound,
        ell=args.ell,
        threshold=args.threshold,
        max_candidates=args.max_candidates,
        jobs=_jobs(args),
    )
    code = EXIT_OK if report.perfect_at_bound else EXIT_FINDING
    return code, _json_payload(report.to_json_dict())


def _parse_exponent_rows(text: str) -> list[testwords.ExponentTuple]:
    rows = [row.strip() for row in text.split(";") if row.strip()]
    return [testwords.ExponentTuple.from_list([int(x) for x in row.split()]) for row in rows]


def _build_spec(args) -> testwords.TestWordSpec:
    tuples = _parse_exponent_rows(args.exponents)
    level = args.level if args.level is not None else len(tuples) + 2
    return testwords.TestWordSpec(level, tuple(tuples))


def _cmd_build_testword(args) -> tuple[int, str]:
    spec = _build_spec(args)
    word = spec.build()
    data = {
        "spec": spec.to_json_dict(),
        "word": str(word),
        "letter_length": len(word.word),
        "variables": sorted(word.variables_used()),
    }
    return EXIT_OK, _json_payload(data)


def _cmd_verify_testword(args) -> tuple[int, str]:
    spec = _build_spec(args)
    word = spec.build()
    target_texts = _split_words(args.targets)
    alph = _infer_rank(target_texts, args.rank)
    targets = [parse_word(t, alph) for t in target_texts]
    report = testwords.verify_testword(word, targets, args.bound, max_assignments=args.max_assignments)
    data = report.to_json_dict()
    data["spec"] = spec.to_json_dict()
    code = EXIT_FINDING if report.violations else EXIT_OK
    return code, _json_payload(data)


def _cmd_certificates(args) -> tuple[int, str]:
    rows = _parse_exponent_rows(args.exponents)
    if len(rows) != 1:
        raise WordError("certificates expect exactly one exponent tuple")
    cert = testwords.exponent_sum_certificates(rows[0], args.modulus)
    code = EXIT_OK if cert.ok else EXIT_FINDING
    return code, _json_payload(cert.to_json_dict())


def _random_pairs(alph: Alphabet, count: int, max_len: int, seed: int):
    import random as _random

    rng = _random.Random(seed)

    def rand_word():
        letters = [(rng.randrange(alph.rank), rng.choice((1, -1))) for _ in range(rng.randint(0, max_len))]
        return reduce(letters, alph)

    return [(rand_word(), rand_word()) for _ in range(count)]


def _cmd_qm_defect(args) -> tuple[int, str]:
    alph = _infer_rank([args.pattern], args.rank)
    qm = quasimorphisms.counting_qm(parse_word(args.pattern, alph))
    est = quasimorphisms.defect_estimate(qm, _random_pairs(alph, args.pairs, args.max_len, args.seed))
    data = {"qm": qm.describe(), "defect_estimate": est.to_json_dict(), "seed": args.seed}
    return EXIT_OK, _json_payload(data)


def _make_qm(args, alph: Alphabet):
    if args.pattern is not None:
        return quasimorphisms.counting_qm(parse_word(args.pattern, alph))
    return quasimorphisms.exponent_sum_qm(args.gen)


def _cmd_qm_homogenize(args) -> tuple[int, str]:
    texts = [args.word] + ([args.pattern] if args.pattern else [])
    alph = _infer_rank(texts, args.rank)
    qm = _make_qm(args, alph)
    word = parse_word(args.word, alph)
    defect = _parse_fraction(args.defect)
    table = []
    for m in (int(x) for x in args.truncations.split(",")):
        res = quasimorphisms.homogenize(qm, word, m, defect)
        table.append(res.to_json_dict())
    data = {"qm": qm.describe(), "word": format_word(word), "homogenization_table": table}
    return EXIT_OK, _json_payload(data)


def _cmd_qm_invariance(args) -> tuple[int, str]:
    texts = [args.word, args.conjugator] + ([args.pattern] if args.pattern else [])
    alph = _infer_rank(texts, args.rank)
    qm = _make_qm(args, alph)
    check = quasimorphisms.conjugacy_invariance_check(
        qm,
        parse_word(args.word, alph),
        parse_word(args.conjugator, alph),
        args.truncation,
        _parse_fraction(args.defect),
    )
    data = {"qm": qm.describe(), "invariance": check.to_json_dict()}
    code = EXIT_OK if check.within_bound else EXIT_FINDING
    return code, _json_payload(data)


def _standard_ball(args) -> hypgeom.FiniteMetricSpace:
    alph = Alphabet(args.rank if args.rank else 2)
    return hypgeom.cayley_ball(alph.generators(), args.radius)


def _cmd_cayley_delta(args) -> tuple[int, str]:
    ball = _standard_ball(args)
    report = hypgeom.delta_thin_report(ball, hypgeom.free_tree_geodesic, args.samples, seed=args.seed)
    data = report.to_json_dict()
    data["ball"] = {"radius": args.radius, "points": len(ball)}
    return EXIT_OK, _json_payload(data)


def _cmd_midpoint_check(args) -> tuple[int, str]:
    import random as _random

    ball = _standard_ball(args)
    rng = _random.Random(args.seed)
    delta = _parse_fraction(args.delta)
    failures = 0
    for _ in range(args.samples):
        a, b, c = (ball.points[rng.randrange(len(ball.points))] for _ in range(3))
        ok = hypgeom.check_midpoint_inequality(
            ball, a, b, c,
            hypgeom.free_tree_geodesic(a, c),
            hypgeom.free_tree_geodesic(b, c),
            delta,
        )
        failures += 0 if ok else 1
    data = {
        "ball": {"radius": args.radius, "points": len(ball)},
        "samples": args.samples,
        "delta": str(delta),
        "failures": failures,
    }
    return (EXIT_OK if failures == 0 else EXIT_FINDING), _json_payload(data)


def _cmd_concat_check(args) -> tuple[int, str]:
    all_texts = [w for seg in args.paths.split(";") for w in seg.split(",")]
    alph = _infer_rank(all_texts, args.rank)
    paths = []
    for seg in args.paths.split(";"):
        vertices = [parse_word(t.strip(), alph) for t in seg.split(",")]
        paths.append(hypgeom.PathSample.from_vertices(vertices))
    constants = hypgeom.QGConstants(_parse_fraction(args.kappa), _parse_fraction(args.epsilon))
    report = hypgeom.check_concatenation_quasigeodesic(
        paths, _parse_fraction(args.delta), constants, _parse_fraction(args.alpha)
    )
    return EXIT_OK, _json_payload(report.to_json_dict())


def _cmd_divergence(args) -> tuple[int, str]:
    alph = _infer_rank([args.c, args.d], args.rank)
    report = hypgeom.divergence_experiment(
        parse_word(args.c, alph), parse_word(args.d, alph), args.n_max, args.m_max
    )
    if args.format == "csv":
        return EXIT_OK, report.to_csv()
    return EXIT_OK, _json_payload(report.to_json_dict())


def _cmd_dihedral_counterexample(args) -> tuple[int, str]:
    report = finitegroups.dihedral_counterexample_suite()
    return (EXIT_OK if report.ok else EXIT_FINDING), _json_payload(report.to_json_dict())


def _cmd_snf(args) -> tuple[int, str]:
    m = _parse_matrix(args.matrix)
    snf = presentations.smith_normal_form(m)
    return EXIT_OK, _json_payload(snf.to_json_dict())


def _load_presentation(args) -> presentations.Presentation:
    if args.file:
        with open(args.file) as fh:
            return presentations.parse_presentation(fh.read())
    if args.gens is None:
        raise WordError("need --file or --gens/--relators")
    alph = Alphabet(args.gens)
    relators = tuple(parse_word(t, alph) for t in _split_words(args.relators or ""))
    return presentations.Presentation(args.gens, relators)


def _cmd_abelianize(args) -> tuple[int, str]:
    pres = _load_presentation(args)
    data = presentations.abelianization(pres).to_json_dict()
    return EXIT_OK, _json_payload(data)


def _cmd_cyclic_retract(args) -> tuple[int, str]:
    pres = _load_presentation(args)
    h = parse_word(args.element, pres.alphabet)
    result = presentations.cyclic_retract_test(pres, h)
    data = result.to_json_dict()
    if result.primitive:
        images = presentations.retraction_images_from_covector(pres, h, result.covector)
        data["retraction_images"] = [format_word(w) for w in images]
    return EXIT_OK, _json_payload(data)


def _cmd_verify_retraction(args) -> tuple[int, str]:
    pres = _load_presentation(args)
    subgroup = [parse_word(t, pres.alphabet) for t in _split_words(args.subgroup)]
    images = [parse_word(t, pres.alphabet) for t in _split_words(args.images)]
    ok = presentations.verify_retraction(pres, subgroup, images)
    data = {
        "subgroup": [format_word(w) for w in subgroup],
        "images": [format_word(w) for w in images],
        "is_retraction": ok,
    }
    return (EXIT_OK if ok else EXIT_FINDING), _json_payload(data)


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vclab",
        description="Exact free-group workbench: equations, test words, "
        "quasimorphisms, geometry validators, finite suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="report file (default: stdout)")
        p.add_argument("--rank", type=int, help="alphabet rank (default: inferred)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1, help="worker count (VCL_JOBS overrides)")

    p = sub.add_parser("solve-eq", help="bounded solving of x^n y^m = a^n b^m")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--max-candidates", type=int)
    common(p)
    p.set_defaults(func=_cmd_solve_eq)

    p = sub.add_parser("verify-perfect", help="bounded perfectness check")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--ell", type=int, default=1, help="divisor hypothesis parameter")
    p.add_argument("--threshold", type=int, default=0, help="size hypothesis parameter")
    p.add_argument("--max-candidates", type=int)
    common(p)
    p.set_defaults(func=_cmd_verify_perfect)

    p = sub.add_parser("build-testword", help="expand a test word from exponent tuples")
    p.add_argument("--level", type=int)
    p.add_argument("--exponents", required=True, help="semicolon-separated rows of 10 integers")
    common(p)
    p.set_defaults(func=_cmd_build_testword)

    p = sub.add_parser("verify-testword", help="bounded search for non-canonical solutions")
    p.add_argument("--level", type=int)
    p.add_argument("--exponents", required=True)
    p.add_argument("--targets", required=True, help="semicolon-separated target words")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--max-assignments", type=int)
    common(p)
    p.set_defaults(func=_cmd_verify_testword)

    p = sub.add_parser("certificates", help="exponent-sum certificate matrices")
    p.add_argument("--exponents", required=True)
    p.add_argument("--modulus", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_certificates)

    p = sub.add_parser("qm-defect", help="sampled defect of a counting quasimorphism")
    p.add_argument("--pattern", required=True)
    p.add_argument("--pairs", type=int, default=10000)
    p.add_argument("--max-len", type=int, default=10)
    common(p)
    p.set_defaults(func=_cmd_qm_defect)

    p = sub.add_parser("qm-homogenize", help="truncated homogenization table")
    p.add_argument("--pattern")
    p.add_argument("--gen", type=int)
    p.add_argument("--word", required=True)
    p.add_argument("--truncations", default="1,2,4,8,16,32,64")
    p.add_argument("--defect", default="0", help="defect bound (rational)")
    common(p)
    p.set_defaults(func=_cmd_qm_homogenize)

    p = sub.add_parser("qm-invariance", help="conjugacy invariance residual")
    p.add_argument("--pattern")
    p.add_argument("--gen", type=int)
    p.add_argument("--word", required=True)
    p.add_argument("--conjugator", required=True)
    p.add_argument("--truncation", type=int, default=64)
    p.add_argument("--defect", default="0")
    common(p)
    p.set_defaults(func=_cmd_qm_invariance)

    p = sub.add_parser("cayley-delta", help="thin-triangle estimate on a Cayley ball")
    p.add_argument("--radius", type=int, default=5)
    p.add_argument("--samples", type=int, default=1000)
    common(p)
    p.set_defaults(func=_cmd_cayley_delta)

    p = sub.add_parser("midpoint-check", help="midpoint inequality on random triangles")
    p.add_argument("--radius", type=int, default=5)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--delta", default="0")
    common(p)
    p.set_defaults(func=_cmd_midpoint_check)

    p = sub.add_parser("concat-check", help="quasi-geodesic concatenation hypotheses")
    p.add_argument("--paths", required=True, help="segments as 'w1,w2;w2,w3' vertex lists")
    p.add_argument("--alpha", required=True)
    p.add_argument("--delta", default="0")
    p.add_argument("--kappa", default="1")
    p.add_argument("--epsilon", default="0")
    common(p)
    p.set_defaults(func=_cmd_concat_check)

    p = sub.add_parser("divergence", help="table of |c^n d^m| lengths")
    p.add_argument("--c", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--m-max", type=int, default=20)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    common(p)
    p.set_defaults(func=_cmd_divergence)

    p = sub.add_parser(
        "dihedral-counterexample",
        help="verbal closedness without retraction: the dihedral central product suite",
    )
    common(p)
    p.set_defaults(func=_cmd_dihedral_counterexample)

    p = sub.add_parser("snf", help="Smith normal form with transforms")
    p.add_argument("--matrix", required=True, help="rows separated by ';', entries by spaces")
    common(p)
    p.set_defaults(func=_cmd_snf)

    def presentation_flags(p):
        p.add_argument("--file", help="presentation file: 'gens: <n>' then one relator per line")
        p.add_argument("--gens", type=int)
        p.add_argument("--relators", help="semicolon-separated relator words")

    p = sub.add_parser("abelianize", help="invariant factors and free rank")
    presentation_flags(p)
    common(p)
    p.set_defaults(func=_cmd_abelianize)

    p = sub.add_parser("cyclic-retract", help="primitive-image retraction criterion")
    presentation_flags(p)
    p.add_argument("--element", required=True)
    common(p)
    p.set_defaults(func=_cmd_cyclic_retract)

    p = sub.add_parser("verify-retraction", help="check relator kill and subgroup fixation")
    presentation_flags(p)
    p.add_argument("--subgroup", required=True, help="semicolon-separated subgroup words")
    p.add_argument("--images", required=True, help="semicolon-separated generator images")
    common(p)
    p.set_defaults(func=_cmd_verify_retraction)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, payload = args.func(args)
    except (WordError, equations.BudgetExceeded, finitegroups.SearchBudgetExceeded,
            hypgeom.BallCapExceeded, hypgeom.GeodesicOracleError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR
    _write_report(payload, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
