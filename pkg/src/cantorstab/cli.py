"""Command-line front end.

Subcommands: ``classify``, ``conjugate``, ``verify``, ``orbit``, ``rist``,
``germs``.  Reports are emitted as canonical JSON envelopes (deterministic
bytes) or plain text.  Exit codes: 0 success, 1 verification failure,
2 parse/schema error, 3 search failure (partial certificate written),
4 budget exceeded under ``--strict``.

Input grammar
  points     ``u(v)``: digit preperiod ``u``, repeating digit period ``v``
             ("(01)" is 0101..., "1(10)" is 1 1010...).
  words      digit strings, one digit per letter ("00000").
  elements   generator words ``name['^'exp]('*'name['^'exp])*`` with integer
             exponents, e.g. ``a*b*a^-1``; localized table generators carry a
             vertex suffix (``k2@01``).  Prefix bijections are JSON rule
             pairs ``[["10","01"], ...]``, full-group tables JSON row pairs
             ``[["cylinder", power], ...]``.

The environment variable ``CANTORSTAB_BUDGET_SCALE`` (a float) multiplies
every integer budget, for quick global tuning.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import presets
from .space import Cylinder, DepthSchedule, Word, parse_point
from .elements import FullGroupTable, PrefixBijection, TreeAutomorphism, WreathTable
from .engine import (
    DEFAULT_ENUM_MAXLEN,
    DEFAULT_ID_BUDGET,
    DEFAULT_MAX_DEPTH,
    GroupFamily,
    classify_point,
    germ_classes,
)
from .conjugator import (
    BuildBudgets,
    ConjugatorBuildError,
    build_conjugator,
    conjugation_suite,
    verify_certificate,
)
from .search import (
    EmptyRist,
    SearchBudget,
    cylinder_orbit,
    rist_generators,
    rist_search,
)
from . import serialize

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_SEARCH = 3
EXIT_BUDGET = 4

DEFAULT_SEARCH_MAXLEN = 10


def budget_scale() -> float:
    raw = os.environ.get("CANTORSTAB_BUDGET_SCALE", "")
    if not raw:
        return 1.0
    try:
        scale = float(raw)
    except ValueError:
        raise SystemExit(f"CANTORSTAB_BUDGET_SCALE must be a float, got {raw!r}")
    if scale <= 0:
        raise SystemExit("CANTORSTAB_BUDGET_SCALE must be positive")
    return scale


def scaled(value: int) -> int:
    return max(1, math.ceil(value * budget_scale()))


def load_family(spec: str) -> GroupFamily:
    if spec in presets.PRESETS:
        return presets.load_preset(spec)
    with open(spec) as handle:
        obj = json.load(handle)
    return family_from_obj(obj)


def family_from_obj(obj: dict) -> GroupFamily:
    from .space import Alphabet

    kind = obj.get("type")
    alphabet = Alphabet(obj.get("alphabet", 2))
    name = obj.get("name", "custom")
    margin = int(obj.get("transporter_margin", 0))
    if kind == "wreath":
        entries = {
            gname: (tuple(data["perm"]), tuple(data["sections"]))
            for gname, data in obj["generators"].items()
        }
        table = WreathTable(alphabet, entries, tuple(obj.get("involutive", ())))
        public = obj.get("public", sorted(obj["generators"]))
        gens = tuple((n, TreeAutomorphism.generator(table, n)) for n in public)
    elif kind == "prefix":
        gens = tuple(
            (gname, PrefixBijection(rules, alphabet))
            for gname, rules in sorted(obj["generators"].items())
        )
    elif kind == "table":
        gens = tuple(
            (gname, FullGroupTable([(c, k) for c, k in rows]))
            for gname, rows in sorted(obj["generators"].items())
        )
    else:
        raise ValueError(f"unknown family type {kind!r}")
    return GroupFamily(
        name=name,
        alphabet=alphabet,
        generators=gens,
        transporter_margin=margin,
    )


def emit(args, schema: str, body, text_lines) -> None:
    if args.format == "json":
        payload = serialize.dumps_envelope(schema, body) + "\n"
    else:
        payload = "\n".join(text_lines) + "\n"
    if getattr(args, "out", None):
        serialize.atomic_write(args.out, payload)
    else:
        sys.stdout.write(payload)


def write_certificate(path: str, cert) -> None:
    serialize.atomic_write(
        path,
        serialize.dumps_envelope(serialize.SCHEMA_CERTIFICATE, serialize.certificate_to_obj(cert)) + "\n",
    )


def cmd_classify(args) -> int:
    family = load_family(args.family)
    point = parse_point(args.point, family.alphabet)
    verdict = classify_point(family, point)
    body = {"family": family.name, "point": str(point), "class": verdict.value}
    lines = [f"{point}: {verdict.value.upper()}"]
    if args.germs:
        report = germ_classes(
            family,
            point,
            max_word_len=scaled(args.maxlen),
            max_depth=scaled(args.max_depth),
            budget=scaled(args.id_budget),
        )
        body["germs"] = serialize.germs_to_obj(report)
        lines.append(
            f"germ classes (words <= {report.max_word_len}, depth <= {report.max_depth}): "
            f"lower bound {report.lower_bound}"
        )
        for cls in report.classes:
            rep = serialize._word_text(cls.representative_word)
            lines.append(f"  class {rep}: {cls.verdict}, members {len(cls.members)}")
    emit(args, serialize.SCHEMA_CLASSIFY, body, lines)
    return EXIT_OK


def cmd_conjugate(args) -> int:
    family = load_family(args.family)
    x = parse_point(args.x, family.alphabet)
    y = parse_point(args.y, family.alphabet)
    if args.depth < 1:
        raise ValueError("--depth must be >= 1")
    schedule = DepthSchedule.unit_steps(args.depth)
    budgets = BuildBudgets(
        transporter=SearchBudget(scaled(args.maxlen), scaled(args.max_states)),
        rist=SearchBudget(scaled(args.rist_maxlen), scaled(args.max_states)),
        id_budget=scaled(args.id_budget),
    )
    try:
        cert = build_conjugator(family, x, y, schedule, budgets)
    except (ConjugatorBuildError, EmptyRist) as exc:
        if isinstance(exc, ConjugatorBuildError) and args.out:
            write_certificate(args.out, exc.partial)
            sys.stderr.write(f"partial certificate written to {args.out}\n")
        sys.stderr.write(f"conjugate failed: {exc}\n")
        return EXIT_SEARCH
    if args.out:
        write_certificate(args.out, cert)
        sys.stdout.write(f"certificate written to {args.out}\n")
    else:
        emit(args, serialize.SCHEMA_CERTIFICATE, serialize.certificate_to_obj(cert),
             [f"certificate {family.name}: {x} -> {y}, stages {len(cert.stages) - 1}"])
    return EXIT_OK


def _load_certificate(path: str, family):
    with open(path) as handle:
        envelope = json.load(handle)
    if envelope.get("schema") != serialize.SCHEMA_CERTIFICATE:
        raise ValueError(f"not a certificate file: schema {envelope.get('schema')!r}")
    return serialize.certificate_from_obj(envelope["canonical"], family)


def _rist_samples(family, cert, count: int):
    """Rigid-stabiliser elements supported on cylinders disjoint from U_1."""
    u1 = cert.stages[1].u
    alphabet = family.alphabet
    samples = []
    stems = [
        w
        for w in (c.prefix for c in _cylinders(alphabet, u1.depth))
        if w.letters != u1.prefix.letters
    ]
    while stems and len(samples) < count:
        next_stems = []
        for stem in stems:
            try:
                for g in rist_generators(family, Cylinder(stem)):
                    samples.append(g)
                    if len(samples) >= count:
                        return samples
            except EmptyRist:
                pass
            next_stems.extend(
                Word(stem.letters + (a,), alphabet) for a in alphabet.letters()
            )
        stems = next_stems
    return samples


def _cylinders(alphabet, depth):
    from .space import cylinders_at_depth

    return cylinders_at_depth(alphabet, depth)


def cmd_verify(args) -> int:
    family = load_family(args.family)
    cert = _load_certificate(args.cert, family)
    report = verify_certificate(cert, id_budget=scaled(args.id_budget))
    suite = None
    if args.samples > 0:
        samples = _rist_samples(family, cert, args.samples)
        suite = conjugation_suite(cert, samples, id_budget=scaled(args.id_budget))
    body = serialize.verify_to_obj(report, suite)
    lines = [f"verify {args.cert}: {'PASS' if body['ok'] else 'FAIL'}"]
    for check in report.results:
        if check.status != "PASS":
            lines.append(f"  stage {check.stage} {check.condition}: {check.status} {check.detail}")
    if suite is not None:
        lines.append(f"  conjugation suite: {suite.counts()}")
    emit(args, serialize.SCHEMA_VERIFY, body, lines)
    return EXIT_OK if body["ok"] else EXIT_FAIL


def cmd_orbit(args) -> int:
    family = load_family(args.family)
    seed = Cylinder(Word.from_string(args.seed, family.alphabet))
    budget = None
    if args.maxlen:
        budget = SearchBudget(scaled(args.maxlen), scaled(args.max_states))
    cert = cylinder_orbit(list(family.generators), seed, args.depth, budget)
    body = serialize.orbit_to_obj(cert)
    lines = [
        f"orbit of {seed} at depth {args.depth}: {len(cert.reached)} cylinders reached"
        + (" (truncated)" if cert.truncated else "")
    ]
    emit(args, serialize.SCHEMA_ORBIT, body, lines)
    if cert.truncated and args.strict:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_rist(args) -> int:
    family = load_family(args.family)
    u = Cylinder(Word.from_string(args.cylinder, family.alphabet))
    if args.oracle:
        elements = rist_generators(
            family, u, SearchBudget(scaled(args.maxlen), scaled(args.max_states)),
            scaled(args.id_budget),
        )
        found = [(None, g) for g in elements]
    else:
        found = rist_search(
            family, u, SearchBudget(scaled(args.maxlen), scaled(args.max_states)),
            scaled(args.id_budget),
        )
    elements = [g for _, g in found]
    body = serialize.rist_to_obj(u, elements)
    lines = [f"rist({u}): {len(elements)} elements"]
    lines.extend(f"  {g!r}" for g in elements[:20])
    emit(args, serialize.SCHEMA_RIST, body, lines)
    return EXIT_OK


def cmd_germs(args) -> int:
    family = load_family(args.family)
    point = parse_point(args.point, family.alphabet)
    report = germ_classes(
        family,
        point,
        max_word_len=scaled(args.maxlen),
        max_depth=scaled(args.max_depth),
        budget=scaled(args.id_budget),
    )
    body = serialize.germs_to_obj(report)
    lines = [
        f"germ classes of {point} (words <= {report.max_word_len}): "
        f"lower bound {report.lower_bound}"
    ]
    for cls in report.classes:
        rep = serialize._word_text(cls.representative_word)
        flag = " provisional" if cls.provisional else ""
        lines.append(f"  {rep}: {cls.verdict}, members {len(cls.members)}{flag}")
    emit(args, serialize.SCHEMA_GERMS, body, lines)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantorstab",
        description="Stabiliser, germ, and conjugator computations on the space of infinite words",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--family", required=True,
                       help="preset name (grigorchuk, odometer-full, prefix-v) or JSON family file")
        p.add_argument("--format", choices=("json", "text"), default="text")
        if out:
            p.add_argument("--out", help="write the report to this path (atomic)")
        p.add_argument("--id-budget", type=int, default=DEFAULT_ID_BUDGET)
        p.add_argument("--max-states", type=int, default=50000)
        p.add_argument("--strict", action="store_true",
                       help="exit 4 when a search result is budget-truncated")

    p = sub.add_parser("classify", help="regular/singular classification of a point")
    common(p)
    p.add_argument("--point", required=True)
    p.add_argument("--germs", action="store_true", help="attach germ-class evidence")
    p.add_argument("--maxlen", type=int, default=4)
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("conjugate", help="build a conjugator certificate x -> y")
    common(p)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--maxlen", type=int, default=12, help="transporter word length")
    p.add_argument("--rist-maxlen", type=int, default=8)
    p.set_defaults(func=cmd_conjugate)

    p = sub.add_parser("verify", help="re-verify a certificate file")
    common(p)
    p.add_argument("--cert", required=True)
    p.add_argument("--samples", type=int, default=0,
                   help="also run the conjugation suite on N rigid-stabiliser samples")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("orbit", help="BFS orbit of a cylinder at a depth")
    common(p)
    p.add_argument("--seed", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--maxlen", type=int, default=0,
                   help="cap transporter word length (default: cylinder count)")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("rist", help="rigid-stabiliser elements of a cylinder")
    common(p)
    p.add_argument("--cylinder", required=True)
    p.add_argument("--maxlen", type=int, default=DEFAULT_SEARCH_MAXLEN)
    p.add_argument("--oracle", action="store_true",
                   help="use the family oracle instead of word enumeration")
    p.set_defaults(func=cmd_rist)

    p = sub.add_parser("germs", help="germ classes of a point")
    common(p)
    p.add_argument("--point", required=True)
    p.add_argument("--maxlen", type=int, default=DEFAULT_ENUM_MAXLEN)
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.set_defaults(func=cmd_germs)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
