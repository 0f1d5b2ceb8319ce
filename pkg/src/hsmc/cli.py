"""Command-line front end.

Exit codes: 0 the property holds (or the track satisfies the formula),
1 it is violated (a counterexample is printed as ``CE: <states>``),
2 usage, syntax, or fragment errors.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import warnings

from . import checker, conp, oracle, reductions
from . import descriptor as ds
from . import formula as fm
from .errors import BoundWarning, HsmcError
from .kripke import KripkeStructure, parse_kripke, serialize_kripke
from .unravel import Direction, unravel

DEFAULT_MAX_TAU = 10**6

EXIT_HOLDS = 0
EXIT_VIOLATED = 1
EXIT_ERROR = 2


def _load_model(path: str) -> KripkeStructure:
    with open(path, encoding="utf-8") as handle:
        return parse_kripke(handle.read())


def _load_formula(path: str) -> fm.Formula:
    with open(path, encoding="utf-8") as handle:
        return fm.parse_formula(handle.read())


def _max_tau(args: argparse.Namespace) -> int:
    if args.max_tau is not None:
        return args.max_tau
    env = os.environ.get("HSMC_MAX_TAU")
    return int(env) if env else DEFAULT_MAX_TAU


def _pick_engine(cls: fm.FragmentClass, requested: str) -> str:
    if requested != "auto":
        return requested
    if cls in (fm.FragmentClass.PROP, fm.FragmentClass.FORALL_AABE):
        return "conp"
    if cls in checker.REPRESENTATIVE_FRAGMENTS:
        return "representative"
    raise HsmcError(
        f"no engine handles {cls.value} formulas; rerun with --engine oracle"
    )


def _cmd_check(args: argparse.Namespace, out) -> int:
    structure = _load_model(args.model)
    raw = _load_formula(args.formula)
    normalized = fm.normalize(raw)
    cls = fm.classify(normalized)
    config = oracle.OracleConfig(depth_bound=args.depth)

    if args.track is not None:
        track = structure.track(args.track)
        mods = fm.modalities(normalized)
        engine = args.engine
        if engine == "auto":
            engine = (
                "representative"
                if mods <= fm.BASIC_MODALITIES - {fm.Modality.E}
                else "oracle"
            )
        if engine == "representative":
            holds = checker.check(structure, fm.nest_b(normalized), normalized, track)
        elif engine == "oracle":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", BoundWarning)
                holds = oracle.oracle_eval(structure, track, normalized, config)
        else:
            raise HsmcError("per-track checking needs the representative or oracle engine")
        out.write(f"result: {'holds' if holds else 'violated'}\n")
        return EXIT_HOLDS if holds else EXIT_VIOLATED

    engine = _pick_engine(cls, args.engine)
    counterexample: str | None = None
    if engine == "representative":
        verdict = checker.mod_check(
            structure, normalized, jobs=args.jobs, max_tau=_max_tau(args)
        )
        holds = verdict.holds
        if verdict.counterexample is not None:
            counterexample = structure.track_str(verdict.counterexample)
    elif engine == "conp":
        found = conp.provide_counterex(structure, normalized)
        holds = found is None
        if found is not None:
            counterexample = structure.track_str(found[1])
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundWarning)
            violating = oracle.oracle_find_counterexample(structure, normalized, config)
        holds = violating is None
        if violating is not None:
            counterexample = structure.track_str(violating)

    if args.verify_with_oracle:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundWarning)
            agreed = oracle.oracle_mod_check(structure, normalized, config) == holds
        if not agreed:
            raise HsmcError("engine verdict disagrees with the oracle")

    out.write(f"result: {'holds' if holds else 'violated'}\n")
    if counterexample is not None:
        out.write(f"CE: {counterexample}\n")
    return EXIT_HOLDS if holds else EXIT_VIOLATED


def _cmd_counterexample(args: argparse.Namespace, out) -> int:
    structure = _load_model(args.model)
    raw = fm.normalize(_load_formula(args.formula))
    found = conp.provide_counterex(structure, raw)
    if found is None:
        out.write("result: holds\n")
        return EXIT_HOLDS
    element, track = found
    out.write("result: violated\n")
    out.write(f"CE: {structure.track_str(track)}\n")
    out.write(f"formula: {fm.to_text(fm.to_exists_dual(raw))}\n")
    return EXIT_VIOLATED


def _cmd_descriptors(args: argparse.Namespace, out) -> int:
    structure = _load_model(args.model)
    track = structure.track(args.track)
    seq = ds.descriptor_sequence(track)
    spans = ds.clusters(seq)
    opens = {c.span[0]: c for c in spans}
    closes = {c.span[1] for c in spans}

    out.write(f"track: {structure.track_str(track)}\n")
    out.write("sequence:\n")
    for i, element in enumerate(seq):
        prefix = "[" if i in opens else ""
        suffix = "]" if i in closes else ""
        out.write(f"{i}: {prefix}{element.format(structure)}{suffix}\n")
    out.write("clusters:\n")
    for idx, cluster in enumerate(spans, start=1):
        members = ", ".join(
            d.format(structure)
            for d in sorted(cluster.members, key=lambda d: (d.internal, d.v_fin))
        )
        out.write(f"{idx}: {{{members}}} span {cluster.span[0]}..{cluster.span[1]}\n")
    depth = max(args.k, 1)
    out.write(f"configurations (s={depth}):\n")
    for idx, cluster in enumerate(spans, start=1):
        result = ds.scan(seq, cluster, depth)
        rendered = " ".join(
            ds.configuration_string(c) for c in result.configurations()
        )
        out.write(f"cluster {idx}: {rendered}\n")
    return EXIT_HOLDS


def _cmd_unravel(args: argparse.Namespace, out) -> int:
    structure = _load_model(args.model)
    direction = Direction.FORWARD if args.direction == "forw" else Direction.BACKWARD
    start = structure.state_index(args.state)
    count = 0
    for track in unravel(structure, start, args.k, direction):
        out.write(structure.track_str(track) + "\n")
        count += 1
        if args.limit is not None and count >= args.limit:
            break
    return EXIT_HOLDS


def _cmd_oracle(args: argparse.Namespace, out) -> int:
    structure = _load_model(args.model)
    raw = _load_formula(args.formula)
    config = oracle.OracleConfig(depth_bound=args.depth)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundWarning)
        if args.track is not None:
            holds = oracle.oracle_eval(structure, structure.track(args.track), raw, config)
            violating = None
        else:
            violating = oracle.oracle_find_counterexample(structure, raw, config)
            holds = violating is None
    out.write(f"result: {'holds' if holds else 'violated'} (depth {args.depth})\n")
    if violating is not None:
        out.write(f"CE: {structure.track_str(violating)}\n")
    return EXIT_HOLDS if holds else EXIT_VIOLATED


def _cmd_gen(args: argparse.Namespace, out) -> int:
    rng = random.Random(args.seed)
    if args.kind == "qbf":
        instance = reductions.random_qbf(rng, args.vars)
        structure, formula = reductions.qbf_to_kripke(instance)
        header = "# generated from the QBF:\n" + "".join(
            f"#   {line}\n" for line in str(instance).strip().splitlines()
        )
    else:
        instance = reductions.random_cnf(rng, args.vars, args.clauses)
        structure, formula = reductions.sat_to_kripke(instance)
        body = " ".join(" ".join(map(str, clause)) + " 0" for clause in instance.clauses)
        header = f"# generated from the CNF: p cnf {instance.num_vars} {len(instance.clauses)}\n#   {body}\n"
    model_path = args.out + ".model"
    formula_path = args.out + ".formula"
    with open(model_path, "w", encoding="utf-8") as handle:
        handle.write(serialize_kripke(structure))
    with open(formula_path, "w", encoding="utf-8") as handle:
        handle.write(header + fm.to_text(formula) + "\n")
    out.write(f"wrote {model_path}\n")
    out.write(f"wrote {formula_path}\n")
    return EXIT_HOLDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsmc",
        description="Model checking of interval temporal logic fragments "
        "over finite Kripke structures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide whether the model satisfies a formula")
    check.add_argument("--model", required=True)
    check.add_argument("--formula", required=True)
    check.add_argument(
        "--engine",
        choices=("auto", "representative", "conp", "oracle"),
        default="auto",
    )
    check.add_argument("--track", help="check against this one track instead")
    check.add_argument("--depth", type=int, default=12, help="oracle depth bound")
    check.add_argument("--jobs", type=int, default=1)
    check.add_argument("--max-tau", type=int, default=None)
    check.add_argument("--verify-with-oracle", action="store_true")
    check.set_defaults(run=_cmd_check)

    cex = sub.add_parser(
        "counterexample", help="search for a violating initial track"
    )
    cex.add_argument("--model", required=True)
    cex.add_argument("--formula", required=True)
    cex.set_defaults(run=_cmd_counterexample)

    desc = sub.add_parser(
        "descriptors", help="dump the descriptor sequence of a track"
    )
    desc.add_argument("--model", required=True)
    desc.add_argument("--track", required=True)
    desc.add_argument("--k", type=int, default=1)
    desc.set_defaults(run=_cmd_descriptors)

    unr = sub.add_parser("unravel", help="stream track representatives")
    unr.add_argument("--model", required=True)
    unr.add_argument("--state", required=True)
    unr.add_argument("--k", type=int, required=True)
    unr.add_argument("--direction", choices=("forw", "backw"), default="forw")
    unr.add_argument("--limit", type=int, default=None)
    unr.set_defaults(run=_cmd_unravel)

    orc = sub.add_parser("oracle", help="brute-force check with a depth bound")
    orc.add_argument("--model", required=True)
    orc.add_argument("--formula", required=True)
    orc.add_argument("--depth", type=int, default=12)
    orc.add_argument("--track", default=None)
    orc.set_defaults(run=_cmd_oracle)

    gen = sub.add_parser("gen", help="generate reduction instances")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    gen_qbf = gen_sub.add_parser("qbf")
    gen_qbf.add_argument("--vars", type=int, required=True)
    gen_qbf.add_argument("--seed", type=int, default=0)
    gen_qbf.add_argument("--out", required=True, help="output path prefix")
    gen_qbf.set_defaults(run=_cmd_gen, kind="qbf")
    gen_sat = gen_sub.add_parser("sat")
    gen_sat.add_argument("--vars", type=int, required=True)
    gen_sat.add_argument("--clauses", type=int, required=True)
    gen_sat.add_argument("--seed", type=int, default=0)
    gen_sat.add_argument("--out", required=True, help="output path prefix")
    gen_sat.set_defaults(run=_cmd_gen, kind="sat")

    return parser


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses its own exit codes
        return EXIT_ERROR if exc.code else EXIT_HOLDS
    try:
        return args.run(args, out)
    except (HsmcError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
