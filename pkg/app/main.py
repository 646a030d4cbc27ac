# app/main.py
"""doublefold command line: validate, eval, nerve, classify, lift, invariance."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable

from app.core.classify import classify, has_rlp, is_trivial_fibration
from app.core.configio import DEFAULT_PATH, DIAGRAMS, OUTPUT_FORMATS, RunConfig, load_config
from app.core.corpus import FunctorSpan, span_of_functor
from app.core.dblcat import DoubleFunctor, FiniteDoubleCategory, validate_double_category, validate_double_functor
from app.core.errors import DoublefoldError, FormatError, FormulaError, UnknownBuiltin, ValidationReport
from app.core.logger import APP_LOGGER, configure_file_logging, set_console_level
from app.core.logic import (
    NOT_APPLICABLE,
    format_formula,
    generate_sentences,
    invariance_sweep,
    parse_formula,
    satisfies,
)
from app.core.nerve import builtin_diagram, check_latching_table, nerve, nerve_span, validate_relations
from app.core.presentation import ShapeInclusion, validate_inclusion, validate_presentation
from app.core.presheaf import NatTransf, Presheaf, is_l_structure, validate_nat_transf, validate_presheaf
from app.core.report import Report, Stopwatch, depth_histogram
from app.core.shapes import anodyne_maps, generating_cofibrations
from app.core.signature import validate_signature
from app.core.textio import (
    BUILTIN,
    detect_format,
    format_presheaf,
    load_any,
    load_double,
    load_functor,
    load_inclusion,
    load_presheaf,
    read_text,
    write_text,
)
from app.core.version import APP_VERSION

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
OBJECT_KIND = {"cat": "O", "twocat": "C_0", "dblcat": "O"}


# --- validate ---------------------------------------------------------------------------------


def _validate_object(fmt: str, obj: Any) -> ValidationReport:
    if fmt == "signature":
        report = validate_signature(obj)
        if report.ok:
            relations = validate_relations(obj)
            report.extend(relations)
            report.details["diagram"] = relations.details["diagram"]
        return report
    if fmt == "presheaf":
        report = validate_presheaf(obj)
        if report.ok:
            check = is_l_structure(obj)
            report.details["l_structure"] = check.ok
        return report
    if fmt == "nattransf":
        report = validate_presheaf(obj.source)
        report.extend(validate_presheaf(obj.target))
        if report.ok:
            report.extend(validate_nat_transf(obj))
        return report
    if fmt == "dblcat":
        return validate_double_category(obj)
    if fmt == "functor":
        return _validate_functor(obj)
    if fmt == "presentation":
        return validate_presentation(obj)
    if fmt == "inclusion":
        return validate_inclusion(obj)
    if fmt == "span":
        report = _validate_functor(obj.left)
        report.extend(_validate_functor(obj.right))
        return report
    raise FormatError(f"cannot validate format {fmt!r}")


def _validate_functor(F: DoubleFunctor) -> ValidationReport:
    report = validate_double_category(F.source)
    report.extend(validate_double_category(F.target))
    if report.ok:
        report.extend(validate_double_functor(F))
    report.subject = f"double functor {F.name}"
    return report


def run_validate(cfg: RunConfig, watch: Stopwatch) -> Report:
    report = Report("validate", config=cfg.echo())
    for ref in cfg.inputs:
        with watch.section("validate"):
            fmt, obj = load_any(ref)
            result = _validate_object(fmt, obj)
        entry = {"format": fmt, **result.as_dict()}
        report.verdicts[ref] = entry
        if not result.ok:
            report.ok = False
            report.witnesses.extend({"input": ref, **v.as_dict()} for v in result.violations)
    return report


# --- eval -------------------------------------------------------------------------------------


def _structure(ref: str, diagram: str) -> Presheaf:
    if ref.startswith(BUILTIN):
        return nerve(load_double(ref), builtin_diagram(diagram)).presheaf
    if detect_format(read_text(ref), ref) == "presheaf":
        return load_presheaf(ref)
    return nerve(load_double(ref), builtin_diagram(diagram)).presheaf


def run_eval(cfg: RunConfig, watch: Stopwatch) -> Report:
    if len(cfg.inputs) != 1:
        raise FormatError("eval takes exactly one structure")
    formula = cfg.extra.get("formula")
    if formula is None and cfg.extra.get("formula_file"):
        formula = read_text(cfg.extra["formula_file"]).strip()
    if not formula:
        raise FormatError("eval needs --formula or --formula-file")
    M = _structure(cfg.inputs[0], cfg.diagram)
    seq = parse_formula(formula, M.signature)
    assignment: dict[str, str] = {}
    if cfg.extra.get("interpretation"):
        fmt, obj = load_any(cfg.extra["interpretation"])
        if not isinstance(obj, NatTransf):
            raise FormatError(f"interpretation must be a natural transformation, got {fmt}")
        assignment.update(obj.components)
    for item in cfg.extra.get("assign") or []:
        var, sep, value = item.partition("=")
        if not sep:
            raise FormatError(f"--assign expects VAR=ELEMENT, got {item!r}")
        assignment[var.strip()] = value.strip()
    with watch.section("satisfies"):
        value = satisfies(M, seq.formula, assignment, seq.context)
    report = Report("eval", config=cfg.echo())
    report.verdicts = {
        "structure": M.name,
        "formula": format_formula(seq.formula),
        "context": [f"{v}:{s.kind}" for v, s in seq.context.variables],
        "satisfied": value,
    }
    return report


# --- nerve ------------------------------------------------------------------------------------


def run_nerve(cfg: RunConfig, watch: Stopwatch) -> Report:
    D = builtin_diagram(cfg.diagram)
    report = Report("nerve", config=cfg.echo())
    targets: list[FiniteDoubleCategory] = []
    for ref in cfg.inputs:
        X = load_double(ref)
        validate_double_category(X).raise_if_failed()
        targets.append(X)
        with watch.section("nerve"):
            N = nerve(X, D)
        counts = {kind: len(N.presheaf.elements(kind)) for kind in D.signature.kinds}
        l_check = is_l_structure(N.presheaf)
        report.verdicts[ref] = {"carrier_sizes": counts, "l_structure": l_check.ok}
        report.ok = report.ok and l_check.ok
        out = cfg.extra.get("out")
        if out:
            path = Path(out)
            if len(cfg.inputs) > 1:
                path = path.with_name(f"{path.stem}_{X.name}{path.suffix}")
            write_text(path, format_presheaf(N.presheaf, f"{BUILTIN}{D.signature.name}"))
            report.verdicts[ref]["written"] = str(path)
    if cfg.extra.get("latching"):
        if cfg.diagram != "dblcat":
            raise FormatError("the latching table is defined for the double-category diagram")
        with watch.section("latching"):
            latching = check_latching_table(D, targets)
        report.verdicts["latching_table"] = latching.as_dict()
        report.ok = report.ok and latching.ok
    return report


# --- classify and lift ------------------------------------------------------------------------


def run_classify(cfg: RunConfig, watch: Stopwatch) -> Report:
    report = Report("classify", config=cfg.echo())
    for ref in cfg.inputs:
        F = load_functor(ref)
        valid = _validate_functor(F)
        if not valid.ok:
            report.ok = False
            report.verdicts[ref] = {"valid": False, **valid.as_dict()}
            continue
        with watch.section("classify"):
            result = classify(F, with_lifting=bool(cfg.extra.get("with_lifting")))
        report.verdicts[ref] = result.as_dict()
        if not result.consistent:
            report.ok = False
            report.witnesses.append({"input": ref, "consistency": result.consistency})
    return report


def _against(spec: str) -> list[ShapeInclusion]:
    if spec == "I":
        return generating_cofibrations()
    if spec == "J":
        return anodyne_maps()
    return [load_inclusion(spec)]


def run_lift(cfg: RunConfig, watch: Stopwatch) -> Report:
    report = Report("lift", config=cfg.echo())
    inclusions = _against(cfg.extra.get("against") or "I")
    for ref in cfg.inputs:
        F = load_functor(ref)
        _validate_functor(F).raise_if_failed()
        results = {}
        for i in inclusions:
            with watch.section("has_rlp"):
                r = has_rlp(F, i)
            results[i.name] = r.as_dict()
            if not r.ok:
                report.ok = False
                report.witnesses.append({"input": ref, "inclusion": i.name, "problem": r.as_dict()})
        report.verdicts[ref] = results
    return report


# --- invariance -------------------------------------------------------------------------------


def _load_span_or_functor(ref: str, diagram: str) -> tuple[FunctorSpan | None, str]:
    """A span, or the one-legged span of a trivial fibration; otherwise a reason."""
    fmt, obj = load_any(ref)
    if fmt == "functor" and isinstance(obj, DoubleFunctor):
        _validate_functor(obj).raise_if_failed()
        tf = is_trivial_fibration(obj)
        if not tf.ok:
            return None, f"{obj.name} is not a trivial fibration ({tf.failing})"
        return span_of_functor(obj, diagram), ""
    if fmt == "span" and isinstance(obj, FunctorSpan):
        return obj, ""
    raise FormatError(f"invariance needs a functor or a span, got {fmt}")


def run_invariance(cfg: RunConfig, watch: Stopwatch) -> Report:
    if len(cfg.inputs) != 1:
        raise FormatError("invariance takes exactly one span or functor")
    ref = cfg.inputs[0]
    report = Report("invariance", config=cfg.echo())
    span, reason = _load_span_or_functor(ref, cfg.diagram)
    if span is None:
        APP_LOGGER.warning(f"Invariance not applicable: {reason}")
        report.ok = False
        report.verdicts = {"status": NOT_APPLICABLE, "reason": reason}
        return report
    with watch.section("nerves"):
        pspan = nerve_span(span)
    sig = pspan.apex.signature
    with watch.section("generate"):
        sentences = generate_sentences(sig, cfg.depth, cfg.count, cfg.seed, cfg.weights)
    with watch.section("sweep"):
        sweep = invariance_sweep(pspan, sentences, object_kind=OBJECT_KIND[span.diagram])
    report.ok = sweep.ok
    report.verdicts = sweep.as_dict()
    report.verdicts["depth_histogram"] = depth_histogram(sweep.depths, cfg.depth)
    report.witnesses = list(sweep.disagreements)
    if sweep.disagreements:
        report.witnesses.append({"reproduce": {"seed": cfg.seed, "depth": cfg.depth, "count": cfg.count, "input": ref}})
    return report


COMMANDS: dict[str, Callable[[RunConfig, Stopwatch], Report]] = {
    "validate": run_validate,
    "eval": run_eval,
    "nerve": run_nerve,
    "classify": run_classify,
    "lift": run_lift,
    "invariance": run_invariance,
}


# --- entry point ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Random seed for sentence generation")
    common.add_argument("--depth", type=int, default=None, help="Maximum connective/quantifier depth")
    common.add_argument("--count", type=int, default=None, help="Number of generated sentences")
    common.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS, default=None)
    common.add_argument("--diagram", choices=DIAGRAMS, default=None, help="Shape diagram for nerves")
    common.add_argument("--builtin", action="append", default=[], help="Add builtin:<name> to the inputs")
    common.add_argument("--config", default=None, help=f"Defaults file (default: {DEFAULT_PATH})")
    common.add_argument("--log-file", default=None, help="Also write a DEBUG log to this file")
    common.add_argument("--verbose", action="store_true", help="DEBUG output on the console")

    parser = argparse.ArgumentParser(prog="doublefold", description=__doc__)
    parser.add_argument("--version", action="version", version=f"doublefold {APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="Validate files or builtins of any format")
    p.add_argument("inputs", nargs="*")

    p = sub.add_parser("eval", parents=[common], help="Evaluate a formula in a structure")
    p.add_argument("inputs", nargs="*", help="Presheaf file or double category (read through its nerve)")
    p.add_argument("--formula", default=None)
    p.add_argument("--formula-file", default=None)
    p.add_argument("--interpretation", default=None, help="Natural transformation file for free variables")
    p.add_argument("--assign", action="append", default=[], help="VAR=ELEMENT, repeatable")

    p = sub.add_parser("nerve", parents=[common], help="Compute the nerve of double categories")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--out", default=None, help="Write the nerve in presheaf format")
    p.add_argument("--latching", action="store_true", help="Also check the latching table over the inputs")

    p = sub.add_parser("classify", parents=[common], help="Predicate table of double functors")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--with-lifting", action="store_true", help="Also decide the lifting properties")

    p = sub.add_parser("lift", parents=[common], help="Right lifting property against I, J or a shape map")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--against", default="I", help="I, J, builtin:<shape map> or a shape-map file")

    p = sub.add_parser("invariance", parents=[common], help="Formula invariance along a span or trivial fibration")
    p.add_argument("inputs", nargs="*")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    persisted = load_config(Path(args.config)) if args.config else None
    inputs = list(args.inputs) + [f"{BUILTIN}{b}" for b in args.builtin]
    extra = {
        k: getattr(args, k, None)
        for k in ("formula", "formula_file", "interpretation", "assign", "out", "latching", "with_lifting", "against")
    }
    return RunConfig.from_mapping(
        args.command,
        persisted,
        inputs=inputs,
        seed=args.seed,
        depth=args.depth,
        count=args.count,
        output_format=args.output_format,
        diagram=args.diagram,
        extra=extra,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        set_console_level(logging.DEBUG)
    if args.log_file:
        configure_file_logging(args.log_file)
    try:
        cfg = _config(args)
    except ValueError as exc:
        print(f"doublefold: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not cfg.inputs:
        print(f"doublefold {cfg.command}: no inputs", file=sys.stderr)
        return EXIT_USAGE
    APP_LOGGER.info(f"{cfg.command} started on {len(cfg.inputs)} input(s)")
    watch = Stopwatch()
    try:
        report = COMMANDS[cfg.command](cfg, watch)
    except (FormatError, UnknownBuiltin, FormulaError, OSError) as exc:
        APP_LOGGER.error(f"{cfg.command}: {exc}")
        print(f"doublefold {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DoublefoldError as exc:
        APP_LOGGER.error(f"{cfg.command}: {exc}")
        print(f"doublefold {cfg.command}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    report.timings = watch.as_dict()
    sys.stdout.write(report.render(cfg.output_format))
    APP_LOGGER.info(f"{cfg.command} finished: {'ok' if report.ok else 'failed'}")
    return EXIT_OK if report.ok else EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
