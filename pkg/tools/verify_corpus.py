"""Run the acceptance sweeps over the builtin corpus and write a JSON summary.

Each sweep prints one line; the exit code is nonzero when any sweep reports a mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from app.core.classify import (  # noqa: E402
    classify,
    companion_lifts,
    is_naive_fibrant,
    is_surjective_equivalence,
    is_trivial_fibration,
    rlp_generating_cofibrations,
)
from app.core.corpus import (  # noqa: E402
    NERVE_COUNTEREXAMPLES,
    builtin_span,
    category_functors,
    corpus_doubles,
    corpus_functors,
    double_names,
    builtin_double,
    mutations,
)
from app.core.dblcat import validate_double_category  # noqa: E402
from app.core.equipment import find_companions, find_conjoints, is_equipment  # noqa: E402
from app.core.logic import generate_sentences, invariance_sweep  # noqa: E402
from app.core.nerve import builtin_diagram, check_latching_table, nerve_map, nerve_span  # noqa: E402
from app.core.presheaf import is_fiberwise_surjective  # noqa: E402
from app.core.version import runtime_info  # noqa: E402


def sweep_trivial_fibrations() -> dict:
    functors = corpus_functors()
    mismatches = []
    for F in functors:
        tf = is_trivial_fibration(F).ok
        rlp = all(r.ok for r in rlp_generating_cofibrations(F).values())
        if tf != rlp:
            mismatches.append({"functor": F.name, "trivial_fibration": tf, "rlp_I": rlp})
    return {"functors": len(functors), "mismatches": mismatches}


def sweep_equipments() -> dict:
    doubles = corpus_doubles()
    mismatches = []
    for A in doubles:
        eq = is_equipment(A).ok
        nf = is_naive_fibrant(A)
        if eq != nf:
            mismatches.append({"double": A.name, "equipment": eq, "naive_fibrant": nf})
    return {"doubles": len(doubles), "mismatches": mismatches}


def sweep_companions() -> dict:
    checked = 0
    mismatches = []
    for A in corpus_doubles():
        for u in A.vmors:
            checked += 1
            lifts = companion_lifts(A, u)
            if sorted(map(repr, lifts)) != sorted(map(repr, find_companions(A, u))):
                mismatches.append({"double": A.name, "vmor": u, "side": "companion"})
            if len(companion_lifts(A, u, conjoint=True)) != len(find_conjoints(A, u)):
                mismatches.append({"double": A.name, "vmor": u, "side": "conjoint"})
    return {"vmors": checked, "mismatches": mismatches}


def sweep_equipment_reduction() -> dict:
    checked = 0
    violations = []
    for F in corpus_functors():
        result = classify(F)
        if not result.consistency:
            continue
        checked += 1
        if not result.consistent:
            violations.append({"functor": F.name, "consistency": result.consistency})
    return {"between_equipments": checked, "violations": violations}


def sweep_nerve_lemma() -> dict:
    failures = []
    checked = 0
    sweeps = (
        ("dblcat", corpus_functors(), is_trivial_fibration),
        ("cat", category_functors(), is_surjective_equivalence),
    )
    for diagram, functors, qualifies in sweeps:
        D = builtin_diagram(diagram)
        for F in functors:
            if F.name in NERVE_COUNTEREXAMPLES or not qualifies(F).ok:
                continue
            checked += 1
            check = is_fiberwise_surjective(nerve_map(F, D))
            if not check.ok:
                failures.append({"functor": F.name, "diagram": diagram, "kind": check.kind})
    return {"trivial_fibrations": checked, "failures": failures}


def sweep_invariance(seed: int, count: int, depth: int) -> dict:
    out = {}
    for name in ("iso_comma_chaotic2", "SqI->1"):
        span = builtin_span(name)
        pspan = nerve_span(span)
        sentences = generate_sentences(pspan.apex.signature, depth, count, seed)
        report = invariance_sweep(pspan, sentences, object_kind="O")
        out[name] = report.as_dict()
    return out


def sweep_laws(count: int, seed: int) -> dict:
    invalid = [n for n in double_names() if not validate_double_category(builtin_double(n)).ok]
    missed = [m.describe() for m in mutations(count, seed) if validate_double_category(m.mutant).ok]
    return {"invalid_builtins": invalid, "mutations": count, "missed": missed}


def main() -> int:
    parser = argparse.ArgumentParser(description="Run the corpus verification sweeps")
    parser.add_argument("--out", default="verify_corpus.json", help="Summary JSON path")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--count", type=int, default=200, help="Sentences per invariance sweep")
    parser.add_argument("--depth", type=int, default=4)
    parser.add_argument("--mutations", type=int, default=50)
    args = parser.parse_args()

    sweeps = {
        "trivial_fibrations": sweep_trivial_fibrations,
        "equipments": sweep_equipments,
        "companion_lifting": sweep_companions,
        "equipment_reduction": sweep_equipment_reduction,
        "nerve_lemma": sweep_nerve_lemma,
        "invariance": lambda: sweep_invariance(args.seed, args.count, args.depth),
        "latching_table": lambda: check_latching_table(builtin_diagram("dblcat"), corpus_doubles()).as_dict(),
        "laws": lambda: sweep_laws(args.mutations, args.seed),
    }
    summary: dict = {"runtime": runtime_info(), "sweeps": {}}
    ok = True
    for name, sweep in sweeps.items():
        t0 = time.perf_counter()
        result = sweep()
        elapsed = time.perf_counter() - t0
        passed = _passed(name, result)
        ok = ok and passed
        summary["sweeps"][name] = {"ok": passed, "seconds": round(elapsed, 3), **result}
        print(f"{name}: {'ok' if passed else 'FAILED'} ({elapsed:.1f}s)")
    summary["ok"] = ok

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, default=str)
    print(f"Wrote {out}")
    return 0 if ok else 1


def _passed(name: str, result: dict) -> bool:
    if name == "invariance":
        return all(r["status"] == "agree" and not r["disagreements"] for r in result.values())
    if name == "latching_table":
        return bool(result.get("ok"))
    if name == "laws":
        return not result["invalid_builtins"] and not result["missed"]
    return not any(result.get(k) for k in ("mismatches", "violations", "failures"))


if __name__ == "__main__":
    raise SystemExit(main())
