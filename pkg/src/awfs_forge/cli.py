"""``awfs-forge``: batch verification from the command line.

Every subcommand writes one JSON report (to stdout or ``--out``) and a
one-line summary to stderr.  Exit status is 0 when every check passed,
1 when some check failed and 2 when the input could not be read.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections.abc import Sequence

from .awfs import LMapStruct, rmap_pullback
from .constructs import check_stability, diagonal_factorization
from .errors import LawViolation, MalformedInput
from .gpd import SliceSquare, first_difference, global_map
from .instances.corpus import CorpusSpec, pullback_square
from .instances.cofibration import CofibrationAwfs
from .instances.degenerate import degenerate_instance
from .instances.groupoid import groupoid_instance
from .instances.validate import validate_instance
from .jsonio import functor_to_json, groupoid_from_json, groupoid_to_json, labelling, load_json, map_from_json
from .report import SCHEMA, Report
from .suite import run_lemmas, run_oracle, run_preams

INSTANCES = ("degenerate", "groupoid", "cofibration")
MUTATIONS = ("reverse_pi",)


def make_instance(name: str, mutate: str | None = None):
    if name == "groupoid":
        return groupoid_instance(mutate)
    if mutate is not None:
        raise MalformedInput(f"mutation {mutate!r} is only planted in the groupoid instance")
    if name == "degenerate":
        return degenerate_instance()
    if name == "cofibration":
        return CofibrationAwfs()
    raise MalformedInput(f"unknown instance {name!r}")


def _check_cap_env() -> None:
    raw = os.environ.get("AWFS_FORGE_CAP")
    if raw:
        try:
            if int(raw) < 0:
                raise ValueError
        except ValueError:
            raise MalformedInput(f"AWFS_FORGE_CAP must be a non-negative integer, got {raw!r}") from None


def _read_map(path: str, base_path: str | None = None):
    cod = None
    if base_path is not None:
        cod = groupoid_from_json(load_json(base_path))
    return map_from_json(load_json(path), cod=cod)


# -- subcommands -------------------------------------------------------------


def cmd_validate(args) -> Report:
    I = make_instance(args.instance, args.mutate)
    spec = CorpusSpec(seed=args.seed, n_slices=args.n, max_objects=args.max_objects, max_arrows=args.max_arrows)
    report = validate_instance(I, spec)
    if args.mutate:
        report.extra["mutation"] = args.mutate
    return report


def cmd_factor_diagonal(args) -> Report:
    I = make_instance(args.instance)
    f = _read_map(args.map, args.base)
    report = Report(command="factor-diagonal", instance=I.name)
    rf = report.check("diag.R-structure", "def:map-l-map-r", _require_rstructure, I, f)
    if rf is None:
        return report
    df = report.check("diag.factor", "cor:stable-diagonal", diagonal_factorization, I, rf)
    if df is None:
        return report
    report.check("diag.p-after-r", "cor:stable-diagonal", _p_after_r, df)
    report.check("diag.L-structure", "thm:stable-factorization", LMapStruct, df.r.awfs, df.r.m, df.r.s)
    report.check("diag.R-structure-on-p", "thm:stable-factorization", df.p.check)
    X, P, XX = f.dom, df.P.total, df.diagonal.dst.total
    lx, lp, lxx = labelling(X), labelling(P), labelling(XX)
    report.extra.update(
        {
            "counts": {"P_objects": len(P.objects), "P_arrows": len(P.arrows)},
            "P": groupoid_to_json(P, lp, names=True),
            "XxX": groupoid_to_json(XX, lxx, names=True),
            "r": functor_to_json(df.r.m.map, lx, lp),
            "p": functor_to_json(df.p.f.map, lp, lxx),
        }
    )
    return report


def _require_rstructure(I, f):
    rf = I.find_rstructure(global_map(f))
    if rf is None:
        raise LawViolation("no-R-structure", repr(f))
    return rf


def _p_after_r(df) -> bool:
    return first_difference(df.p.f.map @ df.r.m.map, df.diagonal.map) is None


def cmd_check_stability(args) -> Report:
    I = make_instance(args.instance)
    f = _read_map(args.map, args.base)
    data = load_json(args.reindex)
    sigma = map_from_json(data, cod=f.cod) if "cod" not in data else map_from_json(data)
    if sigma.cod != f.cod:
        raise MalformedInput("the reindexing map does not land in the codomain of the map")
    report = Report(command="check-stability", instance=I.name)
    rf = report.check("stability.R-structure", "def:map-l-map-r", _require_rstructure, I, f)
    if rf is None:
        return report
    pb = pullback_square(f, sigma)
    ssq = SliceSquare(top=global_map(pb.top), left=global_map(pb.left), right=rf.f, bottom=global_map(pb.bottom))
    rf2 = report.check("stability.R-pullback", "fact:r-closure", rmap_pullback, rf, ssq)
    if rf2 is None:
        return report
    rep = report.check("stability.run", "def:stability", check_stability, I, pb, rf, rf2)
    if rep is None:
        return report
    report.check("stability.P-square", "def:stability", lambda: rep.holds)
    report.check("stability.diagonal-square", "def:stability", lambda: rep.diagonal_square_holds)
    if I.name == "degenerate":
        report.check("stability.literal", "def:stability", lambda: rep.square == pb)
    report.extra["pullback_objects"] = len(pb.top.dom.objects)
    return report


def cmd_oracle(args) -> Report:
    return run_oracle(seed=args.seed, n=args.n)


def cmd_lemmas(args) -> Report:
    return run_lemmas(make_instance(args.instance), seed=args.seed, n=args.n)


def cmd_preams(args) -> Report:
    return run_preams(seed=args.seed, n=args.n)


# -- parsing -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="awfs-forge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(run=fn)
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        return p

    p = add("validate", cmd_validate, "check every instance law over a seeded corpus")
    p.add_argument("--instance", choices=INSTANCES, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=50, help="number of corpus items")
    p.add_argument("--max-objects", type=int, default=6)
    p.add_argument("--max-arrows", type=int, default=24)
    p.add_argument("--mutate", choices=MUTATIONS, help="plant a known bug (groupoid instance only)")

    p = add("factor-diagonal", cmd_factor_diagonal, "factor the diagonal of an R-map X -> G")
    p.add_argument("--instance", choices=INSTANCES, required=True)
    p.add_argument("--map", required=True, help="functor file with inline 'dom'")
    p.add_argument("--base", help="groupoid file for the codomain (default: inline 'cod', else ONE)")

    p = add("check-stability", cmd_check_stability, "compare diagonal factorizations along a pullback")
    p.add_argument("--instance", choices=INSTANCES, required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--base")
    p.add_argument("--reindex", required=True, help="functor file D -> G with inline 'dom'")

    p = add("oracle-compare", cmd_oracle, "canonical fillers against brute-force enumeration")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=200)

    p = add("lemmas", cmd_lemmas, "run each lemma construction on generated inputs")
    p.add_argument("--instance", choices=INSTANCES, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=100)

    p = add("preams", cmd_preams, "derive Leibniz structures from the degenerate pre-ams")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=50)
    return parser


def run_command(args) -> tuple[Report, int]:
    _check_cap_env()
    report = args.run(args)
    return report, report.exit_status


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, status = run_command(args)
    except MalformedInput as exc:
        _emit(_malformed_json(args.command, exc), args.out)
        print(f"{args.command}: malformed input: {exc}", file=sys.stderr)
        return 2
    _emit(report.to_json(), args.out)
    print(report.summary_line(), file=sys.stderr)
    for r in report.failures[:5]:
        print(f"  FAIL {r.id} [{r.anchor}] {r.as_dict().get('witness')}", file=sys.stderr)
    return status


def _malformed_json(command: str, exc: Exception) -> str:
    return json.dumps(
        {"schema": SCHEMA, "command": command, "exit_status": 2, "error": {"type": "MalformedInput", "message": str(exc)}},
        indent=2,
    )


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
