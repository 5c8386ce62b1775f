from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .catalog import CONTROLS, catalog_pair, control_pair, default_e
from .errors import ExtractionError, LocalMoufangError
from .extraction import export_tables, extract, verify_extraction_identities
from .identities import verify_identity_suite
from .jordan import (
    JordanPair,
    is_division,
    verify_basic_identities,
    verify_jordan_axioms,
    verify_local,
)
from .models import Check, VerifyConfig, VerifyReport
from .moufang import DEFAULT_GROUP_CAP, FinMoufang, little_projective_group, verify_moufang
from .projective import build_moufang_from_pair, verify_projective_space
from .ring import DEFAULT_SIZE_CAP, ring_from_text, verify_ring
from .roundtrip import verify_roundtrip_pair, verify_star_and_iso
from .serialize import moufang_to_dict, parse_moufang_file, write_moufang_file
from .util import dumps_stable, verdict

logger = logging.getLogger(__name__)

TOOL = "local-moufang"
SCHEMA_VERSION = 1

Section = Tuple[str, Callable[[], VerifyReport]]
Outcome = Tuple[List[Check], Dict[str, Any]]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="local_moufang",
        description="Verify local Jordan pairs and local Moufang sets over finite local rings",
    )
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v INFO, -vv DEBUG")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--max-size", type=int, default=DEFAULT_SIZE_CAP, help="Ring size cap (default: 3125)"
    )
    common.add_argument(
        "--workers", type=int, default=1, help="Threads for independent report sections"
    )
    common.add_argument(
        "--seedless", action="store_true", help="Mark the run derivation-only in the report input"
    )

    moufang = argparse.ArgumentParser(add_help=False)
    moufang.add_argument("--e", default=None, help="Distinguished invertible element (label)")
    moufang.add_argument(
        "--cap", type=int, default=DEFAULT_GROUP_CAP, help="Group closure cap (default: 200000)"
    )
    moufang.add_argument("--deep", action="store_true", help="Run the anchored identity suite")

    def add(name: str, help_text: str, *parents: argparse.ArgumentParser) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common, *parents])

    add("ring-info", "Ring structure and ring invariants").add_argument("ring", help="zmod:p:k or poly:p:k")

    jp = add("jp-verify", "Jordan pair axiom suite for (A,A)")
    jp.add_argument("ring")
    jp.add_argument("--control", choices=CONTROLS, default=None, help="Run a negative control")

    add("jp-radical", "Radical and invertible elements of (A,A)").add_argument("ring")

    build = add("ms-build", "Build M(V) and verify the projective space", moufang)
    build.add_argument("ring")
    build.add_argument("--out", default=None, help="Write the Moufang JSON here")

    for name, help_text in (
        ("ms-verify", "Moufang axioms and the mu identity suite"),
        ("ms-group", "Little projective group order and pair transitivity"),
        ("ms-extract", "Extract the local Jordan pair of a Moufang set"),
    ):
        cmd = add(name, help_text, moufang)
        cmd.add_argument("ring", nargs="?", default=None)
        cmd.add_argument("--input", default=None, help="Moufang JSON file instead of a ring")
        if name == "ms-verify":
            cmd.add_argument(
                "--full-conjugation", action="store_true", help="Check LM3 over the whole group"
            )
        if name == "ms-extract":
            cmd.add_argument(
                "--export-tables", action="store_true", help="Embed the extracted operation tables"
            )

    add("roundtrip", "V -> M(V) -> W and M -> M(W) round trips", moufang).add_argument("ring")
    return p


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def config_from_args(args: argparse.Namespace) -> VerifyConfig:
    return VerifyConfig(
        size_cap=int(args.max_size),
        group_cap=int(getattr(args, "cap", DEFAULT_GROUP_CAP)),
        deep=bool(getattr(args, "deep", False)),
        full_conjugation=bool(getattr(args, "full_conjugation", False)),
        workers=max(1, int(args.workers)),
    )


def run_sections(sections: Sequence[Section], workers: int) -> List[Check]:
    """Run independent report sections; results are concatenated in section order."""
    if workers > 1 and len(sections) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda s: s[1](), sections))
    else:
        reports = [fn() for _, fn in sections]
    checks: List[Check] = []
    for (prefix, _), report in zip(sections, reports):
        checks += report.prefixed(prefix)
    return checks


# Inputs.


def _pair(args: argparse.Namespace, config: VerifyConfig) -> JordanPair:
    return catalog_pair(args.ring, size_cap=config.size_cap)


def _pair_e(V: JordanPair, text: Optional[str]) -> int:
    if text is None:
        return default_e(V)
    return V.ring.parse(text)


def _moufang(args: argparse.Namespace, config: VerifyConfig) -> Tuple[FinMoufang, Optional[int]]:
    """M and the chosen e as a point index, or None for the default."""
    if args.input and args.ring:
        raise ValueError("give either a ring spec or --input, not both")
    if args.input:
        M = parse_moufang_file(args.input)
        if args.e is None:
            return M, None
        if args.e not in M.labels:
            raise ValueError(f"--e {args.e!r} is not a point label")
        return M, M.labels.index(args.e)
    if not args.ring:
        raise ValueError(f"{args.command} needs a ring spec or --input")
    V = _pair(args, config)
    return build_moufang_from_pair(V, _pair_e(V, args.e)), None


# Commands.


def cmd_ring_info(args: argparse.Namespace, config: VerifyConfig) -> Outcome:
    R = ring_from_text(args.ring, size_cap=config.size_cap)
    units = R.is_unit(R.elements())
    report = verify_ring(R)
    result = {
        "spec": str(R.spec),
        "size": R.size,
        "units": int(units.sum()),
        "radical": [R.format(int(a)) for a in R.elements()[~units]],
        "facts": report.facts,
    }
    return report.prefixed("ring"), result


def cmd_jp_verify(args: argparse.Namespace, config: VerifyConfig) -> Outcome:
    if args.control:
        R = ring_from_text(args.ring, size_cap=config.size_cap)
        V = control_pair(R, args.control)
    else:
        V = _pair(args, config)
    sections: List[Section] = [("axioms", lambda: verify_jordan_axioms(V))]
    if not args.control:
        sections += [
            ("local", lambda: verify_local(V)),
            ("basic", lambda: verify_basic_identities(V)),
        ]
    checks = run_sections(sections, config.workers)
    return checks, {"pair": V.name, "sizes": list(V.sizes), "control": args.control}


def cmd_jp_radical(args: argparse.Namespace, config: VerifyConfig) -> Outcome:
    V = _pair(args, config)
    result: Dict[str, Any] = {"division": is_division(V)}
    for s, tag in enumerate(("plus", "minus")):
        m = V.modules[s]
        result[tag] = {
            "radical": [m.label(int(a)) for a in V.radical_elements(s)],
            "invertible": int(V.invertible(s).sum()),
        }
    return verify_local(V).prefixed("local"), result


def cmd_ms_build(args: argparse.Namespace, config: VerifyConfig) -> Outcome:
    V = _pair(args, config)
    M = build_moufang_from_pair(V, _pair_e(V, args.e))
    space = M.space
    checks = verify_projective_space(space).prefixed("projective")
    result: Dict[str, Any] = {
        "e": V.modules[0].label(space.e),
        "points": M.size,
        "classes": M.n_classes,
        "units": int(len(M.units)),
    }
    if args.out:
        result["out"] = str(write_moufang_file(M, args.out))
    else:
        result["moufang"] = moufang_to_dict(M)
    return checks, result


def cmd_ms_verify(args: argparse.Namespace, config: VerifyConfig) -> Outcome:
    M, _ = _moufang(args, config)
    sections: List[Section] = [
        (
            "moufang",
            lambda: verify_moufang(
                M, full_conjugation=config.full_conjugation, cap=config.group_cap
            ),
        ),
        ("identities", lambda: verify_identity_suite(M)),
    ]
    checks = run_sections(sections, config.workers)
    return checks, {"points": M.size, "classes": M.n_classes, "units": int(len(M.units))}


def cmd_ms_group(args: argparse.Namespace, config: VerifyConfig) -> Outcome:
    M, _ = _moufang(args, config)
    G = little_projective_group(M, cap=config.group_cap)
    check = verdict("group.pair_transitive", G.pair_transitive, G.witness)
    result = {
        "order": G.order,
        "generators": G.generators,
        "pair_transitive": G.pair_transitive,
        "pair_count": G.pair_count,
    }
    return [check], result


def cmd_ms_extract(args: argparse.Namespace, config: VerifyConfig) -> Outcome:
    M, e = _moufang(args, config)
    try:
        ex = extract(M, e=e, deep=config.deep)
    except ExtractionError as exc:
        if exc.report is None:
            raise
        return exc.report.prefixed("extraction"), {"extracted": False, "reason": str(exc)}
    checks = ex.report.prefixed("extraction")
    checks += verify_extraction_identities(ex, deep=config.deep).prefixed("identities")
    result: Dict[str, Any] = {"extracted": True, "facts": ex.report.facts}
    if args.export_tables:
        result["tables"] = export_tables(ex)
    return checks, result


def cmd_roundtrip(args: argparse.Namespace, config: VerifyConfig) -> Outcome:
    V = _pair(args, config)
    e = _pair_e(V, args.e)
    sections: List[Section] = [
        ("pair", lambda: verify_roundtrip_pair(V, e, deep=config.deep)),
        ("moufang", lambda: verify_star_and_iso(build_moufang_from_pair(V, e), deep=config.deep)),
    ]
    checks = run_sections(sections, config.workers)
    return checks, {"pair": V.name, "e": V.modules[0].label(e)}


HANDLERS: Dict[str, Callable[[argparse.Namespace, VerifyConfig], Outcome]] = {
    "ring-info": cmd_ring_info,
    "jp-verify": cmd_jp_verify,
    "jp-radical": cmd_jp_radical,
    "ms-build": cmd_ms_build,
    "ms-verify": cmd_ms_verify,
    "ms-group": cmd_ms_group,
    "ms-extract": cmd_ms_extract,
    "roundtrip": cmd_roundtrip,
}


def build_report(
    command: str, input_echo: Dict[str, Any], checks: List[Check], result: Dict[str, Any], timing_s: float
) -> Dict[str, Any]:
    checks = sorted(checks, key=lambda c: c.name)
    return {
        "schema": SCHEMA_VERSION,
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "input": input_echo,
        "passed": not any(c.failed for c in checks),
        "checks": [c.to_dict() for c in checks],
        "result": result,
        "timing_s": round(timing_s, 3),
    }


def _input_echo(args: argparse.Namespace) -> Dict[str, Any]:
    echo: Dict[str, Any] = {}
    for key in ("ring", "input", "e", "control"):
        value = getattr(args, key, None)
        if value is not None:
            echo[key] = value
    if getattr(args, "seedless", False):
        echo["seedless"] = True
    return echo


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    config = config_from_args(args)

    started = time.perf_counter()
    try:
        checks, result = HANDLERS[args.command](args, config)
    except (LocalMoufangError, ValueError, OSError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - started

    report = build_report(args.command, _input_echo(args), checks, result, elapsed)
    sys.stdout.write(dumps_stable(report))
    failed = [c for c in checks if c.failed]
    if failed:
        logger.warning("%d of %d checks failed; first: %s", len(failed), len(checks), failed[0].name)
    return 0 if report["passed"] else 1
