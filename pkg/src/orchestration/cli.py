import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from engines.blaschke import construct_two_point
from engines.boundary import BoundaryProfile, phi_family
from engines.codec import complex_list_from_json, complex_to_pair, pair_to_complex, point_to_json
from engines.config import Settings
from engines.errors import CopcalcError, InternalConsistencyError, SchemaError
from engines.membership import case_profile, general_membership, linfrac_membership, make_context
from engines.moebius import (
    Mobius,
    classify,
    compose,
    curvature_at,
    krein_adjoint,
    parabolic,
    translation_number,
)
from engines.numerics import composition_matrix, operator_norm, tail_norm
from engines.symbols import (
    AlgebraElement,
    ParabolicCombination,
    SymbolMatrix,
    essential_norm,
    essential_spectrum,
    joint_essential_spectrum,
    parabolic_ess_norm,
    parabolic_ess_spectrum,
    psi_of_element,
    psi_of_word,
    table2_symbol,
)
from orchestration.verify import SUITES, run_suite

logger = logging.getLogger("copcalc")

EXIT_SCHEMA = 2
EXIT_PRECONDITION = 3


def _load_json(raw: str, what: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{what}: invalid JSON ({e.msg})") from e


def _complex_arg(raw: Optional[str], what: str) -> Optional[complex]:
    if raw is None:
        return None
    return pair_to_complex(_load_json(raw, what), field=what)


def _map_from_args(args: argparse.Namespace, flag: str = "map") -> Mobius:
    """A map given by coefficients (--map) or by a family constructor (--family)."""
    raw = getattr(args, flag, None)
    if raw is not None:
        return Mobius.from_json(_load_json(raw, f"--{flag}"))
    family = getattr(args, "family", None)
    if family == "phi":
        eta = _complex_arg(args.eta, "--eta")
        if eta is None or args.sprime is None:
            raise SchemaError("--family phi needs --eta and --sprime")
        return phi_family(eta, args.sprime, _complex_arg(args.d, "--d"))
    if family == "parabolic":
        gamma = _complex_arg(args.gamma, "--gamma")
        a = _complex_arg(args.a, "--a")
        if gamma is None or a is None:
            raise SchemaError("--family parabolic needs --gamma and --a")
        return parabolic(gamma, a)
    raise SchemaError(f"missing --{flag} (coefficients as {{\"a\",\"b\",\"c\",\"d\"}}) or --family")


def _symbol_from_args(args: argparse.Namespace, settings: Settings) -> SymbolMatrix:
    if args.symbol is not None:
        return SymbolMatrix.from_json(_load_json(args.symbol, "--symbol"))
    if args.element is not None:
        if args.s is None:
            raise SchemaError("--element needs --s")
        return psi_of_element(AlgebraElement.from_json(_load_json(args.element, "--element")), args.s)
    if args.word is not None:
        if args.s is None:
            raise SchemaError("--word needs --s")
        return psi_of_word(args.word, args.s)
    if args.row is not None:
        ctx = make_context(_map_from_args(args, "phi"))
        a = _complex_arg(args.a, "--a")
        if a is None:
            raise SchemaError("--row needs --a")
        return table2_symbol(args.row, a, s=ctx.s, b=ctx.b, c=ctx.c)
    raise SchemaError("give one of --symbol, --element, --word or --row")


def _emit(data: Dict[str, Any], args: argparse.Namespace) -> None:
    if args.output == "table":
        width = max((len(k) for k in data), default=0)
        for key in sorted(data):
            value = data[key]
            text = value if isinstance(value, str) else json.dumps(value, ensure_ascii=False)
            print(f"{key:<{width}}  {text}")
    else:
        print(json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True))


def cmd_classify(args: argparse.Namespace, settings: Settings) -> int:
    f = _map_from_args(args)
    data = classify(f).to_json()
    data["map"] = f.to_json()
    _emit(data, args)
    return 0


def cmd_compose(args: argparse.Namespace, settings: Settings) -> int:
    f = Mobius.from_json(_load_json(args.f, "--f"))
    g = Mobius.from_json(_load_json(args.g, "--g"))
    _emit({"map": compose(f, g).to_json()}, args)
    return 0


def cmd_adjoint(args: argparse.Namespace, settings: Settings) -> int:
    sigma = krein_adjoint(_map_from_args(args))
    _emit({"map": sigma.to_json(), "formula": sigma.describe()}, args)
    return 0


def cmd_parabolic(args: argparse.Namespace, settings: Settings) -> int:
    gamma, a = _complex_arg(args.gamma, "--gamma"), _complex_arg(args.a, "--a")
    if gamma is None or a is None:
        raise SchemaError("parabolic needs --gamma and --a")
    _emit({"map": parabolic(gamma, a).to_json()}, args)
    return 0


def cmd_translation(args: argparse.Namespace, settings: Settings) -> int:
    gamma, a = translation_number(_map_from_args(args))
    _emit({"gamma": complex_to_pair(gamma), "a": complex_to_pair(a)}, args)
    return 0


def cmd_curvature(args: argparse.Namespace, settings: Settings) -> int:
    alpha = _complex_arg(args.alpha, "--alpha")
    if alpha is None:
        raise SchemaError("curvature needs --alpha")
    _emit({"value": curvature_at(_map_from_args(args), alpha)}, args)
    return 0


def cmd_context(args: argparse.Namespace, settings: Settings) -> int:
    _emit(make_context(_map_from_args(args)).to_json(), args)
    return 0


def cmd_membership(args: argparse.Namespace, settings: Settings) -> int:
    ctx = make_context(_map_from_args(args, "phi"))
    if args.profile is not None:
        profile = BoundaryProfile.from_json(_load_json(args.profile, "--profile"))
        verdict = general_membership(ctx, profile, tol=settings.match_tol)
    elif args.case is not None:
        verdict = general_membership(ctx, case_profile(ctx, args.case), tol=settings.match_tol)
    else:
        verdict = linfrac_membership(ctx, _map_from_args(args), tol=settings.match_tol)
    _emit(verdict.to_json(), args)
    return 0


def cmd_symbol(args: argparse.Namespace, settings: Settings) -> int:
    _emit(_symbol_from_args(args, settings).to_json(), args)
    return 0


def cmd_essnorm(args: argparse.Namespace, settings: Settings) -> int:
    if args.combination is not None:
        P = ParabolicCombination.from_json(_load_json(args.combination, "--combination"))
        value = parabolic_ess_norm(P, settings.grid_n)
    else:
        value = essential_norm(_symbol_from_args(args, settings), settings.grid_n)
    _emit({"value": value}, args)
    return 0


def cmd_essspec(args: argparse.Namespace, settings: Settings) -> int:
    if args.combination is not None:
        P = ParabolicCombination.from_json(_load_json(args.combination, "--combination"))
        spectrum = parabolic_ess_spectrum(P, settings.grid_n)
    else:
        spectrum = essential_spectrum(_symbol_from_args(args, settings), settings.grid_n)
    _emit(spectrum.to_json(), args)
    return 0


def cmd_jointspec(args: argparse.Namespace, settings: Settings) -> int:
    exponents = complex_list_from_json(_load_json(args.exponents, "--exponents"), field="--exponents")
    _emit(joint_essential_spectrum(exponents, settings.grid_n).to_json(), args)
    return 0


def cmd_blaschke(args: argparse.Namespace, settings: Settings) -> int:
    zeta, eta = _complex_arg(args.zeta, "--zeta"), _complex_arg(args.eta, "--eta")
    if zeta is None or eta is None:
        raise SchemaError("blaschke needs --zeta and --eta")
    result = construct_two_point(zeta, eta, args.t1, args.t2)
    data = result.to_json()
    data["zeros"] = [point_to_json(a) for a, m in result.blaschke.zeros for _ in range(m)]
    _emit(data, args)
    return 0


def cmd_matrix(args: argparse.Namespace, settings: Settings) -> int:
    T = composition_matrix(_map_from_args(args), settings.N)
    data: Dict[str, Any] = {
        "n": T.n,
        "map": T.source,
        "operator_norm": operator_norm(T),
        "tail_norm": tail_norm(T, T.n // 2) if T.n > 1 else 0.0,
    }
    if args.export is not None:
        data["files"] = [str(p) for p in T.export(args.export, args.format)]
    _emit(data, args)
    return 0


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    results = run_suite(args.suite, settings)
    payload = {"passed": all(r.passed for r in results), "suites": [r.to_json() for r in results]}
    _emit(payload, args)
    return 0 if payload["passed"] else 1


def _add_map_args(p: argparse.ArgumentParser, flag: str = "--map") -> None:
    p.add_argument(flag, help='Map coefficients, e.g. \'{"a":[-7,0],"b":[-3,0],"c":[2,0],"d":[8,0]}\'')
    p.add_argument("--family", choices=["phi", "parabolic"], help="Build the map from a family")
    p.add_argument("--eta", help="phi family: boundary image eta as [re, im]")
    p.add_argument("--sprime", type=float, help="phi family: |phi'(1)| in (0, 1)")
    p.add_argument("--d", help="phi family: parameter d as [re, im] (omit for the affine member)")
    p.add_argument("--gamma", help="parabolic family: fixed point as [re, im]")
    p.add_argument("--a", help="translation number as [re, im]")


def _add_symbol_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--symbol", help="SymbolMatrix JSON")
    p.add_argument("--element", help='Algebra element JSON, e.g. \'{"c":0,"p":[1]}\'')
    p.add_argument("--word", help="Word in x and x*, e.g. 'x*x'")
    p.add_argument("--row", choices=["a", "b", "c", "d"], help="Membership row (needs --phi and --a)")
    p.add_argument("--phi", help="Inducing map for --row")
    p.add_argument("--a", help="Family parameter for --row as [re, im]")
    p.add_argument("--s", type=float, help="Right endpoint s of [0, s]")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, help="Matching tolerance (default 1e-10)")
    common.add_argument("--grid-n", dest="grid_n", type=int, help="Grid size for sup norms and spectra")
    common.add_argument("--N", dest="N", type=int, help="Truncation size for finite sections")
    common.add_argument("--output", choices=["json", "table"], default="json")
    common.add_argument("--seed", type=int, help="Seed for randomized verification suites")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")

    parser = argparse.ArgumentParser(prog="copcalc")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("classify", parents=[common], help="Fixed points, kind and disk behaviour of a map")
    _add_map_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("compose", parents=[common], help="Composition f∘g")
    p.add_argument("--f", required=True, help="Outer map JSON")
    p.add_argument("--g", required=True, help="Inner map JSON")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("adjoint", parents=[common], help="Krein adjoint of a map")
    _add_map_args(p)
    p.set_defaults(func=cmd_adjoint)

    p = sub.add_parser("parabolic", parents=[common], help="The parabolic map rho(gamma, a)")
    p.add_argument("--gamma", required=True)
    p.add_argument("--a", required=True)
    p.set_defaults(func=cmd_parabolic)

    p = sub.add_parser("translation", parents=[common], help="Fixed point and translation number of a parabolic map")
    _add_map_args(p)
    p.set_defaults(func=cmd_translation)

    p = sub.add_parser("curvature", parents=[common], help="Curvature of the image of the circle at f(alpha)")
    _add_map_args(p)
    p.add_argument("--alpha", required=True, help="Boundary point as [re, im]")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("context", parents=[common], help="Tangency data zeta, eta, s, b, c of phi")
    _add_map_args(p)
    p.set_defaults(func=cmd_context)

    p = sub.add_parser("membership", parents=[common], help="Is C_psi in C*(C_phi, K)?")
    _add_map_args(p)
    p.add_argument("--phi", required=True, help="Inducing map phi JSON")
    p.add_argument("--profile", help="Boundary profile JSON of a general psi")
    p.add_argument("--case", choices=["e", "f"], help="Use the two-point self-map for case (e) or (f)")
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("symbol", parents=[common], help="Symbol matrix of an element, a word or a membership row")
    _add_symbol_args(p)
    p.set_defaults(func=cmd_symbol)

    p = sub.add_parser("essnorm", parents=[common], help="Essential norm")
    _add_symbol_args(p)
    p.add_argument("--combination", help="Parabolic combination JSON")
    p.set_defaults(func=cmd_essnorm)

    p = sub.add_parser("essspec", parents=[common], help="Sampled essential spectrum")
    _add_symbol_args(p)
    p.add_argument("--combination", help="Parabolic combination JSON")
    p.set_defaults(func=cmd_essspec)

    p = sub.add_parser("jointspec", parents=[common], help="Joint essential spectrum of parabolic operators")
    p.add_argument("--exponents", required=True, help="Translation numbers as a JSON list")
    p.set_defaults(func=cmd_jointspec)

    p = sub.add_parser("blaschke", parents=[common], help="Two-point finite Blaschke product")
    p.add_argument("--zeta", required=True)
    p.add_argument("--eta", required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--t2", type=float, required=True)
    p.set_defaults(func=cmd_blaschke)

    p = sub.add_parser("matrix", parents=[common], help="Finite section of C_psi")
    _add_map_args(p)
    p.add_argument("--export", help="Write the matrix to this path")
    p.add_argument("--format", choices=["json", "binary"], default="json")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("verify", parents=[common], help="Run an acceptance suite")
    p.add_argument("suite", choices=sorted(SUITES) + ["all"])
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse sale con 2 en errores de uso
        return int(e.code or 0)

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        settings = Settings.from_env().replace(
            match_tol=args.tolerance, grid_n=args.grid_n, N=args.N, seed=args.seed
        )
        return int(args.func(args, settings))
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except (CopcalcError, InternalConsistencyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    raise SystemExit(main())
