"""Command-line interface: analyze, ghz, paired, design, search, random.

State files are UTF-8 JSON ({"D", "N", "terms": [{"orbitals", "re", "im"}]});
hypergraph files are plain text with a "D N" header and one edge per line.
Exit codes: 0 success, 1 validation or parse error, 2 budget exhausted,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .dm import (
    entropy,
    ghz_state,
    max_entropy,
    normalized_entropy,
    paired_state,
    reduced_density_matrix,
    spectra_match,
)
from .ensemble import EnsembleConfig, run_ensemble
from .fock import FermionState, orbitals_from_subset, subset_from_orbitals
from .hypergraph import design_lambda_relation, is_t_design, parse_hypergraph
from .linalg import NumericalError
from .search import SearchBudget, Verdict, search_maximal_state, verify_maximal

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BUDGET = 2
EXIT_NUMERICAL = 3


class ValidationError(ValueError):
    pass


# --- state file format ---------------------------------------------------------


def state_to_dict(state: FermionState) -> dict:
    return {
        "D": state.D,
        "N": state.N,
        "terms": [
            {
                "orbitals": list(orbitals_from_subset(sd)),
                "re": float(a.real),
                "im": float(a.imag),
            }
            for sd, a in state.terms
        ],
    }


def state_from_dict(data: dict, renormalize: bool = False) -> FermionState:
    try:
        D = int(data["D"])
        N = int(data["N"])
        raw_terms = data["terms"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"state file missing field: {exc}") from exc
    pairs = []
    norm2 = 0.0
    for i, term in enumerate(raw_terms):
        try:
            orbitals = [int(v) for v in term["orbitals"]]
            amp = complex(float(term["re"]), float(term["im"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"terms[{i}]: {exc}") from exc
        if len(orbitals) != N:
            raise ValidationError(f"terms[{i}]: expected {N} orbitals")
        if orbitals != sorted(orbitals) or len(set(orbitals)) != N:
            raise ValidationError(f"terms[{i}]: orbitals must be strictly ascending")
        if orbitals and orbitals[-1] > D:
            raise ValidationError(f"terms[{i}]: orbital {orbitals[-1]} exceeds D={D}")
        pairs.append((subset_from_orbitals(orbitals), amp))
        norm2 += abs(amp) ** 2
    if not renormalize and abs(norm2 - 1.0) > 1e-9:
        raise ValidationError(
            f"state norm^2 = {norm2!r} is not 1 within 1e-9 (use --renormalize)"
        )
    try:
        # rescale only when needed so emitted files round-trip bit-for-bit
        return FermionState.build(D, N, pairs, normalize=abs(norm2 - 1.0) > 1e-12)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def read_state_file(path: str, renormalize: bool = False) -> FermionState:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON at line {exc.lineno}") from exc
    return state_from_dict(data, renormalize)


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(command: str, config: dict, body: dict) -> dict:
    return {"version": __version__, "command": command, "config": config, **body}


# --- subcommands -----------------------------------------------------------------


def cmd_analyze(args) -> int:
    state = read_state_file(args.state_file, args.renormalize)
    cuts = args.m if args.m else list(range(1, state.N))
    results = []
    for m in cuts:
        if not 1 <= m <= state.N - 1:
            raise ValidationError(f"cut size {m} outside 1..{state.N - 1}")
        dm = reduced_density_matrix(state, m)
        maximal, dev = verify_maximal(state, m, tol=1e-8)
        match, match_dev = spectra_match(state, m)
        results.append(
            {
                "M": m,
                "spectrum": [float(v) for v in dm.spectrum()],
                "entropy": entropy(dm),
                "normalized_entropy": normalized_entropy(dm),
                "max_entropy": max_entropy(state.D, state.N, m),
                "maximal": bool(maximal),
                "max_deviation": dev,
                "spectra_match": bool(match),
                "spectra_match_deviation": match_dev,
            }
        )
    config = {
        "state_file": args.state_file,
        "m": cuts,
        "renormalize": args.renormalize,
        "D": state.D,
        "N": state.N,
    }
    _emit(_report("analyze", config, {"results": results}), args.out)
    return EXIT_OK


def cmd_ghz(args) -> int:
    state = ghz_state(args.D, args.r)
    _emit(state_to_dict(state), args.out)
    return EXIT_OK


def cmd_paired(args) -> int:
    state = paired_state(args.D, args.k)
    _emit(state_to_dict(state), args.out)
    return EXIT_OK


def cmd_design(args) -> int:
    try:
        with open(args.hypergraph_file, encoding="utf-8") as fh:
            hg = parse_hypergraph(fh.read())
    except OSError as exc:
        raise ValidationError(f"cannot read {args.hypergraph_file}: {exc}") from exc
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    lam = is_t_design(hg, args.t)
    body = {
        "D": hg.D,
        "N": hg.N,
        "edges": hg.num_edges,
        "is_design": lam is not None,
        "lambda": lam,
        "is_steiner": lam == 1,
        "lambda_relation_ok": (
            design_lambda_relation(hg, args.t, lam) if lam is not None else None
        ),
    }
    config = {"hypergraph_file": args.hypergraph_file, "t": args.t}
    _emit(_report("design", config, body), args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    budget = SearchBudget()
    if args.budget_classes is not None:
        budget.max_classes = args.budget_classes
    if args.budget_seconds is not None:
        budget.max_seconds = args.budget_seconds
    outcome = search_maximal_state(
        args.D, args.N, args.M, budget=budget, max_edges=args.max_edges
    )
    body = {
        "verdict": outcome.verdict.value,
        "reason": outcome.reason,
        "classes_visited": outcome.classes_visited,
        "edges_range": list(outcome.edges_range),
        "deviation": outcome.deviation,
        "budget_exhausted": outcome.budget_exhausted,
    }
    if outcome.state is not None:
        body["state"] = state_to_dict(outcome.state)
    if outcome.hypergraph is not None:
        body["hypergraph"] = [
            list(orbs) for orbs in outcome.hypergraph.edge_orbitals()
        ]
    config = {
        "D": args.D,
        "N": args.N,
        "M": args.M,
        "max_edges": args.max_edges,
        "budget_classes": budget.max_classes,
        "budget_seconds": budget.max_seconds,
        "threads": args.threads,
    }
    _emit(_report("search", config, body), args.out)
    if args.emit_state and outcome.state is not None:
        with open(args.emit_state, "w", encoding="utf-8") as fh:
            json.dump(state_to_dict(outcome.state), fh, indent=2)
            fh.write("\n")
    return EXIT_BUDGET if outcome.verdict is Verdict.UNKNOWN else EXIT_OK


def cmd_random(args) -> int:
    seed = args.seed
    if seed is None:
        env = os.environ.get("FERMI_ENT_SEED")
        seed = int(env) if env else 0
    cfg = EnsembleConfig(
        D=args.D,
        N=args.N,
        M=args.M,
        realizations=args.realizations,
        seed=seed,
        bins=args.bins,
        kind=args.kind,
    )
    report = run_ensemble(cfg)
    payload = _report(
        "random", {**report.to_dict()["config"], "threads": args.threads}, report.to_dict()
    )
    _emit(payload, args.out)
    if args.hist:
        write_histogram_csv(report, args.hist)
    plot_path = args.plot
    if plot_path is None and args.hist and not args.no_plot:
        plot_path = os.path.splitext(args.hist)[0] + ".png"
    if plot_path and not args.no_plot:
        from .plots import render_ensemble_figure

        render_ensemble_figure(report, plot_path)
    return EXIT_OK


def write_histogram_csv(report, path: str) -> None:
    edges = report.bin_edges
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(
            "bin_left,bin_right,empirical_density,analytic_semicircle,analytic_mp\n"
        )
        for i in range(len(edges) - 1):
            fh.write(
                f"{edges[i]:.12g},{edges[i + 1]:.12g},"
                f"{report.empirical_density[i]:.12g},"
                f"{report.analytic_semicircle[i]:.12g},"
                f"{report.analytic_mp[i]:.12g}\n"
            )


# --- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermi-ent",
        description="Many-body entanglement of N-fermion states",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="spectra and entropies of a state file")
    p.add_argument("state_file")
    p.add_argument("--m", type=int, nargs="+", help="cut sizes (default: all)")
    p.add_argument("--renormalize", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("ghz", help="block GHZ state over r determinants")
    p.add_argument("D", type=int)
    p.add_argument("r", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ghz)

    p = sub.add_parser("paired", help="collective-pair state with k pairs")
    p.add_argument("D", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_paired)

    p = sub.add_parser("design", help="t-design / Steiner verification")
    p.add_argument("hypergraph_file")
    p.add_argument("t", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("search", help="existence of a maximally entangled state")
    p.add_argument("D", type=int)
    p.add_argument("N", type=int)
    p.add_argument("M", type=int)
    p.add_argument("--max-edges", type=int, default=None)
    p.add_argument("--budget-classes", type=int, default=None)
    p.add_argument("--budget-seconds", type=float, default=None)
    p.add_argument("--emit-state", default=None)
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("random", help="random-state or Wishart spectral statistics")
    p.add_argument("D", type=int)
    p.add_argument("N", type=int)
    p.add_argument("M", type=int)
    p.add_argument("--realizations", type=int, required=True)
    p.add_argument("--seed", type=int, default=None, help="falls back to FERMI_ENT_SEED")
    p.add_argument("--kind", choices=["state", "wl"], default="state")
    p.add_argument("--bins", type=int, default=60)
    p.add_argument("--out")
    p.add_argument("--hist", help="histogram CSV path")
    p.add_argument("--plot", help="figure path (default: alongside --hist)")
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.set_defaults(func=cmd_random)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
