"""Command-line entry point: ``stabwit <command> [options]``.

Exit codes: 0 success, 1 verification failure, 2 invalid invocation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import config as cfg
from . import separability as sep
from . import states as st
from . import witness as wit
from .pauli import ObservableSum, format_pauli
from .sampling import estimate_observable
from .scheduler import graph_witness_settings, min_settings, two_colorable
from .stabilizer import GraphSpec

COMMANDS = ("build", "eval", "threshold", "settings", "sample", "verify")
FAMILIES = [f.value for f in wit.Family]


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec: wit.WitnessSpec
    p: float | None = None
    p_grid: tuple[float, float, int] | None = None
    shots: int | None = None
    seed: int | None = None
    fmt: str = "json"
    dense_cap: int | None = None
    starts: int = 50


def _parse_grid(text: str) -> tuple[float, float, int]:
    try:
        a, b, steps = text.split(":")
        grid = (float(a), float(b), int(steps))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:steps, got {text!r}") from None
    if grid[2] < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 steps")
    return grid


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabwit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--n", type=int)
        p.add_argument("--graph", help="GraphSpec JSON file")
        p.add_argument("--target", choices=("ghz", "cluster"), default="ghz",
                       help="target state of the projector family")
        p.add_argument("--p", type=float)
        p.add_argument("--p-grid", type=_parse_grid)
        p.add_argument("--shots", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--dense-cap", type=int)
        p.add_argument("--starts", type=int, default=50, help="optimizer multi-starts (verify)")
    return parser


def resolve(args: argparse.Namespace) -> RunConfig:
    family = args.family
    graph = None
    if args.graph is not None:
        if args.n is not None:
            raise UsageError("give either --graph or --n, not both")
        try:
            graph = GraphSpec.load(args.graph)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read graph file: {exc}") from None
        family = family or "graph"
        if family not in ("graph", "projector"):
            raise UsageError("--graph only applies to the graph and projector families")
        n = graph.n_qubits
        target = "graph"
    else:
        if family is None or args.n is None:
            raise UsageError("need --family and --n (or --graph)")
        if family == "graph":
            raise UsageError("the graph family needs --graph")
        n = args.n
        target = args.target
    if args.p is not None and not 0.0 <= args.p <= 1.0:
        raise UsageError("--p must lie in [0, 1]")
    if args.command == "eval" and args.p is None:
        raise UsageError("eval needs --p")
    if args.command == "sample":
        if args.seed is None or args.shots is None:
            raise UsageError("sample needs --shots and --seed")
    if args.format == "csv" and args.command not in ("build", "threshold", "settings"):
        raise UsageError(f"csv output is not available for {args.command}")
    if args.dense_cap is not None:
        if args.dense_cap < 1:
            raise UsageError("--dense-cap must be positive")
        cfg.set_limits(dense_cap=args.dense_cap)
    try:
        spec = wit.WitnessSpec(wit.Family(family), n, graph, target)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(
        args.command, spec, args.p, args.p_grid, args.shots, args.seed, args.format,
        args.dense_cap, args.starts,
    )


def _emit_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _emit_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _spec_json(spec: wit.WitnessSpec) -> dict:
    out = {"family": spec.family.value, "n_qubits": spec.n_qubits}
    if spec.graph is not None:
        out["graph"] = spec.graph.to_json()
    if spec.family is wit.Family.PROJECTOR:
        out["target"] = spec.target
    return out


def cmd_build(rc: RunConfig) -> tuple[str, int]:
    w = wit.build(rc.spec)
    if rc.fmt == "csv":
        rows = [[w.identity_coeff, "I" * rc.spec.n_qubits]]
        if isinstance(w, ObservableSum):
            rows += [[c, format_pauli(s)] for c, s in w.terms]
        return _emit_csv(["coeff", "pauli"], rows), 0
    return _emit_json({"spec": _spec_json(rc.spec), "witness": w.to_json()}), 0


def cmd_eval(rc: RunConfig) -> tuple[str, int]:
    w = wit.build(rc.spec)
    rho = st.noisy_mixture(wit.target_state(rc.spec), rc.p)
    value = wit.evaluate(w, rho)
    verdict = "detected" if value < 0 else "not detected"
    return _emit_json({"spec": _spec_json(rc.spec), "p": rc.p, "value": value, "verdict": verdict}), 0


def cmd_threshold(rc: RunConfig) -> tuple[str, int]:
    result = wit.noise_threshold(rc.spec)
    if rc.p_grid is not None:
        a, b, steps = rc.p_grid
        grid = np.linspace(a, b, steps)
        if grid.min() < 0 or grid.max() > 1:
            raise UsageError("grid must lie inside [0, 1]")
        rows = wit.scan(rc.spec, grid)
        if rc.fmt == "csv":
            return _emit_csv(["p", "value", "detected"], [[p, v, int(v < 0)] for p, v in rows]), 0
        data = result.to_json()
        data["scan"] = [{"p": p, "value": v} for p, v in rows]
        return _emit_json({"spec": _spec_json(rc.spec), **data}), 0
    if rc.fmt == "csv":
        r = result.to_json()
        keys = ["p_threshold", "closed_form", "difference", "witness_at_zero", "witness_at_one"]
        return _emit_csv(keys, [["" if r[k] is None else r[k] for k in keys]]), 0
    return _emit_json({"spec": _spec_json(rc.spec), **result.to_json()}), 0


def _plan(spec: wit.WitnessSpec, w):
    if spec.family is wit.Family.GRAPH:
        return graph_witness_settings(spec.graph)
    if not isinstance(w, ObservableSum):
        raise UsageError("the projector witness has no Pauli expansion to schedule")
    return min_settings(w.strings)


def cmd_settings(rc: RunConfig) -> tuple[str, int]:
    w = wit.build(rc.spec)
    plan = _plan(rc.spec, w)
    if rc.fmt == "csv":
        return _emit_csv(["index", "setting"], list(enumerate(s.label for s in plan.settings))), 0
    data = plan.to_json()
    data["n_settings"] = plan.n_settings
    data["two_setting_claim"] = plan.n_settings == 2
    data["terms"] = [format_pauli(t) for t in plan.terms]
    return _emit_json({"spec": _spec_json(rc.spec), **data}), 0


def cmd_sample(rc: RunConfig) -> tuple[str, int]:
    w = wit.build(rc.spec)
    if not isinstance(w, ObservableSum):
        raise UsageError("sampling needs a Pauli-expanded witness")
    plan = _plan(rc.spec, w)
    p = rc.p or 0.0
    rho = st.noisy_mixture(wit.target_state(rc.spec), p)
    try:
        est = estimate_observable(w, plan, rho, rc.shots, rc.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = est.to_json()
    data.update(p=p, seed=rc.seed, exact=wit.evaluate(w, rho))
    return _emit_json({"spec": _spec_json(rc.spec), **data}), 0


def verification_battery(spec: wit.WitnessSpec, starts: int = 50, seed: int = 0) -> list[dict]:
    """Checks run by ``verify``; every entry has ``name``, ``passed`` and details."""
    n = spec.n_qubits
    limits = cfg.get_limits()
    checks: list[dict] = []

    def record(name, passed, **detail):
        checks.append({"name": name, "passed": bool(passed), **detail})

    gs = wit.target_generators(spec)
    psi = wit.target_state(spec)
    errs = [abs(st.pauli_expectation(g, psi) - 1) for g in gs]
    record("stabilization", max(errs) < 1e-12, max_error=max(errs))

    w = wit.build(spec)
    value = wit.evaluate(w, psi)
    record("detects_target", value < 0, value=value)

    thr = wit.noise_threshold(spec)
    if thr.closed_form is not None:
        record("threshold_closed_form", thr.difference < 1e-12, **thr.to_json())
    else:
        record("threshold", 0 < thr.p_threshold <= 1, **thr.to_json())

    if n <= limits.dense_cap:
        smax, cut = st.max_schmidt_over_bipartitions(psi)
        record("schmidt_bound", abs(smax - 1 / np.sqrt(2)) < 1e-10, max_schmidt=smax, cut=list(cut),
               c_tilde=smax**2)
        if spec.family is not wit.Family.PROJECTOR:
            rep = wit.finer_than_for(spec)
            record("finer_than_projector", rep.psd, **rep.to_json())

    if spec.family is wit.Family.CLUSTER or spec.family is wit.Family.CLUSTER_PRIME:
        rep = st.local_correction(st.ising_chain_evolution(n), gs)
        record("ising_chain_correction", rep.matches, **rep.to_json())

    if isinstance(w, ObservableSum):
        plan = _plan(spec, w)
        record("settings_valid", plan.is_valid(), n_settings=plan.n_settings, optimal=plan.optimal)
        two_claim = spec.family in (wit.Family.GHZ, wit.Family.GHZ_PRIME, wit.Family.CLUSTER,
                                    wit.Family.CLUSTER_PRIME, wit.Family.GHZ3_EXPANDED)
        if spec.family is wit.Family.GRAPH:
            two_claim = two_colorable(spec.graph) is not None
        if two_claim:
            record("two_settings", plan.n_settings == 2, n_settings=plan.n_settings)

    if n <= sep.PRODUCT_CAP:
        opt_cfg = sep.OptimizerConfig(starts=starts, seed=seed)
        pairs = _generator_pairs(spec)
        worst = max(
            abs(sep.product_state_max(sep.pair_observable(gs[a], gs[b]), n, opt_cfg).value - 1)
            for a, b in pairs
        )
        record("separability_bound", worst < 1e-8, max_deviation=worst, pairs=[list(p) for p in pairs])
        lhs = [st.pauli_expectation(gs[a], psi) + st.pauli_expectation(gs[b], psi) for a, b in pairs]
        record("separability_violated_by_target", min(lhs) > 1 + 1e-12, min_lhs=min(lhs))
        prod = sep.product_state_max(-wit.witness_to_dense(w), n, opt_cfg).value
        record("product_nonnegative", prod <= 1e-6, min_on_products=-prod)
    return checks


def _generator_pairs(spec: wit.WitnessSpec) -> list[tuple[int, int]]:
    n = spec.n_qubits
    fam = spec.family
    if fam in wit.GHZ_FAMILIES or (fam is wit.Family.PROJECTOR and spec.target == "ghz"):
        return [(0, m) for m in range(1, n)]
    if fam in wit.CLUSTER_FAMILIES or (fam is wit.Family.PROJECTOR and spec.target == "cluster"):
        return [(k, k + 1) for k in range(n - 1)]
    return spec.graph.edges


def cmd_verify(rc: RunConfig) -> tuple[str, int]:
    checks = verification_battery(rc.spec, rc.starts, rc.seed or 0)
    ok = all(c["passed"] for c in checks)
    return _emit_json({"spec": _spec_json(rc.spec), "passed": ok, "checks": checks}), 0 if ok else 1


HANDLERS = {
    "build": cmd_build,
    "eval": cmd_eval,
    "threshold": cmd_threshold,
    "settings": cmd_settings,
    "sample": cmd_sample,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    saved = cfg.get_limits()
    try:
        rc = resolve(args)
        text, code = HANDLERS[rc.command](rc)
    except UsageError as exc:
        print(f"stabwit {args.command}: {exc}", file=sys.stderr)
        return 2
    except (cfg.CapExceededError, wit.WitnessSpecError, wit.ThresholdError) as exc:
        print(f"stabwit {args.command}: {exc}", file=sys.stderr)
        return 2
    finally:
        cfg.set_limits(**vars(saved))
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
