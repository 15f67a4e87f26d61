"""Command-line harness: plan, run, analyze, sweep.

Exit codes: 0 success, 1 usage/config error (and failed analysis),
2 disconnected security graph, 3 all blocks aborted.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from . import config_io, eve_analysis, protocol, transcript_io
from .config_io import ConfigError, RunSpec
from .graph_core import (
    DisconnectedGraphError,
    SecurityGraph,
    connected_components,
    mst_kruskal,
    mst_prim,
    terminal_agents,
    validate_graph,
)
from .linear_code import code_by_name
from .rng import SeededRng

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DISCONNECTED = 2
EXIT_ALL_ABORTED = 3


def _key_hex(index: int, k: int) -> str:
    return f"{index:0{(k + 3) // 4}x}"


def _check_graph(graph: SecurityGraph, out) -> Optional[int]:
    report = validate_graph(graph)
    if not report.ok:
        for v in report.violations:
            print(f"error: {v}", file=out)
        return EXIT_CONFIG
    components = connected_components(graph)
    if len(components) > 1:
        parts = "; ".join(
            "{" + ",".join(map(str, sorted(c))) + "}" for c in components
        )
        print(f"error: security graph is disconnected: components {parts}", file=out)
        return EXIT_DISCONNECTED
    return None


def _protocol_config(spec: RunSpec) -> protocol.ProtocolConfig:
    return protocol.ProtocolConfig(
        graph=spec.graph,
        leader=spec.leader,
        code=code_by_name(spec.code_name),
        blocks=spec.blocks,
        delta=spec.delta,
        epsilon=spec.epsilon,
        seed=spec.seed,
    )


def cmd_plan(spec: RunSpec, out=None) -> int:
    out = out if out is not None else sys.stdout
    status = _check_graph(spec.graph, out)
    if status is not None:
        return status
    tree = mst_kruskal(spec.graph)
    prim = mst_prim(spec.graph, root=0)
    print(f"agents: {spec.graph.n}", file=out)
    print("minimum spanning security tree:", file=out)
    for e in tree.edges:
        print(f"  edge {e.a} {e.b} weight={e.weight}", file=out)
    print(f"total weight: {tree.total_weight}", file=out)
    terminals = ",".join(map(str, sorted(terminal_agents(tree))))
    print(f"terminal agents: {terminals}", file=out)
    agree = "yes" if prim.total_weight == tree.total_weight else "no"
    print(f"kruskal/prim weight agreement: {agree}", file=out)
    return EXIT_OK


def _summary_lines(results, spec: RunSpec) -> List[str]:
    code = code_by_name(spec.code_name)
    lines = []
    for i, res in enumerate(results):
        mismatch = ",".join(
            f"{agent}:{frac}" for agent, frac in sorted(res.mismatch.items())
        )
        if res.status == "completed":
            keys = ",".join(
                f"{agent}:{_key_hex(idx, code.k)}"
                for agent, idx in sorted(res.key_indices.items())
            )
            lines.append(
                f"block={i} status=completed keys={keys} mismatch={mismatch or '-'}"
            )
        else:
            lines.append(f"block={i} status=aborted mismatch={mismatch or '-'}")
    return lines


def cmd_run(spec: RunSpec, out_dir: Optional[Path], out=None) -> int:
    out = out if out is not None else sys.stdout
    status = _check_graph(spec.graph, out)
    if status is not None:
        return status
    config = _protocol_config(spec)
    results = protocol.run_blocks(config)
    code = config.code

    completed = [r for r in results if r.status == "completed"]
    agreed = [
        r for r in completed if len(set(r.key_indices.values())) == 1
    ]
    completion_rate = Fraction(len(completed), len(results))
    agreement_rate = (
        Fraction(len(agreed), len(completed)) if completed else Fraction(0)
    )

    transcript_lines: List[str] = []
    for i, res in enumerate(results):
        transcript_lines.append(f"# block {i}")
        transcript_lines.extend(transcript_io.transcript_lines(res.transcript))

    summary = _summary_lines(results, spec)
    bound = protocol.failure_bound(spec.delta, spec.epsilon, code.m)
    eff = protocol.random_efficiency_report(spec.graph.n, code)
    efficiency_lines = [
        f"n={eff.n} m={eff.m} k={eff.k}",
        f"pairwise_bits_consumed_per_block={eff.pairwise_bits_consumed}",
        f"key_bits_per_agent_per_block={eff.key_bits_per_agent}",
        f"eta_subroutine={eff.eta_subroutine}",
        f"eta_code={eff.eta_code}",
        f"failure_bound(delta={spec.delta},epsilon={spec.epsilon},m={code.m})={bound:.12g}",
    ]
    stats_lines = [
        f"blocks={len(results)}",
        f"completed={len(completed)}",
        f"aborted={len(results) - len(completed)}",
        f"completion_rate={completion_rate}",
        f"agreement_rate={agreement_rate}",
    ]

    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "transcript.log").write_text("\n".join(transcript_lines) + "\n")
        (out_dir / "summary.txt").write_text("\n".join(summary) + "\n")
        (out_dir / "efficiency.txt").write_text("\n".join(efficiency_lines) + "\n")
        (out_dir / "stats.txt").write_text("\n".join(stats_lines) + "\n")

    for line in summary:
        print(line, file=out)
    for line in efficiency_lines + stats_lines:
        print(line, file=out)

    if not completed:
        return EXIT_ALL_ABORTED
    return EXIT_OK


def cmd_analyze(transcript_path: Path, graph_path: Path, out=None) -> int:
    out = out if out is not None else sys.stdout
    graph = config_io.load_graph(graph_path)
    status = _check_graph(graph, out)
    if status is not None:
        return status
    tree = mst_kruskal(graph)
    blocks = transcript_io.parse_transcript(
        transcript_path.read_text().splitlines()
    )
    ok = True
    round_total = 0
    for b, transcript in enumerate(blocks):
        for rnd in eve_analysis.rounds_from_transcript(transcript):
            cs = eve_analysis.consistent_configurations(
                rnd.announcements, tree, round_index=rnd.index
            )
            entropy = eve_analysis.secret_entropy(cs, rnd.chosen_terminal, tree)
            count = len(cs.configurations)
            print(
                f"block {b} round {rnd.index}: configurations={count} "
                f"entropy={entropy:.6f}",
                file=out,
            )
            if count != 2 or entropy != 1.0:
                ok = False
            round_total += 1
    print(
        f"{'PASS' if ok else 'FAIL'}: {round_total} rounds, "
        "two-configuration property "
        f"{'holds' if ok else 'violated'}",
        file=out,
    )
    return EXIT_OK if ok else EXIT_CONFIG


def cmd_sweep(
    spec: RunSpec,
    flips: Sequence[float],
    out_dir: Optional[Path],
    out=None,
) -> int:
    out = out if out is not None else sys.stdout
    status = _check_graph(spec.graph, out)
    if status is not None:
        return status
    if len(flips) < 2:
        print("error: sweep needs at least 2 flip values", file=out)
        return EXIT_CONFIG
    code = code_by_name(spec.code_name)
    rows = ["flip_prob\tabort_rate\tagreement_rate\tmean_check_mismatch\tfailure_bound"]
    for i, flip in enumerate(flips):
        edges = [replace(e, flip_prob=flip) for e in spec.graph.edges]
        graph = SecurityGraph(spec.graph.n, edges, spec.graph.sources)
        seed = SeededRng(spec.seed).substream("sweep", i).seed
        config = protocol.ProtocolConfig(
            graph=graph,
            leader=spec.leader,
            code=code,
            blocks=spec.blocks,
            delta=spec.delta,
            epsilon=spec.epsilon,
            seed=seed,
        )
        results = protocol.run_blocks(config)
        completed = [r for r in results if r.status == "completed"]
        abort_rate = 1.0 - len(completed) / len(results)
        agreement_rate = (
            sum(1 for r in completed if len(set(r.key_indices.values())) == 1)
            / len(completed)
            if completed
            else 0.0
        )
        mismatches = [
            float(frac) for r in results for frac in r.mismatch.values()
        ]
        mean_mismatch = sum(mismatches) / len(mismatches) if mismatches else 0.0
        bound = protocol.failure_bound(spec.delta, spec.epsilon, code.m)
        rows.append(
            f"{flip:.6f}\t{abort_rate:.6f}\t{agreement_rate:.6f}"
            f"\t{mean_mismatch:.6f}\t{bound:.6g}"
        )
    table = "\n".join(rows) + "\n"
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "sweep.tsv").write_text(table)
    print(table, end="", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treekd",
        description="Spanning-tree multiparty key distribution simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=Path, default=None)

    add_common(sub.add_parser("plan", help="show the minimum spanning security tree"))
    add_common(sub.add_parser("run", help="run protocol blocks and write reports"))

    p_analyze = sub.add_parser("analyze", help="eavesdropper-view transcript analysis")
    p_analyze.add_argument("--transcript", type=Path, required=True)
    p_analyze.add_argument("--config", type=Path, required=True,
                           help="graph (or run config) file for the topology")

    p_sweep = sub.add_parser("sweep", help="abort/agreement table over flip_prob")
    add_common(p_sweep)
    p_sweep.add_argument("--flip-min", type=float, required=True)
    p_sweep.add_argument("--flip-max", type=float, required=True)
    p_sweep.add_argument("--flip-steps", type=int, required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK

    try:
        if args.command == "analyze":
            return cmd_analyze(args.transcript, args.config)

        spec = config_io.load_config(args.config)
        if args.seed is not None:
            spec = replace(spec, seed=args.seed)

        if args.command == "plan":
            return cmd_plan(spec)
        if args.command == "run":
            return cmd_run(spec, args.out)
        if args.command == "sweep":
            if args.flip_steps < 2:
                print("error: --flip-steps must be >= 2", file=sys.stderr)
                return EXIT_CONFIG
            span = args.flip_max - args.flip_min
            flips = [
                args.flip_min + span * i / (args.flip_steps - 1)
                for i in range(args.flip_steps)
            ]
            return cmd_sweep(spec, flips, args.out)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except DisconnectedGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


def entrypoint() -> None:
    sys.exit(main())
