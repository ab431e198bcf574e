"""
Report Engine — CSV results, per-label summaries and verification reports.
"""

import csv
import io
import math
from collections import defaultdict
from datetime import datetime
from typing import Dict, Iterable, List, Optional, Tuple

from mcf import config
from mcf.classifiers import get_algorithm
from mcf.models import ResultRow, RunSummary

RESULT_FIELDS = [
    "algorithm", "label", "permutation_index", "seed",
    "train_updates", "train_mistakes", "test_mistakes", "test_error_rate",
]
TRACE_FIELDS = ["trial", "margin", "update_kind", "lambda", "ell"]


# ── Bench CSV ─────────────────────────────────────────────────

def average_rows(rows: Iterable[ResultRow]) -> List[ResultRow]:
    """One row per (algorithm, label): the arithmetic mean of its permutation rows."""
    groups: Dict[Tuple[str, int], List[ResultRow]] = defaultdict(list)
    for row in rows:
        if row.permutation_index != "avg":
            groups[(row.algorithm, row.label)].append(row)

    averages = []
    for (algorithm, label), group in sorted(groups.items()):
        n = len(group)
        averages.append(ResultRow(
            algorithm=algorithm,
            label=label,
            permutation_index="avg",
            seed=None,
            train_updates=sum(r.train_updates for r in group) / n,
            train_mistakes=sum(r.train_mistakes for r in group) / n,
            test_mistakes=sum(r.test_mistakes for r in group) / n,
            test_error_rate=sum(r.test_error_rate for r in group) / n,
        ))
    return averages


def format_results_csv(rows: List[ResultRow]) -> str:
    """Sorted data rows followed by their average rows, with a header."""
    data = sorted((r for r in rows if r.permutation_index != "avg"), key=ResultRow.sort_key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_FIELDS)
    for row in data + average_rows(data):
        d = row.to_dict()
        d["seed"] = "" if row.seed is None else row.seed
        writer.writerow([d[k] for k in RESULT_FIELDS])
    return buf.getvalue()


def write_results_csv(rows: List[ResultRow], out: Optional[str] = None) -> str:
    text = format_results_csv(rows)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    return text


def ordering_count(rows: Iterable[ResultRow]) -> Tuple[int, int]:
    """(labels where MCP's average test mistakes <= both PA's and Aggressive ROMMA's, labels compared)."""
    avg = {(r.algorithm, r.label): r.test_mistakes for r in average_rows(rows)}
    labels = sorted({label for (_a, label) in avg})
    compared = wins = 0
    for label in labels:
        needed = [("mcp", label), ("pa", label), ("aromma", label)]
        if not all(k in avg for k in needed):
            continue
        compared += 1
        if avg[("mcp", label)] <= avg[("pa", label)] and avg[("mcp", label)] <= avg[("aromma", label)]:
            wins += 1
    return wins, compared


def generate_text_summary(rows: List[ResultRow]) -> str:
    """Per-label table of average test mistakes, one column per algorithm."""
    averages = average_rows(rows)
    algorithms = [a for a in config.ALGORITHMS if any(r.algorithm == a for r in averages)]
    labels = sorted({r.label for r in averages})
    table = {(r.algorithm, r.label): r.test_mistakes for r in averages}
    permutations = len({r.permutation_index for r in rows if r.permutation_index != "avg"})

    lines = []
    lines.append("=" * 70)
    lines.append(f"  {config.APP_TITLE}")
    lines.append(f"  Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    lines.append(f"  Average test mistakes over {permutations} permutation(s)")
    lines.append("=" * 70)
    lines.append("  label " + "".join(f"{a:>12}" for a in algorithms))
    lines.append("─" * 70)
    for label in labels:
        cells = "".join(
            f"{table[(a, label)]:>12.2f}" if (a, label) in table else f"{'—':>12}"
            for a in algorithms
        )
        lines.append(f"  {label:>5} {cells}")
    lines.append("─" * 70)
    wins, compared = ordering_count(rows)
    if compared:
        lines.append(f"  MCP <= PA and Aggressive ROMMA on {wins} of {compared} labels")
    lines.append("=" * 70)
    return "\n".join(lines)


# ── Verification ──────────────────────────────────────────────

def generate_verification_report(report) -> str:
    """Structured text: one line per failed assertion, then a PASS/FAIL line per run."""
    lines = []
    lines.append("=" * 70)
    lines.append("  MCF Certificate Verification")
    lines.append(f"  n={report.n}  dim={report.dim}  gamma={report.gamma:.6g}  R={report.radius:.6g}"
                 f"  (R/gamma)^2={(report.radius / report.gamma) ** 2:.6g}")
    lines.append("=" * 70)

    failures = report.failures
    if failures:
        lines.append("  FAILURES")
        lines.append("─" * 70)
        for f in failures:
            lines.append(f"  ✗ {f.algorithm} trial {f.trial}: {f.check} — {f.detail}")
        lines.append("─" * 70)

    for run in report.runs:
        icon = "✓" if run.passed else "✗"
        status = "PASS" if run.passed else "FAIL"
        lines.append(
            f"  {icon} {run.algorithm:<10} {status}  trials={run.trials}  mistakes={run.mistakes}"
            f"  bound={run.mistake_bound:.2f}  recurrences={run.recurrences_checked}"
            f"  min(delta-ell)={run.trace.min_slack:.3e}"
        )
    for eq in report.equivalence:
        icon = "✓" if eq.passed else "✗"
        status = "PASS" if eq.passed else "FAIL"
        lines.append(
            f"  {icon} {'equivalence':<10} {status}  trials={eq.trials}"
            f"  max(1-cos)={eq.max_angle_deviation:.3e}  max|u|-ell rel={eq.max_norm_rel_deviation:.3e}"
        )

    lines.append("=" * 70)
    lines.append(f"  OVERALL: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines)


# ── Trace CSV ─────────────────────────────────────────────────

def _trace_value(x) -> object:
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def format_trace_csv(summary: RunSummary) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_FIELDS)
    keeps_ell = get_algorithm(summary.algorithm)["keeps_ell"]
    for o in summary.outcomes:
        writer.writerow([
            o.trial,
            _trace_value(o.margin),
            o.update_kind.value,
            _trace_value(o.lam),
            o.ell_after if keeps_ell else "",
        ])
    return buf.getvalue()


def write_trace_csv(summary: RunSummary, out: Optional[str] = None) -> str:
    text = format_trace_csv(summary)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    return text
