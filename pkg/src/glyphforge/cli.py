"""Command-line frontend.

Exit codes are a stable contract for scripts: 0 success or match,
1 operational error, 2 usage error, 3 unknown pattern, 4 empty
knowledge base.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .errors import GlyphforgeError
from .grid import DEFAULT_COVERAGE, DEFAULT_DIMS, DEFAULT_INK_THRESHOLD, GridDims, digitize
from .knowledge import KnowledgeBase, validate_label
from .recognition import DEFAULT_THRESHOLD, Decision, DecisionKind, classify, format_quotient
from . import store

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3
EXIT_EMPTY_KB = 4

KB_ENV_VAR = "GLYPHFORGE_KB"

HEAT_RAMP = "-~·+#"  # most negative .. most positive


def _dims_arg(text: str) -> GridDims:
    try:
        return GridDims.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _label_arg(text: str) -> str:
    try:
        return validate_label(text)
    except GlyphforgeError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _threshold_arg(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad threshold {text!r}")
    return value


def _coverage_arg(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad coverage {text!r}")
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError("coverage must be in (0, 1]")
    return value


def _ink_threshold_arg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ink threshold {text!r}")
    if not 0 <= value <= 255:
        raise argparse.ArgumentTypeError("ink threshold must be in 0..255")
    return value


def _add_kb_option(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--kb",
        default=os.environ.get(KB_ENV_VAR),
        help=f"knowledge base file (default: ${KB_ENV_VAR})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glyphforge",
        description="Teachable character recognition on fixed binary grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("teach", help="teach glyph patterns under one label")
    _add_kb_option(p)
    p.add_argument("--grid", type=_dims_arg, default=None,
                   help="grid WxH when creating a new knowledge base (default 32x32)")
    p.add_argument("--label", required=True, type=_label_arg)
    p.add_argument("patterns", nargs="+", metavar="GLYPH")
    p.set_defaults(func=_cmd_teach)

    p = sub.add_parser("classify", help="classify a glyph or raster against the knowledge base")
    _add_kb_option(p)
    p.add_argument("input", metavar="FILE", help="glyph, PBM, or PGM file")
    p.add_argument("--threshold", type=_threshold_arg, default=DEFAULT_THRESHOLD,
                   help="match threshold on Q (default 1/2)")
    p.add_argument("--ink-threshold", type=_ink_threshold_arg, default=DEFAULT_INK_THRESHOLD,
                   help="luminance at or below which a raster pixel is ink (default 127)")
    p.add_argument("--coverage", type=_coverage_arg, default=DEFAULT_COVERAGE,
                   help="ink fraction that turns a digitized cell on (default 0.5)")
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("eval", help="classify a labeled corpus and report accuracy")
    _add_kb_option(p)
    p.add_argument("corpus", metavar="DIR", help="directory with one subdirectory per label")
    p.add_argument("--threshold", type=_threshold_arg, default=DEFAULT_THRESHOLD)
    p.add_argument("--output", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("inspect", help="print a label's weight matrix")
    _add_kb_option(p)
    p.add_argument("label")
    p.add_argument("--heat", action="store_true", help="render a character-ramp heat view")
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("digitize", help="sample a raster file into a glyph file")
    p.add_argument("input", metavar="RASTER", help="PBM or PGM file")
    p.add_argument("-o", "--output", required=True, metavar="GLYPH")
    p.add_argument("--grid", type=_dims_arg, default=DEFAULT_DIMS,
                   help="target grid WxH (default 32x32)")
    p.add_argument("--ink-threshold", type=_ink_threshold_arg, default=DEFAULT_INK_THRESHOLD)
    p.add_argument("--coverage", type=_coverage_arg, default=DEFAULT_COVERAGE)
    p.set_defaults(func=_cmd_digitize)

    p = sub.add_parser("serve", help="run the HTTP teaching service")
    _add_kb_option(p)
    p.add_argument("--grid", type=_dims_arg, default=None,
                   help="grid WxH when creating a new knowledge base (default 32x32)")
    p.add_argument("--bind", default="127.0.0.1:8642", metavar="HOST:PORT")
    p.add_argument("--static", default=None, metavar="DIR",
                   help="directory of teach pad assets to serve at /")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "kb", "skip") is None:
        parser.error(f"--kb is required (or set ${KB_ENV_VAR})")
    try:
        return args.func(args)
    except GlyphforgeError as exc:
        print(f"glyphforge: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"glyphforge: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main_entry() -> None:
    sys.exit(main())


def _load_or_new_kb(kb_path: str, grid: GridDims | None) -> tuple[KnowledgeBase, bool]:
    """Load an existing knowledge base or create a fresh one in memory.

    With an existing file, an explicit --grid must agree with it.
    """
    if Path(kb_path).exists():
        kb = store.load_kb(kb_path)
        if grid is not None and grid != kb.dims:
            raise GlyphforgeError(
                f"{kb_path} has grid {kb.dims}, but --grid {grid} was requested"
            )
        return kb, False
    return KnowledgeBase(grid or DEFAULT_DIMS), True


def _cmd_teach(args) -> int:
    kb, _created = _load_or_new_kb(args.kb, args.grid)
    patterns = []
    for path in args.patterns:
        grid = store.load_glyph(path)
        if grid.dims != kb.dims:
            raise GlyphforgeError(
                f"{path}: glyph is {grid.dims}, knowledge base is {kb.dims}"
            )
        patterns.append((path, grid))
    # All inputs validated; apply every teaching, then persist once.
    count = 0
    for path, grid in patterns:
        count = kb.teach(args.label, grid)
        print(f"taught {args.label} <- {path}")
    store.save_kb(kb, args.kb)
    print(f"label {args.label}: teach count {count} ({args.kb})")
    return EXIT_OK


def _load_input_grid(path: str, dims: GridDims, args):
    """Read a classification input: a glyph as-is, or a raster digitized
    to the knowledge base's grid."""
    data = Path(path).read_bytes()
    if data.startswith(GLYPH_PREFIX):
        return store.parse_glyph(data.decode("utf-8"), source=path)
    raster = store.parse_raster(data, source=path)
    return digitize(raster, dims, args.ink_threshold, args.coverage)


GLYPH_PREFIX = b"glyph "


def _print_decision(decision: Decision) -> None:
    if decision.scores:
        label_width = max(len(s.label) for s in decision.scores)
        label_width = max(label_width, len("label"))
        print(f"{'label':<{label_width}}  {'psi':>10}  {'mu':>10}  {'q':>6}  exact")
        for s in decision.scores:
            print(f"{s.label:<{label_width}}  {s.psi:>10}  {s.mu:>10}  "
                  f"{s.q_display:>6}  {s.q.numerator}/{s.q.denominator}")
    if decision.unscorable:
        print("unscorable (mu = 0): " + ", ".join(decision.unscorable))
    if decision.kind is DecisionKind.MATCH:
        print(f"MATCH {decision.best.label} q={decision.best.q_display}")
    elif decision.kind is DecisionKind.UNKNOWN:
        print(f"UNKNOWN (best {decision.best.label} q={decision.best.q_display})")
        print("hint: teach this pattern under a label to improve recognition, "
              "or treat it as unrecognized")
    else:
        print("EMPTY KB (no scorable labels)")


_DECISION_EXITS = {
    DecisionKind.MATCH: EXIT_OK,
    DecisionKind.UNKNOWN: EXIT_UNKNOWN,
    DecisionKind.EMPTY_KB: EXIT_EMPTY_KB,
}


def _cmd_classify(args) -> int:
    kb = store.load_kb(args.kb)
    grid = _load_input_grid(args.input, kb.dims, args)
    decision = classify(kb, grid, args.threshold)
    if args.output == "json":
        print(json.dumps(decision.to_dict(), ensure_ascii=False, indent=2))
    else:
        _print_decision(decision)
    return _DECISION_EXITS[decision.kind]


def _cmd_inspect(args) -> int:
    kb = store.load_kb(args.kb)
    matrix = kb.weights(args.label)
    print(f"label {args.label}")
    print(f"grid {matrix.dims}")
    print(f"teach count {matrix.teach_count}")
    for row in matrix.rows():
        print(" ".join(str(v) for v in row))
    if args.heat:
        print("heat:")
        for line in _heat_rows(matrix):
            print(line)
    return EXIT_OK


def _heat_rows(matrix) -> list[str]:
    n = matrix.teach_count
    levels = len(HEAT_RAMP) - 1
    out = []
    for row in matrix.rows():
        if n == 0:
            out.append(HEAT_RAMP[levels // 2] * len(row))
            continue
        chars = []
        for w in row:
            idx = (2 * (w + n) * levels + 2 * n) // (4 * n)
            chars.append(HEAT_RAMP[idx])
        out.append("".join(chars))
    return out


def _cmd_digitize(args) -> int:
    raster = store.load_raster(args.input)
    grid = digitize(raster, args.grid, args.ink_threshold, args.coverage)
    store.save_glyph(grid, args.output)
    print(f"wrote {args.output} ({grid.dims}, {sum(grid.cells)} ink cells)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval

class EvalReport:
    """Aggregated classification results over a labeled corpus."""

    def __init__(self, threshold: Fraction):
        self.threshold = threshold
        self.per_label: dict[str, dict] = {}
        self.confusion: dict[tuple[str, str], int] = {}
        self.winning_q: list[Fraction] = []

    def _stats(self, label: str) -> dict:
        return self.per_label.setdefault(
            label, {"taught": 0, "tested": 0, "correct": 0,
                    "unknown": 0, "misclassified": 0}
        )

    def record(self, true_label: str, decision: Decision) -> None:
        stats = self._stats(true_label)
        stats["tested"] += 1
        if decision.best is not None:
            self.winning_q.append(decision.best.q)
        if decision.kind is DecisionKind.MATCH:
            if decision.best.label == true_label:
                stats["correct"] += 1
            else:
                stats["misclassified"] += 1
                pair = (true_label, decision.best.label)
                self.confusion[pair] = self.confusion.get(pair, 0) + 1
        else:
            stats["unknown"] += 1

    @property
    def tested(self) -> int:
        return sum(s["tested"] for s in self.per_label.values())

    @property
    def correct(self) -> int:
        return sum(s["correct"] for s in self.per_label.values())

    @property
    def accuracy(self) -> Fraction | None:
        return Fraction(self.correct, self.tested) if self.tested else None

    def q_stats(self) -> dict | None:
        if not self.winning_q:
            return None
        ordered = sorted(self.winning_q)
        mid = len(ordered) // 2
        if len(ordered) % 2:
            median = ordered[mid]
        else:
            median = (ordered[mid - 1] + ordered[mid]) / 2
        return {"min": ordered[0], "median": median, "max": ordered[-1]}

    def to_dict(self) -> dict:
        qs = self.q_stats()
        return {
            "per_label": {
                label: dict(stats) for label, stats in sorted(self.per_label.items())
            },
            "tested": self.tested,
            "correct": self.correct,
            "accuracy": None if self.accuracy is None else {
                "num": self.accuracy.numerator,
                "den": self.accuracy.denominator,
                "display": format_quotient(self.accuracy),
            },
            "confusion": [
                {"true": t, "predicted": p, "count": c}
                for (t, p), c in sorted(self.confusion.items())
            ],
            "q_stats": None if qs is None else {
                name: {"num": q.numerator, "den": q.denominator,
                       "display": format_quotient(q)}
                for name, q in qs.items()
            },
        }

    def render_text(self) -> str:
        lines = []
        width = max([len("label")] + [len(l) for l in self.per_label])
        header = (f"{'label':<{width}}  taught  tested  correct  unknown  misclassified")
        lines.append(header)
        for label in sorted(self.per_label):
            s = self.per_label[label]
            lines.append(
                f"{label:<{width}}  {s['taught']:>6}  {s['tested']:>6}  "
                f"{s['correct']:>7}  {s['unknown']:>7}  {s['misclassified']:>13}"
            )
        acc = self.accuracy
        acc_text = "n/a" if acc is None else f"{format_quotient(acc)} ({self.correct}/{self.tested})"
        lines.append(f"tested {self.tested}, correct {self.correct}, accuracy {acc_text}")
        if self.confusion:
            pairs = ", ".join(
                f"{t}->{p} x{c}" for (t, p), c in sorted(self.confusion.items())
            )
            lines.append(f"confusion: {pairs}")
        qs = self.q_stats()
        if qs is not None:
            lines.append(
                "winning q: min {min} median {median} max {max}".format(
                    **{k: format_quotient(v) for k, v in qs.items()}
                )
            )
        return "\n".join(lines)


def build_eval_report(kb: KnowledgeBase, corpus: Path, threshold: Fraction,
                      warn=lambda msg: print(msg, file=sys.stderr)) -> EvalReport:
    """Classify every glyph under corpus/<label>/ and aggregate the outcome.

    Traversal is sorted for determinism; stray files outside label
    directories are warned about and skipped.
    """
    report = EvalReport(threshold)
    for label, count in kb.label_counts():
        report._stats(label)["taught"] = count
    if not corpus.is_dir():
        raise GlyphforgeError(f"corpus directory {corpus} does not exist")
    for entry in sorted(corpus.iterdir()):
        if not entry.is_dir():
            warn(f"warning: ignoring stray corpus entry {entry}")
            continue
        label = entry.name
        for item in sorted(entry.iterdir()):
            if item.suffix != ".glyph" or not item.is_file():
                warn(f"warning: ignoring non-glyph corpus file {item}")
                continue
            grid = store.load_glyph(item)
            report.record(label, classify(kb, grid, threshold))
    return report


def _cmd_eval(args) -> int:
    kb = store.load_kb(args.kb)
    report = build_eval_report(kb, Path(args.corpus), args.threshold)
    if args.output == "json":
        print(json.dumps(report.to_dict(), ensure_ascii=False, indent=2))
    else:
        print(report.render_text())
    return EXIT_OK


# ---------------------------------------------------------------------------
# serve

def _cmd_serve(args) -> int:
    from .service import ApiSession, run_server

    host, _, port_text = args.bind.rpartition(":")
    if not host or not port_text.isdigit():
        raise GlyphforgeError(f"bad --bind {args.bind!r}, expected HOST:PORT")
    kb, created = _load_or_new_kb(args.kb, args.grid)
    if created:
        store.save_kb(kb, args.kb)
    session = ApiSession(args.kb, kb)
    server = run_server(session, host, int(port_text), static_dir=args.static)
    bound_host, bound_port = server.server_address[:2]
    print(f"serving on http://{bound_host}:{bound_port}/ "
          f"(kb {args.kb}, grid {kb.dims})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK
