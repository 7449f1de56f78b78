"""Plot-ready files for one run: trace.csv, frames.csv, summary.json."""

from __future__ import annotations

import json
from pathlib import Path

from ..kernel import format_ticks
from .runner import RunSummary, RunTrace

TRACE_HEADER = "time_s,reference,output,control"
FRAMES_HEADER = "kind,t_submit_s,t_deliver_s,dropped"


def _fmt(x: float) -> str:
    return repr(float(x))


def trace_csv(trace: RunTrace) -> str:
    lines = [TRACE_HEADER]
    for t, r, y, u in zip(trace.time.tolist(), trace.reference.tolist(), trace.output.tolist(), trace.control.tolist()):
        lines.append(f"{format_ticks(t)},{_fmt(r)},{_fmt(y)},{_fmt(u)}")
    return "\n".join(lines) + "\n"


def frames_csv(trace: RunTrace) -> str:
    lines = [FRAMES_HEADER]
    for f in trace.frames:
        deliver = "" if f.t_deliver is None else format_ticks(f.t_deliver)
        lines.append(f"{f.kind},{format_ticks(f.t_submit)},{deliver},{int(f.dropped)}")
    return "\n".join(lines) + "\n"


def summary_json(summary: RunSummary) -> str:
    return json.dumps(summary.to_json_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def export(trace: RunTrace, summary: RunSummary, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    files = {
        "trace.csv": trace_csv(trace),
        "frames.csv": frames_csv(trace),
        "summary.json": summary_json(summary),
    }
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            p = out / name
            with open(p, "w", newline="\n") as fh:
                fh.write(text)
            written.append(p)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write run output to {out}: {exc.strerror}", str(out)) from exc
    return written
