"""Command line front end.

    twomatrix --job job.json [--emit out.json]
    twomatrix --corpus tests/corpus

Exit codes: 0 success, 1 a verification failed, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import serialize as S
from .errors import EngineError
from .jobs import parse_job, run_corpus, run_job


def _parser():
    p = argparse.ArgumentParser(prog="twomatrix", description="Topological recursion for the two-matrix model.")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--job", type=Path, help="JSON job file")
    g.add_argument("--corpus", type=Path, help="directory of *.job.json / *.expected.json pairs")
    p.add_argument("--backend", choices=["exact", "float"], help="override the job's backend")
    p.add_argument("--precision", type=int, default=None, help="float precision in bits (default 256)")
    p.add_argument("--max-order", type=int, default=2000, help="largest series order before giving up")
    p.add_argument("--scale", type=int, default=1, help="multiply every truncation order (stability check)")
    p.add_argument("--emit", type=Path, help="write the result document here instead of stdout")
    p.add_argument("--verbose", action="store_true")
    return p


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.corpus is not None:
        if not args.corpus.is_dir():
            print(f"error: {args.corpus} is not a directory", file=sys.stderr)
            return 2
        summary = run_corpus(args.corpus, scale=args.scale, max_order=args.max_order)
        width = max((len(s["job"]) for s in summary), default=3)
        for s in summary:
            print(f"{s['job']:<{width}}  {s['status']:<14} {s['detail']}")
        bad = [s for s in summary if s["status"] in ("fail", "error")]
        print(f"{len(summary)} jobs, {len(summary) - len(bad)} ok, {len(bad)} failed")
        return 1 if bad else 0
    try:
        spec = parse_job(args.job.read_text())
        doc, ok = run_job(spec, backend=args.backend, precision=args.precision,
                          max_order=args.max_order, scale=args.scale)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except S.ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except EngineError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2
    text = S.dumps(doc)
    if args.emit:
        args.emit.write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
