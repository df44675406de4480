"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data/validation error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import __version__, canonical
from .errors import DataError, MissingProfileError, NewsPriorError

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="newsprior", description=__doc__.splitlines()[0])
    p.add_argument("--config", "-c", default="config.yaml", help="engine config (YAML)")
    p.add_argument("--verbose", "-v", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.add_parser("ingest", help="validate the corpus and outlet files")
    sub.add_parser("profile-all", help="build and store profiles for every outlet")
    sp = sub.add_parser("profile", help="print the stored profile of one domain")
    sp.add_argument("domain")
    sp = sub.add_parser("score-article", help="score one corpus article by id")
    sp.add_argument("article_id")
    sp = sub.add_parser("score-claim", help="fact-check a claim against the corpus")
    sp.add_argument("claim")
    sp.add_argument("--record", action="store_true", help="also store the verdict")
    sub.add_parser("train", help="fit the logistic model on labeled outlets")
    sub.add_parser("report", help="summarize the profile store")
    sp = sub.add_parser("serve", help="start the HTTP API")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    sp = sub.add_parser("make-fixtures", help="write the golden or synthetic corpus")
    sp.add_argument("outdir")
    sp.add_argument("--kind", choices=("golden", "synthetic"), default="golden")
    sp = sub.add_parser("init-config", help="print a commented example config")
    return p


def _emit(out: TextIO, obj) -> None:
    out.write(obj if isinstance(obj, str) else canonical.dumps(obj))


def run(argv: Sequence[str], out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        if args.command is None:
            raise UsageError("no command given")
        if args.command == "score-claim" and not args.claim.strip():
            raise UsageError("score-claim: claim text must be non-empty")
    except UsageError as exc:
        err.write(parser.format_usage())
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=err)
    try:
        return _dispatch(args, out)
    except MissingProfileError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_DATA
    except (DataError, NewsPriorError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_DATA


def _dispatch(args, out: TextIO) -> int:
    if args.command == "init-config":
        from .config import EXAMPLE_CONFIG
        _emit(out, EXAMPLE_CONFIG)
        return EXIT_OK
    if args.command == "make-fixtures":
        from .fixtures import write_fixtures
        paths = write_fixtures(args.outdir, args.kind)
        _emit(out, {"written": [str(p) for p in paths]})
        return EXIT_OK

    from .engine import Engine

    engine = Engine.from_file(Path(args.config),
                              need_model=False if args.command == "train" else None)
    cmd = args.command
    if cmd == "ingest":
        _emit(out, {"articles": len(engine.corpus.articles),
                    "outlets": len(engine.corpus.outlets),
                    "articles_per_outlet": {d: len(a) for d, a in engine.groups.items()}})
    elif cmd == "profile-all":
        _emit(out, engine.profile_all().to_dict())
    elif cmd == "profile":
        _emit(out, engine.get_profile(args.domain).canonical())
    elif cmd == "score-article":
        try:
            result = engine.score_article_id(args.article_id)
        except KeyError:
            raise DataError(f"unknown article id {args.article_id!r}") from None
        _emit(out, result)
    elif cmd == "score-claim":
        verdict = engine.score_claim(args.claim)
        if args.record:
            engine.store.record_verdict(verdict)
        _emit(out, verdict.canonical())
    elif cmd == "train":
        _model, summary = engine.train()
        _emit(out, summary)
    elif cmd == "report":
        _emit(out, engine.report())
    elif cmd == "serve":
        from .api import serve
        serve(engine, args.host, args.port)
    return EXIT_OK


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
