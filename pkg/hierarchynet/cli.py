"""
hierarchynet/cli.py

CLI for the hierarchynet toolkit.
"""
import argparse
import os
import sys

from hierarchynet.utils.env import KNOWN_KEYS, load_env_from_known_locations
from hierarchynet.utils.errors import ConfigError, HierarchyNetError
from hierarchynet.utils.log import setup_logging

THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 like every other configuration problem."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument('--preset', help='tl-codesum | deepcom | funcom-50 | funcom | toy | full-size')
    p.add_argument('--config', help='JSON run config (overridden by flags)')
    p.add_argument('--edges', help='comma-separated subset of ast,ns,cd,df')
    p.add_argument('--no-reverse-edges', action='store_true', help='forward edges only')
    p.add_argument('--gating', choices=['scalar', 'vector'])
    p.add_argument('--decoding', choices=['serial', 'gating_only', 'concat'])
    p.add_argument('--dims', type=int, help='model width d')
    p.add_argument('--layers', type=int, help='encoder and decoder layers')
    p.add_argument('--heads', type=int)
    p.add_argument('--seed', type=int)
    p.add_argument('--patience', type=int, help='early-stopping patience in epochs (default 20)')
    p.add_argument('--epochs', type=int)
    p.add_argument('--batch-size', type=int)
    p.add_argument('--lr', type=float, help='peak learning rate')
    p.add_argument('--dtype', choices=['float64', 'float32'])
    p.add_argument('--deterministic', action='store_true', help='single-threaded numerics')
    p.add_argument('--max-steps', type=int, help='stop after this many optimizer steps')


def _edge_flags(spec):
    from hierarchynet.modules.graph.dependences import EdgeFlags
    if spec is None:
        return None
    return EdgeFlags.from_names(spec.split(","))


def _overrides(args) -> dict:
    edges = _edge_flags(args.edges)
    return {
        "model": {
            "d": args.dims,
            "enc_layers": args.layers,
            "dec_layers": args.layers,
            "heads": args.heads,
            "gating_mode": args.gating,
            "decoding": args.decoding,
            "seed": args.seed,
            "edges": edges.to_dict() if edges is not None else None,
            "reverse_edges": False if args.no_reverse_edges else None,
        },
        "optim": {"lr": args.lr},
        "train": {
            "seed": args.seed,
            "patience": args.patience,
            "epochs": args.epochs,
            "batch_size": args.batch_size,
            "dtype": args.dtype,
            "deterministic": True if args.deterministic else None,
        },
    }


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='hierarchynet')
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    subparsers = parser.add_subparsers(dest='command', help='Available commands', parser_class=_Parser)

    extract_parser = subparsers.add_parser('extract', help='Extract HCR records from a JSONL corpus')
    extract_parser.add_argument('corpus')
    extract_parser.add_argument('out', help='output JSONL (manifest written next to it)')
    extract_parser.add_argument('--edges', help='comma-separated subset of ast,ns,cd,df')
    extract_parser.add_argument('--reverse-edges', action='store_true', help='also store reverse edges')
    extract_parser.add_argument('--max-summary-len', type=int)
    extract_parser.add_argument('--workers', type=int, default=1)

    inspect_parser = subparsers.add_parser('inspect', help='Dump one representation layer')
    inspect_parser.add_argument('method_file', help='a method source file, or a .jsonl corpus for gates')
    inspect_parser.add_argument('--layer', choices=['ast', 'subtrees', 'graph', 'gates'], default='ast')
    inspect_parser.add_argument('--format', dest='fmt', choices=['json', 'dot'])
    inspect_parser.add_argument('--run', help='run directory or name (gates)')
    inspect_parser.add_argument('--edges', help='comma-separated subset of ast,ns,cd,df')

    train_parser = subparsers.add_parser('train', help='Train a model')
    train_parser.add_argument('corpus')
    train_parser.add_argument('--run-dir')
    _add_model_flags(train_parser)

    evaluate_parser = subparsers.add_parser('evaluate', help='Score a trained run')
    evaluate_parser.add_argument('run', help='run directory or name')
    evaluate_parser.add_argument('corpus')
    evaluate_parser.add_argument('--split', default='test', choices=['train', 'valid', 'test'])
    evaluate_parser.add_argument('--checkpoint')
    evaluate_parser.add_argument('--format', dest='fmt', choices=['table', 'json'], default='table')

    ablate_parser = subparsers.add_parser('ablate', help='Train and score ablation rows 1-10')
    ablate_parser.add_argument('corpus')
    ablate_parser.add_argument('--rows', help='comma-separated row ids (default: all)')
    ablate_parser.add_argument('--out-dir')
    ablate_parser.add_argument('--split', choices=['train', 'valid', 'test'])
    _add_model_flags(ablate_parser)

    convert_parser = subparsers.add_parser('convert', help='Convert a public corpus to JSONL')
    convert_parser.add_argument('name', choices=['tl-codesum', 'deepcom', 'funcom', 'funcom-50'])
    convert_parser.add_argument('directory')
    convert_parser.add_argument('out')

    runs_parser = subparsers.add_parser('runs', help='List run directories')
    runs_parser.add_argument('--parent')

    subparsers.add_parser('version', help='Show version')
    return parser


#---------------------------------------------------------------------------------------------------------

def _dispatch(args, parser) -> dict:
    # numeric modules load here so --deterministic can pin BLAS threads first
    from hierarchynet import api

    if args.command == 'extract':
        return api.extract(args.corpus, args.out, _edge_flags(args.edges), args.reverse_edges,
                           args.max_summary_len, args.workers)
    if args.command == 'inspect':
        return api.inspect(args.method_file, args.layer, args.fmt, args.run, _edge_flags(args.edges))
    if args.command == 'train':
        return api.train(args.corpus, args.run_dir, args.preset, args.config, _overrides(args), args.max_steps)
    if args.command == 'evaluate':
        return api.evaluate(args.run, args.corpus, args.split, args.checkpoint, args.fmt)
    if args.command == 'ablate':
        try:
            rows = [int(r) for r in args.rows.split(",")] if args.rows else None
        except ValueError:
            raise ConfigError(f"--rows expects integers, got '{args.rows}'") from None
        return api.ablate(args.corpus, rows, args.out_dir, args.preset, args.config, _overrides(args),
                          args.split, args.max_steps)
    if args.command == 'convert':
        return api.convert(args.name, args.directory, args.out)
    if args.command == 'runs':
        return api.runs(args.parent)
    if args.command == 'version':
        return api.version()
    parser.print_help()
    return {"success": True, "message": "help"}


def main(argv=None) -> int:
    # Load env vars from common locations (won't override pre-set env)
    load_env_from_known_locations(KNOWN_KEYS)
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging("DEBUG" if args.verbose else None)

    if getattr(args, 'deterministic', False):
        for var in THREAD_VARS:
            os.environ[var] = "1"

    try:
        result = _dispatch(args, parser)
    except HierarchyNetError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code
    if not result.get("success", False):
        print(f"❌ {result.get('message')}", file=sys.stderr)
        return result.get("exit_code", 1)
    return 0

#---------------------------------------

if __name__ == "__main__":
    sys.exit(main())
