"""Sidecar entry points: serve a model, or fine-tune one from a pair export."""

from __future__ import annotations

import argparse
import sys

from .config import ServingConfig, SidecarError


def cmd_serve(args) -> int:
    import uvicorn

    from .app import create_app

    config = ServingConfig(
        model=args.model,
        max_tokens=args.max_tokens,
        batch_size=args.batch_size,
        max_request_pairs=args.max_request_pairs,
        port=args.port,
    )
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=config.port, log_level="info")
    return 0


def cmd_finetune(args) -> int:
    from .finetune import finetune

    artifact = finetune(
        data_path=args.data,
        output_dir=args.output,
        base_model=args.base_model,
        epochs=args.epochs,
        seed=args.seed,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        max_tokens=args.max_tokens,
    )
    print(f"artifact saved to {artifact}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noveltysidecar")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="serve /v1/classify and /v1/health")
    p.add_argument("--model", default="echo",
                   help="artifact directory, or 'echo' for the fake mode")
    p.add_argument("--max-tokens", type=int, default=500)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--max-request-pairs", type=int, default=1024)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("finetune",
                       help="train on a gen-pairs JSONL export")
    p.add_argument("--data", required=True, help="pair JSONL with labels")
    p.add_argument("--output", required=True, help="artifact directory")
    p.add_argument("--base-model", default=None,
                   help="checkpoint to start from; default builds a tiny "
                        "randomly initialized model from the data")
    p.add_argument("--epochs", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--learning-rate", type=float, default=5e-5)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--max-tokens", type=int, default=500)
    p.set_defaults(func=cmd_finetune)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SidecarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
