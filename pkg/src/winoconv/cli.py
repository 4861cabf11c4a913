"""Thin command-line client for the winoconv service.

Every subcommand is a single HTTP call.  By default the FastAPI app runs
in-process behind a test transport, so no server or network is needed; pass
--server URL to talk to a `winoconv serve` instance instead.  Exit codes:
0 success, 1 usage error (bad flags or a 4xx response), 2 verification or
server failure.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from typing import Optional


def _make_client(server: Optional[str]):
    if server:
        import httpx
        return httpx.Client(base_url=server, timeout=600.0)
    # In-process: the test transport drives the ASGI app directly.
    warnings.filterwarnings("ignore", message=".*httpx2.*")
    from fastapi.testclient import TestClient

    from .service.app import create_app
    return TestClient(create_app())


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract here reserves 2 for
    # verification failures, so remap.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="winoconv",
                description="Accuracy, complexity, and timing harness for "
                            "fast convolution algorithms.")
    p.add_argument("--server", metavar="URL", default=None,
                   help="run against a remote service instead of in-process")
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("accuracy", help="max abs error vs the fp64 direct oracle")
    pa.add_argument("--suite", default="vgg-e-accuracy")
    pa.add_argument("--algos", default="direct-fp32,f2x2,f4x4,fft",
                    help="comma-separated algorithm names")
    pa.add_argument("--precision", choices=("fp32", "fp16"), default="fp32")
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--scale", type=float, default=1.0,
                    help="shrink H,W by this factor (channels untouched)")
    _output_flags(pa)

    pc = sub.add_parser("complexity", help="arithmetic complexity tables")
    pc.add_argument("table", choices=("winograd", "fft", "fft-fast", "layer-costs"))
    _output_flags(pc)

    pb = sub.add_parser("bench", help="wall-time layers, report effective GFLOPS")
    pb.add_argument("--suite", default="vgg-e")
    pb.add_argument("--algo", default="f2x2")
    pb.add_argument("--batch", type=int, default=1)
    pb.add_argument("--repeats", type=int, default=3)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--scale", type=float, default=1.0)
    _output_flags(pb)

    pg = sub.add_parser("gen", help="generate an exact F(m, r) algorithm")
    pg.add_argument("m", type=int)
    pg.add_argument("r", type=int)
    pg.add_argument("--points", default=None,
                    help="comma-separated evaluation points, e.g. 0,1,-1,oo")
    pg.add_argument("--out", metavar="FILE", default=None)

    ps = sub.add_parser("serve", help="run the HTTP service under uvicorn")
    ps.add_argument("--host", default="127.0.0.1")
    ps.add_argument("--port", type=int, default=8000)

    for sp in (pa, pb):
        sp.add_argument("--threads", type=int, default=None,
                        help="cap GEMM worker threads (in-process runs only)")
    return p


def _output_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--format", choices=("csv", "text"), default="csv")
    sp.add_argument("--out", metavar="FILE", default=None,
                    help="write the report here instead of stdout")


def _emit(payload: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload if payload.endswith("\n") else payload + "\n")


def _report_exit(resp, fmt: str, out: Optional[str]) -> int:
    if resp.status_code == 200:
        body = resp.json()
        _emit(body["csv"] if fmt == "csv" else body["text"], out)
        return 0
    detail = resp.json().get("detail", resp.text) if resp.content else resp.reason_phrase
    sys.stderr.write(f"winoconv: error: {detail}\n")
    return 1 if 400 <= resp.status_code < 500 else 2


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service.app import create_app
        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    if getattr(args, "threads", None) is not None and not args.server:
        from .kernels import set_threads
        set_threads(args.threads)

    client = _make_client(args.server)
    if args.command == "accuracy":
        resp = client.post("/v1/accuracy", json={
            "suite": args.suite,
            "algos": [a for a in args.algos.split(",") if a],
            "precision": args.precision,
            "seed": args.seed,
            "scale": args.scale,
        })
        return _report_exit(resp, args.format, args.out)
    if args.command == "complexity":
        return _report_exit(client.get(f"/v1/complexity/{args.table}"),
                            args.format, args.out)
    if args.command == "bench":
        resp = client.post("/v1/bench", json={
            "suite": args.suite,
            "algo": args.algo,
            "batch": args.batch,
            "repeats": args.repeats,
            "scale": args.scale,
            "seed": args.seed,
        })
        return _report_exit(resp, args.format, args.out)
    if args.command == "gen":
        payload = {"m": args.m, "r": args.r}
        if args.points:
            payload["points"] = [t for t in args.points.split(",") if t]
        resp = client.post("/v1/gen", json=payload)
        if resp.status_code != 200:
            detail = resp.json().get("detail", resp.text)
            sys.stderr.write(f"winoconv: error: {detail}\n")
            return 1 if 400 <= resp.status_code < 500 else 2
        body = resp.json()
        _emit(body["text"], args.out)
        return 0 if body["verified"] else 2
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
