"""Command-line interface.

Subcommands: hide, reveal, attack, evaluate, capacity, survival.  Every
command prints a JSON report on stdout (and to ``--report`` when given).
The password is read from the environment variable named by
``--password-env`` (default ``RSSTEGO_PASSWORD``), from ``--password-file``,
or from an interactive prompt; it is never accepted as an argument.
Exit codes are listed in :mod:`rsstego.errors`.
"""

from __future__ import annotations

import argparse
import getpass
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .errors import InvalidParams, StegoError, StegoIOError
from .gf import RsParams
from .lsb import PixelImage, capacity, extract, load_image, save_png
from .metrics import compare
from .noise import PRESETS, NoiseKind, NoiseSpec, apply_noise, lsb_flip_rate, preset
from .payload import HEADER_BITS, Kind, PayloadEnvelope
from .pipeline import hide, reveal
from .survival import (
    SurvivalQuery,
    budget_feasible,
    corruption_budget,
    log2_carrier_multiplicity,
    survival_probability,
)

log = logging.getLogger("rsstego")

DEFAULT_PASSWORD_ENV = "RSSTEGO_PASSWORD"


# --- helpers ----------------------------------------------------------------------


def _read_password(args) -> bytes:
    if args.password_file:
        try:
            data = Path(args.password_file).read_bytes()
        except OSError as exc:
            raise StegoIOError(f"{args.password_file}: {exc.strerror}") from None
        return data.rstrip(b"\r\n")
    value = os.environ.get(args.password_env)
    if value is not None:
        return value.encode("utf-8")
    if sys.stdin.isatty():
        return getpass.getpass("password: ").encode("utf-8")
    raise InvalidParams(
        f"no password: set ${args.password_env}, pass --password-file, or run interactively"
    )


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise StegoIOError(f"{path}: {exc.strerror}") from None


def _write_bytes(path: str, data: bytes) -> None:
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    try:
        tmp.write_bytes(data)
        os.replace(tmp, target)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise StegoIOError(f"{path}: {exc.strerror}") from None


def _emit(report: dict, path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if path:
        _write_bytes(path, (text + "\n").encode("utf-8"))


def _rs(args) -> RsParams:
    return RsParams(args.rs_n, args.rs_k)


def _parse_iv(text: str | None) -> bytes | None:
    if text is None:
        return None
    try:
        iv = bytes.fromhex(text)
    except ValueError:
        raise InvalidParams("--iv must be 32 hexadecimal digits") from None
    if len(iv) != 16:
        raise InvalidParams("--iv must be 32 hexadecimal digits")
    return iv


def _load_payload(args) -> PayloadEnvelope:
    kind = Kind(args.kind.upper())
    if kind is Kind.IMAGE:
        try:
            with Image.open(args.payload) as im:
                if im.mode not in ("L", "RGB"):
                    im = im.convert("RGB")
                pixels = np.array(im, dtype=np.uint8)
        except OSError as exc:
            raise StegoIOError(f"{args.payload}: {exc}") from None
        return PayloadEnvelope.from_pixels(pixels, args.quant_bits)
    data = _read_bytes(args.payload)
    if kind is Kind.AUDIO:
        return PayloadEnvelope.audio(data)
    return PayloadEnvelope.text(data, compress=args.compress_text)


def _embedded_bits(image: PixelImage) -> int | None:
    """Length of the framed stream announced by the image, if plausible."""
    try:
        return int(extract(image).size)
    except StegoError:
        return None


def max_rs_input(coded_bytes: int, rs: RsParams) -> int:
    full, rem = divmod(coded_bytes, rs.n)
    return full * rs.k + max(0, rem - rs.parity)


# --- commands --------------------------------------------------------------------


def cmd_hide(args) -> int:
    rs = _rs(args)
    cover = load_image(args.cover)
    envelope = _load_payload(args)
    password = _read_password(args)
    log.info("hiding %s payload (%d bytes) in %s", envelope.kind.value, len(envelope.body), args.cover)
    result = hide(
        cover, envelope, password, rs, timestamp=args.timestamp, iv=_parse_iv(args.iv)
    )
    log.info("embedded %d of %d bits", result.payload_bits, result.capacity)
    save_png(result.stego, args.out)
    report = {
        "command": "hide",
        "config": {
            "cover": args.cover,
            "payload": args.payload,
            "kind": args.kind,
            "out": args.out,
            "rs_n": rs.n,
            "rs_k": rs.k,
            "quant_bits": args.quant_bits if envelope.kind is Kind.IMAGE else None,
            "compress_text": args.compress_text,
            "timestamp": args.timestamp,
            "iv": args.iv,
        },
        "payload_bits": result.payload_bits,
        "coded_bytes": result.coded_bytes,
        "token_bytes": result.token_bytes,
        "capacity_bits": result.capacity,
        "used_fraction": result.payload_bits / result.capacity,
        "flips": result.flips,
        "fidelity": compare(cover, result.stego).to_dict(),
    }
    _emit(report, args.report)
    return 0


def cmd_reveal(args) -> int:
    rs = _rs(args)
    stego = load_image(args.stego)
    password = _read_password(args)
    stats: dict = {}
    envelope = reveal(stego, password, rs, stats=stats)
    log.info("recovered %s payload, %s RS symbols corrected", envelope.kind.value, stats.get("corrected"))
    if envelope.kind is Kind.IMAGE:
        save_png(PixelImage(envelope.pixels()), args.out)
    else:
        _write_bytes(args.out, envelope.body)
    report = {
        "command": "reveal",
        "config": {"stego": args.stego, "out": args.out, "rs_n": rs.n, "rs_k": rs.k},
        "kind": envelope.kind.value,
        "body_bytes": len(envelope.body),
        "rs_blocks": stats.get("blocks"),
        "rs_symbols_corrected": stats.get("corrected"),
    }
    if envelope.image is not None:
        m = envelope.image
        report["image"] = {"width": m.width, "height": m.height, "channels": m.channels,
                           "quant_bits": m.quant_bits}
    _emit(report, args.report)
    return 0


def _noise_spec(args) -> NoiseSpec:
    if args.preset:
        return preset(args.preset, seed=args.seed)
    if not args.noise:
        raise InvalidParams("give --preset or --noise")
    return NoiseSpec(
        kind=NoiseKind(args.noise),
        salt=args.salt,
        pepper=args.pepper,
        mean=args.mean,
        sigma=args.sigma,
        lam=args.lam,
        seed=args.seed,
    )


def cmd_attack(args) -> int:
    spec = _noise_spec(args)
    image = load_image(args.input)
    attacked = apply_noise(image, spec)
    save_png(attacked, args.out)
    region = _embedded_bits(image)
    report = {
        "command": "attack",
        "config": {"input": args.input, "out": args.out, "noise": spec.to_dict()},
        "embedded_bits": region,
        "lsb_flip_rate": lsb_flip_rate(image, attacked, region),
        "fidelity": compare(image, attacked).to_dict(),
    }
    _emit(report, args.report)
    return 0


def cmd_evaluate(args) -> int:
    a = load_image(args.a)
    b = load_image(args.b)
    report = {"command": "evaluate", "config": {"a": args.a, "b": args.b}}
    report.update(compare(a, b).to_dict())
    _emit(report, args.report)
    return 0


def cmd_capacity(args) -> int:
    rs = _rs(args)
    if args.image:
        bits = capacity(load_image(args.image))
    elif args.width and args.height:
        bits = args.width * args.height * args.channels
    else:
        raise InvalidParams("give --image or --width/--height")
    coded = max(0, bits - HEADER_BITS) // 8
    report = {
        "command": "capacity",
        "config": {"image": args.image, "width": args.width, "height": args.height,
                   "channels": args.channels, "rs_n": rs.n, "rs_k": rs.k},
        "capacity_bits": bits,
        "max_coded_bytes": coded,
        "max_token_bytes": max_rs_input(coded, rs),
    }
    _emit(report, args.report)
    return 0


def cmd_survival(args) -> int:
    cap = args.capacity
    if args.image:
        cap = capacity(load_image(args.image))
    if cap is None:
        cap = args.n
    query = SurvivalQuery(args.n, args.k, cap, args.p)
    report = {
        "command": "survival",
        "config": {"n": args.n, "k": args.k, "capacity": cap, "p": args.p,
                   "method": args.method},
        "probability": survival_probability(query, args.method),
        "threshold": query.threshold,
        "corruption_budget": corruption_budget(args.n, args.k),
        "budget_feasible": budget_feasible(args.p, args.n, args.k),
        "log2_carrier_multiplicity": log2_carrier_multiplicity(query),
    }
    _emit(report, args.report)
    return 0


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsstego",
        description="LSB image steganography with shuffling, Fernet and Reed-Solomon coding.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def rs_opts(p):
        p.add_argument("--rs-n", type=int, default=255, help="RS block length (default 255)")
        p.add_argument("--rs-k", type=int, default=223, help="RS data length (default 223)")

    def password_opts(p):
        p.add_argument("--password-env", default=DEFAULT_PASSWORD_ENV,
                       help=f"environment variable holding the password (default {DEFAULT_PASSWORD_ENV})")
        p.add_argument("--password-file", help="read the password from this file")

    def report_opt(p):
        p.add_argument("--report", help="also write the JSON report here")

    p = sub.add_parser("hide", help="embed a payload into a cover image")
    p.add_argument("--cover", required=True)
    p.add_argument("--payload", required=True)
    p.add_argument("--kind", choices=["text", "audio", "image"], default="text")
    p.add_argument("--out", required=True, help="stego PNG path")
    p.add_argument("--quant-bits", type=int, default=5, help="bits kept per image sample (1-6)")
    p.add_argument("--compress-text", action="store_true", help="DEFLATE text before encryption")
    p.add_argument("--timestamp", type=int, help="pin the Fernet timestamp (seconds)")
    p.add_argument("--iv", help="pin the Fernet IV (32 hex digits)")
    rs_opts(p)
    password_opts(p)
    report_opt(p)
    p.set_defaults(func=cmd_hide)

    p = sub.add_parser("reveal", help="recover a payload from a stego image")
    p.add_argument("--stego", required=True)
    p.add_argument("--out", required=True)
    rs_opts(p)
    password_opts(p)
    report_opt(p)
    p.set_defaults(func=cmd_reveal)

    p = sub.add_parser("attack", help="apply a noise model to an image")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--noise", choices=[k.value for k in NoiseKind])
    p.add_argument("--salt", type=float, default=0.0)
    p.add_argument("--pepper", type=float, default=0.0)
    p.add_argument("--mean", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    report_opt(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("evaluate", help="compare two images")
    p.add_argument("--a", required=True, help="reference image")
    p.add_argument("--b", required=True, help="distorted image")
    report_opt(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("capacity", help="report how many bits an image can carry")
    p.add_argument("--image")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--channels", type=int, default=3)
    rs_opts(p)
    report_opt(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("survival", help="probability that a payload survives LSB corruption")
    p.add_argument("--n", type=int, required=True, help="embedded bits (message + parity)")
    p.add_argument("--k", type=int, required=True, help="message bits")
    p.add_argument("--capacity", type=int, help="carrier capacity in bits")
    p.add_argument("--image", help="take the capacity from this image")
    p.add_argument("--p", type=float, default=0.5, help="per-bit flip probability")
    p.add_argument("--method", choices=["auto", "exact", "normal"], default="auto")
    report_opt(p)
    p.set_defaults(func=cmd_survival)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except StegoError as exc:
        print(f"rsstego: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
