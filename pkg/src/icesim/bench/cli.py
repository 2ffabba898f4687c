"""Command-line entry point for the benchmarking harnesses.

Subcommands map onto `run_experiment` kinds plus table building and
fault-tolerance certification.  Exit codes: 0 on success, 2 on
configuration/validation errors, 3 when `ftcheck` finds counterexamples.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Dict, List, Optional, Sequence

from .experiments import noise_model, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FTCHECK = 3


def _int_list(text: str) -> List[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _float_list(text: str) -> List[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--code", type=int, default=None, metavar="K",
                   help="single-block code with K logical qubits")
    p.add_argument("--concat", type=str, default=None, metavar="K2,K1",
                   help="two-level code: outer K2, inner K1")
    p.add_argument("--p", type=float, default=0.0,
                   help="two-qubit depolarizing rate (also init/meas)")
    p.add_argument("--bias", choices=("uniform", "zz"), default="uniform")
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None,
                   help="write the record to this path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--config", type=str, default=None,
                   help="key-value file supplying defaults for any flag")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="icesim",
        description="Monte-Carlo benchmarking for iceberg-code circuits")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spam", help="encoded state-prep-and-measure")
    _add_common(p)

    p = sub.add_parser("memory", help="repeated-correction memory run")
    _add_common(p)
    p.add_argument("--cycles", type=_int_list, default=[1, 2, 4, 8])
    p.add_argument("--basis", choices=("Z", "X"), default="Z")

    p = sub.add_parser("ghz", help="distance-4 entangled-state preparation")
    _add_common(p)
    p.add_argument("--repetitions", type=int, default=2)

    p = sub.add_parser("cb", help="logical cycle benchmarking")
    _add_common(p)
    p.add_argument("--gate", choices=("intra_uzz", "inter_uzz", "fanout"),
                   default="intra_uzz")
    p.add_argument("--depths", type=_int_list, default=None)
    p.add_argument("--paulis", type=int, default=20)
    p.add_argument("--se-period", type=int, default=8)

    p = sub.add_parser("xy-mirror", help="Trotterized-dynamics mirror runs")
    _add_common(p)
    p.add_argument("--dims", type=_int_list, default=[2, 2, 2])
    p.add_argument("--theta", type=float, default=math.pi / 8)
    p.add_argument("--steps", type=_int_list, default=[2, 4, 8])
    p.add_argument("--encoding", choices=("unencoded", "iceberg"),
                   default="unencoded")

    p = sub.add_parser("ftcheck", help="exhaustive fault-tolerance checks")
    _add_common(p)
    p.add_argument("--ftcheck-cycles", type=int, default=2)

    p = sub.add_parser("lookup", help="build a syndrome lookup table")
    _add_common(p)
    p.add_argument("--samples", type=int, default=10000)

    p = sub.add_parser("decode-sim",
                       help="lookup-decoder discard/error rates at one p")
    _add_common(p)
    p.add_argument("--table-samples", type=int, default=None)
    return ap


def _load_config(path: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, val = line.split("=", 1)
            else:
                parts = line.split(None, 1)
                if len(parts) != 2:
                    raise ValueError(f"cannot parse config line {raw!r}")
                key, val = parts
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _apply_config(ap: argparse.ArgumentParser, args: argparse.Namespace,
                  raw_argv: Sequence[str]) -> None:
    """Config-file values override parser defaults but not explicit flags."""
    if not args.config:
        return
    explicit = {a.lstrip("-").split("=", 1)[0].replace("-", "_")
                for a in raw_argv if a.startswith("--")}
    for key, val in _load_config(args.config).items():
        if key in explicit or not hasattr(args, key):
            continue
        cur = getattr(args, key)
        if isinstance(cur, bool):
            parsed: object = val.lower() in ("1", "true", "yes")
        elif isinstance(cur, int):
            parsed = int(val)
        elif isinstance(cur, float):
            parsed = float(val)
        elif isinstance(cur, list):
            parsed = (_float_list(val) if cur and isinstance(cur[0], float)
                      else _int_list(val))
        else:
            parsed = val
        setattr(args, key, parsed)


def _concat_pair(args) -> Optional[List[int]]:
    if args.concat is None:
        return None
    pair = _int_list(args.concat)
    if len(pair) != 2:
        raise ValueError("--concat expects two integers K2,K1")
    return pair


def _emit(record, args) -> None:
    if args.out:
        if args.format == "json":
            record.to_json(args.out)
        else:
            record.to_csv(args.out)
    print(record.summary())


def _run_harness(kind: str, args, config: Dict[str, object]) -> None:
    noise = noise_model(args.p, args.bias)
    record = run_experiment(kind, config=config, noise=noise,
                            shots=args.shots, seed=args.seed)
    _emit(record, args)


def _cmd_spam(args) -> int:
    cfg: Dict[str, object] = {}
    if args.code is not None:
        cfg["k"] = args.code
    _run_harness("spam", args, cfg)
    return EXIT_OK


def _cmd_memory(args) -> int:
    cfg: Dict[str, object] = {"cycles": args.cycles, "basis": args.basis}
    pair = _concat_pair(args)
    if pair is not None:
        cfg["k2"], cfg["k1"] = pair
    elif args.code is not None:
        cfg["k"] = args.code
    _run_harness("memory", args, cfg)
    return EXIT_OK


def _cmd_ghz(args) -> int:
    cfg: Dict[str, object] = {"repetitions": args.repetitions}
    pair = _concat_pair(args)
    if pair is not None:
        cfg["k2"], cfg["k1"] = pair
    _run_harness("ghz", args, cfg)
    return EXIT_OK


def _cmd_cb(args) -> int:
    cfg: Dict[str, object] = {"gate": args.gate, "paulis": args.paulis,
                              "se_period": args.se_period}
    if args.depths:
        cfg["depths"] = args.depths
    if args.code is not None:
        cfg["k"] = args.code
    _run_harness("cb", args, cfg)
    return EXIT_OK


def _cmd_xy_mirror(args) -> int:
    cfg: Dict[str, object] = {"dims": tuple(args.dims), "theta": args.theta,
                              "steps": args.steps,
                              "encoding": args.encoding}
    _run_harness("xy_mirror", args, cfg)
    return EXIT_OK


def _cmd_ftcheck(args) -> int:
    from ..codes import ConcatIceberg, IcebergCode
    from ..ftverify import (check_prep_ft, check_qec_props, check_readout_ft,
                            check_se_ft)
    from ..gadgets import build_prep, build_se
    reports = []
    pair = _concat_pair(args)
    if pair is not None:
        code = ConcatIceberg(*pair)
        reports.append(check_qec_props(code, cycles=args.ftcheck_cycles))
        reports.append(check_prep_ft(build_prep(code, "two_branch_d4"),
                                     code, distance=4))
    else:
        code = IcebergCode(args.code if args.code is not None else 4)
        reports.append(check_prep_ft(build_prep(code, "two_branch_d2"),
                                     code, distance=2))
        reports.append(check_se_ft(build_se(code, "ghz_ancilla_d2"), code))
        reports.append(check_readout_ft(build_se(code, "readout_d2"), code))
    failed = False
    for rep in reports:
        status = "pass" if rep.passed else \
            f"FAIL ({len(rep.counterexamples)} counterexamples)"
        print(f"{rep.gadget_id} [{rep.prop}]: {status}")
        failed |= not rep.passed
    return EXIT_FTCHECK if failed else EXIT_OK


def _cmd_lookup(args) -> int:
    from ..codes import ConcatIceberg
    from ..decoders import lookup_build
    from ..gadgets import build_prep
    pair = _concat_pair(args) or [2, 2]
    code = ConcatIceberg(*pair)
    gadget = build_prep(code, "two_branch_d4")
    table = lookup_build(gadget, code, noise_model(args.p, args.bias),
                         args.samples, seed=args.seed)
    if args.out:
        table.to_csv(args.out)
    print(f"lookup table: {len(table.entries)} syndromes "
          f"from {table.samples} samples at p={args.p}")
    return EXIT_OK


def _cmd_decode_sim(args) -> int:
    cfg: Dict[str, object] = {"p_grid": [args.p], "bias": args.bias}
    pair = _concat_pair(args)
    if pair is not None:
        cfg["k2"], cfg["k1"] = pair
    if args.table_samples:
        cfg["table_samples"] = args.table_samples
    record = run_experiment("lookup_scaling", config=cfg, shots=args.shots,
                            seed=args.seed)
    _emit(record, args)
    return EXIT_OK


_COMMANDS = {
    "spam": _cmd_spam,
    "memory": _cmd_memory,
    "ghz": _cmd_ghz,
    "cb": _cmd_cb,
    "xy-mirror": _cmd_xy_mirror,
    "ftcheck": _cmd_ftcheck,
    "lookup": _cmd_lookup,
    "decode-sim": _cmd_decode_sim,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        _apply_config(ap, args, argv)
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
