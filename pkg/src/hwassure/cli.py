"""Command-line workbench: locking, attacks, power profiling, metrics.

Every subcommand reads explicit inputs (bench references, config files,
seeds) and writes JSON records plus CSV roll-ups. Wall-clock timings are
confined to fields/columns named ``elapsed_s`` so reports can be
compared byte for byte across machines; ``stable_digest`` implements
exactly that comparison.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .assurance_metrics import (
    cdc,
    controllability,
    defects_from_csv,
    fsm_fi_vulnerability,
    fsm_from_csv,
    hex_to_bits,
    observability,
    observation_hardness,
    puf_inter_hd,
    puf_intra_hd,
)
from .bundled import load_bench_ref
from .locking import insert_random_locking, save_locked
from .netlist import extract_metadata, save_bench
from .platform_model import ScanTopology, compose_platform_frame, frame
from .powersim import (
    PER_CYCLE,
    PER_ENCRYPTION,
    SubsystemConfig,
    SwitchingProfile,
    load_subsystem_config_file,
    profiles_to_csv,
)
from .psc_estimation import (
    build_profile_db,
    estimate_subsystem_score,
    load_profile_db,
    map_config_blocks,
    save_profile_db,
    simulate_key_pair,
)
from .pscmetrics import (
    compare_profiles,
    js_matrix_csv,
    per_cycle_js_matrix,
    security_score,
)
from .sat_estimation import (
    ExperimentRecord,
    build_model,
    estimate_attack_time,
    load_model,
    records_from_csv,
    records_to_csv,
    save_model,
)
from .satattack import attack_report, build_platform_instance, sat_attack

WALL_CLOCK_FIELD = "elapsed_s"


def _fail(message: str, code: int = 2) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _out_root(value: Optional[str]) -> str:
    return value or os.environ.get("HWASSURE_OUT") or "."


def _ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def _write_json(path: str, obj: object) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(
    record: Dict[str, object],
    out: Optional[str],
    default_name: str = "record.json",
) -> None:
    text = json.dumps(record, indent=2, sort_keys=True)
    print(text)
    if out:
        # Accept a directory target; batch commands already treat --out that way.
        if out.endswith(os.sep) or os.path.isdir(out):
            _ensure_dir(out)
            out = os.path.join(out, default_name)
        _ensure_dir(os.path.dirname(out) or ".")
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _scrub_wall_clock(obj: object) -> object:
    if isinstance(obj, dict):
        return {
            k: _scrub_wall_clock(v) for k, v in obj.items() if k != WALL_CLOCK_FIELD
        }
    if isinstance(obj, list):
        return [_scrub_wall_clock(v) for v in obj]
    return obj


def _csv_without_wall_clock(text: str) -> str:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return text
    keep = [i for i, name in enumerate(rows[0]) if name != WALL_CLOCK_FIELD]
    if len(keep) == len(rows[0]):
        return text
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for row in rows:
        writer.writerow([row[i] for i in keep if i < len(row)])
    return out.getvalue()


def stable_digest(directory: str) -> str:
    """SHA-256 over every artifact with wall-clock fields removed.

    JSON files lose every ``elapsed_s`` key, CSV files lose the
    ``elapsed_s`` column, and ``digest.txt`` itself is skipped, so two
    runs of the same experiment hash identically.
    """
    digest = hashlib.sha256()
    for root, dirs, files in os.walk(directory):
        dirs.sort()
        for name in sorted(files):
            if name == "digest.txt":
                continue
            path = os.path.join(root, name)
            rel = os.path.relpath(path, directory)
            digest.update(rel.encode())
            if name.endswith(".json"):
                with open(path, encoding="utf-8") as fh:
                    obj = _scrub_wall_clock(json.load(fh))
                digest.update(json.dumps(obj, sort_keys=True).encode())
            elif name.endswith(".csv"):
                with open(path, encoding="utf-8") as fh:
                    digest.update(_csv_without_wall_clock(fh.read()).encode())
            else:
                with open(path, "rb") as fh:
                    digest.update(fh.read())
    return digest.hexdigest()


def cmd_lock(args) -> int:
    circuit = load_bench_ref(args.bench)
    locked = insert_random_locking(circuit, args.key_length, seed=args.seed)
    key_path = save_locked(locked, args.out, args.key_out)
    record = {
        "kind": "lock",
        "design": circuit.name,
        "locked_design": locked.core.name,
        "key_length": args.key_length,
        "seed": args.seed,
        "bench": args.out,
        "key_file": key_path,
    }
    _emit(record, None)
    return 0


def cmd_frame(args) -> int:
    circuit = load_bench_ref(args.bench)
    fm = frame(circuit)
    save_bench(fm.frame, args.out)
    _emit(
        {
            "kind": "frame",
            "design": circuit.name,
            "ff_count": fm.ff_count,
            "bench": args.out,
        },
        None,
    )
    return 0


def cmd_compose(args) -> int:
    circuit = load_bench_ref(args.bench)
    if not circuit.flip_flops:
        return _fail("design is combinational; nothing to compose")
    topology = ScanTopology.for_ff_count(
        len(circuit.flip_flops), args.cr, args.channels
    )
    composed = compose_platform_frame(frame(circuit), topology)
    save_bench(composed, args.out)
    _emit(
        {
            "kind": "compose",
            "design": circuit.name,
            "cr": args.cr,
            "channels": args.channels,
            "chains": topology.num_chains,
            "chain_length": topology.chain_length,
            "bench": args.out,
        },
        None,
    )
    return 0


def _attack_job(job: Dict[str, object]) -> Dict[str, object]:
    circuit = load_bench_ref(str(job["bench"]))
    key_length = int(job["key_length"])
    cr = int(job["cr"])
    seed = int(job["seed"])
    locked, oracle, _ = build_platform_instance(
        circuit, key_length, cr, seed, external_channels=int(job.get("channels", 1))
    )
    result = sat_attack(
        locked,
        oracle,
        time_limit_s=float(job["timeout_s"]),
        max_iterations=job.get("max_iterations"),
        solver=str(job["solver"]),
    )
    record = attack_report(result, circuit.name, key_length, cr, seed=seed)
    record["kind"] = "sat-attack"
    ip_locked = insert_random_locking(circuit, key_length, seed=seed)
    md = extract_metadata(
        ip_locked.core, key_length=key_length, exclude_inputs=ip_locked.key_inputs
    )
    record["instance"] = {
        "name": md.name,
        "key_length": md.key_length,
        "num_gates": md.num_gates,
        "num_pi": md.num_primary_inputs,
        "num_po": md.num_primary_outputs,
        "num_ffio": md.num_flip_flop_io,
    }
    return record


ROLLUP_HEADER = "design,key_length,cr,seed,iterations,status,verified,elapsed_s"


def _write_attack_outputs(records: List[Dict[str, object]], out_dir: str) -> None:
    _ensure_dir(out_dir)
    rollup = [ROLLUP_HEADER]
    measurements: List[ExperimentRecord] = []
    from .netlist import CircuitMetadata

    for rec in records:
        name = f"attack_{rec['design']}_k{rec['key_length']}_cr{rec['cr']}_s{rec['seed']}.json"
        _write_json(os.path.join(out_dir, name), rec)
        rollup.append(
            ",".join(
                str(rec[k])
                for k in (
                    "design",
                    "key_length",
                    "cr",
                    "seed",
                    "iterations",
                    "status",
                    "verified",
                    "elapsed_s",
                )
            )
        )
        if rec["status"] == "success":
            inst = rec["instance"]
            md = CircuitMetadata(
                name=str(inst["name"]),
                key_length=int(inst["key_length"]),
                num_gates=int(inst["num_gates"]),
                num_primary_inputs=int(inst["num_pi"]),
                num_primary_outputs=int(inst["num_po"]),
                num_flip_flop_io=int(inst["num_ffio"]),
            )
            measurements.append(
                ExperimentRecord(
                    metadata=md,
                    cr=float(rec["cr"]),
                    elapsed_seconds=max(float(rec["elapsed_s"]), 1e-6),
                    iterations=int(rec["iterations"]),
                )
            )
    with open(os.path.join(out_dir, "rollup.csv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(rollup) + "\n")
    if measurements:
        with open(os.path.join(out_dir, "measurements.csv"), "w", encoding="utf-8") as fh:
            fh.write(records_to_csv(measurements))


def _batch_jobs(config: Dict[str, object]) -> List[Dict[str, object]]:
    for field in ("benches", "key_lengths", "crs", "seeds"):
        value = config.get(field)
        if not isinstance(value, list) or not value:
            raise ValueError(f"config field {field!r} must be a non-empty list")
    for bench in config["benches"]:
        load_bench_ref(str(bench))
    jobs = []
    for bench, k, cr, seed in itertools.product(
        config["benches"], config["key_lengths"], config["crs"], config["seeds"]
    ):
        jobs.append(
            {
                "bench": bench,
                "key_length": int(k),
                "cr": int(cr),
                "seed": int(seed),
                "timeout_s": float(config.get("timeout_s", 600.0)),
                "solver": str(config.get("solver", "builtin")),
                "max_iterations": config.get("max_iterations"),
                "channels": int(config.get("channels", 1)),
            }
        )
    return jobs


def cmd_attack(args) -> int:
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                config = json.load(fh)
            jobs = _batch_jobs(config)
        except (OSError, ValueError, KeyError) as exc:
            return _fail(f"invalid attack config: {exc}")
        out_dir = _out_root(args.out)
        if args.workers > 1:
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                records = list(pool.map(_attack_job, jobs))
        else:
            records = [_attack_job(job) for job in jobs]
        _write_attack_outputs(records, out_dir)
        failures = [r for r in records if r["status"] != "success"]
        print(
            f"{len(records) - len(failures)}/{len(records)} runs succeeded; "
            f"outputs in {out_dir}"
        )
        for rec in failures:
            print(
                f"failed: {rec['design']} k={rec['key_length']} cr={rec['cr']} "
                f"seed={rec['seed']} status={rec['status']}",
                file=sys.stderr,
            )
        return 1 if failures else 0
    if not args.bench or args.key_length is None:
        return _fail("attack needs --config or both --bench and --key-length")
    job = {
        "bench": args.bench,
        "key_length": args.key_length,
        "cr": args.cr,
        "seed": args.seed,
        "timeout_s": args.timeout_s,
        "solver": args.solver,
        "max_iterations": args.max_iterations,
        "channels": args.channels,
    }
    record = _attack_job(job)
    name = (
        f"attack_{record['design']}_k{record['key_length']}"
        f"_cr{record['cr']}_s{record['seed']}.json"
    )
    _emit(record, args.out, default_name=name)
    return 0 if record["status"] == "success" else 1


def cmd_sat_fit(args) -> int:
    try:
        with open(args.csv, encoding="utf-8") as fh:
            records = records_from_csv(fh.read())
        model = build_model(records, max_submodels=args.max_submodels)
    except (OSError, ValueError) as exc:
        return _fail(f"cannot fit model: {exc}")
    save_model(model, args.out)
    _emit(
        {
            "kind": "sat-fit",
            "sub_models": len(model.sub_models),
            "records": len(records),
            "model": args.out,
        },
        None,
    )
    return 0


def cmd_sat_estimate(args) -> int:
    try:
        model = load_model(args.model)
        circuit = load_bench_ref(args.bench)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    locked = insert_random_locking(circuit, args.key_length, seed=args.seed)
    md = extract_metadata(
        locked.core, key_length=args.key_length, exclude_inputs=locked.key_inputs
    )
    estimate = estimate_attack_time(model, md, args.cr, args.ip_seconds)
    record = {
        "kind": "sat-estimate",
        "design": circuit.name,
        "key_length": args.key_length,
        "cr": args.cr,
        "ip_seconds": args.ip_seconds,
        "estimated_seconds": round(estimate, 6),
    }
    _emit(record, args.out, default_name="estimate.json")
    return 0


def _per_encryption_view(profile: SwitchingProfile, cycles: int) -> np.ndarray:
    return profile.as_array().reshape(-1, cycles).sum(axis=1)


def cmd_psc_measure(args) -> int:
    try:
        config, _ = load_subsystem_config_file(args.config)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(f"invalid subsystem config: {exc}")
    out_dir = _out_root(args.out)
    _ensure_dir(out_dir)
    cycles = config.cycles_per_encryption
    (sub1, blocks1), (sub2, blocks2) = simulate_key_pair(
        config, args.seed, args.plaintexts, granularity=PER_CYCLE
    )
    enc1 = _per_encryption_view(sub1, cycles)
    enc2 = _per_encryption_view(sub2, cycles)
    js = compare_profiles(enc1, enc2)
    score = security_score(js)
    matrix = per_cycle_js_matrix(
        {"subsystem": sub1.samples, **{n: p.samples for n, p in blocks1.items()}},
        {"subsystem": sub2.samples, **{n: p.samples for n, p in blocks2.items()}},
        cycles,
    )
    order = ["subsystem"] + list(blocks1)
    with open(os.path.join(out_dir, "js_matrix.csv"), "w", encoding="utf-8") as fh:
        fh.write(js_matrix_csv(matrix, order))
    for label, sub, blocks in (("key1", sub1, blocks1), ("key2", sub2, blocks2)):
        profile_csv = profiles_to_csv(
            SwitchingProfile(
                tuple(int(v) for v in _per_encryption_view(sub, cycles)),
                sub.key_hex,
                PER_ENCRYPTION,
            ),
            {
                n: SwitchingProfile(
                    tuple(int(v) for v in _per_encryption_view(p, cycles)),
                    p.key_hex,
                    PER_ENCRYPTION,
                )
                for n, p in blocks.items()
            },
        )
        with open(
            os.path.join(out_dir, f"profiles_{label}.csv"), "w", encoding="utf-8"
        ) as fh:
            fh.write(profile_csv)
    record = {
        "kind": "psc-measure",
        "js": js,
        "score": score,
        "per_cycle_max_js": max(matrix["subsystem"]),
        "blocks": list(blocks1),
        "plaintexts": args.plaintexts,
        "seed": args.seed,
        "key1": sub1.key_hex,
        "key2": sub2.key_hex,
    }
    _emit(record, os.path.join(out_dir, "measure.json"))
    return 0


def cmd_psc_estimate(args) -> int:
    try:
        config, _ = load_subsystem_config_file(args.config)
        db = load_profile_db(args.db)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(str(exc))
    (aes1, _), (aes2, _) = simulate_key_pair(
        SubsystemConfig(), args.seed, args.plaintexts
    )
    mapped = map_config_blocks(config, db)
    js, score = estimate_subsystem_score((aes1, aes2), mapped, draw_seed=args.seed)
    record = {
        "kind": "psc-estimate",
        "js": js,
        "score": score,
        "mapped": [m.source_name for m in mapped],
        "plaintexts": args.plaintexts,
        "seed": args.seed,
    }
    _emit(record, args.out, default_name="estimate.json")
    return 0


def cmd_psc_db(args) -> int:
    try:
        circuits = [load_bench_ref(ref) for ref in args.benches.split(",")]
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    db = build_profile_db(circuits, windows=args.windows, seed=args.seed)
    save_profile_db(db, args.out)
    _emit(
        {
            "kind": "psc-db",
            "entries": [e.source_name for e in db.entries],
            "windows": args.windows,
            "seed": args.seed,
            "directory": args.out,
        },
        None,
    )
    return 0


def cmd_metrics(args) -> int:
    if args.metric == "scoap":
        circuit = load_bench_ref(args.bench)
        record = {
            "kind": "metric",
            "metric": "scoap",
            "design": circuit.name,
            "value": None,
            "controllability": {
                k: round(v, 9) for k, v in sorted(controllability(circuit, args.classical).items())
            },
            "observability": {
                k: round(v, 9) for k, v in sorted(observability(circuit).items())
            },
        }
    elif args.metric == "oh":
        circuit = load_bench_ref(args.bench)
        value = observation_hardness(circuit, args.node, args.patterns, args.seed)
        record = {
            "kind": "metric",
            "metric": "observation-hardness",
            "design": circuit.name,
            "node": args.node,
            "patterns": args.patterns,
            "value": value,
        }
    elif args.metric == "fsm-fi":
        with open(args.csv, encoding="utf-8") as fh:
            spec = fsm_from_csv(fh.read())
        result = fsm_fi_vulnerability(spec)
        record = {
            "kind": "metric",
            "metric": "fsm-fi",
            "value": result.vulnerable_percent,
            "mean_susceptibility": result.mean_susceptibility,
            "susceptibility_factors": list(result.susceptibility_factors),
        }
    elif args.metric == "puf":
        with open(args.responses, encoding="utf-8") as fh:
            lines = [line.strip() for line in fh if line.strip()]
        if args.hex:
            lines = [hex_to_bits(line) for line in lines]
        if args.intra:
            value = puf_intra_hd(lines[0], lines[1:])
            name = "puf-intra-hd"
        else:
            value = puf_inter_hd(lines)
            name = "puf-inter-hd"
        record = {
            "kind": "metric",
            "metric": name,
            "value": value,
            "responses": len(lines),
        }
    elif args.metric == "cdc":
        with open(args.csv, encoding="utf-8") as fh:
            defects = defects_from_csv(fh.read())
        record = {
            "kind": "metric",
            "metric": "cdc",
            "value": cdc(defects),
            "defects": len(defects),
        }
    else:  # pragma: no cover - argparse restricts choices
        return _fail(f"unknown metric {args.metric!r}")
    _emit(record, args.out, default_name="metric.json")
    return 0


_REPORT_FAMILY = {
    "sat-attack": "sat",
    "sat-estimate": "sat",
    "psc-measure": "psc",
    "psc-estimate": "psc",
    "metric": "metrics",
}


def _report_rows(kind: str, records: List[Dict[str, object]]) -> str:
    def flat(value):
        return "" if value is None else value

    if kind == "sat":
        header = "design,key_length,cr,seed,iterations,status,verified,elapsed_s"
        rows = sorted(
            (r for r in records if r.get("kind") == "sat-attack"),
            key=lambda r: (r["design"], r["key_length"], r["cr"], r.get("seed", 0)),
        )
        lines = [header] + [
            f"{r['design']},{r['key_length']},{r['cr']},{flat(r.get('seed'))},"
            f"{r['iterations']},{r['status']},{r['verified']},{r['elapsed_s']}"
            for r in rows
        ]
    elif kind == "psc":
        header = "record,js,score,plaintexts,seed"
        rows = sorted(records, key=lambda r: (r["kind"], r.get("seed", 0)))
        lines = [header] + [
            f"{r['kind']},{r['js']},{r['score']},{r['plaintexts']},{flat(r.get('seed'))}"
            for r in rows
        ]
    else:
        header = "metric,value"
        rows = sorted(records, key=lambda r: r["metric"])
        lines = [header] + [f"{r['metric']},{flat(r.get('value'))}" for r in rows]
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    records = []
    if os.path.isdir(args.records):
        for name in sorted(os.listdir(args.records)):
            if name.endswith(".json"):
                with open(os.path.join(args.records, name), encoding="utf-8") as fh:
                    records.append(json.load(fh))
    else:
        return _fail(f"records directory not found: {args.records}")
    known = [r for r in records if r.get("kind") in _REPORT_FAMILY]
    families = {_REPORT_FAMILY[r["kind"]] for r in known}
    if len(families) > 1:
        return _fail(f"mixed record kinds in {args.records}: {sorted(families)}")
    if families and args.kind not in families:
        return _fail(f"records are {families.pop()!r}, not {args.kind!r}")
    text = _report_rows(args.kind, known)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {args.out} ({len(known)} records)")
    return 0


DEMO_FSM_CSV = (
    "from,to,vulnerable,pv,po,p_fs\n"
    "s0,s1,1,5,3,2;4\n"
    "s1,s2,0,,,\n"
    "s2,s3,0,,,\n"
    "s3,s0,0,,,\n"
)

DEMO_DEFECTS_CSV = "confidence,frequency\n0.8,3\n0.5,1\n"

DEMO_RESPONSES = "00\n01\n11\n"

DEMO_SERIES = {
    "alpha": [(1, 2.0), (2, 2.1), (4, 6.0), (8, 5.8), (16, 33.0)],
    "beta": [(1, 1.0), (2, 1.4), (4, 2.2), (8, 4.1), (16, 8.0)],
}


def _demo_measurement_records() -> List[ExperimentRecord]:
    from .netlist import CircuitMetadata

    records = []
    for i, (name, series) in enumerate(sorted(DEMO_SERIES.items())):
        md = CircuitMetadata(
            name=f"{name}_enc8",
            key_length=8,
            num_gates=120 + 40 * i,
            num_primary_inputs=12,
            num_primary_outputs=8,
            num_flip_flop_io=16,
        )
        for cr, seconds in series:
            records.append(
                ExperimentRecord(
                    metadata=md, cr=float(cr), elapsed_seconds=seconds, iterations=9 + cr
                )
            )
    return records


def cmd_demo(args) -> int:
    out = _out_root(args.out)
    _ensure_dir(out)
    seed = args.seed

    attack_dir = os.path.join(out, "attack")
    config_path = os.path.join(out, "attack_config.json")
    _write_json(
        config_path,
        {
            "benches": ["pkg:c17", "pkg:rs160"],
            "key_lengths": [4],
            "crs": [1, 2],
            "seeds": [seed],
            "timeout_s": 600.0,
            "solver": "builtin",
        },
    )
    code = main(["attack", "--config", config_path, "--out", attack_dir])
    if code != 0:
        return code

    fit_csv = os.path.join(out, "reference_measurements.csv")
    with open(fit_csv, "w", encoding="utf-8") as fh:
        fh.write(records_to_csv(_demo_measurement_records()))
    model_path = os.path.join(out, "sat_model.json")
    code = main(["sat-fit", "--csv", fit_csv, "--out", model_path])
    if code != 0:
        return code
    code = main(
        [
            "sat-estimate",
            "--model", model_path,
            "--bench", "pkg:rs220",
            "--key-length", "4",
            "--cr", "16",
            "--ip-seconds", "1.0",
            "--seed", str(seed),
            "--out", os.path.join(out, "sat_estimate.json"),
        ]
    )
    if code != 0:
        return code

    db_dir = os.path.join(out, "psc_db")
    code = main(
        [
            "psc-db",
            "--benches", "pkg:s1488,pkg:s832",
            "--windows", "300",
            "--seed", str(seed),
            "--out", db_dir,
        ]
    )
    if code != 0:
        return code
    subsystem_path = os.path.join(out, "subsystem.json")
    _write_json(
        subsystem_path,
        {
            "aes": {"enabled": True},
            "noise_ips": [
                {"bench": "pkg:s1488", "seed": seed},
                {"bench": "pkg:s832", "seed": seed + 1},
            ],
            "granularity": PER_ENCRYPTION,
        },
    )
    psc_dir = os.path.join(out, "psc")
    code = main(
        [
            "psc-measure",
            "--config", subsystem_path,
            "--plaintexts", "300",
            "--seed", str(seed),
            "--out", psc_dir,
        ]
    )
    if code != 0:
        return code
    code = main(
        [
            "psc-estimate",
            "--config", subsystem_path,
            "--db", db_dir,
            "--plaintexts", "300",
            "--seed", str(seed),
            "--out", os.path.join(psc_dir, "estimate.json"),
        ]
    )
    if code != 0:
        return code

    inputs_dir = os.path.join(out, "inputs")
    _ensure_dir(inputs_dir)
    metrics_dir = os.path.join(out, "metrics")
    for name, text in (
        ("fsm.csv", DEMO_FSM_CSV),
        ("defects.csv", DEMO_DEFECTS_CSV),
        ("responses.txt", DEMO_RESPONSES),
    ):
        with open(os.path.join(inputs_dir, name), "w", encoding="utf-8") as fh:
            fh.write(text)
    steps = [
        ["metrics", "scoap", "--bench", "pkg:c17",
         "--out", os.path.join(metrics_dir, "scoap_c17.json")],
        ["metrics", "oh", "--bench", "pkg:c17", "--node", "22",
         "--out", os.path.join(metrics_dir, "oh_c17.json")],
        ["metrics", "fsm-fi", "--csv", os.path.join(inputs_dir, "fsm.csv"),
         "--out", os.path.join(metrics_dir, "fsm.json")],
        ["metrics", "puf", "--responses", os.path.join(inputs_dir, "responses.txt"),
         "--out", os.path.join(metrics_dir, "puf.json")],
        ["metrics", "cdc", "--csv", os.path.join(inputs_dir, "defects.csv"),
         "--out", os.path.join(metrics_dir, "cdc.json")],
        ["report", "--kind", "sat", "--records", attack_dir,
         "--out", os.path.join(out, "report_sat.csv")],
        ["report", "--kind", "metrics", "--records", metrics_dir,
         "--out", os.path.join(out, "report_metrics.csv")],
    ]
    for step in steps:
        code = main(step)
        if code != 0:
            return code

    digest = stable_digest(out)
    with open(os.path.join(out, "digest.txt"), "w", encoding="utf-8") as fh:
        fh.write(digest + "\n")
    print(f"demo complete; digest {digest}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hwassure",
        description="Quantifiable hardware-assurance workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lock", help="insert random key gates into a netlist")
    p.add_argument("--bench", required=True)
    p.add_argument("--key-length", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--key-out", default=None)
    p.set_defaults(func=cmd_lock)

    p = sub.add_parser("frame", help="unroll a sequential design into one combinational frame")
    p.add_argument("--bench", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("compose", help="wrap a framed design in a scan codec")
    p.add_argument("--bench", required=True)
    p.add_argument("--cr", type=int, required=True)
    p.add_argument("--channels", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("attack", help="run key-recovery attacks, single or batched")
    p.add_argument("--bench")
    p.add_argument("--key-length", type=int)
    p.add_argument("--cr", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="JSON grid config for batch mode")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timeout-s", type=float, default=3600.0)
    p.add_argument("--solver", default="builtin")
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--channels", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sat-fit", help="fit attack-time multiplier curves from measurements")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-submodels", type=int, default=20)
    p.set_defaults(func=cmd_sat_fit)

    p = sub.add_parser("sat-estimate", help="estimate platform attack time from a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--bench", required=True)
    p.add_argument("--key-length", type=int, required=True)
    p.add_argument("--cr", type=float, required=True)
    p.add_argument("--ip-seconds", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sat_estimate)

    p = sub.add_parser("psc-measure", help="measure key-pair switching divergence")
    p.add_argument("--config", required=True)
    p.add_argument("--plaintexts", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_psc_measure)

    p = sub.add_parser("psc-estimate", help="estimate divergence via the profile database")
    p.add_argument("--config", required=True)
    p.add_argument("--db", required=True)
    p.add_argument("--plaintexts", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_psc_estimate)

    p = sub.add_parser("psc-db", help="pre-simulate benchmark switching profiles")
    p.add_argument("--benches", required=True, help="comma-separated bench references")
    p.add_argument("--windows", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_psc_db)

    p = sub.add_parser("metrics", help="structural and statistical metric calculators")
    p.add_argument("metric", choices=["scoap", "oh", "fsm-fi", "puf", "cdc"])
    p.add_argument("--bench")
    p.add_argument("--node")
    p.add_argument("--patterns", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--classical", action="store_true")
    p.add_argument("--csv")
    p.add_argument("--responses")
    p.add_argument("--intra", action="store_true")
    p.add_argument("--hex", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("report", help="summarize run records into plot-ready CSV")
    p.add_argument("--kind", choices=["sat", "psc", "metrics"], required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("demo", help="run the full fixed-seed demonstration pipeline")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
