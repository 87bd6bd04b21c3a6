"""hwassure: quantitative hardware security workbench.

Subpackages cover gate-level netlists, logic locking, scan-compression
platform modeling, SAT-based key recovery, attack-time estimation,
switching-activity power simulation, side-channel leakage metrics, and
classic testability/assurance calculators, tied together by a CLI.
"""

from .netlist import (
    BenchParseError,
    Circuit,
    CircuitMetadata,
    Gate,
    NetlistError,
    batch_evaluate,
    evaluate,
    extract_metadata,
    load_bench,
    make_circuit,
    parse_bench,
    random_input_matrix,
    save_bench,
    write_bench,
)
from .bundled import bundled_names, load_bundled, load_bench_ref
from .locking import (
    LockedCircuit,
    LockingKey,
    evaluate_locked,
    insert_random_locking,
    load_locked,
    save_locked,
)
from .platform_model import (
    FrameModel,
    ScanTopology,
    compose_platform_frame,
)
from .satattack import (
    AttackResult,
    CircuitOracle,
    attack_report,
    build_platform_instance,
    sat_attack,
    verify_recovered_key,
)
from .sat_estimation import (
    EstimationModel,
    ExperimentRecord,
    build_model,
    estimate_attack_time,
    fit_quadratic,
    load_model,
    save_model,
)
from .aes import aes128_encrypt, aes128_encrypt_batch
from .powersim import (
    SubsystemConfig,
    SwitchingProfile,
    generate_plaintexts,
    load_subsystem_config_file,
    simulate_circuit_toggles,
    simulate_subsystem,
    windowed_toggle_samples,
)
from .pscmetrics import (
    EmpiricalDistribution,
    build_distribution,
    compare_profiles,
    js_divergence,
    kl_divergence,
    security_score,
    snr,
    tvla,
)
from .psc_estimation import (
    BenchmarkProfile,
    ProfileDatabase,
    build_profile_db,
    estimate_subsystem_score,
    map_ip,
    measure_subsystem_js,
)
from .assurance_metrics import (
    FsmSpec,
    FsmTransition,
    cdc,
    controllability,
    fsm_fi_vulnerability,
    observability,
    observation_hardness,
    puf_inter_hd,
    puf_intra_hd,
)

__all__ = [
    "AttackResult",
    "BenchParseError",
    "BenchmarkProfile",
    "Circuit",
    "CircuitMetadata",
    "CircuitOracle",
    "EmpiricalDistribution",
    "EstimationModel",
    "ExperimentRecord",
    "FrameModel",
    "FsmSpec",
    "FsmTransition",
    "Gate",
    "LockedCircuit",
    "LockingKey",
    "NetlistError",
    "ProfileDatabase",
    "ScanTopology",
    "SubsystemConfig",
    "SwitchingProfile",
    "aes128_encrypt",
    "aes128_encrypt_batch",
    "attack_report",
    "batch_evaluate",
    "build_distribution",
    "build_model",
    "build_platform_instance",
    "build_profile_db",
    "bundled_names",
    "cdc",
    "compare_profiles",
    "compose_platform_frame",
    "controllability",
    "estimate_attack_time",
    "estimate_subsystem_score",
    "evaluate",
    "evaluate_locked",
    "extract_metadata",
    "fit_quadratic",
    "fsm_fi_vulnerability",
    "generate_plaintexts",
    "insert_random_locking",
    "js_divergence",
    "kl_divergence",
    "load_bench",
    "load_bench_ref",
    "load_bundled",
    "load_locked",
    "load_model",
    "load_subsystem_config_file",
    "make_circuit",
    "map_ip",
    "measure_subsystem_js",
    "observability",
    "observation_hardness",
    "parse_bench",
    "puf_inter_hd",
    "puf_intra_hd",
    "random_input_matrix",
    "sat_attack",
    "save_bench",
    "save_locked",
    "save_model",
    "security_score",
    "simulate_circuit_toggles",
    "simulate_subsystem",
    "snr",
    "tvla",
    "verify_recovered_key",
    "windowed_toggle_samples",
    "write_bench",
]

__version__ = "0.1.0"
