"""Bug hunting for sequential AIGER circuits.

The main engine explores reachable states extracted from boundary-point
encodings of resolution proofs that one-step safety holds; a random-walk
searcher and a bounded model checker are included as baselines.
"""

from .aiger import (
    AigerError,
    AigModel,
    InputVector,
    State,
    UnsupportedModelError,
    eval_bad,
    initial_state,
    parse_aiger,
    simulate_step,
    write_ascii,
)
from .cnf import Cnf, VarMap, decode_model, encode_bad_check, encode_step_formula, to_dimacs
from .sat import (
    Point,
    ResolutionProof,
    ResolutionStep,
    SatResult,
    check_proof,
    resolve,
    solve,
)
from .proofenc import BoundaryPoint, PointEncoding, enc_clause, enc_resolutions, is_legal_resolution, project_tests
from .engine import (
    Counterexample,
    EngineConfig,
    OracleResult,
    StateStore,
    Verdict,
    explicit_oracle,
    run_tapseq,
)
from .baselines import BmcConfig, RandConfig, run_bmc, run_rand
from .witness import format_witness, validate_witness

__all__ = [name for name in dir() if not name.startswith("_")]
