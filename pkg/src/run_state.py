"""State passed between the nodes of the case pipeline."""
from typing import Dict, List, Optional, TypedDict

from src.hyperbolic_solver import Field
from src.run_config import RunConfig


class RunState(TypedDict, total=False):
    """
    One (problem, scheme) case as it moves through the pipeline. Each node
    reads what it needs and returns only the keys it changes.
    """

    # Input
    config: RunConfig
    scheme: str
    stem: str  # shared file-name prefix of every artifact of the case

    # Solution
    field: Optional[Field]
    initial_bounds: tuple  # range of the first component at t = 0
    steps: int

    # Measurements
    errors: Dict  # L1 / Linf against the exact solution
    oscillation: Dict
    imr_summary: Dict

    # Metadata
    status: str  # initialized, evolved, diverged, error, complete
    error_message: Optional[str]
    partial: bool  # artifacts written after a failure

    # Output
    artifacts: List[str]
    summary_path: Optional[str]
