"""Configuration management for the WENO benchmark runner."""
import logging
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Central configuration: environment overrides plus the numerical defaults."""

    # Output directory
    OUTPUT_DIR = Path(os.getenv("WENO_OUTPUT_DIR", "./data/outputs"))

    # Case-level parallelism (independent scheme/resolution cases)
    WORKERS = int(os.getenv("WENO_WORKERS", "1"))

    LOG_LEVEL = os.getenv("WENO_LOG_LEVEL", "INFO").upper()

    # Time loop logs a progress line every this many steps
    PROGRESS_EVERY = int(os.getenv("WENO_PROGRESS_EVERY", "1000"))

    # Weight settings
    EPSILON = 1e-40
    P = 2
    THETA = 0.1
    NIP_EXPONENT = 1.5
    ZA_GAMMA1 = 1.0
    ZA_GAMMA2 = 13.0 / 12.0

    # Ideal gas
    GAMMA = 1.4

    # Cell averages of smooth data
    QUADRATURE_POINTS = 5

    @classmethod
    def validate(cls):
        """Validate settings and create the output directory."""
        if cls.WORKERS < 1:
            raise ValueError(f"WENO_WORKERS must be >= 1, got {cls.WORKERS}")
        if not isinstance(logging.getLevelName(cls.LOG_LEVEL), int):
            raise ValueError(f"WENO_LOG_LEVEL '{cls.LOG_LEVEL}' is not a logging level")
        if cls.PROGRESS_EVERY < 1:
            raise ValueError("WENO_PROGRESS_EVERY must be >= 1")

        cls.OUTPUT_DIR.mkdir(parents=True, exist_ok=True)

        return True
