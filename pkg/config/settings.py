# config/settings.py
import os
from dataclasses import dataclass
from typing import Optional, Tuple

import dotenv


def _parse_bool(raw: str) -> bool:
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def parse_dims(raw: str) -> Tuple[int, int, int]:
    """Parse an "X,Y,Z" voxel-count string

    Args:
        raw: Comma separated dims, e.g. "192,192,32"

    Returns:
        Tuple of three integers (not validated for positivity)
    """
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if len(parts) != 3:
        raise ValueError(f"expected three comma separated dims, got {raw!r}")
    return tuple(int(p) for p in parts)  # type: ignore[return-value]


@dataclass(frozen=True)
class Settings:
    """Process-level settings for the loss bench"""
    log_level: str = "INFO"
    log_dir: str = "logs"
    log_to_file: bool = False
    tau_mm: float = 1.0
    target_dims: Tuple[int, int, int] = (192, 192, 32)
    workers: int = 1

    @classmethod
    def from_env(cls, env_file: Optional[str] = ".env") -> "Settings":
        """Build settings from LOSS_BENCH_* environment variables

        Args:
            env_file: Optional .env file loaded first; existing variables win

        Returns:
            Settings instance
        """
        if env_file:
            dotenv.load_dotenv(env_file, override=False)

        return cls(
            log_level=os.getenv("LOSS_BENCH_LOG_LEVEL", cls.log_level).upper(),
            log_dir=os.getenv("LOSS_BENCH_LOG_DIR", cls.log_dir),
            log_to_file=_parse_bool(os.getenv("LOSS_BENCH_LOG_TO_FILE", "false")),
            tau_mm=float(os.getenv("LOSS_BENCH_TAU_MM", cls.tau_mm)),
            target_dims=parse_dims(os.getenv("LOSS_BENCH_TARGET_DIMS", "192,192,32")),
            workers=max(1, int(os.getenv("LOSS_BENCH_WORKERS", cls.workers))),
        )
