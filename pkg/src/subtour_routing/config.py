"""Configuration module for the subtour routing toolkit."""
import os
from pathlib import Path
from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Load environment variables
load_dotenv()

class SubtourRoutingConfig(BaseModel):
    """Configuration for the solver, oracles and bench harness."""
    # Base directory for the project
    base_dir: Path = Field(
        default_factory=lambda: Path(os.getenv("SUBTOUR_BASE_DIR", "."))
    )
    # Benchmark results database
    results_db_path: Path = Field(
        default_factory=lambda: Path(
            os.getenv("SUBTOUR_RESULTS_DB", "data/db/bench.db")
        )
    )
    # Relative tolerance for validators and guarantee checks only
    tolerance: float = Field(
        default_factory=lambda: float(os.getenv("SUBTOUR_TOLERANCE", "1e-9"))
    )
    default_epsilon: float = Field(
        default_factory=lambda: float(os.getenv("SUBTOUR_EPSILON", "1.0"))
    )
    # Oracle guards
    oracle_max_delay_items: int = Field(default=8)
    oracle_max_cost_items: int = Field(default=4)
    # Generators refuse to materialize explicit metrics beyond this size
    max_explicit_points: int = Field(default=2500)
    bench_workers: int = Field(
        default_factory=lambda: int(os.getenv("SUBTOUR_BENCH_WORKERS", "1"))
    )
    # Significant digits for canonical JSON floats
    float_digits: int = Field(default=17)
    log_level: str = Field(
        default_factory=lambda: os.getenv("SUBTOUR_LOG_LEVEL", "INFO")
    )

    def get_absolute_path(self, path: Path) -> Path:
        """Convert a relative path to an absolute path based on base_dir."""
        if path.is_absolute():
            return path
        return self.base_dir / path

    def get_db_url(self) -> str:
        """Get the database URL for the SQLite results store."""
        db_path = self.get_absolute_path(self.results_db_path)
        db_path.parent.mkdir(parents=True, exist_ok=True)
        return f"sqlite:///{db_path}"

# Create a global config instance
config = SubtourRoutingConfig()
