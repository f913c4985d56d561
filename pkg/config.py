import logging
import sys
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field

class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix='HULL_LAB_', env_file='.env', env_file_encoding='utf-8', extra='ignore')

    corpus_dir: str = Field("corpora", description="Directory holding the built-in presentations")

    # Truncation defaults for CLI commands
    default_radius: int = Field(3, ge=0, description="Ball radius")
    default_window: str = Field("-1..1", description="Index window a..b")
    default_bound: int = Field(12, ge=0, description="Search bound for equivalence and division")
    default_budget: int = Field(500, ge=1, description="Budget for closures and witness searches")
    default_format: str = Field("text", description="Report format: text or json")

    # App Settings
    log_level: str = Field("WARNING", description="Logging level")

settings = Settings()

# Import LOG_LEVEL from constants (can be overridden by config.yaml)
try:
    from constants import LOG_LEVEL
    log_level = LOG_LEVEL
except ImportError:
    log_level = settings.log_level

# Configure Logging
try:
    from rich.console import Console
    from rich.logging import RichHandler
    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.WARNING),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True, markup=False)]
    )
except ImportError:
    # Fallback if rich is not installed
    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.WARNING),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)]
    )

logger = logging.getLogger("hull_lab")
