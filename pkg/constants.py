"""
Constants for hull-lab
----------------------
Centralized tuning values for rewriting, truncation and witness search.
Loads from config.yaml if available, otherwise uses defaults.
"""
import logging
import yaml
from pathlib import Path
from typing import Any, Dict

logger = logging.getLogger('constants')


def load_config() -> Dict[str, Any]:
    """Load configuration from config.yaml or return empty dict if not found."""
    config_path = Path(__file__).parent / "config.yaml"
    if config_path.exists():
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                return yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            logger.warning(f"Could not load config.yaml: {e}")
    return {}

# Load configuration
_config = load_config()

# Helper function to get nested config values with defaults
def _get_config(path: str, default: Any) -> Any:
    """Get configuration value from nested dict using dot notation."""
    keys = path.split('.')
    value = _config
    for key in keys:
        if isinstance(value, dict) and key in value:
            value = value[key]
        else:
            return default
    return value

# String Rewriting
REWRITE_STEP_BUDGET = _get_config('rewriting.step_budget', 10000)
TAU_SEARCH_LENGTH_SLACK = _get_config('rewriting.tau_length_slack', 0)

# Truncation
BALL_SIZE_LIMIT = _get_config('truncation.ball_size_limit', 400000)
PROBE_MARGIN = _get_config('truncation.probe_margin', 2)
PROBE_RADIUS = _get_config('truncation.probe_radius', 3)
CONFLUENCE_WINDOW_MARGIN = _get_config('truncation.confluence_margin', 2)

# Constructible Ideals
CLOSURE_MAX_ROUNDS = _get_config('ideals.max_rounds', 50)
IDEAL_SHAPES = tuple(_get_config('ideals.shapes', ["principal", "family"]))
FAMILY_SYMBOLS = tuple(_get_config('ideals.family_symbols', []))
UPGRADE_RADIUS_DROP = _get_config('ideals.upgrade_radius_drop', 2)

# Semi-characters
LIMIT_TAIL_FRACTION = _get_config('spectrum.limit_tail_fraction', 1 / 3)

# Regularity
WITNESS_MAX_REMOVED = _get_config('regularity.witness_max_removed', 1)
INSTANCE_LIMIT = _get_config('regularity.instance_limit', 25)
SWEEP_MAX_LENGTH = _get_config('regularity.sweep_max_length', 4)

# Regular Representation
RESIDUAL_TOLERANCE = _get_config('regrep.residual_tolerance', 1e-12)

# General Settings
LOG_LEVEL = _get_config('general.log_level', 'WARNING')

# Performance Profiling
PROFILING_ENABLED = _get_config('profiling.enabled', False)
PROFILING_OUTPUT_FILE = _get_config('profiling.output_file', 'performance.log')
PROFILING_TRACK_HOT_PATHS = _get_config('profiling.track_hot_paths', True)
