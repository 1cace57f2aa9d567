import json
import logging
import os
from typing import Literal, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from src.sampling.criterion import DEFAULT_INITIAL_GRID, DEFAULT_REFINE_LEVELS, TOL_DET
from src.sampling.kernels import J_DYN, TOL_INV
from src.sampling.multiplier import TOL_ROOT
from src.sampling.reconstruct import DEFAULT_PROBES
from src.utils.quadrature import DEFAULT_ORDER, DEFAULT_PERIODS_PER_PANEL

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

# Settings file path
SETTINGS_FILE = os.path.join(os.path.dirname(os.path.dirname(__file__)), "settings.json")


class MultiplierSettings(BaseModel):
    tol_root: float = Field(default=TOL_ROOT, gt=0)
    root_scan_grid: int = Field(default=4096, ge=16)


class CriterionSettings(BaseModel):
    tol_det: float = Field(default=TOL_DET, gt=0)
    initial_grid: int = Field(default=DEFAULT_INITIAL_GRID, ge=16)
    refine_levels: int = Field(default=DEFAULT_REFINE_LEVELS, ge=0)
    polish: bool = True


class KernelSettings(BaseModel):
    grid_per_piece: int = Field(default=DEFAULT_ORDER, ge=2)
    tol_inv: float = Field(default=TOL_INV, gt=0)
    dynamical_method: Literal["periodized", "series"] = "periodized"
    j_dyn: int = Field(default=J_DYN, ge=1)
    j_range: int = Field(default=3, ge=0)
    x_range: Tuple[float, float] = (-4.0, 4.0)
    x_points: int = Field(default=81, ge=1)


class SignalSettings(BaseModel):
    quad_order: int = Field(default=DEFAULT_ORDER, ge=2)
    periods_per_panel: float = Field(default=DEFAULT_PERIODS_PER_PANEL, gt=0)


class ReconstructSettings(BaseModel):
    M: int = Field(default=60, ge=0)
    probes: int = Field(default=DEFAULT_PROBES, ge=1)
    grid_range: Tuple[float, float] = (-2.0, 2.0)
    grid_points: int = Field(default=201, ge=1)


class OutputSettings(BaseModel):
    directory: str = "output"


class SamplingSettings(BaseModel):
    """Every tolerance and default used by the command-line tools"""

    multiplier: MultiplierSettings = Field(default_factory=MultiplierSettings)
    criterion: CriterionSettings = Field(default_factory=CriterionSettings)
    kernels: KernelSettings = Field(default_factory=KernelSettings)
    signals: SignalSettings = Field(default_factory=SignalSettings)
    reconstruct: ReconstructSettings = Field(default_factory=ReconstructSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    def profile_options(self) -> dict:
        """Keyword arguments for det_profile"""
        return self.criterion.model_dump()


def settings_path(path: Optional[str] = None) -> str:
    """Explicit path, else SAMPLING_SETTINGS, else settings.json next to the package"""
    return path or os.getenv("SAMPLING_SETTINGS") or SETTINGS_FILE


def load_settings(path: Optional[str] = None) -> SamplingSettings:
    """Load settings from file or create default settings"""
    path = settings_path(path)
    if os.path.exists(path):
        try:
            with open(path, "r") as f:
                return SamplingSettings.model_validate(json.load(f))
        except (OSError, ValueError, ValidationError) as e:
            logger.error(f"Error loading settings from {path}: {e}")
            return create_default_settings()
    else:
        logger.debug(f"No settings file at {path}; using defaults")
        return create_default_settings()


def save_settings(settings: SamplingSettings, path: Optional[str] = None) -> bool:
    """Save settings to file"""
    path = settings_path(path)
    try:
        with open(path, "w") as f:
            f.write(settings.model_dump_json(indent=2))
        return True
    except OSError as e:
        logger.error(f"Error saving settings: {e}")
        return False


def create_default_settings() -> SamplingSettings:
    """Create default settings"""
    return SamplingSettings()
