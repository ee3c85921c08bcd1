"""UWB radar imaging of transformer windings and axial displacement measurement."""

from .analysis import (
    AnalysisParams,
    DisplacementReport,
    GrayImage,
    StripReport,
    StructElement,
    analyze_image,
    estimate_displacement,
)
from .core import (
    AScan,
    BScan,
    ImageGrid,
    PulseSpec,
    RadarImage,
    SamplingSpec,
    ScanGeometry,
    resolution_x,
    synthesize_pulse,
)
from .forward_sim import Scatterer, SceneModel, displace_scene, make_winding_scene, simulate_bscan
from .migration import DasParams, KirchhoffParams, das_migrate, kirchhoff_migrate

__version__ = "0.1.0"
