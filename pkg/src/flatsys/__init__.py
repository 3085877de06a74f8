"""Translation surfaces: systoles, saddle connections and extremal surfaces."""

from .geometry import APPROX, EXACT, TAU, Mat2, ModeError, Vec2
from .qfield import QScalar, format_literal, parse_literal
from .surface import (
    EdgeRef,
    StratumSignature,
    Surface,
    SurfaceError,
    apply_matrix,
    build_surface,
    load_surface,
    loads_surface,
    dumps_surface,
    normalize_area,
    save_surface,
    scale,
    to_approx,
)
from .triangulation import Triangulation, flip_to_delaunay, triangulate
from .saddle import (
    HAVE_EXTENSION,
    BudgetExceeded,
    SaddleConnection,
    SystoleReport,
    enumerate_saddle_connections,
    systole,
)
from .delaunay import carnot_audit, delaunay_contains_shortest, delaunay_triangulation
from .extremal import (
    CylinderSpec,
    chain_glue,
    global_max_surface,
    named_example,
    one_cylinder_origami,
    rigid_family,
    slit_glue,
)
from .verify import (
    Deformation,
    build_period_basis,
    check_global_max,
    check_local_max_criterion,
    classify_decomposition,
    first_order_rigidity,
    kissing_audit,
    perturb,
    perturbation_probe,
)

__version__ = "0.1.0"
