from .sphere_mesh import (
    SPHERE_AREA,
    CellSet,
    SphereFunction,
    SphereMesh,
    build_icosphere,
    cap_area,
    cap_colatitude,
    cap_perimeter,
    coordinate,
    geodesic_bump,
    polar_cap,
    random_set,
    smooth_random_function,
)
from .stereographic import (
    PlaneFunction,
    conformal_factor,
    conformal_transport,
    pull_back,
    stereographic_forward,
    stereographic_inverse,
)

__all__ = [
    "SPHERE_AREA",
    "CellSet",
    "SphereFunction",
    "SphereMesh",
    "build_icosphere",
    "cap_area",
    "cap_colatitude",
    "cap_perimeter",
    "coordinate",
    "geodesic_bump",
    "polar_cap",
    "random_set",
    "smooth_random_function",
    "PlaneFunction",
    "conformal_factor",
    "conformal_transport",
    "pull_back",
    "stereographic_forward",
    "stereographic_inverse",
]
