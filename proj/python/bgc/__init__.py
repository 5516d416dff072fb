"""Green coordinates for cages made of Bezier patches.

Typical use::

    cage = bgc.load_cage("cage.json")
    coords = bgc.coordinates(cage, vertices)            # (n, 3) array
    moved = bgc.deform(coords, cage, bgc.load_cage("target.json"))
"""

from ._bgc import (
    BgcError,
    Cage,
    Coordinates,
    coons_patch,
    constraint_rank,
    coordinates,
    deform,
    elevate_quads,
    green_integral,
    load_cage,
    load_coordinates,
    parse_cage,
    project,
    save_cage,
    save_coordinates,
    sigma,
    signed_solid_angle,
    tessellate,
    write_cage,
)

__all__ = [
    "BgcError",
    "Cage",
    "Coordinates",
    "coons_patch",
    "constraint_rank",
    "coordinates",
    "deform",
    "elevate_quads",
    "green_integral",
    "load_cage",
    "load_coordinates",
    "parse_cage",
    "project",
    "save_cage",
    "save_coordinates",
    "sigma",
    "signed_solid_angle",
    "tessellate",
    "write_cage",
]
