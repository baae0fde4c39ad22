"""Seeded random specializations of "general point" claims.

General points are drawn with integer coordinates in [-97, 97], rejected
while they land on a visible special locus: a coordinate plane, one of the
30 configuration lines, one of the 10 fundamental quadrics, one of the 60
dual planes, a configuration point, or a previously drawn point.  Callers
resample again if a later check (distinct images, expected rank) detects
residual degeneracy.
"""

from __future__ import annotations

from random import Random

from .configuration import KleinConfiguration, ProjPoint

COORDINATE_BOUND = 97


class DegenerateSampleError(RuntimeError):
    pass


def draw_general_point(
    rng: Random,
    config: KleinConfiguration,
    avoid=(),
    max_tries: int = 64,
) -> ProjPoint:
    avoid = tuple(avoid)
    for _ in range(max_tries):
        coords = tuple(rng.randint(-COORDINATE_BOUND, COORDINATE_BOUND) for _ in range(4))
        if any(c == 0 for c in coords):
            continue
        point = ProjPoint(coords)
        if any(line.contains(point) for line in config.lines):
            continue
        if any(q.value_at(point.coords).is_zero for q in config.quadrics):
            continue
        # the 60 dual planes each contain configuration lines; a center on one
        # of them degenerates the projection of those lines
        if any(plane.contains(point) for plane in config.planes):
            continue
        if point in config.points or point in avoid:
            continue
        return point
    raise DegenerateSampleError(
        f"no non-degenerate point found in {max_tries} draws"
    )


def suite_rng(master_seed: int, offset: int) -> Random:
    """Per-suite generator: master seed fans out by a fixed counter scheme
    (seed * 1000 + offset), so suites can be reproduced in isolation."""
    return Random(master_seed * 1000 + offset)
