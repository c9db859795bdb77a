"""Room geometry for the indoor optical-wireless link.

Coordinates are metric, right-handed, with the origin in a floor corner and
z pointing up.  The ceiling plane sits at z = room_z_m; the lamp and the QKD
receiver both hang there facing down in the nominal layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DegenerateGeometryError",
    "Point3",
    "Pose",
    "LinkGeometry",
    "SurfacePatch",
    "SurfaceGrid",
    "RoomScenario",
    "link_geometry",
    "tessellate",
    "wall_and_floor_grids",
]

# Positions closer than this are treated as coincident (no defined link).
_COINCIDENT_EPS = 1e-12


class DegenerateGeometryError(ValueError):
    """Raised when a link between two coincident positions is requested."""


@dataclass(frozen=True, slots=True)
class Point3:
    x: float
    y: float
    z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def minus(self, other: "Point3") -> "Point3":
        return Point3(self.x - other.x, self.y - other.y, self.z - other.z)

    def dot(self, other: "Point3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Point3":
        n = self.norm()
        if n < _COINCIDENT_EPS:
            raise DegenerateGeometryError("cannot normalize a zero-length vector")
        return Point3(self.x / n, self.y / n, self.z / n)


@dataclass(frozen=True, slots=True)
class Pose:
    """A position plus a unit pointing axis (emission or acceptance axis)."""

    position: Point3
    axis: Point3

    def __post_init__(self) -> None:
        if abs(self.axis.norm() - 1.0) > 1e-9:
            raise ValueError(f"pose axis must be a unit vector, got norm {self.axis.norm()!r}")

    @classmethod
    def aimed_at(cls, position: Point3, target: Point3) -> "Pose":
        return cls(position, target.minus(position).normalized())


@dataclass(frozen=True, slots=True)
class LinkGeometry:
    """Scalars of a single emitter-to-collector line of sight.

    Angles are in radians: ``irradiance_angle`` is measured from the emitter
    axis to the line of sight, ``incidence_angle`` from the collector axis to
    the reverse line of sight.
    """

    distance: float
    irradiance_angle: float
    incidence_angle: float


@dataclass(frozen=True, slots=True)
class SurfacePatch:
    """A small flat reflecting element of a wall or the floor."""

    center: Point3
    normal: Point3
    area: float
    reflectivity: float


@dataclass(frozen=True, slots=True)
class SurfaceGrid:
    """Uniform rectangular tessellation of one room surface.

    ``origin`` is a surface corner; cell (i, j) has its center at
    origin + (i + 1/2) * cell_u * u_dir + (j + 1/2) * cell_v * v_dir.
    """

    origin: Point3
    u_dir: Point3
    v_dir: Point3
    normal: Point3
    n_u: int
    n_v: int
    cell_u: float
    cell_v: float
    reflectivity: float

    def patch_count(self) -> int:
        return self.n_u * self.n_v

    def area(self) -> float:
        return self.n_u * self.cell_u * self.n_v * self.cell_v


def _clamped_acos(x: float) -> float:
    # Dot products drift a few ulp outside [-1, 1]; clamp before acos.
    return math.acos(min(1.0, max(-1.0, x)))


def link_geometry(emitter: Pose, collector: Pose) -> LinkGeometry:
    """Distance and axis angles for the emitter -> collector line of sight."""
    offset = collector.position.minus(emitter.position)
    d = offset.norm()
    if d < _COINCIDENT_EPS:
        raise DegenerateGeometryError("emitter and collector positions coincide")
    direction = Point3(offset.x / d, offset.y / d, offset.z / d)
    irradiance = _clamped_acos(emitter.axis.dot(direction))
    incidence = _clamped_acos(collector.axis.dot(Point3(-direction.x, -direction.y, -direction.z)))
    return LinkGeometry(distance=d, irradiance_angle=irradiance, incidence_angle=incidence)


@dataclass(frozen=True, slots=True)
class RoomScenario:
    """Complete static description of one evaluation setup.

    Distances in meters, angles in degrees, spectral densities in W/nm
    (source) and W/nm/m^2 (ambient irradiance).  The frozen dataclass is
    hashable so derived quantities can be memoized per scenario.
    """

    room_x_m: float
    room_y_m: float
    room_z_m: float
    wall_reflectivity: float
    floor_reflectivity: float

    lamp: Pose
    lamp_semi_angle_deg: float
    lamp_psd_w_per_nm: float

    transmitter: Pose
    tx_semi_angle_deg: float

    receiver: Pose
    fov_deg: float
    detector_area_m2: float
    concentrator_index: float
    filter_transmission: float
    filter_bandwidth_nm: float

    ambient_irradiance_w_nm_m2: float = 0.0

    def __post_init__(self) -> None:
        if min(self.room_x_m, self.room_y_m, self.room_z_m) <= 0.0:
            raise ValueError("room dimensions must be positive")
        for name in ("wall_reflectivity", "floor_reflectivity"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        for name in ("lamp_semi_angle_deg", "tx_semi_angle_deg", "fov_deg"):
            value = getattr(self, name)
            if not 0.0 < value <= 90.0:
                raise ValueError(f"{name} must lie in (0, 90] degrees, got {value!r}")
        if self.detector_area_m2 <= 0.0:
            raise ValueError("detector_area_m2 must be positive")
        if self.concentrator_index < 1.0:
            raise ValueError("concentrator_index must be >= 1")
        if not 0.0 < self.filter_transmission <= 1.0:
            raise ValueError("filter_transmission must lie in (0, 1]")
        if self.filter_bandwidth_nm <= 0.0:
            raise ValueError("filter_bandwidth_nm must be positive")
        if self.lamp_psd_w_per_nm < 0.0 or self.ambient_irradiance_w_nm_m2 < 0.0:
            raise ValueError("spectral densities must be non-negative")
        for name in ("lamp", "transmitter", "receiver"):
            pos = getattr(self, name).position
            if not (
                0.0 <= pos.x <= self.room_x_m
                and 0.0 <= pos.y <= self.room_y_m
                and 0.0 <= pos.z <= self.room_z_m
            ):
                raise ValueError(f"{name} position {pos} lies outside the room volume")


def wall_and_floor_grids(room: RoomScenario, patches_per_meter: int) -> tuple[SurfaceGrid, ...]:
    """Tessellations of the floor and the four walls (the ceiling emits, it
    does not reflect in the single-bounce model).

    Cell counts round to the nearest integer per meter so the grids always
    cover each surface exactly; cell size absorbs the remainder.
    """
    if patches_per_meter < 1:
        raise ValueError("patches_per_meter must be a positive integer")
    x, y, z = room.room_x_m, room.room_y_m, room.room_z_m
    r_wall, r_floor = room.wall_reflectivity, room.floor_reflectivity

    def cells(length: float) -> int:
        return max(1, round(length * patches_per_meter))

    ex = Point3(1.0, 0.0, 0.0)
    ey = Point3(0.0, 1.0, 0.0)
    ez = Point3(0.0, 0.0, 1.0)
    o = Point3(0.0, 0.0, 0.0)

    def grid(origin, u_dir, v_dir, normal, len_u, len_v, refl) -> SurfaceGrid:
        n_u, n_v = cells(len_u), cells(len_v)
        return SurfaceGrid(
            origin=origin,
            u_dir=u_dir,
            v_dir=v_dir,
            normal=normal,
            n_u=n_u,
            n_v=n_v,
            cell_u=len_u / n_u,
            cell_v=len_v / n_v,
            reflectivity=refl,
        )

    return (
        grid(o, ex, ey, ez, x, y, r_floor),                                  # floor, faces up
        grid(o, ey, ez, ex, y, z, r_wall),                                   # wall x = 0
        grid(Point3(x, 0.0, 0.0), ey, ez, Point3(-1.0, 0.0, 0.0), y, z, r_wall),  # wall x = X
        grid(o, ex, ez, ey, x, z, r_wall),                                   # wall y = 0
        grid(Point3(0.0, y, 0.0), ex, ez, Point3(0.0, -1.0, 0.0), x, z, r_wall),  # wall y = Y
    )


def tessellate(room: RoomScenario, patches_per_meter: int) -> list[SurfacePatch]:
    """Flat list of midpoint patches over the floor and the four walls."""
    patches: list[SurfacePatch] = []
    for g in wall_and_floor_grids(room, patches_per_meter):
        area = g.cell_u * g.cell_v
        for i in range(g.n_u):
            cu = (i + 0.5) * g.cell_u
            for j in range(g.n_v):
                cv = (j + 0.5) * g.cell_v
                center = Point3(
                    g.origin.x + cu * g.u_dir.x + cv * g.v_dir.x,
                    g.origin.y + cu * g.u_dir.y + cv * g.v_dir.y,
                    g.origin.z + cu * g.u_dir.z + cv * g.v_dir.z,
                )
                patches.append(
                    SurfacePatch(center=center, normal=g.normal, area=area, reflectivity=g.reflectivity)
                )
    return patches
