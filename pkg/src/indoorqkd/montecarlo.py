"""Monte-Carlo estimate of the single-bounce lamp-to-receiver gain.

This is a validation path for the deterministic patch sum in the channel
module and deliberately shares none of its machinery: rays are sampled from
the lamp's Lambertian lobe, traced to their first wall or floor hit, and the
last bounce into the receiver is folded in analytically (next-event
estimation).  The expectation of the per-ray contribution equals the same
double integral the patch sum approximates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import RoomScenario

__all__ = ["McEstimate", "estimate_reflected_gain"]


@dataclass(frozen=True, slots=True)
class McEstimate:
    value: float
    std_error: float
    samples: int


def estimate_reflected_gain(
    room: RoomScenario,
    samples: int = 10_000_000,
    seed: int = 0,
    chunk_size: int = 2_000_000,
) -> McEstimate:
    """Seeded Monte-Carlo value of the summed bounce gain.

    Directions leave the lamp with probability density proportional to
    cos(phi)^m1 (sampled by inverting 1 - cos(phi)^(m1+1)), so the lobe
    factor and the first cosine of the bounce integrand are absorbed into
    the sampling measure and each ray only carries the reflect-and-collect
    term of its hit point.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    m1 = -math.log(2.0) / math.log(math.cos(math.radians(room.lamp_semi_angle_deg)))
    fov_rad = math.radians(room.fov_deg)
    sin_fov = math.sin(fov_rad)
    g_in = room.concentrator_index**2 / (sin_fov * sin_fov)
    cos_fov = math.cos(fov_rad)

    lamp_pos = np.array(room.lamp.position.as_tuple())
    lamp_axis = np.array(room.lamp.axis.as_tuple())
    rx_pos = np.array(room.receiver.position.as_tuple())
    rx_axis = np.array(room.receiver.axis.as_tuple())
    e1, e2 = _frame(lamp_axis)

    dims = np.array([room.room_x_m, room.room_y_m, room.room_z_m])
    rng = np.random.default_rng(seed)

    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        n = min(chunk_size, samples - done)
        contrib = _chunk(
            rng, n, m1, lamp_pos, lamp_axis, e1, e2, dims,
            room.wall_reflectivity, room.floor_reflectivity,
            rx_pos, rx_axis, cos_fov, g_in,
            room.detector_area_m2, room.filter_transmission,
        )
        total += float(np.sum(contrib))
        total_sq += float(np.sum(contrib * contrib))
        done += n

    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return McEstimate(value=mean, std_error=math.sqrt(var / samples), samples=samples)


def _frame(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Any orthonormal pair completing ``axis`` to a right-handed frame."""
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    return e1, e2


def _chunk(
    rng: np.random.Generator,
    n: int,
    m1: float,
    lamp_pos: np.ndarray,
    lamp_axis: np.ndarray,
    e1: np.ndarray,
    e2: np.ndarray,
    dims: np.ndarray,
    r_wall: float,
    r_floor: float,
    rx_pos: np.ndarray,
    rx_axis: np.ndarray,
    cos_fov: float,
    g_in: float,
    area: float,
    t_s: float,
) -> np.ndarray:
    cos_phi = rng.random(n) ** (1.0 / (m1 + 1.0))
    sin_phi = np.sqrt(np.clip(1.0 - cos_phi * cos_phi, 0.0, None))
    azim = rng.random(n) * (2.0 * math.pi)
    dirs = (
        cos_phi[:, None] * lamp_axis
        + (sin_phi * np.cos(azim))[:, None] * e1
        + (sin_phi * np.sin(azim))[:, None] * e2
    )

    # First hit among the five absorbing-or-reflecting planes (ceiling rays
    # are dropped; it carries the lamp, not a reflector).
    big = np.full(n, np.inf)
    t_best = big.copy()
    surf = np.full(n, -1, dtype=np.int8)  # 0 floor, 1..4 walls

    def consider(t: np.ndarray, valid: np.ndarray, tag: int) -> None:
        nonlocal t_best, surf
        t = np.where(valid & (t > 1e-12), t, np.inf)
        better = t < t_best
        t_best = np.where(better, t, t_best)
        surf = np.where(better, np.int8(tag), surf)

    dx, dy, dz = dirs[:, 0], dirs[:, 1], dirs[:, 2]
    px, py, pz = lamp_pos
    consider(-pz / np.where(dz != 0.0, dz, 1.0), dz < 0.0, 0)
    consider(-px / np.where(dx != 0.0, dx, 1.0), dx < 0.0, 1)
    consider((dims[0] - px) / np.where(dx != 0.0, dx, 1.0), dx > 0.0, 2)
    consider(-py / np.where(dy != 0.0, dy, 1.0), dy < 0.0, 3)
    consider((dims[1] - py) / np.where(dy != 0.0, dy, 1.0), dy > 0.0, 4)

    hit = np.isfinite(t_best)
    t_safe = np.where(hit, t_best, 0.0)
    points = lamp_pos + t_safe[:, None] * dirs

    normals = np.zeros((n, 3))
    normals[surf == 0] = [0.0, 0.0, 1.0]
    normals[surf == 1] = [1.0, 0.0, 0.0]
    normals[surf == 2] = [-1.0, 0.0, 0.0]
    normals[surf == 3] = [0.0, 1.0, 0.0]
    normals[surf == 4] = [0.0, -1.0, 0.0]
    refl = np.where(surf == 0, r_floor, r_wall)

    v = rx_pos - points
    d2 = np.linalg.norm(v, axis=1)
    d2 = np.where(d2 > 1e-12, d2, 1.0)
    cos_beta = np.clip(np.einsum("ij,ij->i", v, normals) / d2, 0.0, None)
    cos_psi = np.clip(-np.einsum("ij,j->i", v, rx_axis) / d2, 0.0, None)
    in_fov = cos_psi >= cos_fov

    contrib = refl * t_s * area * g_in * cos_beta * cos_psi / (math.pi * d2 * d2)
    return np.where(hit & in_fov, contrib, 0.0)
