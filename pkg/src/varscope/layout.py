"""Recursive-disk geometry for a variability model.

Translation units are gray disks, composites purple disks nested inside
them, functions blue ring segments with area proportional to lines of
code, variables yellow segments of fixed area.  Geometry depends only on
the model, never on a configuration: toggling flags changes rendering
transparency downstream, not shape.

Angles grow clockwise on screen (y axis points down); segments start at
angle 0 and are separated by a fixed gap.  Siblings are packed by walking
an Archimedean spiral outward from the largest disk until a free spot is
found.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .extractor import Entity
from .model import VariabilityModel

LAYOUT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class LayoutConfig:
    """Tunables; the defaults are the calibrated values used everywhere."""

    scale_k: float = 1.0  # segment area per line of code
    var_loc_equivalent: float = 5.0  # variable segment area = 5-LOC function
    gap_radians: float = math.radians(2.0)
    probe_step: float = 2.0 * math.pi / 64.0
    pack_margin_frac: float = 0.02  # of the larger radius
    core_min_radius: float = 2.0
    child_margin: float = 0.5
    rim_pad: float = 0.75


@dataclass
class Segment:
    entity_id: str
    start_angle: float
    end_angle: float
    inner_radius: float
    outer_radius: float
    color_class: str  # function-blue | variable-yellow
    area: float


@dataclass
class Disk:
    entity_id: str
    center: tuple[float, float]
    radius: float
    ring_inner: float
    ring_outer: float
    color_class: str  # unit-gray | composite-purple
    children: list["Disk"] = field(default_factory=list)
    segments: list[Segment] = field(default_factory=list)


@dataclass
class LayoutDocument:
    scale_k: float
    disks: list[Disk]  # top-level translation units


# --------------------------------------------------------------------------
# packing


def pack_disks(radii: list[float], config: LayoutConfig = LayoutConfig()) -> list[tuple[float, float]]:
    """Centers for sibling disks, given radii sorted descending.

    The largest disk sits at the origin; each next disk walks an
    Archimedean spiral clockwise from angle 0 (pitch: smallest pending
    radius) and takes the first position that clears every placed disk by
    the 2% margin.
    """
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    if any(radii[k] < radii[k + 1] for k in range(len(radii) - 1)):
        raise ValueError("radii must be sorted descending")
    centers: list[tuple[float, float]] = []
    for index, radius in enumerate(radii):
        if index == 0:
            centers.append((0.0, 0.0))
            continue
        pitch = min(radii[index:])
        angle = 0.0
        while True:
            spiral_radius = pitch * angle / (2.0 * math.pi)
            x = spiral_radius * math.cos(angle)
            y = spiral_radius * math.sin(angle)
            ok = True
            for (cx, cy), placed_radius in zip(centers, radii):
                # margin applied to the radius sum; this also clears the
                # 2%-of-larger-radius minimum for every pair
                needed = (radius + placed_radius) * (1.0 + config.pack_margin_frac)
                if math.hypot(x - cx, y - cy) < needed:
                    ok = False
                    break
            if ok:
                centers.append((x, y))
                break
            angle += config.probe_step
    return centers


# --------------------------------------------------------------------------
# segments


def assign_segments(
    functions: list[Entity],
    variables: list[Entity],
    ring_inner: float,
    config: LayoutConfig = LayoutConfig(),
) -> tuple[list[Segment], float]:
    """Two segment rings: variables (fixed area) inside, functions
    (LOC-proportional area) outside.  Returns the segments and the outer
    ring radius.  Within each ring segments run clockwise from angle 0 in
    descending area order with a fixed gap after each."""
    k = config.scale_k
    segments: list[Segment] = []

    def ring(members: list[tuple[str, float, str]], r_in: float) -> float:
        if not members:
            return r_in
        total_area = sum(area for _i, area, _c in members)
        available = 2.0 * math.pi - len(members) * config.gap_radians
        r_out = math.sqrt(r_in * r_in + 2.0 * total_area / available)
        denominator = r_out * r_out - r_in * r_in
        cursor = 0.0
        for entity_id, area, color in members:
            theta = 2.0 * area / denominator
            segments.append(
                Segment(entity_id, cursor, cursor + theta, r_in, r_out, color, area)
            )
            cursor += theta + config.gap_radians
        return r_out

    var_members = [
        (v.id, config.var_loc_equivalent * k, "variable-yellow")
        for v in sorted(variables, key=lambda e: e.id)
    ]
    mid_radius = ring(var_members, ring_inner)
    fn_members = [
        (f.id, k * max(f.loc or 1, 1), "function-blue")
        for f in sorted(functions, key=lambda e: (-(e.loc or 1), e.id))
    ]
    outer_radius = ring(fn_members, mid_radius)
    return segments, outer_radius


# --------------------------------------------------------------------------
# layout


def compute_layout(
    model: VariabilityModel, config: LayoutConfig = LayoutConfig()
) -> LayoutDocument:
    """Geometry for every entity in the model (configurations never change
    it).  Deterministic: identical models produce identical documents."""
    units = sorted(
        (e for e in model.entities.values() if e.kind == "TranslationUnit"),
        key=lambda e: e.id,
    )
    children: dict[str, list[Entity]] = {u.id: [] for u in units}
    for entity in model.entities.values():
        if entity.parent is not None and entity.parent in children:
            children[entity.parent].append(entity)

    unit_disks: list[Disk] = []
    for unit in units:
        members = children[unit.id]
        functions = [e for e in members if e.kind == "Function"]
        variables = [e for e in members if e.kind == "GlobalVariable"]
        composites = [e for e in members if e.kind in ("Struct", "Union", "Enum")]

        composite_disks = [
            Disk(
                entity_id=c.id,
                center=(0.0, 0.0),
                radius=max(
                    config.core_min_radius,
                    math.sqrt(config.scale_k * max(c.loc or 1, 1) / math.pi),
                ),
                ring_inner=0.0,
                ring_outer=0.0,
                color_class="composite-purple",
            )
            for c in composites
        ]
        composite_disks.sort(key=lambda d: (-d.radius, d.entity_id))
        if composite_disks:
            centers = pack_disks([d.radius for d in composite_disks], config)
            enclosing = 0.0
            for disk, center in zip(composite_disks, centers):
                disk.center = center
                enclosing = max(enclosing, math.hypot(*center) + disk.radius)
            ring_inner = enclosing + config.child_margin
        else:
            ring_inner = config.core_min_radius
        ring_inner = max(ring_inner, config.core_min_radius)

        segments, ring_outer = assign_segments(functions, variables, ring_inner, config)
        unit_disks.append(
            Disk(
                entity_id=unit.id,
                center=(0.0, 0.0),
                radius=ring_outer + config.rim_pad,
                ring_inner=ring_inner,
                ring_outer=ring_outer,
                color_class="unit-gray",
                children=composite_disks,
                segments=segments,
            )
        )

    unit_disks.sort(key=lambda d: (-d.radius, d.entity_id))
    if unit_disks:
        centers = pack_disks([d.radius for d in unit_disks], config)
        for disk, center in zip(unit_disks, centers):
            _translate(disk, center)
    return LayoutDocument(scale_k=config.scale_k, disks=unit_disks)


def _translate(disk: Disk, offset: tuple[float, float]) -> None:
    disk.center = (disk.center[0] + offset[0], disk.center[1] + offset[1])
    for child in disk.children:
        _translate(child, offset)


# --------------------------------------------------------------------------
# serialization


def _round9(value: float) -> float:
    return float(f"{value:.9g}")


def layout_to_document(layout: LayoutDocument) -> dict:
    segments: list[dict] = []

    def disk_node(disk: Disk) -> dict:
        for segment in disk.segments:
            segments.append(
                {
                    "disk": disk.entity_id,
                    "entity_id": segment.entity_id,
                    "start_angle": _round9(segment.start_angle),
                    "end_angle": _round9(segment.end_angle),
                    "inner_radius": _round9(segment.inner_radius),
                    "outer_radius": _round9(segment.outer_radius),
                    "color_class": segment.color_class,
                    "area": _round9(segment.area),
                }
            )
        return {
            "entity_id": disk.entity_id,
            "center": [_round9(disk.center[0]), _round9(disk.center[1])],
            "radius": _round9(disk.radius),
            "ring_inner": _round9(disk.ring_inner),
            "ring_outer": _round9(disk.ring_outer),
            "color_class": disk.color_class,
            "children": [disk_node(c) for c in disk.children],
        }

    disks = [disk_node(d) for d in layout.disks]
    return {
        "schema_version": LAYOUT_SCHEMA_VERSION,
        "scale_k": _round9(layout.scale_k),
        "disks": disks,
        "segments": segments,
    }


def save_layout(layout: LayoutDocument, path: Path | str) -> None:
    Path(path).write_text(
        json.dumps(layout_to_document(layout), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
