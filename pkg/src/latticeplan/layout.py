"""Tile-level floorplans for adder and lookup computations.

Grid cells are logical patches. Factories keep their 15x8 footprint, each
with two 4x3 fixup boxes facing the central MAJ strip, and one-wide gap
lanes run between factory columns so every data row can route to the
strip.
"""

from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction
from typing import Iterable

from .exceptions import CapacityError
from .factory import FactorySpec

ROLES = (
    "ccz_factory",
    "fixup_box",
    "data_row_target",
    "data_row_offset",
    "data_row_idle",
    "access_row",
    "access_corridor",
    "maj_area",
    "gap",
    "unused",
)

ROLE_COLORS = {
    "ccz_factory": "#c9a227",
    "fixup_box": "#e4d08a",
    "data_row_target": "#3a6ea5",
    "data_row_offset": "#7fa8d0",
    "data_row_idle": "#c5d5e8",
    "access_row": "#9fd49f",
    "access_corridor": "#4c9a4c",
    "maj_area": "#b85450",
    "gap": "#f2f2f2",
    "unused": "#ffffff",
}

FACTORY_W, FACTORY_H = 15, 8
MAJ_STRIP_H = 3


@dataclasses.dataclass(frozen=True)
class Floorplan:
    width: int
    height: int
    patch_distance: int
    grid: tuple[tuple[str, ...], ...]
    factories: tuple[tuple[int, int], ...]
    fixup_boxes: tuple[tuple[int, int, int, int], ...]
    lanes: tuple[int, ...]
    meta: dict

    def __post_init__(self) -> None:
        if len(self.grid) != self.height:
            raise ValueError("grid height mismatch")
        for row in self.grid:
            if len(row) != self.width:
                raise ValueError("grid width mismatch")
            for role in row:
                if role not in ROLES:
                    raise ValueError(f"unknown role {role!r}")

    def role_at(self, x: int, y: int) -> str:
        return self.grid[y][x]

    def count(self, role: str) -> int:
        return sum(row.count(role) for row in self.grid)


def data_row_capacity(width: int, n_lanes: int, stride: int = 2) -> int:
    """Patches per data row: lanes are excluded and patches sit every
    `stride` columns, leaving surgery access space in between."""
    usable = width - n_lanes
    return math.ceil(usable / stride)


def plan_adder_layout(bits: int, spec: FactorySpec, n_factories: int, *,
                      stride: int = 2, fixup_size: tuple[int, int] = (4, 3),
                      max_data_rows: int = 40) -> Floorplan:
    """Factories split front/back of the MAJ strip; target and offset
    register rows alternate in the data regions above and below."""
    if bits < 2:
        raise ValueError("adder needs at least 2 bits")
    if n_factories < 2:
        raise ValueError("need at least 2 factories (one per side)")
    front = math.ceil(n_factories / 2)
    back = n_factories - front
    if front >= 2:
        width = 16 * front - 1
        lanes = tuple(16 * i + FACTORY_W for i in range(front - 1))
    else:
        width = FACTORY_W + 1
        lanes = (FACTORY_W,)

    cap = data_row_capacity(width, len(lanes), stride)
    target_rows = math.ceil(bits / cap)
    offset_rows = math.ceil((bits - 1) / cap)
    total_rows = target_rows + offset_rows
    if total_rows > 2 * max_data_rows:
        need_cap = math.ceil((2 * bits - 1) / (2 * max_data_rows))
        need_w = (need_cap * stride - 1) + len(lanes)
        raise CapacityError(
            f"{bits}-bit adder needs {total_rows} data rows but only "
            f"{2 * max_data_rows} fit; need width >= {need_w} "
            f"(have {width})")
    sequence = []
    for i in range(total_rows):
        sequence.append("data_row_target" if i % 2 == 0
                        else "data_row_offset")
    top_rows = sequence[:math.ceil(total_rows / 2)]
    bottom_rows = sequence[math.ceil(total_rows / 2):]

    fw, fh = fixup_size
    fixup_band_h = fh
    height = (len(top_rows) + FACTORY_H + fixup_band_h + MAJ_STRIP_H
              + fixup_band_h + FACTORY_H + len(bottom_rows))
    grid = [["unused"] * width for _ in range(height)]

    y = 0
    for role in top_rows:
        for x in range(width):
            grid[y][x] = role
        y += 1
    front_band = y
    y += FACTORY_H
    front_fixups = y
    for row in range(front_fixups, front_fixups + fixup_band_h):
        for x in range(width):
            grid[row][x] = "gap"
    y += fixup_band_h
    maj_top = y
    for row in range(maj_top, maj_top + MAJ_STRIP_H):
        for x in range(width):
            grid[row][x] = "maj_area"
    y += MAJ_STRIP_H
    back_fixups = y
    for row in range(back_fixups, back_fixups + fixup_band_h):
        for x in range(width):
            grid[row][x] = "gap"
    y += fixup_band_h
    back_band = y
    y += FACTORY_H
    for role in bottom_rows:
        for x in range(width):
            grid[y][x] = role
        y += 1

    factories: list[tuple[int, int]] = []
    fixup_boxes: list[tuple[int, int, int, int]] = []
    for side, count, band_y, fix_y in (
            ("front", front, front_band, front_fixups),
            ("back", back, back_band, back_fixups)):
        for i in range(count):
            fx = 16 * i
            factories.append((fx, band_y))
            for yy in range(band_y, band_y + FACTORY_H):
                for xx in range(fx, fx + FACTORY_W):
                    grid[yy][xx] = "ccz_factory"
            # fixup boxes sit on the factory's MAJ-facing side
            for off in (2, 8):
                fixup_boxes.append((fx + off, fix_y, fw, fh))
                for yy in range(fix_y, fix_y + fh):
                    for xx in range(fx + off, fx + off + fw):
                        grid[yy][xx] = "fixup_box"

    for x in lanes:
        for row in range(height):
            if grid[row][x] not in ("maj_area",):
                grid[row][x] = "gap"

    return Floorplan(
        width=width,
        height=height,
        patch_distance=spec.d2,
        grid=tuple(tuple(row) for row in grid),
        factories=tuple(factories),
        fixup_boxes=tuple(fixup_boxes),
        lanes=lanes,
        meta={
            "kind": "adder",
            "bits": bits,
            "n_factories": n_factories,
            "stride": stride,
            "row_capacity": cap,
            "target_rows": target_rows,
            "offset_rows": offset_rows,
        },
    )


def plan_lookup_layout(register_rows: int, spec: FactorySpec, *,
                       width: int = 40,
                       iteration_rows: int = 3) -> Floorplan:
    """Lookup register stack: target rows (L) share access rows (_) with
    parked rows (R) in the repeating pattern R_L_L_R, with full-height
    access corridors on both sides and a reserved iteration region."""
    if register_rows < 1:
        raise ValueError("need at least one register row")
    if width < 8:
        raise ValueError("width too small for a lookup plan")
    if register_rows == 1:
        pattern = ["R", "_", "L", "_"]
    else:
        pattern = ["R"]
        remaining = register_rows
        while remaining >= 2:
            pattern += ["_", "L", "_", "L", "_", "R"]
            remaining -= 2
        if remaining == 1:
            pattern += ["_", "L", "_", "R"]
    role_of = {"R": "data_row_idle", "L": "data_row_target",
               "_": "access_row"}
    height = len(pattern) + iteration_rows
    grid = [["unused"] * width for _ in range(height)]
    for yy, sym in enumerate(pattern):
        for x in range(1, width - 1):
            grid[yy][x] = role_of[sym]
    for yy in range(len(pattern), height):
        for x in range(1, width - 1):
            grid[yy][x] = "maj_area"
    for yy in range(height):
        grid[yy][0] = "access_corridor"
        grid[yy][width - 1] = "access_corridor"
    return Floorplan(
        width=width,
        height=height,
        patch_distance=spec.d2,
        grid=tuple(tuple(row) for row in grid),
        factories=(),
        fixup_boxes=(),
        lanes=(),
        meta={
            "kind": "lookup",
            "register_rows": register_rows,
            "pattern": "".join(pattern),
            "iteration_rows": iteration_rows,
        },
    )


def _rectangles(plan: Floorplan, role: str) -> list[tuple[int, int, int, int]]:
    """Connected components of a role, each required to fill its bounding
    box; returns (x, y, w, h) sorted."""
    seen = [[False] * plan.width for _ in range(plan.height)]
    rects = []
    for y in range(plan.height):
        for x in range(plan.width):
            if seen[y][x] or plan.grid[y][x] != role:
                continue
            stack = [(x, y)]
            seen[y][x] = True
            tiles = []
            while stack:
                cx, cy = stack.pop()
                tiles.append((cx, cy))
                for nx, ny in ((cx + 1, cy), (cx - 1, cy),
                               (cx, cy + 1), (cx, cy - 1)):
                    if 0 <= nx < plan.width and 0 <= ny < plan.height \
                            and not seen[ny][nx] \
                            and plan.grid[ny][nx] == role:
                        seen[ny][nx] = True
                        stack.append((nx, ny))
            xs = [t[0] for t in tiles]
            ys = [t[1] for t in tiles]
            w = max(xs) - min(xs) + 1
            h = max(ys) - min(ys) + 1
            if len(tiles) != w * h:
                raise ValueError(f"{role} component at "
                                 f"({min(xs)}, {min(ys)}) is not a "
                                 f"filled rectangle")
            rects.append((min(xs), min(ys), w, h))
    return sorted(rects)


def validate_factories(plan: Floorplan) -> None:
    """Every factory is an exact 15x8 rectangle, annotations agree with
    the grid, total area is 120 per factory, and each factory touches a
    gap tile."""
    rects = _rectangles(plan, "ccz_factory")
    expected = sorted((x, y, FACTORY_W, FACTORY_H)
                      for x, y in plan.factories)
    if rects != expected:
        raise ValueError("factory rectangles disagree with annotations")
    for x, y, w, h in rects:
        if (w, h) != (FACTORY_W, FACTORY_H):
            raise ValueError(f"factory at ({x}, {y}) is {w}x{h}")
    if plan.count("ccz_factory") != len(rects) * FACTORY_W * FACTORY_H:
        raise ValueError("factory area mismatch")
    for x, y, w, h in rects:
        if not _touches(plan, x, y, w, h, ("gap",)):
            raise ValueError(f"factory at ({x}, {y}) has no adjacent gap")


def _touches(plan: Floorplan, x: int, y: int, w: int, h: int,
             roles: tuple[str, ...]) -> bool:
    for xx in range(x, x + w):
        for yy in (y - 1, y + h):
            if 0 <= yy < plan.height and plan.grid[yy][xx] in roles:
                return True
    for yy in range(y, y + h):
        for xx in (x - 1, x + w):
            if 0 <= xx < plan.width and plan.grid[yy][xx] in roles:
                return True
    return False


def validate_fixups(plan: Floorplan) -> None:
    """Two fixup boxes per factory, matching the annotated rectangles,
    each horizontally inside its factory's span."""
    rects = _rectangles(plan, "fixup_box")
    expected = sorted(plan.fixup_boxes)
    if rects != expected:
        raise ValueError("fixup boxes disagree with annotations")
    if len(rects) != 2 * len(plan.factories):
        raise ValueError(f"expected {2 * len(plan.factories)} fixup "
                         f"boxes, found {len(rects)}")
    for bx, by, bw, bh in rects:
        owners = [
            (fx, fy) for fx, fy in plan.factories
            if fx <= bx and bx + bw <= fx + FACTORY_W
            and (by + bh == fy or fy + FACTORY_H == by)
        ]
        if len(owners) != 1:
            raise ValueError(f"fixup box at ({bx}, {by}) is not attached "
                             f"to exactly one factory")


def validate_gaps(plan: Floorplan) -> None:
    """At least one full gap column between horizontally adjacent
    factories in the same band."""
    by_band: dict[int, list[int]] = {}
    for fx, fy in plan.factories:
        by_band.setdefault(fy, []).append(fx)
    for fy, xs in by_band.items():
        xs.sort()
        for left, right in zip(xs, xs[1:]):
            cols = range(left + FACTORY_W, right)
            ok = any(
                all(plan.grid[yy][cx] == "gap"
                    for yy in range(fy, fy + FACTORY_H))
                for cx in cols)
            if not ok:
                raise ValueError(f"no gap column between factories at "
                                 f"x={left} and x={right}")


def validate_overlap(plan: Floorplan) -> None:
    """Annotated factory and fixup rectangles stay inside the grid and
    never overlap each other."""
    boxes = [(x, y, FACTORY_W, FACTORY_H) for x, y in plan.factories]
    boxes += list(plan.fixup_boxes)
    for x, y, w, h in boxes:
        if x < 0 or y < 0 or x + w > plan.width or y + h > plan.height:
            raise ValueError(f"box ({x}, {y}, {w}, {h}) leaves the grid")
    for i, (x1, y1, w1, h1) in enumerate(boxes):
        for x2, y2, w2, h2 in boxes[i + 1:]:
            if x1 < x2 + w2 and x2 < x1 + w1 \
                    and y1 < y2 + h2 and y2 < y1 + h1:
                raise ValueError("overlapping boxes")


def validate_reachability(plan: Floorplan) -> None:
    """Flood fill from the MAJ strip across gap tiles: every data row
    must border a reached tile."""
    walkable = {"gap", "maj_area"}
    reached = [[False] * plan.width for _ in range(plan.height)]
    stack = []
    for y in range(plan.height):
        for x in range(plan.width):
            if plan.grid[y][x] == "maj_area":
                reached[y][x] = True
                stack.append((x, y))
    if not stack:
        raise ValueError("no MAJ strip to route to")
    while stack:
        cx, cy = stack.pop()
        for nx, ny in ((cx + 1, cy), (cx - 1, cy),
                       (cx, cy + 1), (cx, cy - 1)):
            if 0 <= nx < plan.width and 0 <= ny < plan.height \
                    and not reached[ny][nx] \
                    and plan.grid[ny][nx] in walkable:
                reached[ny][nx] = True
                stack.append((nx, ny))
    data_roles = {"data_row_target", "data_row_offset"}
    for y in range(plan.height):
        row_roles = set(plan.grid[y])
        if not (row_roles & data_roles):
            continue
        ok = False
        for x in range(plan.width):
            if plan.grid[y][x] not in data_roles:
                continue
            for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if 0 <= nx < plan.width and 0 <= ny < plan.height \
                        and reached[ny][nx]:
                    ok = True
        if not ok:
            raise ValueError(f"data row {y} cannot reach the MAJ strip")


def validate_lookup_pattern(plan: Floorplan) -> None:
    """Corridors span both full edges, every target row borders an
    access row, paired target rows share the inner access row, and an
    iteration region exists."""
    for yy in range(plan.height):
        if plan.grid[yy][0] != "access_corridor" \
                or plan.grid[yy][plan.width - 1] != "access_corridor":
            raise ValueError(f"row {yy} lacks corridor tiles at its ends")
    row_role = []
    for yy in range(plan.height):
        inner = set(plan.grid[yy][1:plan.width - 1])
        if len(inner) != 1:
            raise ValueError(f"row {yy} mixes roles")
        row_role.append(inner.pop())
    if "maj_area" not in row_role:
        raise ValueError("no iteration region")
    l_rows = [i for i, r in enumerate(row_role) if r == "data_row_target"]
    if not l_rows:
        raise ValueError("no target rows")
    for i in l_rows:
        neighbors = [row_role[j] for j in (i - 1, i + 1)
                     if 0 <= j < len(row_role)]
        if "access_row" not in neighbors:
            raise ValueError(f"target row {i} has no adjacent access row")
    for a, b in zip(l_rows, l_rows[1:]):
        if b - a == 2 and row_role[a + 1] != "access_row":
            raise ValueError(f"rows {a} and {b} do not share an access "
                             f"row")


def validate_floorplan(plan: Floorplan) -> None:
    """All structural checks appropriate to the plan kind."""
    validate_overlap(plan)
    if plan.meta.get("kind") == "lookup":
        validate_lookup_pattern(plan)
        return
    validate_factories(plan)
    validate_fixups(plan)
    validate_gaps(plan)
    validate_reachability(plan)


@dataclasses.dataclass(frozen=True)
class VolumeComponent:
    name: str
    width: int
    height: int
    cycles: int

    @property
    def volume(self) -> int:
        return self.width * self.height * self.cycles


@dataclasses.dataclass(frozen=True)
class VolumeReport:
    volumes: dict
    total: int

    def ratio(self, a: str, b: str) -> Fraction:
        return Fraction(self.volumes[a], self.volumes[b])


def volume_report(components: Iterable[VolumeComponent]) -> VolumeReport:
    volumes = {}
    for c in components:
        if c.name in volumes:
            raise ValueError(f"duplicate component {c.name!r}")
        volumes[c.name] = c.volume
    return VolumeReport(volumes=volumes, total=sum(volumes.values()))


def default_volume_components(d_cycles: int = 5) -> tuple[VolumeComponent, ...]:
    """Reference blocks: the 3x3 MAJ workspace, and the two-column
    delayed-choice CZ routing footprint against the eight-column
    multiplexed baseline (equal heights, so only widths matter)."""
    return (
        VolumeComponent("maj_block", 3, 3, d_cycles),
        VolumeComponent("cz_routing_optimized", 2, 1, d_cycles),
        VolumeComponent("cz_routing_mux", 8, 1, d_cycles),
    )


_CELL = 8


def export_floorplan(plan: Floorplan, fmt: str) -> bytes:
    """Deterministic serialization: `json` round-trips losslessly, `svg`
    draws one rect per tile plus one outline rect per factory."""
    if fmt == "json":
        doc = {
            "width": plan.width,
            "height": plan.height,
            "patch_distance": plan.patch_distance,
            "grid": [list(row) for row in plan.grid],
            "factories": [list(f) for f in plan.factories],
            "fixup_boxes": [list(b) for b in plan.fixup_boxes],
            "lanes": list(plan.lanes),
            "meta": plan.meta,
        }
        return (json.dumps(doc, sort_keys=True, indent=1) + "\n").encode()
    if fmt == "svg":
        out = []
        w, h = plan.width * _CELL, plan.height * _CELL
        out.append(f'<svg xmlns="http://www.w3.org/2000/svg" '
                   f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">')
        for y in range(plan.height):
            for x in range(plan.width):
                color = ROLE_COLORS[plan.grid[y][x]]
                out.append(f'<rect x="{x * _CELL}" y="{y * _CELL}" '
                           f'width="{_CELL}" height="{_CELL}" '
                           f'fill="{color}"/>')
        for fx, fy in plan.factories:
            out.append(f'<rect class="factory" x="{fx * _CELL}" '
                       f'y="{fy * _CELL}" width="{FACTORY_W * _CELL}" '
                       f'height="{FACTORY_H * _CELL}" fill="none" '
                       f'stroke="#000000" stroke-width="2"/>')
        out.append('</svg>')
        return "\n".join(out).encode()
    raise ValueError(f"unknown export format {fmt!r}")


def import_floorplan(data: bytes | str) -> Floorplan:
    if isinstance(data, bytes):
        data = data.decode()
    doc = json.loads(data)
    return Floorplan(
        width=doc["width"],
        height=doc["height"],
        patch_distance=doc["patch_distance"],
        grid=tuple(tuple(row) for row in doc["grid"]),
        factories=tuple((x, y) for x, y in doc["factories"]),
        fixup_boxes=tuple(tuple(b) for b in doc["fixup_boxes"]),
        lanes=tuple(doc["lanes"]),
        meta=doc["meta"],
    )
