"""
Recursive-disk geometry
=======================

How the layout is built: spiral packing for sibling disks, two segment
rings per disk (fixed-size variables inside, LOC-proportional functions
outside), and the determinism that lets a UI animate configuration
changes without anything moving.
"""

import math
from pathlib import Path

from varscope.cli import analyze_directory
from varscope.layout import LayoutConfig, compute_layout, layout_to_document, pack_disks

# Packing alone: radii sorted descending, largest at the origin, the
# rest walk a clockwise spiral until they fit.
radii = [8.0, 6.0, 5.0, 5.0, 3.0, 2.0]
centers = pack_disks(radii)
for r, (x, y) in zip(radii, centers):
    print(f"r={r:4.1f} at ({x:7.2f}, {y:7.2f})")
worst = min(
    math.hypot(x1 - x2, y1 - y2) - (r1 + r2)
    for k, ((x1, y1), r1) in enumerate(zip(centers, radii))
    for (x2, y2), r2 in list(zip(centers, radii))[k + 1 :]
)
print(f"smallest gap between disks: {worst:.3f} (always > 0)")

# Full layout of the fixture model.
root = Path(__file__).resolve().parent.parent / "fixtures" / "mini_spl"
model = analyze_directory(root)
layout = compute_layout(model, LayoutConfig())
document = layout_to_document(layout)

print(f"\n{len(document['disks'])} unit disks, {len(document['segments'])} segments")
for disk in document["disks"]:
    print(f"  {disk['entity_id']:25s} center={disk['center']} r={disk['radius']}")

# Function segment area tracks lines of code at the global scale factor.
k = document["scale_k"]
for segment in document["segments"]:
    if segment["color_class"] != "function-blue":
        continue
    loc = model.entities[segment["entity_id"]].loc
    print(f"  {segment['entity_id']:35s} area={segment['area']:7.3f} loc={loc}"
          f" area/loc={segment['area'] / loc:.3f} (k={k})")
