#!/usr/bin/env python3
"""Builds the canonical reference branch asset (data/reference_tree.txt).

One curved main chain along +z with six sub-chains and a cloud of small
quad leaves near the chain tips. All coordinates are deterministic.
"""

import math
import os

HALF_LEAF = 0.0175  # half side of a leaf quad, m

vertices = []
triangles = []  # (a, b, c, tag, gid or None)
chains = []     # (parent, radius, [vertex ids])


def add_vertex(x, y, z):
    vertices.append((x, y, z))
    return len(vertices) - 1


def add_quad_leaf(gid, center, normal, twist):
    n = normalize(normal)
    helper = (1.0, 0.0, 0.0) if abs(n[0]) < 0.9 else (0.0, 1.0, 0.0)
    t1 = normalize(cross(n, helper))
    t2 = cross(n, t1)
    c, s = math.cos(twist), math.sin(twist)
    u = tuple(c * t1[i] + s * t2[i] for i in range(3))
    w = tuple(-s * t1[i] + c * t2[i] for i in range(3))
    corners = []
    for du, dw in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
        corners.append(add_vertex(*(center[i] + HALF_LEAF * (du * u[i] + dw * w[i]) for i in range(3))))
    triangles.append((corners[0], corners[1], corners[2], "leaf", gid))
    triangles.append((corners[0], corners[2], corners[3], "leaf", gid))


def normalize(v):
    m = math.sqrt(sum(x * x for x in v))
    return tuple(x / m for x in v)


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def lerp(a, b, t):
    return tuple(a[i] + (b[i] - a[i]) * t for i in range(3))


# Main chain: gentle arc from the origin, mostly +z with a drift in +x.
main_pts = [
    (0.0, 0.0, 0.0),
    (0.02, 0.0, 0.15),
    (0.06, 0.01, 0.3),
    (0.11, 0.02, 0.44),
    (0.16, 0.04, 0.56),
]
main_ids = [add_vertex(*p) for p in main_pts]
chains.append((-1, 0.02, main_ids))

# Sub-chains rooted exactly on main-chain vertices and segment midpoints.
sub_specs = [
    (main_ids[1], main_pts[1], (0.6, 0.45, 0.65)),
    (main_ids[2], main_pts[2], (-0.55, 0.5, 0.65)),
    (main_ids[3], main_pts[3], (0.1, -0.7, 0.7)),
    (main_ids[4], main_pts[4], (0.45, 0.25, 0.85)),
    (None, lerp(main_pts[1], main_pts[2], 0.5), (-0.35, -0.6, 0.7)),
    (None, lerp(main_pts[2], main_pts[3], 0.5), (0.7, -0.2, 0.68)),
]
sub_chains = []
for root_id, root_pos, direction in sub_specs:
    d = normalize(direction)
    first = root_id if root_id is not None else add_vertex(*root_pos)
    mid = add_vertex(*(root_pos[i] + 0.1 * d[i] + (0.01 if i == 2 else 0.0) for i in range(3)))
    tip_pos = tuple(root_pos[i] + 0.2 * d[i] + (0.015 if i == 2 else 0.0) for i in range(3))
    tip = add_vertex(*tip_pos)
    chains.append((0, 0.008, [first, mid, tip]))
    sub_chains.append((root_pos, d, tip_pos))

# Leaves: five per sub-chain spread toward the tip, four near the main tip.
gid = 0
for root_pos, d, tip_pos in sub_chains:
    for k in range(5):
        t = 0.45 + 0.14 * k
        on_chain = tuple(root_pos[i] + 0.2 * t * d[i] for i in range(3))
        side = cross(d, (0.0, 0.0, 1.0))
        side = normalize(side) if any(abs(x) > 1e-12 for x in side) else (1.0, 0.0, 0.0)
        swing = 0.025 * math.sin(2.1 * gid)
        center = tuple(on_chain[i] + swing * side[i] + (0.012 if i == 2 else 0.0) for i in range(3))
        normal = normalize(tuple(d[i] + 0.8 * side[i] * math.cos(1.7 * gid) + (0.5 if i == 2 else 0.0)
                                 for i in range(3)))
        add_quad_leaf(gid, center, normal, 0.61803 * gid)
        gid += 1
main_tip = main_pts[4]
main_dir = normalize(tuple(main_pts[4][i] - main_pts[3][i] for i in range(3)))
for k in range(4):
    ang = 2.0 * math.pi * k / 4.0
    center = (main_tip[0] + 0.05 * math.cos(ang), main_tip[1] + 0.05 * math.sin(ang), main_tip[2] + 0.04)
    normal = normalize((math.cos(ang), math.sin(ang), 1.2))
    add_quad_leaf(gid, center, normal, 0.37 * gid)
    gid += 1

# Stub triangles so every part tag appears in the mesh.
base = [add_vertex(0.0, 0.0, 0.0), add_vertex(0.02, 0.0, 0.0), add_vertex(0.0, 0.02, 0.0)]
triangles.append((base[0], base[1], base[2], "trunk", None))
b0 = [main_ids[0], main_ids[1], add_vertex(0.02, 0.005, 0.08)]
triangles.append((b0[0], b0[1], b0[2], "branch", None))
b1 = [main_ids[2], main_ids[3], add_vertex(0.09, 0.025, 0.37)]
triangles.append((b1[0], b1[1], b1[2], "branch", None))
sb_root, sb_dir, _ = sub_chains[0]
sb_extra = add_vertex(sb_root[0] + 0.05 * sb_dir[0], sb_root[1] + 0.05 * sb_dir[1] + 0.01,
                      sb_root[2] + 0.05 * sb_dir[2])
sb_near = add_vertex(sb_root[0], sb_root[1] + 0.008, sb_root[2])
triangles.append((chains[1][2][0], sb_near, sb_extra, "sub-branch", None))

out_path = os.path.join(os.path.dirname(__file__), "..", "data", "reference_tree.txt")
with open(out_path, "w") as f:
    f.write("# canonical branch: one curved chain, six sub-chains, quad leaves\n")
    f.write("reftree 1\n")
    for v in vertices:
        f.write("v %.17g %.17g %.17g\n" % v)
    for t in triangles:
        if t[4] is None:
            f.write("t %d %d %d %s\n" % (t[0], t[1], t[2], t[3]))
        else:
            f.write("t %d %d %d %s %d\n" % (t[0], t[1], t[2], t[3], t[4]))
    for parent, radius, ids in chains:
        f.write("s %d %.17g %s\n" % (parent, radius, " ".join(str(i) for i in ids)))

print("wrote %s: %d vertices, %d triangles, %d chains, %d leaf groups" %
      (out_path, len(vertices), len(triangles), len(chains), gid))
