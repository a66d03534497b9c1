#!/usr/bin/env python3
"""Regenerates the bundled scenario files from rectangle descriptions.

Coordinates are in meters, x to the right and y downward (row 0 at the top).
Run from any directory: python3 scenarios/generate.py
"""
import json
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))


class Map:
    def __init__(self, width_m, height_m, cell, fill="#"):
        self.cell = cell
        self.w = int(round(width_m / cell))
        self.h = int(round(height_m / cell))
        self.rows = [[fill] * self.w for _ in range(self.h)]
        self.legend = {}

    def _span(self, a, b, n):
        lo = max(0, int(round(a / self.cell)))
        hi = min(n, int(round(b / self.cell)))
        return range(lo, hi)

    def rect(self, x0, y0, x1, y1, ch):
        for y in self._span(y0, y1, self.h):
            for x in self._span(x0, x1, self.w):
                self.rows[y][x] = ch

    def walk(self, x0, y0, x1, y1):
        self.rect(x0, y0, x1, y1, ".")

    def wall(self, x0, y0, x1, y1):
        self.rect(x0, y0, x1, y1, "#")

    def ring(self, cx, cy, r_in, r_out, a0, a1):
        """Walkable annulus sector, angles in degrees (0 = +x, 90 = +y/down)."""
        for y in range(self.h):
            for x in range(self.w):
                px = (x + 0.5) * self.cell - cx
                py = (y + 0.5) * self.cell - cy
                r = math.hypot(px, py)
                if r_in <= r < r_out:
                    ang = math.degrees(math.atan2(py, px)) % 360.0
                    lo, hi = a0 % 360.0, a1 % 360.0
                    inside = lo <= ang <= hi if lo <= hi else (ang >= lo or ang <= hi)
                    if inside:
                        self.rows[y][x] = "."

    def area(self, ch, role, x0, y0, x1, y1, name=None):
        for y in self._span(y0, y1, self.h):
            for x in self._span(x0, x1, self.w):
                if self.rows[y][x] != "#":
                    self.rows[y][x] = ch
        entry = {"role": role}
        if name:
            entry["name"] = name
        self.legend[ch] = entry

    def save(self, name):
        doc = {
            "cell_size_m": self.cell,
            "rows": ["".join(r) for r in self.rows],
            "legend": self.legend,
        }
        with open(os.path.join(HERE, name), "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")


def single_obstacle():
    # Hall 12 m x 30 m, origin on top, destination at the bottom, one block.
    m = Map(12, 30, 0.15, ".")
    m.wall(3, 12, 9, 18)
    m.area("o", "origin", 0, 0, 12, 1.5)
    m.area("d", "destination", 0, 28.5, 12, 30)
    m.save("single_obstacle.json")


def two_obstacles():
    m = Map(16, 44, 0.15, ".")
    m.wall(4, 10, 12, 15)   # upstream
    m.wall(4, 27, 12, 32)   # downstream
    m.area("o", "origin", 0, 0, 16, 1.5)
    m.area("d", "destination", 0, 42.5, 16, 44)
    m.save("two_obstacles.json")


def interleaved_loops(name, bottlenecks, arc_h=10.0):
    # Straight corridor from origin (left) to destination (right) with a lower
    # loop A..B and an upper loop C..E that overlap along the straight.
    L, w = 106.0, 4.0
    H = 2 * arc_h + w + 4
    yc = H / 2
    A, B, C, E = 18.0, 62.0, 44.0, 88.0
    m = Map(L, H, 0.15)
    m.walk(0, yc - w / 2, L, yc + w / 2)
    for x0, x1, y in ((A, B, yc + arc_h), (C, E, yc - arc_h)):
        m.walk(x0 - w / 2, min(yc, y) - w / 2, x0 + w / 2, max(yc, y) + w / 2)
        m.walk(x1 - w / 2, min(yc, y) - w / 2, x1 + w / 2, max(yc, y) + w / 2)
        m.walk(x0 - w / 2, y - w / 2, x1 + w / 2, y + w / 2)
    if bottlenecks:
        for x in ((A + C) / 2, (B + E) / 2):
            m.wall(x - 2, yc - w / 2, x + 2, yc - 1)
    m.area("o", "origin", 0, yc - w / 2, 2, yc + w / 2)
    m.area("d", "destination", L - 2, yc - w / 2, L, yc + w / 2)
    m.save(name)


def offset_obstacle():
    # Obstacle closer to the left wall: the left passage is the shorter one.
    m = Map(14, 30, 0.15, ".")
    m.wall(3, 12, 11, 17)
    m.area("o", "origin", 0, 0, 14, 1.5)
    m.area("d", "destination", 0, 28.5, 14, 30)
    m.save("offset_obstacle.json")


def two_origins():
    # Two origins on the left, destination on the right, a slanted obstacle
    # between them built from offset blocks.
    m = Map(36, 20, 0.15, ".")
    for k in range(6):
        m.wall(14 + k, 5 + 1.5 * k, 17 + k, 6.5 + 1.5 * k)
    m.area("a", "origin", 0, 1, 1.5, 5, name="upper")
    m.area("b", "origin", 0, 15, 1.5, 19, name="lower")
    m.area("d", "destination", 34.5, 8, 36, 12)
    m.save("two_origins.json")


def two_corridors():
    # Mirror-symmetric: a central wall splits the hall into two equal corridors.
    m = Map(40, 12, 0.15, ".")
    m.wall(8, 5.1, 32, 6.9)
    m.area("o", "origin", 0, 5.1, 1.5, 6.9)
    m.area("d", "destination", 38.5, 0, 40, 12)
    m.save("two_corridors.json")


if __name__ == "__main__":
    single_obstacle()
    two_obstacles()
    interleaved_loops("nested_loops.json", False)
    interleaved_loops("example_network.json", True)
    two_corridors()
    offset_obstacle()
    two_origins()
