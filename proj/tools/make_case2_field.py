"""Writes the stand-in grid field used by configs/case2.cfg.

A strictly positive image-like array on a 41x41 lattice over the unit
square: an annulus, two blobs and a floor.
"""
import math
import sys

N = 41


def value(x, y):
    r = math.hypot(x - 0.35, y - 0.6)
    ring = math.exp(-((r - 0.2) / 0.05) ** 2)
    blob1 = 1.5 * math.exp(-((x - 0.75) ** 2 + (y - 0.25) ** 2) / (2 * 0.07 ** 2))
    blob2 = 0.8 * math.exp(-((x - 0.8) ** 2 + (y - 0.8) ** 2) / (2 * 0.05 ** 2))
    return ring + blob1 + blob2 + 0.05


def main(path):
    with open(path, "w") as out:
        out.write("x,y,value\n")
        for i in range(N):
            for j in range(N):
                x, y = i / (N - 1), j / (N - 1)
                out.write(f"{x!r},{y!r},{value(x, y)!r}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "case2_field.csv")
