"""Independent scalar reference implementations used to check the fast paths.

Everything here is written with plain Python loops and struct-level file
reads on purpose: these oracles must not share code with the package.
"""

import math
import struct


def read_ctv_bytes(path):
    """Byte-level CTV1 reader: returns (nx, ny, nz, spacing, voxels[z][y][x])."""
    with open(path, "rb") as f:
        raw = f.read()
    assert raw[:5] == b"CTV1\n"
    end = raw.index(b"\n", 5)
    fields = raw[5:end].decode("ascii").split(" ")
    nx, ny, nz = int(fields[0]), int(fields[1]), int(fields[2])
    spacing = (float(fields[3]), float(fields[4]), float(fields[5]))
    payload = raw[end + 1 :]
    assert len(payload) == nx * ny * nz * 2
    flat = struct.unpack("<" + "h" * (nx * ny * nz), payload)
    voxels = [
        [[flat[(z * ny + y) * nx + x] for x in range(nx)] for y in range(ny)]
        for z in range(nz)
    ]
    return nx, ny, nz, spacing, voxels


def read_pfm_bytes(path):
    """Byte-level grayscale PFM reader: returns rows[h][w] with row 0 first."""
    with open(path, "rb") as f:
        raw = f.read()
    assert raw[:3] == b"Pf\n"
    end1 = raw.index(b"\n", 3)
    w, h = (int(t) for t in raw[3:end1].split(b" "))
    end2 = raw.index(b"\n", end1 + 1)
    assert float(raw[end1 + 1 : end2]) < 0
    payload = raw[end2 + 1 :]
    assert len(payload) == w * h * 4
    flat = struct.unpack("<" + "f" * (w * h), payload)
    return [[flat[r * w + c] for c in range(w)] for r in range(h)]


def cwrs_loop(voxels, nx, ny, nz, alpha=0.0018, exclude_below=-1000.0):
    """Triple-loop weighted ray sum; voxels indexed [z][y][x]."""
    out = [[0.0] * nx for _ in range(nz)]
    for z in range(nz):
        for x in range(nx):
            acc = 0.0
            for y in range(ny):
                hu = float(voxels[z][y][x])
                if hu >= exclude_below:
                    acc += hu * (1.0 - alpha * (y + 1))
            out[z][x] = acc / ny
    return out


def fat_count_loop(bits, nx, ny, nz):
    out = [[0.0] * nx for _ in range(nz)]
    for z in range(nz):
        for x in range(nx):
            c = 0
            for y in range(ny):
                if bits[z][y][x]:
                    c += 1
            out[z][x] = float(c)
    return out


def any_along_y_loop(bits, nx, ny, nz):
    out = [[False] * nx for _ in range(nz)]
    for z in range(nz):
        for x in range(nx):
            for y in range(ny):
                if bits[z][y][x]:
                    out[z][x] = True
                    break
    return out


def pseudo_cxr_loop(voxels, nx, ny, nz, spacing_y, mu_air, mu_water):
    out = [[0.0] * nx for _ in range(nz)]
    for z in range(nz):
        for x in range(nx):
            depth = 0.0
            for y in range(ny):
                hu = float(voxels[z][y][x])
                mu = mu_air + (mu_water - mu_air) * (hu + 1000.0) / 1000.0
                depth += max(0.0, mu) * spacing_y
            out[z][x] = math.exp(-depth)
    return out


def fat_mask_loop(voxels, roi, nx, ny, nz, lo, hi):
    out = [
        [[bool(roi[z][y][x]) and lo <= voxels[z][y][x] <= hi for x in range(nx)] for y in range(ny)]
        for z in range(nz)
    ]
    return out


def mae_loop(a, b):
    h, w = len(a), len(a[0])
    return sum(abs(a[r][c] - b[r][c]) for r in range(h) for c in range(w)) / (h * w)


def mse_loop(a, b):
    h, w = len(a), len(a[0])
    return sum((a[r][c] - b[r][c]) ** 2 for r in range(h) for c in range(w)) / (h * w)


def ssim_loop(a, b, k1=0.01, k2=0.03, dynamic_range=1.0):
    h, w = len(a), len(a[0])
    n = h * w
    ux = sum(a[r][c] for r in range(h) for c in range(w)) / n
    uy = sum(b[r][c] for r in range(h) for c in range(w)) / n
    vx = sum((a[r][c] - ux) ** 2 for r in range(h) for c in range(w)) / n
    vy = sum((b[r][c] - uy) ** 2 for r in range(h) for c in range(w)) / n
    cov = sum((a[r][c] - ux) * (b[r][c] - uy) for r in range(h) for c in range(w)) / n
    c1 = (k1 * dynamic_range) ** 2
    c2 = (k2 * dynamic_range) ** 2
    return ((2 * ux * uy + c1) * (2 * cov + c2)) / ((ux**2 + uy**2 + c1) * (vx + vy + c2))


def mean_sd_loop(values):
    """Two-pass mean and sample SD (n-1 divisor)."""
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def ellipsoid_member(x, y, z, center, semi):
    cx, cy, cz = center
    ax, ay, az = semi
    return ((x - cx) / ax) ** 2 + ((y - cy) / ay) ** 2 + ((z - cz) / az) ** 2 <= 1.0


def shell_table_loop(nx, ny, nz, center, inner_semi, thickness):
    """Per-column fat depth of an ellipsoid shell, rasterized voxel by voxel."""
    outer_semi = tuple(s + thickness for s in inner_semi)
    table = [[0.0] * nx for _ in range(nz)]
    for z in range(nz):
        for x in range(nx):
            c = 0
            for y in range(ny):
                if ellipsoid_member(x, y, z, center, outer_semi) and not ellipsoid_member(
                    x, y, z, center, inner_semi
                ):
                    c += 1
            table[z][x] = float(c)
    return table
