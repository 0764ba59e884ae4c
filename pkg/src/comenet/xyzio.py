"""XYZ file reading and writing, including multi-frame files for conformer sets."""

from __future__ import annotations

import numpy as np

from .errors import XYZParseError

# element symbols indexed by atomic number, H = 1 .. Og = 118
_SYMBOLS = (
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni "
    "Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I "
    "Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt "
    "Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr "
    "Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og"
).split()

SYMBOL_TO_Z = {sym: z for z, sym in enumerate(_SYMBOLS, start=1)}
Z_TO_SYMBOL = {z: sym for sym, z in SYMBOL_TO_Z.items()}


def symbol_to_z(symbol):
    sym = symbol.strip().capitalize()
    if sym not in SYMBOL_TO_Z:
        raise XYZParseError(f"unknown element symbol {symbol!r}")
    return SYMBOL_TO_Z[sym]


def _parse_frame(lines, start):
    """Parse one frame starting at index ``start``; returns (species, pos, next)."""
    header = lines[start].strip()
    try:
        count = int(header)
    except ValueError:
        raise XYZParseError(f"expected atom count, got {header!r}", line=start + 1)
    if count <= 0:
        raise XYZParseError("atom count must be positive", line=start + 1)
    if start + 2 + count > len(lines):
        raise XYZParseError(
            f"frame declares {count} atoms but file ends early", line=start + 1
        )
    species, positions = [], []
    for k in range(count):
        lineno = start + 3 + k
        parts = lines[start + 2 + k].split()
        if len(parts) < 4:
            raise XYZParseError("expected `SYMBOL x y z`", line=lineno)
        species.append(symbol_to_z(parts[0]))
        try:
            positions.append([float(parts[1]), float(parts[2]), float(parts[3])])
        except ValueError as exc:
            raise XYZParseError(f"bad coordinate: {exc}", line=lineno)
    return species, np.array(positions, dtype=np.float64), start + 2 + count


def read_xyz(path):
    """Read the first frame of an XYZ file: (species list, (n, 3) positions)."""
    frames = read_xyz_frames(path)
    return frames[0]


def read_xyz_frames(path):
    """Read all frames of a (possibly multi-frame) XYZ file."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    # skip trailing blank lines between/after frames
    frames = []
    idx = 0
    while idx < len(lines):
        if not lines[idx].strip():
            idx += 1
            continue
        species, positions, idx = _parse_frame(lines, idx)
        frames.append((species, positions))
    if not frames:
        raise XYZParseError("file contains no frames")
    return frames


def write_xyz(path, species, positions, comment=""):
    write_xyz_frames(path, [(species, positions)], comments=[comment])


def write_xyz_frames(path, frames, comments=None):
    """Write frames as concatenated XYZ blocks, 17 significant digits."""
    with open(path, "w") as fh:
        for idx, (species, positions) in enumerate(frames):
            comment = comments[idx] if comments else ""
            fh.write(f"{len(species)}\n{comment}\n")
            for z, p in zip(species, np.asarray(positions)):
                sym = Z_TO_SYMBOL.get(int(z), "X")
                fh.write(f"{sym} {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
