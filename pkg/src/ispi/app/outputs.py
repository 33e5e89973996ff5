"""Run-directory writer.  All files of a run go through one writer so the
tree layout and byte content depend only on the results, never on timing."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from ispi.forward import write_trace_csv
from ispi.metrics import normalize_8bit
from ispi.pnm import write_pgm
from ispi.reconstruct import ReconImage


def checksum(arr) -> str:
    a = np.ascontiguousarray(arr)
    return hashlib.sha256(a.dtype.str.encode() + a.tobytes()).hexdigest()


def write_image_csv(path, img: ReconImage):
    """Raw signed values, one CSV row per image row."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in img.as_image():
            w.writerow([repr(float(v)) for v in row])


def dump_json(path, obj):
    text = json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


class RunWriter:
    def __init__(self, root):
        self.root = Path(root)
        try:
            for sub in ("frames", "traces"):
                (self.root / sub).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OSError(f"cannot create output directory {self.root}: {exc}") from exc
        self.written: list[str] = []

    def _path(self, rel) -> Path:
        p = self.root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        self.written.append(str(rel))
        return p

    def image(self, stem, img: ReconImage):
        """``frames/<stem>.pgm`` (display-normalised) and ``frames/<stem>.csv`` (raw)."""
        pix = normalize_8bit(img).reshape(img.height, img.width)
        write_pgm(self._path(f"frames/{stem}.pgm"), pix)
        write_image_csv(self._path(f"frames/{stem}.csv"), img)

    def trace(self, name, S, Q, optical, first_index=1):
        write_trace_csv(self._path(f"traces/{name}.csv"), S, Q, optical, first_index)

    def json(self, rel, obj):
        dump_json(self._path(rel), obj)

    def figure(self, rel, fig):
        from ispi.app.plotting import save_figure

        save_figure(fig, self._path(rel))
