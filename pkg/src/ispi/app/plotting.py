"""Matplotlib figures for run reports, rendered straight to PNG files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

PANEL = 1.8  # inches per image panel


def save_figure(fig, path):
    # no Software/date chunk, so identical figures give identical bytes
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def _show(ax, img, title=None):
    ax.imshow(img, cmap="gray", interpolation="nearest")
    ax.set_xticks([])
    ax.set_yticks([])
    if title:
        ax.set_title(title, fontsize=8)


def static_sweep_figure(truth, frames, cgi_frames=None):
    """Ground truth plus one IGI panel per N; CGI underneath when given.

    ``frames`` is a list of ``(N, image2d, corr)``.
    """
    rows = 2 if cgi_frames else 1
    cols = len(frames) + 1
    fig, axes = plt.subplots(rows, cols, figsize=(PANEL * cols, PANEL * rows + 0.3), squeeze=False)
    _show(axes[0, 0], truth, "object")
    for j, (n, img, corr) in enumerate(frames, start=1):
        _show(axes[0, j], img, f"IGI N={n}\nr={corr:.3f}" if corr is not None else f"IGI N={n}")
    if cgi_frames:
        axes[1, 0].axis("off")
        for j, (n, img, corr) in enumerate(cgi_frames, start=1):
            _show(axes[1, j], img, f"CGI N={n}\nr={corr:.3f}" if corr is not None else f"CGI N={n}")
    fig.tight_layout()
    return fig


def correlation_curve(ns, igi_corr, cgi_corr=None):
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.plot(ns, igi_corr, "o-", label="IGI")
    if cgi_corr is not None:
        ax.plot(ns, cgi_corr, "s--", label="CGI")
    ax.set_xlabel("measurements per image N")
    ax.set_ylabel("Pearson r vs object")
    ax.grid(alpha=0.3)
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def moving_strip(frames, max_panels=10):
    """``frames``: list of ``(index, image2d, offset)``; evenly subsampled."""
    if len(frames) > max_panels:
        pick = np.linspace(0, len(frames) - 1, max_panels).round().astype(int)
        frames = [frames[i] for i in pick]
    fig, axes = plt.subplots(1, len(frames), figsize=(PANEL * len(frames), PANEL + 0.3), squeeze=False)
    for ax, (k, img, off) in zip(axes[0], frames):
        _show(ax, img, f"frame {k}\noffset {tuple(off)}")
    fig.tight_layout()
    return fig


def noise_sweep_figure(columns, trace_len=4000):
    """One column per noise spec: bucket trace, CGI image, IGI image.

    ``columns``: list of dicts with keys label, S, cgi, igi.
    """
    n = len(columns)
    fig, axes = plt.subplots(3, n, figsize=(2.2 * n, 6.2), squeeze=False)
    for j, col in enumerate(columns):
        s = np.asarray(col["S"])[:trace_len]
        ax = axes[0, j]
        ax.plot(np.arange(1, s.size + 1), s, lw=0.3, color="k")
        ax.set_title(col["label"], fontsize=8)
        ax.tick_params(labelsize=6)
        _show(axes[1, j], col["cgi"], f"CGI r={col['cgi_corr']:.2f}" if col.get("cgi_corr") is not None else "CGI")
        _show(axes[2, j], col["igi"], f"IGI r={col['igi_corr']:.2f}" if col.get("igi_corr") is not None else "IGI")
    axes[0, 0].set_ylabel("S (ADC)", fontsize=7)
    fig.tight_layout()
    return fig
