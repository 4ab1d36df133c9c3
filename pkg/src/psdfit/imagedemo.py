"""Image-restoration demo: recover a PSD matrix built from a grayscale image.

The ground truth is X_true = (G G^T) / ||G G^T||_F where G is the image
scaled to [0, 1].  Each of the m observations applies a seeded transform
B_i (a row-subsampling matrix plus a small uniform perturbation) and
records A_i = B_i X_true B_i^T.  The solver then fits a rank-k PSD matrix
to the observations alone.  The transforms are illustrative choices, not
canonical ones.

Images are 8-bit binary PGM (magic "P5"); nothing fancier is supported.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .problem import ProblemInstance
from .solver import SolverConfig, SolverResult, solve
from .io import write_matrix, write_trace, _fmt

MAX_SIDE = 512  # dense solves above this are rejected

_SUBSAMPLE_FRACTION = 0.75
_PERTURBATION = 0.05


class ImageFormatError(ValueError):
    pass


def read_pgm(path) -> np.ndarray:
    """Read a binary 8-bit PGM file into a (height, width) uint8 array.

    Header comments (``#`` to end of line) and arbitrary whitespace are
    accepted; maxval above 255 (16-bit rasters) is not.
    """
    with open(path, "rb") as fh:
        data = fh.read()

    tokens = []
    i = 0
    while len(tokens) < 4:
        if i >= len(data):
            raise ImageFormatError("truncated header")
        c = data[i : i + 1]
        if c == b"#":
            while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace():
                j += 1
            tokens.append(data[i:j])
            i = j
    if tokens[0] != b"P5":
        raise ImageFormatError(f"not a binary graymap (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError("non-numeric header field") from None
    if width < 1 or height < 1:
        raise ImageFormatError("bad image dimensions")
    if not 0 < maxval <= 255:
        raise ImageFormatError(f"only 8-bit graymaps supported (maxval {maxval})")
    i += 1  # single whitespace byte after maxval
    raster = data[i : i + width * height]
    if len(raster) != width * height:
        raise ImageFormatError("truncated raster data")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path, image):
    image = np.asarray(image)
    if image.ndim != 2:
        raise ImageFormatError("image must be 2-D")
    img = np.clip(np.rint(image), 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def make_test_image(n: int, seed: int = 0, rank=None) -> np.ndarray:
    """Deterministic synthetic n x n test image.

    With rank=1 the image is an exact integer outer product, so G G^T is
    exactly rank one.  Otherwise a smooth ramp plus seeded texture.
    """
    rng = np.random.default_rng(seed)
    if rank == 1:
        v = rng.integers(1, 16, size=n)
        w = rng.integers(1, 16, size=n)
        return np.outer(v, w).astype(np.uint8)
    yy, xx = np.mgrid[0:n, 0:n]
    ramp = 60.0 + 120.0 * (xx + yy) / max(1, 2 * (n - 1))
    texture = 60.0 * rng.random((n, n))
    return np.clip(ramp + texture, 0, 255).astype(np.uint8)


def image_to_truth(image) -> np.ndarray:
    """Normalized PSD ground truth (G G^T scaled to unit Frobenius norm)."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] != img.shape[1]:
        raise ImageFormatError(f"square image required, got {img.shape}")
    n = img.shape[0]
    if n > MAX_SIDE:
        raise ImageFormatError(
            f"image side {n} exceeds {MAX_SIDE}; dense solve would be intractable"
        )
    G = img / 255.0
    S = G @ G.T
    nrm = np.linalg.norm(S)
    if nrm == 0.0:
        raise ImageFormatError("blank image: ground truth would be zero")
    return S / nrm


def observation_instance(X_true, m: int, k: int, seed: int):
    """Build the m-pair instance (A_i = B_i X_true B_i^T) plus a start Y0.

    Each B_i picks ceil(3n/4) distinct rows and adds uniform noise in
    [-0.05, 0.05); Y0 is drawn from the same generator so one seed fixes
    the whole demo.
    """
    X_true = np.asarray(X_true, dtype=np.float64)
    n = X_true.shape[0]
    if m < 1:
        raise ValueError("need at least one observation")
    rng = np.random.default_rng(seed)
    mi = max(1, int(np.ceil(_SUBSAMPLE_FRACTION * n)))
    pairs = []
    for _ in range(m):
        rows = rng.choice(n, size=mi, replace=False)
        B = np.zeros((mi, n))
        B[np.arange(mi), rows] = 1.0
        B += _PERTURBATION * (2.0 * rng.random((mi, n)) - 1.0)
        pairs.append((B @ X_true @ B.T, B))
    Y0 = rng.random((n, k))
    instance = ProblemInstance(pairs=tuple(pairs), n=n, k=k)
    return instance, Y0


@dataclass
class DemoReport:
    n: int
    k: int
    m: int
    relative_error: float
    pair_residuals: tuple
    iterations: int
    termination: str
    f_value: float
    files: dict = field(default_factory=dict)

    def lines(self):
        out = [
            f"n {self.n}",
            f"k {self.k}",
            f"m {self.m}",
            f"iterations {self.iterations}",
            f"termination {self.termination}",
            f"f {_fmt(self.f_value)}",
            f"relative_error {_fmt(self.relative_error)}",
        ]
        for i, r in enumerate(self.pair_residuals):
            out.append(f"residual_{i} {_fmt(r)}")
        return out


def _rescale_to_gray(X):
    lo, hi = float(np.min(X)), float(np.max(X))
    if hi <= lo:
        return np.zeros_like(X)
    return 255.0 * (X - lo) / (hi - lo)


def image_demo(
    input_image_path,
    m: int,
    k,
    seed: int,
    output_dir,
    *,
    tol: float = 1e-8,
    max_iterations: int = 50_000,
) -> DemoReport:
    """Run the full restoration pipeline and write results to output_dir.

    Writes restored_X.txt (full precision), restored.pgm (rescaled view),
    trace.csv, and report.txt; returns the in-memory report.
    """
    image = read_pgm(input_image_path)
    X_true = image_to_truth(image)
    n = X_true.shape[0]
    if k is None:
        k = min(16, n)
    if not 1 <= k <= n:
        raise ValueError(f"rank k={k} out of range for n={n}")
    instance, Y0 = observation_instance(X_true, m, k, seed)
    config = SolverConfig(epsilon=tol, max_iterations=max_iterations)
    result = solve(instance, Y0=Y0, config=config)
    return summarize_restoration(X_true, instance, result, output_dir)


def summarize_restoration(
    X_true, instance: ProblemInstance, result: SolverResult, output_dir
) -> DemoReport:
    X_hat = result.X_final
    rel_err = np.linalg.norm(X_hat - X_true) / np.linalg.norm(X_true)
    residuals = []
    for A, B in instance.pairs:
        gap = np.linalg.norm(A - B @ X_hat @ B.T)
        scale = np.linalg.norm(A)
        residuals.append(gap / scale if scale > 0 else gap)

    os.makedirs(output_dir, exist_ok=True)
    files = {
        "restored_X": os.path.join(output_dir, "restored_X.txt"),
        "restored_image": os.path.join(output_dir, "restored.pgm"),
        "trace": os.path.join(output_dir, "trace.csv"),
        "report": os.path.join(output_dir, "report.txt"),
    }
    write_matrix(files["restored_X"], X_hat)
    write_pgm(files["restored_image"], _rescale_to_gray(X_hat))
    write_trace(files["trace"], result.trace)

    report = DemoReport(
        n=X_true.shape[0],
        k=instance.k,
        m=instance.m,
        relative_error=float(rel_err),
        pair_residuals=tuple(float(r) for r in residuals),
        iterations=result.iterations,
        termination=result.termination_reason.value,
        f_value=result.trace[-1].f_value,
        files=files,
    )
    with open(files["report"], "w", encoding="ascii") as fh:
        fh.write("\n".join(report.lines()) + "\n")
    return report
