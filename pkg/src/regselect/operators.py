"""Forward operators for finite-dimensional inverse problems.

All operators act on flat float vectors.  Images are handled by flattening
in C order; :class:`GradientOperator` does the reshaping internally.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

# Relative cutoff below which singular values are treated as zero.
RANK_CUTOFF = 1e-12


@dataclass(frozen=True)
class SpectralDecomposition:
    """Singular value decomposition A = U diag(s) V^T with s nonincreasing."""

    singular_values: np.ndarray  # (r,)
    left: np.ndarray             # (m, r) orthonormal columns
    right: np.ndarray            # (d, r) orthonormal columns

    def __post_init__(self):
        s = self.singular_values
        if np.any(s < 0) or np.any(np.diff(s) > 0):
            raise ValueError("singular values must be nonnegative and nonincreasing")

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.singular_values) @ self.right.T


class DenseOperator:
    """Operator given by an explicit matrix."""

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        self.matrix = matrix
        self._decomp = None
        self._decomp_lock = threading.Lock()

    @property
    def range_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def domain_dim(self) -> int:
        return self.matrix.shape[1]

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.domain_dim:
            raise ValueError(f"expected input of dimension {self.domain_dim}, got {x.shape[-1]}")
        return x @ self.matrix.T

    def adjoint_apply(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.range_dim:
            raise ValueError(f"expected input of dimension {self.range_dim}, got {y.shape[-1]}")
        return y @ self.matrix

    def decomposition(self) -> SpectralDecomposition:
        # Compute-once under a lock so concurrent sweeps share one SVD.
        if self._decomp is None:
            with self._decomp_lock:
                if self._decomp is None:
                    u, s, vt = np.linalg.svd(self.matrix, full_matrices=False)
                    self._decomp = SpectralDecomposition(s, u, vt.T)
        return self._decomp

    def operator_norm(self) -> float:
        return float(self.decomposition().singular_values[0])

    def normalize(self) -> "DenseOperator":
        nrm = self.operator_norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero operator")
        return DenseOperator(self.matrix / nrm)


class IdentityOperator:
    """Identity on R^dim; the forward map of pure denoising problems."""

    def __init__(self, dim: int):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.dim = int(dim)

    @property
    def range_dim(self) -> int:
        return self.dim

    @property
    def domain_dim(self) -> int:
        return self.dim

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected input of dimension {self.dim}, got {x.shape[-1]}")
        return x

    adjoint_apply = apply

    def operator_norm(self) -> float:
        return 1.0

    def decomposition(self) -> SpectralDecomposition:
        eye = np.eye(self.dim)
        return SpectralDecomposition(np.ones(self.dim), eye, eye)


class ConvolutionOperator:
    """Circular convolution with a fixed kernel on R^d."""

    def __init__(self, kernel):
        kernel = np.asarray(kernel, dtype=float)
        if kernel.ndim != 1 or kernel.size == 0:
            raise ValueError("kernel must be a nonempty vector")
        self.kernel = kernel
        self._kernel_fft = np.fft.rfft(kernel)

    @property
    def range_dim(self) -> int:
        return self.kernel.size

    @property
    def domain_dim(self) -> int:
        return self.kernel.size

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.kernel.size:
            raise ValueError(f"expected input of dimension {self.kernel.size}, got {x.shape[-1]}")
        return np.fft.irfft(np.fft.rfft(x, axis=-1) * self._kernel_fft, n=self.kernel.size, axis=-1)

    def adjoint_apply(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.kernel.size:
            raise ValueError(f"expected input of dimension {self.kernel.size}, got {y.shape[-1]}")
        # Adjoint of circular convolution is circular correlation.
        return np.fft.irfft(np.fft.rfft(y, axis=-1) * np.conj(self._kernel_fft), n=self.kernel.size, axis=-1)

    def operator_norm(self) -> float:
        # Circulant: singular values are the Fourier magnitudes of the kernel.
        return float(np.max(np.abs(np.fft.fft(self.kernel))))

    def normalize(self) -> "ConvolutionOperator":
        nrm = self.operator_norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero operator")
        return ConvolutionOperator(self.kernel / nrm)

    def as_dense(self) -> DenseOperator:
        d = self.kernel.size
        idx = (np.arange(d)[:, None] - np.arange(d)[None, :]) % d
        return DenseOperator(self.kernel[idx])


class GradientOperator:
    """Forward-difference gradient of a side x side image, flattened.

    The output stacks all vertical differences x[i+1,j]-x[i,j] (C order),
    then all horizontal differences x[i,j+1]-x[i,j], giving 2*side*(side-1)
    components.  The adjoint is the corresponding negative divergence.
    """

    def __init__(self, side: int):
        if side < 2:
            raise ValueError("side must be at least 2")
        self.side = int(side)

    @property
    def domain_dim(self) -> int:
        return self.side * self.side

    @property
    def range_dim(self) -> int:
        return 2 * self.side * (self.side - 1)

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.domain_dim,):
            raise ValueError(f"expected flat image of dimension {self.domain_dim}")
        img = x.reshape(self.side, self.side)
        dv, dh = image_gradient(img)
        return np.concatenate([dv.ravel(), dh.ravel()])

    def adjoint_apply(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.range_dim,):
            raise ValueError(f"expected gradient field of dimension {self.range_dim}")
        d = self.side
        nv = d * (d - 1)
        dv = p[:nv].reshape(d - 1, d)
        dh = p[nv:].reshape(d, d - 1)
        return gradient_adjoint(dv, dh).ravel()

    def operator_norm(self) -> float:
        # Largest eigenvalue of the Neumann difference Laplacian in each
        # direction is 4 sin^2((d-1) pi / (2d)); the 2-D operator adds them.
        d = self.side
        return float(np.sqrt(8.0) * np.sin((d - 1) * np.pi / (2 * d)))


def image_gradient(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Forward differences of a 2-D array: (vertical (d-1,d), horizontal (d,d-1))."""
    return img[1:, :] - img[:-1, :], img[:, 1:] - img[:, :-1]


def gradient_adjoint(dv: np.ndarray, dh: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`image_gradient` (negative divergence), as a 2-D array."""
    d = dv.shape[1]
    out = np.zeros((d, d))
    out[:-1, :] -= dv
    out[1:, :] += dv
    out[:, :-1] -= dh
    out[:, 1:] += dh
    return out


def fractional_power_apply(decomp: SpectralDecomposition, s: float, z):
    """Apply (A^T A)^s to z through the decomposition of A.

    Components of z in the kernel of A (singular values below the relative
    rank cutoff) map to zero; s = 0 therefore projects onto the range.
    """
    if s < 0:
        raise ValueError("exponent must be nonnegative")
    z = np.asarray(z, dtype=float)
    sig = decomp.singular_values
    keep = sig > RANK_CUTOFF * (sig[0] if sig.size else 0.0)
    v = decomp.right[:, keep]
    weights = (sig[keep] ** 2) ** s
    return (z @ v) * weights @ v.T


def gaussian_deriv2_kernel(d: int) -> np.ndarray:
    """Second derivative of a Gaussian bump, sampled on centered integers.

    Uses phi(t) = exp(-t^2/(2 pi^2)), whose second derivative is
    phi(t) (t^2/pi^4 - 1/pi^2), evaluated analytically; the mean is removed
    so the kernel sums to zero.
    """
    if d < 2:
        raise ValueError("kernel length must be at least 2")
    t = np.arange(d, dtype=float) - d // 2
    phi = np.exp(-(t ** 2) / (2 * np.pi ** 2))
    h = phi * (t ** 2 / np.pi ** 4 - 1.0 / np.pi ** 2)
    return h - h.mean()
