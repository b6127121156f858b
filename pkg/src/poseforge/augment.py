"""Domain-randomization augmentation engine for grayscale images.

Images are 2D numpy arrays with values in [0, 1], row-major. Every
operation is pure given an explicit numpy Generator, so a fixed
(input, parameters, seed) triple reproduces the output bit for bit.
Batch processing derives one child generator per image index from the
master seed, making results independent of scheduling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

HIST_BINS = 256


class AugPolicy(enum.Enum):
    GAUSSIAN_NOISE = "gaussian_noise"
    BRIGHTNESS_CONTRAST = "brightness_contrast"
    HIDE_AND_SEEK = "hide_and_seek"
    EXPOSURE = "exposure"
    TEXTURE = "texture"
    NO_AUGMENTATION = "no_augmentation"


@dataclass(frozen=True)
class AugConfig:
    """Parameter ranges for each policy plus the master seed.

    The ranges are engineering defaults (the augmentation literature gives
    none for this task); every one can be overridden from a config file.
    """

    noise_sigma: tuple[float, float] = (0.01, 0.05)
    alpha: tuple[float, float] = (0.5, 1.5)
    beta: tuple[float, float] = (-0.2, 0.2)
    hide_grid: tuple[int, int] = (4, 8)
    hide_prob: tuple[float, float] = (0.1, 0.3)
    hide_fill: float = 0.0
    n_spots: tuple[int, int] = (1, 5)
    spot_radius_frac: tuple[float, float] = (0.05, 0.25)  # fraction of image width
    spot_intensity: tuple[float, float] = (0.3, 1.0)
    fourier_strength: tuple[float, float] = (0.1, 0.5)
    seed: int = 0

    def __post_init__(self):
        for name in ("noise_sigma", "alpha", "beta", "hide_grid", "hide_prob",
                     "n_spots", "spot_radius_frac", "spot_intensity", "fourier_strength"):
            lo, hi = getattr(self, name)
            if hi < lo:
                raise ValueError(f"empty range for {name}: ({lo}, {hi})")
        if not 0.0 <= self.hide_fill <= 1.0:
            raise ValueError(f"hide_fill must be in [0, 1], got {self.hide_fill}")


def _check_image(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected a 2D grayscale image, got shape {img.shape}")
    return img


def histogram_equalize(img) -> np.ndarray:
    """Classical 256-bin histogram equalization.

    Pixels are quantized to the bin round(v * 255), remapped through
    (cdf - cdf_min) / (1 - cdf_min). Constant images come back unchanged.
    """
    img = _check_image(img)
    bins = np.clip(np.rint(img * (HIST_BINS - 1)).astype(np.int64), 0, HIST_BINS - 1)
    hist = np.bincount(bins.ravel(), minlength=HIST_BINS)
    cdf = np.cumsum(hist) / img.size
    occupied = np.nonzero(hist)[0]
    cdf_min = cdf[occupied[0]]
    if 1.0 - cdf_min < 1e-12:  # single occupied bin: constant image
        return img.copy()
    remap = (cdf - cdf_min) / (1.0 - cdf_min)
    return remap[bins]


def gaussian_noise(img, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise per pixel, clamped to [0, 1]."""
    img = _check_image(img)
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return img.copy()
    return np.clip(img + rng.normal(0.0, sigma, img.shape), 0.0, 1.0)


def brightness_contrast(img, alpha: float, beta: float) -> np.ndarray:
    """Affine value remap alpha * img + beta, clamped to [0, 1]."""
    img = _check_image(img)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return np.clip(alpha * img + beta, 0.0, 1.0)


def hide_and_seek(img, grid_n: int, p_hide: float, fill: float, rng: np.random.Generator) -> np.ndarray:
    """Replace random grid cells of the image with a constant fill value.

    The image is split into grid_n x grid_n cells; each cell is hidden
    independently with probability p_hide.
    """
    img = _check_image(img)
    if grid_n < 1:
        raise ValueError("grid_n must be at least 1")
    if not 0.0 <= p_hide <= 1.0:
        raise ValueError("p_hide must be in [0, 1]")
    out = img.copy()
    h, w = img.shape
    hidden = rng.random((grid_n, grid_n)) < p_hide
    row_edges = (np.arange(grid_n + 1) * h) // grid_n
    col_edges = (np.arange(grid_n + 1) * w) // grid_n
    for gi in range(grid_n):
        for gj in range(grid_n):
            if hidden[gi, gj]:
                out[row_edges[gi]:row_edges[gi + 1], col_edges[gj]:col_edges[gj + 1]] = fill
    return out


def exposure_spots(img, n_spots: int, radius_range, intensity_range, rng: np.random.Generator) -> np.ndarray:
    """Additive radial over-exposure spots at random pixels.

    Each spot adds intensity * max(0, 1 - d/r) around a uniformly drawn
    center pixel; radii are in pixels. The sum is clamped once at the end
    so brightness stays non-increasing away from each center.
    """
    img = _check_image(img)
    if n_spots < 0:
        raise ValueError("n_spots must be non-negative")
    if n_spots == 0:
        return img.copy()
    h, w = img.shape
    gy, gx = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    add = np.zeros_like(img)
    for _ in range(n_spots):
        cx = float(rng.integers(0, w))
        cy = float(rng.integers(0, h))
        r = float(rng.uniform(*radius_range))
        peak = float(rng.uniform(*intensity_range))
        if r <= 0:
            continue
        d = np.hypot(gx - cx, gy - cy)
        add += peak * np.maximum(0.0, 1.0 - d / r)
    return np.clip(img + add, 0.0, 1.0)


def _hermitian_noise(shape, strength: float, rng: np.random.Generator) -> np.ndarray:
    """Real noise field n with n[-k] = n[k], so exp(n) keeps spectra Hermitian.

    Symmetrizing halves the variance of paired entries and doubles it at
    self-conjugate ones; the scalings below restore N(0, strength^2) at
    every coefficient.
    """
    a = rng.normal(0.0, strength, shape)
    rev = tuple(np.ix_(*[(-np.arange(s)) % s for s in shape]))
    n = (a + a[rev]) / np.sqrt(2.0)
    idx = np.indices(shape)
    fixed = np.ones(shape, dtype=bool)
    for axis, size in enumerate(shape):
        fixed &= (-idx[axis]) % size == idx[axis]
    n[fixed] /= np.sqrt(2.0)
    return n


def fourier_texture(img, strength: float, rng: np.random.Generator) -> np.ndarray:
    """Texture randomization: multiplicative log-normal noise on the FFT magnitude.

    The noise field is Hermitian-symmetric so the inverse transform stays
    real, the phase is untouched (magnitude scaling is positive real), and
    the zero-frequency coefficient is left alone to preserve global
    brightness. Output is clamped to [0, 1].
    """
    img = _check_image(img)
    if strength < 0:
        raise ValueError("strength must be non-negative")
    if strength == 0:
        return img.copy()
    f = np.fft.fft2(img)
    n = _hermitian_noise(img.shape, strength, rng)
    n[0, 0] = 0.0
    out = np.real(np.fft.ifft2(f * np.exp(n)))
    return np.clip(out, 0.0, 1.0)


def sample_policy_params(policy: AugPolicy, cfg: AugConfig, rng: np.random.Generator) -> dict:
    """Draw the parameter set of one policy from the config ranges."""
    if policy is AugPolicy.GAUSSIAN_NOISE:
        return {"sigma": float(rng.uniform(*cfg.noise_sigma))}
    if policy is AugPolicy.BRIGHTNESS_CONTRAST:
        return {"alpha": float(rng.uniform(*cfg.alpha)), "beta": float(rng.uniform(*cfg.beta))}
    if policy is AugPolicy.HIDE_AND_SEEK:
        return {
            "grid_n": int(rng.integers(cfg.hide_grid[0], cfg.hide_grid[1] + 1)),
            "p_hide": float(rng.uniform(*cfg.hide_prob)),
            "fill": cfg.hide_fill,
        }
    if policy is AugPolicy.EXPOSURE:
        return {"n_spots": int(rng.integers(cfg.n_spots[0], cfg.n_spots[1] + 1))}
    if policy is AugPolicy.TEXTURE:
        return {"strength": float(rng.uniform(*cfg.fourier_strength))}
    return {}


def apply_policy(img, policy: AugPolicy, cfg: AugConfig, rng: np.random.Generator) -> np.ndarray:
    """Apply one policy with parameters sampled from the config ranges."""
    img = _check_image(img)
    params = sample_policy_params(policy, cfg, rng)
    if policy is AugPolicy.GAUSSIAN_NOISE:
        return gaussian_noise(img, params["sigma"], rng)
    if policy is AugPolicy.BRIGHTNESS_CONTRAST:
        return brightness_contrast(img, params["alpha"], params["beta"])
    if policy is AugPolicy.HIDE_AND_SEEK:
        return hide_and_seek(img, params["grid_n"], params["p_hide"], params["fill"], rng)
    if policy is AugPolicy.EXPOSURE:
        w = img.shape[1]
        radius_range = (cfg.spot_radius_frac[0] * w, cfg.spot_radius_frac[1] * w)
        return exposure_spots(img, params["n_spots"], radius_range, cfg.spot_intensity, rng)
    if policy is AugPolicy.TEXTURE:
        return fourier_texture(img, params["strength"], rng)
    return img.copy()


def rand_policy_apply(img, cfg: AugConfig, rng: np.random.Generator) -> tuple[np.ndarray, tuple[AugPolicy, AugPolicy, AugPolicy]]:
    """Draw 3 distinct policies of the 6, apply them in draw order.

    Returns the augmented image and the applied policy triple.
    """
    img = _check_image(img)
    members = list(AugPolicy)
    picks = rng.choice(len(members), size=3, replace=False)
    triple = tuple(members[int(i)] for i in picks)
    out = img
    for policy in triple:
        out = apply_policy(out, policy, cfg, rng)
    return out, triple


def child_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent per-item generator derived from (master seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def augment_batch(images, cfg: AugConfig):
    """Augment a sequence of images, one independent child RNG per index."""
    out = []
    for idx, img in enumerate(images):
        rng = child_rng(cfg.seed, idx)
        aug, _ = rand_policy_apply(img, cfg, rng)
        out.append(aug)
    return out
