"""System geometry, path loss, channel realizations and received-signal synthesis.

Powers are handled in dBm in configurations and converted once with
:func:`db_to_linear`; linear powers are therefore in milliwatts throughout.
Complex Gaussian draws follow the CN(0, s) convention: real and imaginary
parts are independent with variance s/2 each.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Sender ids understood by synthesize_rx besides integer user indices.
ANCHOR_1 = "a1"
ANCHOR_2 = "a2"
ANCHOR_LOS = "a"


def db_to_linear(value_db):
    """Convert dB (or dBm) to a linear ratio (or milliwatts)."""
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class PathLossModel:
    reference_gain_db: float = -30.0
    reference_distance: float = 1.0
    exponent_nlos: float = 3.0
    exponent_los: float = 2.0
    carrier_wavelength: float = 0.4

    def __post_init__(self):
        if self.reference_gain_db > 0:
            raise ValueError("reference_gain_db is a gain and must be <= 0 dB")
        if min(self.exponent_nlos, self.exponent_los) < 2:
            raise ValueError("path-loss exponents must be >= 2")
        if self.reference_distance <= 0 or self.carrier_wavelength <= 0:
            raise ValueError("reference distance and wavelength must be positive")

    @property
    def reference_gain(self):
        return float(db_to_linear(self.reference_gain_db))


def path_loss_gain(distance, exponent, model: PathLossModel):
    """Linear power gain ``L0 * (d / d0) ** -exponent``.

    Raises ValueError when any distance is below the reference distance.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d < model.reference_distance):
        raise ValueError(
            f"distance {d.min():.4g} m is below the reference distance "
            f"{model.reference_distance:g} m"
        )
    gain = model.reference_gain * (d / model.reference_distance) ** (-float(exponent))
    return float(gain) if gain.ndim == 0 else gain


@dataclass(frozen=True)
class SystemGeometry:
    """Node placement in meters. Defaults reproduce the 6x10 IRS desk setup."""

    bs_position: tuple = (50.0, 0.0, 20.0)
    irs_center: tuple = (0.0, 100.0, 2.0)
    irs_rows: int = 6
    irs_cols: int = 10
    element_spacing: float = 0.15
    anchor1_position: tuple = (2.0, 99.0, 0.0)
    anchor2_position: tuple = (2.0, 101.0, 0.0)
    anchor_los_position: tuple = (2.0, 100.0, 0.0)
    user_positions: tuple = ()
    # Used only when user_positions is empty: users are dropped uniformly in a
    # horizontal disk around user_center.
    user_center: tuple = (2.0, 100.0, 0.0)
    user_radius: float = 5.0

    def __post_init__(self):
        if self.irs_rows < 1 or self.irs_cols < 1:
            raise ValueError("IRS must have at least one row and one column")
        if not self.element_spacing > 0:
            raise ValueError("element_spacing must be positive")
        pts = [self.bs_position, self.irs_center, self.anchor1_position,
               self.anchor2_position, self.anchor_los_position, self.user_center,
               *self.user_positions]
        arr = np.asarray(pts, dtype=float)
        if arr.shape[1] != 3 or not np.all(np.isfinite(arr)):
            raise ValueError("all positions must be finite 3-vectors")

    @property
    def n_elements(self):
        return self.irs_rows * self.irs_cols

    @classmethod
    def for_elements(cls, n, **kwargs):
        """Geometry with an ``n``-element IRS laid out on the squarest grid."""
        rows = max(r for r in range(1, int(np.sqrt(n)) + 1) if n % r == 0)
        return cls(irs_rows=rows, irs_cols=n // rows, **kwargs)

    def element_positions(self):
        """(N, 3) element coordinates, row-major (element n = row * cols + col).

        The array plane passes through the IRS center and faces the horizontal
        projection of the IRS-to-BS direction; rows stack vertically.
        """
        center = np.asarray(self.irs_center, dtype=float)
        to_bs = np.asarray(self.bs_position, dtype=float) - center
        normal = np.array([to_bs[0], to_bs[1], 0.0])
        if np.linalg.norm(normal) < 1e-12:
            normal = np.array([1.0, 0.0, 0.0])
        normal /= np.linalg.norm(normal)
        horizontal = np.array([-normal[1], normal[0], 0.0])
        vertical = np.array([0.0, 0.0, 1.0])
        r = (np.arange(self.irs_rows) - (self.irs_rows - 1) / 2) * self.element_spacing
        c = (np.arange(self.irs_cols) - (self.irs_cols - 1) / 2) * self.element_spacing
        rr, cc = np.meshgrid(r, c, indexing="ij")
        return (center + rr.reshape(-1, 1) * vertical
                + cc.reshape(-1, 1) * horizontal)


def draw_rayleigh_channel(rows, cols, gain, rng):
    """i.i.d. CN(0, gain) entries as a ``rows x cols`` complex matrix."""
    if gain < 0:
        raise ValueError("gain must be non-negative")
    w = rng.standard_normal((rows, cols, 2))
    return np.sqrt(gain / 2.0) * (w[..., 0] + 1j * w[..., 1])


def los_channel_from_distances(distances, model: PathLossModel):
    d = np.asarray(distances, dtype=float)
    amplitude = np.sqrt(path_loss_gain(d, model.exponent_los, model))
    return amplitude * np.exp(-2j * np.pi * d / model.carrier_wavelength)


def los_channel(geometry: SystemGeometry, anchor_position, model: PathLossModel):
    """Deterministic spherical-wavefront IRS-to-anchor channel (length N)."""
    d = np.linalg.norm(
        geometry.element_positions() - np.asarray(anchor_position, dtype=float), axis=1
    )
    return los_channel_from_distances(d, model)


def cascade(H, h):
    """``H @ diag(h)`` without forming the diagonal matrix."""
    H = np.asarray(H)
    h = np.asarray(h)
    if H.ndim != 2 or h.ndim != 1 or H.shape[1] != h.shape[0]:
        raise ValueError(f"cannot cascade {H.shape} with {h.shape}")
    return H * h[np.newaxis, :]


@dataclass
class ChannelRealization:
    """One draw of every link in the system plus the derived cascades.

    Per-user quantities are stacked along the first axis: ``h_bu`` is (K, M),
    ``h_su`` is (K, N) and ``cascaded_bsu`` is (K, M, N).
    """

    H_bs: np.ndarray
    h_bu: np.ndarray
    h_su: np.ndarray
    h_ba1: np.ndarray
    h_ba2: np.ndarray
    h_sa1: np.ndarray
    h_sa2: np.ndarray
    h_a1a2: complex
    # single LoS anchor used by the one-anchor variant
    h_ba_los: np.ndarray
    h_sa_los: np.ndarray
    user_positions: np.ndarray = field(default=None, repr=False)
    cascaded_bsu: np.ndarray = field(init=False, repr=False)
    cascaded_bsa1: np.ndarray = field(init=False, repr=False)
    cascaded_bsa2: np.ndarray = field(init=False, repr=False)
    cascaded_bsa_los: np.ndarray = field(init=False, repr=False)
    cascaded_a1sa2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.cascaded_bsu = self.H_bs[np.newaxis, :, :] * self.h_su[:, np.newaxis, :]
        self.cascaded_bsa1 = cascade(self.H_bs, self.h_sa1)
        self.cascaded_bsa2 = cascade(self.H_bs, self.h_sa2)
        self.cascaded_bsa_los = cascade(self.H_bs, self.h_sa_los)
        self.cascaded_a1sa2 = self.h_sa2 * self.h_sa1

    @property
    def M(self):
        return self.H_bs.shape[0]

    @property
    def N(self):
        return self.H_bs.shape[1]

    @property
    def K(self):
        return self.h_bu.shape[0]


def drop_users(geometry: SystemGeometry, K, rng):
    """User positions: the configured ones, or uniform in the user disk."""
    if geometry.user_positions:
        pos = np.asarray(geometry.user_positions, dtype=float)
        if len(pos) < K:
            raise ValueError(f"{len(pos)} user positions configured, {K} needed")
        return pos[:K]
    radius = geometry.user_radius * np.sqrt(rng.uniform(size=K))
    angle = rng.uniform(0.0, 2 * np.pi, size=K)
    offset = np.stack([radius * np.cos(angle), radius * np.sin(angle), np.zeros(K)], axis=1)
    return np.asarray(geometry.user_center, dtype=float) + offset


def draw_channels(M, K, geometry: SystemGeometry, pathloss: PathLossModel, rng):
    """Draw a full :class:`ChannelRealization` for an ``M``-antenna BS.

    All non-LoS links are Rayleigh with the NLoS exponent, with large-scale
    gain computed from the distance to the IRS center. The IRS-to-LoS-anchor
    link is deterministic.
    """
    N = geometry.n_elements
    bs = np.asarray(geometry.bs_position, dtype=float)
    irs = np.asarray(geometry.irs_center, dtype=float)
    a1 = np.asarray(geometry.anchor1_position, dtype=float)
    a2 = np.asarray(geometry.anchor2_position, dtype=float)
    a_los = np.asarray(geometry.anchor_los_position, dtype=float)
    c = pathloss.exponent_nlos

    def gain(p, q):
        return path_loss_gain(np.linalg.norm(p - q), c, pathloss)

    users = drop_users(geometry, K, rng)
    H_bs = draw_rayleigh_channel(M, N, gain(bs, irs), rng)
    h_bu = np.stack([draw_rayleigh_channel(M, 1, gain(bs, u), rng)[:, 0] for u in users])
    h_su = np.stack([draw_rayleigh_channel(N, 1, gain(irs, u), rng)[:, 0] for u in users])
    return ChannelRealization(
        H_bs=H_bs,
        h_bu=h_bu.reshape(K, M),
        h_su=h_su.reshape(K, N),
        h_ba1=draw_rayleigh_channel(M, 1, gain(bs, a1), rng)[:, 0],
        h_ba2=draw_rayleigh_channel(M, 1, gain(bs, a2), rng)[:, 0],
        h_sa1=draw_rayleigh_channel(N, 1, gain(irs, a1), rng)[:, 0],
        h_sa2=draw_rayleigh_channel(N, 1, gain(irs, a2), rng)[:, 0],
        h_a1a2=complex(draw_rayleigh_channel(1, 1, gain(a1, a2), rng)[0, 0]),
        h_ba_los=draw_rayleigh_channel(M, 1, gain(bs, a_los), rng)[:, 0],
        h_sa_los=los_channel(geometry, a_los, pathloss),
        user_positions=users,
    )


@dataclass
class NoiseModel:
    """Additive CN(0, sigma^2) receiver noise with its own random stream."""

    noise_power_dbm: float
    rng_seed: int | None = None
    rng: np.random.Generator = field(default=None, repr=False)

    def __post_init__(self):
        if not self.power > 0 or not np.isfinite(self.power):
            raise ValueError("noise power must be positive and finite")
        if self.rng is None:
            self.rng = np.random.default_rng(self.rng_seed)

    @property
    def power(self):
        return float(db_to_linear(self.noise_power_dbm))

    def sample(self, shape):
        return draw_rayleigh_channel(int(np.prod(shape)), 1, self.power, self.rng).reshape(shape)


def _links(channels: ChannelRealization, sender):
    if sender == ANCHOR_1:
        return channels.h_ba1, channels.h_sa1
    if sender == ANCHOR_2:
        return channels.h_ba2, channels.h_sa2
    if sender == ANCHOR_LOS:
        return channels.h_ba_los, channels.h_sa_los
    if isinstance(sender, (int, np.integer)) and 0 <= sender < channels.K:
        return channels.h_bu[sender], channels.h_su[sender]
    raise KeyError(f"unknown sender {sender!r}")


def _check_reflection(reflection, N):
    if reflection is None:
        return np.zeros(N, dtype=complex)
    v = np.asarray(reflection, dtype=complex)
    if v.shape != (N,):
        raise ValueError(f"reflection must have length {N}, got {v.shape}")
    if np.any(v != 0) and not np.allclose(np.abs(v), 1.0, atol=1e-9):
        raise ValueError("reflection coefficients must be unit modulus (or all zero)")
    return v


def synthesize_rx(channels: ChannelRealization, reflection, tx, power,
                  noise: NoiseModel | None = None, receiver="bs"):
    """Received signal for one slot.

    ``reflection`` is the length-N IRS pattern, or None for "IRS off".
    ``tx`` maps sender id (``"a1"``, ``"a2"``, ``"a"`` or a user index) to its
    pilot symbol. At ``receiver="bs"`` the result is a length-M vector; at
    ``receiver="a2"`` (only anchor A1 may transmit) it is a complex scalar.
    """
    v = _check_reflection(reflection, channels.N)
    amp = np.sqrt(power)
    if receiver == "bs":
        y = np.zeros(channels.M, dtype=complex)
        for sender, x in tx.items():
            direct, irs_side = _links(channels, sender)
            y += (direct + channels.H_bs @ (v * irs_side)) * x
        y *= amp
        if noise is not None:
            y += noise.sample(y.shape)
        return y
    if receiver == ANCHOR_2:
        y = 0j
        for sender, x in tx.items():
            if sender != ANCHOR_1:
                raise KeyError(f"sender {sender!r} has no modeled link to anchor A2")
            y += (channels.h_a1a2 + channels.h_sa2 @ (v * channels.h_sa1)) * x
        y *= amp
        if noise is not None:
            y += noise.sample(())[()]
        return complex(y)
    raise KeyError(f"unknown receiver {receiver!r}")
