//! Unit conversion between dimensionless rates (units of the natural
//! linewidth) and physical Kr 3d -> 5p values.

/// Natural linewidth of the Kr 3d -> 5p Auger resonance, meV.
pub const KR_GAMMA2_MEV: f64 = 83.0;

/// hbar in meV fs (CODATA: 6.582119569e-16 eV s).
pub const HBAR_MEV_FS: f64 = 658.2119569;

/// Kr natural linewidth as a rate: 83 meV / hbar = 0.1261 rad/fs
/// (equivalently 126.1 rad/ps).
pub const KR_GAMMA2_RAD_PER_FS: f64 = KR_GAMMA2_MEV / HBAR_MEV_FS;

/// Kr core-hole lifetime 1/Gamma2 = 7.930 fs.
pub const KR_LIFETIME_FS: f64 = HBAR_MEV_FS / KR_GAMMA2_MEV;

/// Rate in rad/fs -> dimensionless units of Gamma2.
pub fn rate_to_dimensionless(rate_rad_per_fs: f64) -> f64 {
    rate_rad_per_fs / KR_GAMMA2_RAD_PER_FS
}

/// Time in fs -> dimensionless units of 1/Gamma2.
pub fn time_to_dimensionless(time_fs: f64) -> f64 {
    time_fs * KR_GAMMA2_RAD_PER_FS
}
