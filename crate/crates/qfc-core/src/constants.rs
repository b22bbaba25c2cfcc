//! Physical constants (SI).

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Conversion between an intensity FWHM and the standard deviation of the
/// underlying Gaussian: FWHM = 2 sqrt(2 ln 2) sigma.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

/// Half width at half maximum of sinc^2, in units of the sinc argument:
/// sinc^2(x) = 1/2 at x = 1.391557...
pub const SINC_SQ_HWHM: f64 = 1.391_557_377_204_213;
