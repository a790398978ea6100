use crate::error::{Error, Result};

/// Hill height used outside `|x| > width` by the two-part potential.
pub const PIECEWISE_OUTER_HEIGHT: f64 = 10.0;

/// Well position used by [`potential_piecewise`].
pub const PIECEWISE_WIDTH: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PotentialVariant {
    /// `A (x - width)^2 (x + width)^2` everywhere.
    Standard,
    /// Standard form with the requested height inside `|x| <= width` and
    /// height [`PIECEWISE_OUTER_HEIGHT`] outside.
    Piecewise,
}

impl PotentialVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            PotentialVariant::Standard => "standard",
            PotentialVariant::Piecewise => "piecewise",
        }
    }
}

impl std::str::FromStr for PotentialVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(PotentialVariant::Standard),
            "piecewise" => Ok(PotentialVariant::Piecewise),
            other => Err(format!("expected `standard` or `piecewise`, got `{other}`")),
        }
    }
}

/// Double-well potential on the center-of-total-spin coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialParams {
    pub height: f64,
    pub width: f64,
    pub variant: PotentialVariant,
}

impl Default for PotentialParams {
    fn default() -> Self {
        Self { height: 5.0, width: 4.0, variant: PotentialVariant::Standard }
    }
}

impl PotentialParams {
    pub fn standard(height: f64, width: f64) -> Self {
        Self { height, width, variant: PotentialVariant::Standard }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::invalid("width", format!("must be finite and > 0, got {}", self.width)));
        }
        if !(self.height.is_finite() && self.height >= 0.0) {
            return Err(Error::invalid("height", format!("must be finite and >= 0, got {}", self.height)));
        }
        Ok(())
    }

    /// `A = height / width^4`.
    pub fn prefactor(&self) -> f64 {
        self.height / self.width.powi(4)
    }

    /// Potential value for this variant. Assumes [`Self::validate`] passed.
    pub fn value(&self, x: f64) -> f64 {
        match self.variant {
            PotentialVariant::Standard => quartic(self.height, self.width, x),
            PotentialVariant::Piecewise => {
                if x.abs() > self.width {
                    quartic(PIECEWISE_OUTER_HEIGHT, self.width, x)
                } else {
                    quartic(self.height, self.width, x)
                }
            }
        }
    }
}

fn quartic(height: f64, width: f64, x: f64) -> f64 {
    let a = height / width.powi(4);
    let l = x - width;
    let r = x + width;
    a * l * l * r * r
}

/// Standard double well `A (x - width)^2 (x + width)^2`, `A = height / width^4`.
pub fn potential_eval(x: f64, pot: &PotentialParams) -> Result<f64> {
    pot.validate()?;
    Ok(quartic(pot.height, pot.width, x))
}

/// Two-part potential: hill `height` for `|x| <= 4`, hill 10 beyond.
pub fn potential_piecewise(x: f64, height: f64) -> Result<f64> {
    let pot = PotentialParams { height, width: PIECEWISE_WIDTH, variant: PotentialVariant::Piecewise };
    pot.validate()?;
    Ok(pot.value(x))
}
