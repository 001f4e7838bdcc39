use super::spline::CubicSpline;

#[derive(Clone, Debug)]
pub enum SocShape {
    Constant(f64),
    /// asymptote + (short_range - asymptote)·½(1 - tanh((R - center)/width))
    TanhSwitch {
        short_range: f64,
        asymptote: f64,
        center: f64,
        width: f64,
    },
    /// Spline inside the table, end values held constant outside.
    Tabulated(CubicSpline),
    /// Right branch of `own` joined to the left branch of `partner`.
    Swapped {
        own: Box<SocShape>,
        partner: Box<SocShape>,
        r_swap: f64,
        blend_width: f64,
    },
}

impl SocShape {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            SocShape::Constant(v) => *v,
            SocShape::TanhSwitch {
                short_range,
                asymptote,
                center,
                width,
            } => {
                asymptote + (short_range - asymptote) * 0.5 * (1.0 - ((r - center) / width).tanh())
            }
            SocShape::Tabulated(spline) => spline.eval(r.clamp(spline.x_min(), spline.x_max())),
            SocShape::Swapped {
                own,
                partner,
                r_swap,
                blend_width,
            } => {
                let w = 0.5 * (1.0 + ((r - r_swap) / blend_width).tanh());
                w * own.value(r) + (1.0 - w) * partner.value(r)
            }
        }
    }

    pub fn asymptotic_value(&self) -> f64 {
        match self {
            SocShape::Constant(v) => *v,
            SocShape::TanhSwitch { asymptote, .. } => *asymptote,
            SocShape::Tabulated(spline) => spline.eval(spline.x_max()),
            SocShape::Swapped { own, .. } => own.asymptotic_value(),
        }
    }
}

/// Spin-orbit matrix element between two case (a) states (0-based indices).
#[derive(Clone, Debug)]
pub struct SocModel {
    pub pair: (usize, usize),
    pub shape: SocShape,
}

impl SocModel {
    pub fn value(&self, r: f64) -> f64 {
        self.shape.value(r)
    }

    pub fn asymptotic_value(&self) -> f64 {
        self.shape.asymptotic_value()
    }
}

/// Exchanges the inner branches of two couplings across R_swap, so that each
/// output follows its own raw curve outside and the partner's raw curve inside.
pub fn diabatize_swap(
    a: &SocModel,
    b: &SocModel,
    r_swap: f64,
    blend_width: f64,
) -> (SocModel, SocModel) {
    let swapped = |own: &SocModel, partner: &SocModel| SocModel {
        pair: own.pair,
        shape: SocShape::Swapped {
            own: Box::new(own.shape.clone()),
            partner: Box::new(partner.shape.clone()),
            r_swap,
            blend_width,
        },
    };
    (swapped(a, b), swapped(b, a))
}

/// Gaussian coupling W·exp(-(R - Rc)²/(2δ²)) linearizing the X₁ crossing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct X1Coupling {
    pub w: f64,
    pub rc: f64,
    pub delta: f64,
}

impl X1Coupling {
    pub fn value(&self, r: f64) -> f64 {
        let x = (r - self.rc) / self.delta;
        self.w * (-0.5 * x * x).exp()
    }
}

impl Default for X1Coupling {
    fn default() -> Self {
        Self {
            w: 0.001795,
            rc: 11.06,
            delta: 0.75,
        }
    }
}
