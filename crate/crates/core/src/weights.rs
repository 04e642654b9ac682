//! Weight families, algebraic invariants and their constraints.
//!
//! A [`WeightSet`] holds the fourteen PT-invariant amplitudes at one spectral point. The
//! gauge `c̃± = c±` is built in for the four trigonometric families; `d̃ = Ψ d` carries
//! the branch value of Ψ.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{c, Error, Result, C64, I};

/// Spectral points whose denominators fall below this modulus are rejected.
pub const POLE_TOL: f64 = 1e-8;

/// Defining ratios with a denominator below this modulus are reported as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-13;

/// The integrable families and the two parameter-free special points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchId {
    #[serde(rename = "1A")]
    B1A,
    #[serde(rename = "1B")]
    B1B,
    #[serde(rename = "2A")]
    B2A,
    #[serde(rename = "2B")]
    B2B,
    #[serde(rename = "1S")]
    S1S,
    #[serde(rename = "2S")]
    S2S,
}

impl BranchId {
    /// The four continuous families.
    pub const FAMILIES: [BranchId; 4] = [BranchId::B1A, BranchId::B1B, BranchId::B2A, BranchId::B2B];
    /// Families plus special points.
    pub const ALL: [BranchId; 6] = [
        BranchId::B1A,
        BranchId::B1B,
        BranchId::B2A,
        BranchId::B2B,
        BranchId::S1S,
        BranchId::S2S,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BranchId::B1A => "1A",
            BranchId::B1B => "1B",
            BranchId::B2A => "2A",
            BranchId::B2B => "2B",
            BranchId::S1S => "1S",
            BranchId::S2S => "2S",
        }
    }

    /// True when `gamma` is a free parameter of the branch.
    pub fn has_free_gamma(self) -> bool {
        matches!(self, BranchId::B1A | BranchId::B1B | BranchId::B2A)
    }
}

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BranchId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['B', 'b']).to_ascii_uppercase();
        BranchId::ALL
            .into_iter()
            .find(|b| b.label() == t)
            .ok_or_else(|| Error::Config(format!("unknown branch '{s}'")))
    }
}

/// A discrete sign `±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Sign of the real part of `z`, `Plus` for zero.
    pub fn of(z: f64) -> Sign {
        if z < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(format!("sign must be +1 or -1, got {v}")),
        }
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "+1" | "+" => Ok(Sign::Plus),
            "-1" | "-" => Ok(Sign::Minus),
            other => Err(Error::Config(format!("sign must be +1 or -1, got '{other}'"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Continuous and discrete parameters of a branch.
///
/// For 1S and 2S the sign of `epsilon1` selects the upper or lower column of the special
/// points; `gamma` is ignored there and for 2B.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchParams {
    pub gamma: C64,
    pub epsilon1: Sign,
    pub epsilon2: Sign,
    pub d_sign: Sign,
    pub j0: C64,
}

impl Default for BranchParams {
    fn default() -> Self {
        BranchParams::new(c(0.9, 0.0))
    }
}

impl BranchParams {
    pub fn new(gamma: C64) -> Self {
        BranchParams {
            gamma,
            epsilon1: Sign::Plus,
            epsilon2: Sign::Plus,
            d_sign: Sign::Plus,
            j0: c(1.0, 0.0),
        }
    }

    pub fn with_signs(mut self, epsilon1: Sign, epsilon2: Sign, d_sign: Sign) -> Self {
        self.epsilon1 = epsilon1;
        self.epsilon2 = epsilon2;
        self.d_sign = d_sign;
        self
    }

    pub fn with_j0(mut self, j0: C64) -> Self {
        self.j0 = j0;
        self
    }

    /// Anisotropy of branch 2B: `iπ(1-ε1)/2 + iπε1/6`.
    pub fn gamma_2b(epsilon1: Sign) -> C64 {
        let e1 = epsilon1.value();
        I * std::f64::consts::PI * ((1.0 - e1) / 2.0 + e1 / 6.0)
    }

    /// The anisotropy actually used by `branch`.
    pub fn effective_gamma(&self, branch: BranchId) -> C64 {
        use std::f64::consts::PI;
        match branch {
            BranchId::B2B => Self::gamma_2b(self.epsilon1),
            BranchId::S1S => match self.epsilon1 {
                Sign::Plus => c(0.0, -PI / 6.0),
                Sign::Minus => c(0.0, -5.0 * PI / 6.0),
            },
            BranchId::S2S => c(0.0, 0.0),
            _ => self.gamma,
        }
    }

    /// `Δ+` of the branch.
    pub fn delta_plus(&self, branch: BranchId) -> C64 {
        let e1 = self.epsilon1.value();
        match branch {
            BranchId::B2B | BranchId::S1S => c(e1 * 3f64.sqrt(), 0.0),
            BranchId::S2S => c(2.0 * e1, 0.0),
            _ => 2.0 * self.gamma.cosh(),
        }
    }
}

/// Names of the fourteen PT-invariant weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightName {
    APlus,
    AMinus,
    BPlus,
    BMinus,
    CPlus,
    CMinus,
    CTildePlus,
    CTildeMinus,
    D,
    DTilde,
    F,
    G,
    H,
    HTilde,
}

impl WeightName {
    pub const ALL: [WeightName; 14] = [
        WeightName::APlus,
        WeightName::AMinus,
        WeightName::BPlus,
        WeightName::BMinus,
        WeightName::CPlus,
        WeightName::CMinus,
        WeightName::CTildePlus,
        WeightName::CTildeMinus,
        WeightName::D,
        WeightName::DTilde,
        WeightName::F,
        WeightName::G,
        WeightName::H,
        WeightName::HTilde,
    ];

    /// Short ASCII symbol, e.g. `a+`, `ct-`, `ht`.
    pub fn symbol(self) -> &'static str {
        match self {
            WeightName::APlus => "a+",
            WeightName::AMinus => "a-",
            WeightName::BPlus => "b+",
            WeightName::BMinus => "b-",
            WeightName::CPlus => "c+",
            WeightName::CMinus => "c-",
            WeightName::CTildePlus => "ct+",
            WeightName::CTildeMinus => "ct-",
            WeightName::D => "d",
            WeightName::DTilde => "dt",
            WeightName::F => "f",
            WeightName::G => "g",
            WeightName::H => "h",
            WeightName::HTilde => "ht",
        }
    }

    /// Image under charge conjugation `+ ↔ −` (g, h, h̃, d, d̃, f fixed).
    pub fn charge_conjugate(self) -> WeightName {
        match self {
            WeightName::APlus => WeightName::AMinus,
            WeightName::AMinus => WeightName::APlus,
            WeightName::BPlus => WeightName::BMinus,
            WeightName::BMinus => WeightName::BPlus,
            WeightName::CPlus => WeightName::CMinus,
            WeightName::CMinus => WeightName::CPlus,
            WeightName::CTildePlus => WeightName::CTildeMinus,
            WeightName::CTildeMinus => WeightName::CTildePlus,
            other => other,
        }
    }
}

/// The fourteen amplitudes at one spectral point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSet {
    pub a_plus: C64,
    pub a_minus: C64,
    pub b_plus: C64,
    pub b_minus: C64,
    pub c_plus: C64,
    pub c_minus: C64,
    pub c_tilde_plus: C64,
    pub c_tilde_minus: C64,
    pub d: C64,
    pub d_tilde: C64,
    pub f: C64,
    pub g: C64,
    pub h: C64,
    pub h_tilde: C64,
}

impl WeightSet {
    /// All amplitudes equal to `z`.
    pub fn splat(z: C64) -> Self {
        WeightSet {
            a_plus: z,
            a_minus: z,
            b_plus: z,
            b_minus: z,
            c_plus: z,
            c_minus: z,
            c_tilde_plus: z,
            c_tilde_minus: z,
            d: z,
            d_tilde: z,
            f: z,
            g: z,
            h: z,
            h_tilde: z,
        }
    }

    pub fn get(&self, name: WeightName) -> C64 {
        match name {
            WeightName::APlus => self.a_plus,
            WeightName::AMinus => self.a_minus,
            WeightName::BPlus => self.b_plus,
            WeightName::BMinus => self.b_minus,
            WeightName::CPlus => self.c_plus,
            WeightName::CMinus => self.c_minus,
            WeightName::CTildePlus => self.c_tilde_plus,
            WeightName::CTildeMinus => self.c_tilde_minus,
            WeightName::D => self.d,
            WeightName::DTilde => self.d_tilde,
            WeightName::F => self.f,
            WeightName::G => self.g,
            WeightName::H => self.h,
            WeightName::HTilde => self.h_tilde,
        }
    }

    pub fn get_mut(&mut self, name: WeightName) -> &mut C64 {
        match name {
            WeightName::APlus => &mut self.a_plus,
            WeightName::AMinus => &mut self.a_minus,
            WeightName::BPlus => &mut self.b_plus,
            WeightName::BMinus => &mut self.b_minus,
            WeightName::CPlus => &mut self.c_plus,
            WeightName::CMinus => &mut self.c_minus,
            WeightName::CTildePlus => &mut self.c_tilde_plus,
            WeightName::CTildeMinus => &mut self.c_tilde_minus,
            WeightName::D => &mut self.d,
            WeightName::DTilde => &mut self.d_tilde,
            WeightName::F => &mut self.f,
            WeightName::G => &mut self.g,
            WeightName::H => &mut self.h,
            WeightName::HTilde => &mut self.h_tilde,
        }
    }

    /// `d̃ / d`.
    pub fn psi(&self) -> C64 {
        self.d_tilde / self.d
    }

    /// Largest amplitude modulus.
    pub fn max_norm(&self) -> f64 {
        WeightName::ALL.iter().map(|&n| self.get(n).norm()).fold(0.0, f64::max)
    }

    /// Elementwise map.
    pub fn map(&self, mut op: impl FnMut(WeightName, C64) -> C64) -> WeightSet {
        let mut out = *self;
        for n in WeightName::ALL {
            *out.get_mut(n) = op(n, self.get(n));
        }
        out
    }
}

fn guard(quantity: &'static str, z: C64) -> Result<C64> {
    let modulus = z.norm();
    if modulus < POLE_TOL || !modulus.is_finite() {
        Err(Error::Pole { quantity, modulus })
    } else {
        Ok(z)
    }
}

/// Weights of `branch` at spectral parameter `lambda`.
pub fn make_weights(branch: BranchId, params: &BranchParams, lambda: C64) -> Result<WeightSet> {
    match branch {
        BranchId::B1A => weights_1a(params, lambda),
        BranchId::B1B => weights_1b(params, lambda),
        BranchId::B2A => weights_2a(params, lambda),
        BranchId::B2B => weights_2b(params, lambda),
        BranchId::S1S => {
            let g = params.effective_gamma(BranchId::S1S);
            let p = BranchParams { gamma: g, epsilon1: params.epsilon1.flip(), ..*params };
            weights_1b(&p, lambda)
        }
        BranchId::S2S => weights_2s(params, lambda),
    }
}

fn six_vertex_part(gamma: C64, lambda: C64) -> Result<(C64, C64)> {
    let s = guard("sinh(lambda+gamma)", (lambda + gamma).sinh())?;
    Ok((lambda.sinh() / s, gamma.sinh() / s))
}

fn gauge_fixed(a: [C64; 2], b: [C64; 2], cc: [C64; 2], d: C64, dt: C64, f: C64, g: C64, h: [C64; 2]) -> WeightSet {
    WeightSet {
        a_plus: a[0],
        a_minus: a[1],
        b_plus: b[0],
        b_minus: b[1],
        c_plus: cc[0],
        c_minus: cc[1],
        c_tilde_plus: cc[0],
        c_tilde_minus: cc[1],
        d,
        d_tilde: dt,
        f,
        g,
        h: h[0],
        h_tilde: h[1],
    }
}

fn gamma_bar(epsilon1: Sign) -> C64 {
    I * std::f64::consts::FRAC_PI_4 * (1.0 - epsilon1.value())
}

fn weights_1a(p: &BranchParams, l: C64) -> Result<WeightSet> {
    let g = p.gamma;
    let gb = gamma_bar(p.epsilon1);
    let (b, cc) = six_vertex_part(g, l)?;
    let one = c(1.0, 0.0);
    let den = guard("sinh(lambda+gamma/2+gamma_bar)", (l + g / 2.0 + gb).sinh())? * (l + g).sinh();
    let d = p.d_sign.value() * g.sinh() * l.sinh() / den;
    let f = (l - g / 2.0 + gb).sinh() * l.sinh() / den;
    let gw = (-2.0 * (g / 2.0 - gb).cosh() + (1.5 * g + gb).cosh() + (2.0 * l + g / 2.0 - gb).cosh()) / (2.0 * den);
    let h = 2.0 * (g / 2.0 - gb).cosh() * (g / 2.0 + gb).sinh().powi(2) / den;
    Ok(gauge_fixed([one, one], [b, b], [cc, cc], d, d, f, gw, [h, h]))
}

fn weights_1b(p: &BranchParams, l: C64) -> Result<WeightSet> {
    let g = p.gamma;
    let g0 = I * std::f64::consts::FRAC_PI_3 * p.epsilon1.value();
    let (b, cc) = six_vertex_part(g, l)?;
    let den = guard("sinh(lambda+gamma-gamma0)", (l + g - g0).sinh())? * (l + g).sinh();
    let am = (l - g + g0).sinh() * (l - g).sinh() / den;
    let bm = (g - l).sinh() * l.sinh() / den;
    let cm = (g0 - g).sinh() * (l - g).sinh() / den;
    let d = p.d_sign.value() * (g.sinh() * (g - g0).sinh()).sqrt() * l.sinh() / den;
    let f = (l - g0).sinh() * l.sinh() / den;
    let gw = (-1.0 + (2.0 * l + g0).cosh() + (2.0 * g - g0).cosh()) / (2.0 * den);
    let h = g.sinh() * (g - g0).sinh() / den;
    Ok(gauge_fixed([c(1.0, 0.0), am], [b, bm], [cc, cm], d, d, f, gw, [h, h]))
}

fn weights_2a(p: &BranchParams, l: C64) -> Result<WeightSet> {
    let g = p.gamma;
    let gb = gamma_bar(p.epsilon1);
    let e2 = p.epsilon2.value();
    let (b, cc) = six_vertex_part(g, l)?;
    let one = c(1.0, 0.0);
    let den = guard("cosh(lambda+3gamma/2+gamma_bar)", (l + 1.5 * g + gb).cosh())? * (l + g).sinh();
    let d = -p.d_sign.value() * (e2 * g).exp() * g.sinh() * l.sinh() / den;
    let dt = -(-2.0 * e2 * g).exp() * d;
    let fnum = (l + g / 2.0 + gb).cosh() * l.sinh();
    let f = fnum / den;
    let gw = (-(g / 2.0 + gb).sinh() - (1.5 * g - gb).sinh() + (2.5 * g + gb).sinh() + (2.0 * l + 1.5 * g - gb).sinh())
        / (2.0 * den);
    let h = (den - (2.0 * e2 * g).exp() * fnum) / den;
    let ht = (den - (-2.0 * e2 * g).exp() * fnum) / den;
    Ok(gauge_fixed([one, one], [b, b], [cc, cc], d, dt, f, gw, [h, ht]))
}

fn weights_2b(p: &BranchParams, l: C64) -> Result<WeightSet> {
    use std::f64::consts::FRAC_PI_3;
    let g = BranchParams::gamma_2b(p.epsilon1);
    let e1 = p.epsilon1.value();
    let e2 = p.epsilon2.value();
    let (b, cc) = six_vertex_part(g, l)?;
    let one = c(1.0, 0.0);
    let omega = (I * FRAC_PI_3 * e2).exp();
    let den = guard("cosh(lambda-2gamma)", (l - 2.0 * g).cosh())? * guard("cosh(lambda)", l.cosh())?;
    let d = p.d_sign.value() * e1 * e2 * omega * l.sinh() / (2.0 * den);
    let dt = -omega * d;
    let fnum = (l + 2.0 * g).sinh() * l.sinh();
    let f = -fnum / den;
    let gw = (2.0 * l).cosh() / (2.0 * den);
    let h = (den + (-I * FRAC_PI_3 * e2).exp() * fnum) / den;
    let ht = (den + (I * FRAC_PI_3 * e2).exp() * fnum) / den;
    Ok(gauge_fixed([one, one], [b, -b], [cc, cc], d, dt, f, gw, [h, ht]))
}

/// Rational point with `Ψ = Λ± = -1`; the spectral parameter enters additively.
fn weights_2s(p: &BranchParams, u: C64) -> Result<WeightSet> {
    let one = c(1.0, 0.0);
    let u1 = guard("lambda+1", u + 1.0)?;
    let u3 = guard("2lambda+3", 2.0 * u + 3.0)?;
    let den = u1 * u3;
    let b = p.epsilon1.value() * u / u1;
    let cc = one / u1;
    let d = p.d_sign.value() * 2.0 * I * u / den;
    let f = u * (2.0 * u + 1.0) / den;
    let gw = (3.0 - 3.0 * u - 2.0 * u * u) / den;
    let h = (4.0 * u + 3.0) / den;
    Ok(gauge_fixed([one, one], [b, b], [cc, cc], d, -d, f, gw, [h, h]))
}

/// The sixteen spectral-parameter independent combinations of a weight set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub delta_p: C64,
    pub delta_m: C64,
    pub lambda_p: C64,
    pub lambda_m: C64,
    pub psi: C64,
    pub omega: C64,
    pub gamma_p: C64,
    pub gamma_m: C64,
    pub theta_p: C64,
    pub theta_m: C64,
    pub dg_p: C64,
    pub dg_m: C64,
    pub dh_p: C64,
    pub dh_m: C64,
    pub dht_p: C64,
    pub dht_m: C64,
}

impl InvariantSet {
    pub const FIELDS: [&'static str; 16] = [
        "delta_p", "delta_m", "lambda_p", "lambda_m", "psi", "omega", "gamma_p", "gamma_m", "theta_p", "theta_m",
        "dg_p", "dg_m", "dh_p", "dh_m", "dht_p", "dht_m",
    ];

    pub fn values(&self) -> [C64; 16] {
        [
            self.delta_p,
            self.delta_m,
            self.lambda_p,
            self.lambda_m,
            self.psi,
            self.omega,
            self.gamma_p,
            self.gamma_m,
            self.theta_p,
            self.theta_m,
            self.dg_p,
            self.dg_m,
            self.dh_p,
            self.dh_m,
            self.dht_p,
            self.dht_m,
        ]
    }

    /// Field-by-field deviation `|x - y| / max(1, |y|)`.
    pub fn max_relative_deviation(&self, reference: &InvariantSet) -> (f64, &'static str) {
        self.values()
            .iter()
            .zip(reference.values())
            .zip(Self::FIELDS)
            .map(|((x, y), name)| ((x - y).norm() / y.norm().max(1.0), name))
            .fold((0.0, ""), |acc, v| if v.0 > acc.0 || v.0.is_nan() { v } else { acc })
    }
}

fn ratio(what: &'static str, num: C64, den: C64) -> Result<C64> {
    if den.norm() < DEGENERATE_TOL {
        Err(Error::DegenerateWeight(what))
    } else {
        Ok(num / den)
    }
}

/// Invariants computed literally from a weight set (`Ψ = d̃/d`).
pub fn compute_invariants(w: &WeightSet) -> Result<InvariantSet> {
    let (ap, am, bp, bm, cp, cm) = (w.a_plus, w.a_minus, w.b_plus, w.b_minus, w.c_plus, w.c_minus);
    let (d, f, g, h, ht) = (w.d, w.f, w.g, w.h, w.h_tilde);
    let psi = ratio("d", w.d_tilde, d)?;
    let delta = |a: C64, b: C64, cc: C64| ratio("a*b", a * a + b * b - cc * cc, a * b);
    let delta_p = delta(ap, bp, cp)?;
    let delta_m = delta(am, bm, cm)?;
    let d2 = d * d;
    let lambda_p = ratio("d^2", bp * bp + f * f - delta_p * bp * f, d2)?;
    let lambda_m = ratio("d^2", bm * bm + f * f - delta_m * bm * f, d2)?;
    let omega = ratio("f", lambda_p / psi * bm - bp, f)?;
    let gam = |a: C64, b: C64, dl: C64| ratio("b^2-a*f", a * b - dl * a * f + b * f, b * b - a * f);
    let gamma_p = gam(ap, bp, delta_p)?;
    let gamma_m = gam(am, bm, delta_m)?;
    let theta_p = ratio("b+b- - Psi d^2 + f^2", (bp + bm) * f, bp * bm - psi * d2 + f * f)?;
    let theta_m = ratio("b+b- - Psi d^2 - f^2", (bp - bm) * f, bp * bm - psi * d2 - f * f)?;
    let lp = ratio("lambda_p", c(1.0, 0.0), lambda_p)?;
    let lm = ratio("lambda_m", c(1.0, 0.0), lambda_m)?;
    Ok(InvariantSet {
        delta_p,
        delta_m,
        lambda_p,
        lambda_m,
        psi,
        omega,
        gamma_p,
        gamma_m,
        theta_p,
        theta_m,
        dg_p: ratio("b+", -g + ap + psi * lp * f, bp)?,
        dg_m: ratio("b-", -g + am + psi * lm * f, bm)?,
        dh_p: ratio("b+", -psi * h + psi * ap + f, bp)?,
        dh_m: ratio("b-", -psi * h + psi * am + f, bm)?,
        dht_p: ratio("b+", -ht + ap + psi * f, bp)?,
        dht_m: ratio("b-", -ht + am + psi * f, bm)?,
    })
}

/// Closed-form invariants of a branch with `Δ+ = 2cosh γ` substituted.
///
/// The roots `√(4 − Δ+²) = 2i sinh γ` and `√(Δ+² − 4) = 2 sinh γ` follow γ analytically,
/// so every complex γ lands on the sheet selected by the weights.
pub fn reference_invariants(branch: BranchId, params: &BranchParams) -> InvariantSet {
    let e1 = params.epsilon1.value();
    let e2 = params.epsilon2.value();
    let s3 = 3f64.sqrt();
    let dp = params.delta_plus(branch);
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    match branch {
        BranchId::B1A => InvariantSet {
            delta_p: dp,
            delta_m: dp,
            lambda_p: one,
            lambda_m: one,
            psi: one,
            omega: zero,
            gamma_p: dp + e1,
            gamma_m: dp + e1,
            theta_p: 2.0 / dp,
            theta_m: zero,
            dg_p: dp - e1,
            dg_m: dp - e1,
            dh_p: dp,
            dh_m: dp,
            dht_p: dp,
            dht_m: dp,
        },
        BranchId::B1B => {
            let r = 2.0 * I * params.gamma.sinh();
            let sr = e1 * s3 * r;
            let dh_m = (s3 * r - e1 * dp) / (2.0 * e1);
            InvariantSet {
                delta_p: dp,
                delta_m: (-dp + sr) / 2.0,
                lambda_p: 2.0 * sr / (3.0 * dp + sr),
                lambda_m: (s3 * dp + e1 * r) / (2.0 * e1 * r),
                psi: one,
                omega: (6.0 - 3.0 * dp * dp - sr * dp) / (3.0 * dp + sr),
                gamma_p: (3.0 * dp - sr) / 6.0,
                gamma_m: (-3.0 * dp + sr) / 6.0,
                theta_p: (dp + sr) / 2.0,
                theta_m: (-3.0 * dp + sr) / 6.0,
                dg_p: (e1 * s3 + dp * r) / r,
                dg_m: (4.0 - dp * dp) * (dp + sr) / (sr * dp + 4.0 - dp * dp),
                dh_p: dp,
                dh_m,
                dht_p: dp,
                dht_m: dh_m,
            }
        }
        BranchId::B2A => {
            let l = (2.0 - dp * dp + 2.0 * e2 * dp * params.gamma.sinh()) / 2.0;
            InvariantSet {
                delta_p: dp,
                delta_m: dp,
                lambda_p: l,
                lambda_m: l,
                psi: l,
                omega: zero,
                gamma_p: c(e1, 0.0),
                gamma_m: c(e1, 0.0),
                theta_p: 2.0 / dp,
                theta_m: zero,
                dg_p: dp - e1,
                dg_m: dp - e1,
                dh_p: zero,
                dh_m: zero,
                dht_p: zero,
                dht_m: zero,
            }
        }
        BranchId::B2B => {
            let w = (I * std::f64::consts::FRAC_PI_3 * e2).exp();
            InvariantSet {
                delta_p: c(e1 * s3, 0.0),
                delta_m: c(-e1 * s3, 0.0),
                lambda_p: w,
                lambda_m: w,
                psi: -w,
                omega: zero,
                gamma_p: c(e1 / s3, 0.0),
                gamma_m: c(-e1 / s3, 0.0),
                theta_p: zero,
                theta_m: c(-2.0 * e1 / s3, 0.0),
                dg_p: zero,
                dg_m: zero,
                dh_p: zero,
                dh_m: zero,
                dht_p: zero,
                dht_m: zero,
            }
        }
        BranchId::S1S => InvariantSet {
            delta_p: c(e1 * s3, 0.0),
            delta_m: c(-e1 * s3, 0.0),
            lambda_p: -one,
            lambda_m: -one,
            psi: one,
            omega: zero,
            gamma_p: c(2.0 * e1 / s3, 0.0),
            gamma_m: c(-2.0 * e1 / s3, 0.0),
            theta_p: zero,
            theta_m: c(-2.0 * e1 / s3, 0.0),
            dg_p: zero,
            dg_m: zero,
            dh_p: c(e1 * s3, 0.0),
            dh_m: c(-e1 * s3, 0.0),
            dht_p: c(e1 * s3, 0.0),
            dht_m: c(-e1 * s3, 0.0),
        },
        BranchId::S2S => InvariantSet {
            delta_p: c(2.0 * e1, 0.0),
            delta_m: c(2.0 * e1, 0.0),
            lambda_p: -one,
            lambda_m: -one,
            psi: -one,
            omega: zero,
            gamma_p: c(-e1, 0.0),
            gamma_m: c(-e1, 0.0),
            theta_p: c(e1, 0.0),
            theta_m: zero,
            dg_p: c(3.0 * e1, 0.0),
            dg_m: c(3.0 * e1, 0.0),
            dh_p: zero,
            dh_m: zero,
            dht_p: zero,
            dht_m: zero,
        },
    }
}

/// A named residual magnitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

impl Residual {
    fn new(name: &str, z: C64) -> Self {
        Residual { name: name.to_string(), value: z.norm() }
    }
}

/// Largest value in a residual list.
pub fn max_residual(rs: &[Residual]) -> f64 {
    rs.iter().map(|r| r.value).fold(0.0, f64::max)
}

/// Residuals of every algebraic constraint among the invariants.
///
/// Always reported: the Λ product, the two Ω constraints, both Θ relations, the Γ relation
/// and the three four-term coefficients A1–A3. When `Ψ² = 1` the branch-1 relations for the
/// h-type invariants are added, otherwise `Ω = 0` and `Λ+² = Ψ²` are added.
pub fn check_invariant_constraints(inv: &InvariantSet) -> Vec<Residual> {
    let (dp, dm, lp, lm, p, o) = (inv.delta_p, inv.delta_m, inv.lambda_p, inv.lambda_m, inv.psi, inv.omega);
    let (gp, gm) = (inv.gamma_p, inv.gamma_m);
    let (dgp, dgm, dhp, dhm) = (inv.dg_p, inv.dg_m, inv.dh_p, inv.dh_m);
    let one = c(1.0, 0.0);
    let mut out = vec![
        Residual::new("lambda_product", lp * lm - p * p),
        Residual::new("omega_linear", 2.0 * o * p + dp * p - dm * lp),
        Residual::new("omega_quadratic", lp * lp - dm * lp * o * p - p * p + o * o * p * p),
        Residual::new("theta_plus", inv.theta_p - (lp + p) / (p * (dp + o))),
        Residual::new("theta_minus", inv.theta_m - (lp - p) / (p * (dp + o))),
        Residual::new("gamma_minus", gm * lp - p * (gp + o)),
    ];
    let (l, g) = (lp, gp);
    let dg = dp - g;
    out.push(Residual::new("A1", dg * l * l - (dg + o) * p * p));
    out.push(Residual::new(
        "A2",
        -l.powi(3) - (one + dgp * dg) * l * l * p + (one + dgm * (dg + o)) * l * p * p
            + (one - o * (dp - 2.0 * g + o)) * p.powi(3),
    ));
    out.push(Residual::new(
        "A3",
        dgp * p * l * l + g * l.powi(3) - (dgm + g + dgm * g * o) * l * p * p + (one + g * o) * o * p.powi(3),
    ));
    if (p * p - 1.0).norm() < 1e-9 {
        out.push(Residual::new("h_plus", dhp - (one + g * o) * (dhm * l * p - o) / (l * l)));
        out.push(Residual::new("h_omega", o - dg * (l * l - 1.0)));
        out.push(Residual::new("h_branching", (l * l - 1.0) * (one + dg * (dg * (l * l - 1.0) - dhm * l * p))));
    } else {
        out.push(Residual::new("omega_zero", o));
        out.push(Residual::new("lambda_psi", l * l - p * p));
    }
    out
}

/// The four coefficients B1–B4 of the cubic compatibility polynomial, plus the Γ relation.
///
/// These are the forms re-derived by eliminating `f`, `d²`, `a−`, `b−` and `Δ−` from the
/// three-term relations; they vanish on every valid invariant set.
pub fn b_coefficients(inv: &InvariantSet) -> [C64; 4] {
    let (dd, g, gn, l, p, o) = (inv.delta_p, inv.gamma_p, inv.gamma_m, inv.lambda_p, inv.psi, inv.omega);
    let one = c(1.0, 0.0);
    let (l2, l3, p2, p3) = (l * l, l * l * l, p * p, p * p * p);
    let (g2, o2, o3, d2) = (g * g, o * o, o * o * o, dd * dd);
    let b1 = p
        * (l2 * gn * (g - dd) + l * p * (dd * g + gn * g - g2 + dd * o + gn * o - g * o)
            - p2 * (g2 + dd * o + 2.0 * g * o + 2.0 * o2))
        + l2 * p
        - p3;
    let b2 = l3
        + l3 * g * (dd + 2.0 * gn - g)
        + l2 * p * (one - 2.0 * dd * gn - dd * g + gn * g - 4.0 * g * o)
        + l * p2
            * (-one - dd * gn + dd * g - gn * g + d2 * gn * g + dd * o + gn * o - g * o - d2 * g * o - dd * gn * g * o
                + dd * g2 * o
                - o2
                - dd * g * o2
                - 2.0 * gn * g * o2
                + g2 * o2)
        - p3 * (one - 2.0 * dd * g + g2 + d2 * g2 - 2.0 * g * o + dd * g2 * o + 2.0 * o2 - 4.0 * dd * g * o2
            - 4.0 * g * o3);
    let b3 = -l3 * (dd + gn - g)
        + l2 * p * (gn + d2 * gn - g - dd * gn * g + 2.0 * o)
        + l * p2
            * (dd + 2.0 * gn - 2.0 * g - d2 * g - 2.0 * dd * gn * g + dd * g2 - o - gn * g * o + dd * o2 + gn * o2
                - g * o2)
        + p3 * (2.0 * dd * g2 - 3.0 * o + 4.0 * dd * g * o + g2 * o - dd * o2 + 2.0 * g * o2 - 2.0 * o3);
    let b4 = -l3 * g * (one + gn * g)
        + l2 * p * (gn - g + dd * g2 + 2.0 * g2 * o)
        + l * p2
            * (gn - dd * gn * g + gn * g2 - o + dd * g * o - gn * g * o + dd * gn * g2 * o + g * o2 + gn * g2 * o2)
        - p3 * (o - 2.0 * dd * g * o + g2 * o + d2 * g2 * o - 2.0 * g * o2 + 3.0 * dd * g2 * o2 + 2.0 * g2 * o3);
    [b1, b2, b3, b4]
}

/// Residuals of B1–B4 and of the relation eliminating Γ−.
pub fn check_b_coefficients(inv: &InvariantSet) -> Vec<Residual> {
    let b = b_coefficients(inv);
    let mut out: Vec<Residual> =
        b.iter().enumerate().map(|(i, z)| Residual::new(&format!("B{}", i + 1), *z)).collect();
    out.push(Residual::new(
        "gamma_relation",
        inv.gamma_m - inv.psi * (inv.gamma_p + inv.omega) / inv.lambda_p,
    ));
    out
}

/// Amplitudes fixed by `a+`, `b+`, `c+` and the invariants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependentWeights {
    pub a_minus: C64,
    pub b_minus: C64,
    pub c_minus: C64,
    pub d: C64,
    pub f: C64,
    pub g: C64,
    pub h: C64,
    pub h_tilde: C64,
}

impl DependentWeights {
    pub fn values(&self) -> [C64; 8] {
        [self.a_minus, self.b_minus, self.c_minus, self.d, self.f, self.g, self.h, self.h_tilde]
    }

    pub fn of(w: &WeightSet) -> DependentWeights {
        DependentWeights {
            a_minus: w.a_minus,
            b_minus: w.b_minus,
            c_minus: w.c_minus,
            d: w.d,
            f: w.f,
            g: w.g,
            h: w.h,
            h_tilde: w.h_tilde,
        }
    }
}

/// Rebuild the dependent amplitudes from `a+`, `b+`, `c+` and the invariants.
///
/// `d` is `d_sign` times the principal square root; [`d_orientation`] gives the sign that
/// reproduces [`make_weights`] for a branch.
pub fn reconstruct_dependent_weights(
    a_p: C64,
    b_p: C64,
    c_p: C64,
    inv: &InvariantSet,
    d_sign: Sign,
) -> Result<DependentWeights> {
    let (dd, g, l, p, o) = (inv.delta_p, inv.gamma_p, inv.lambda_p, inv.psi, inv.omega);
    if l.norm() < DEGENERATE_TOL {
        return Err(Error::DegenerateWeight("lambda_p"));
    }
    if p.norm() < DEGENERATE_TOL {
        return Err(Error::DegenerateWeight("psi"));
    }
    let den = (dd - g) * a_p - b_p;
    if den.norm() < DEGENERATE_TOL {
        return Err(Error::DegenerateWeight("(delta_p - gamma_p) a+ - b+"));
    }
    let num = (dd - g + o) * a_p - (1.0 + g * o) * b_p;
    let ratio = num / den;
    let f = (a_p - g * b_p) * b_p / den;
    let d = -d_sign.value() * cut_stable_sqrt((1.0 - dd * g + g * g) / l) * b_p * c_p / den;
    Ok(DependentWeights {
        a_minus: p * p * (a_p + o * b_p) * ratio / (l * l),
        b_minus: p * ratio * b_p / l,
        c_minus: p * p * ratio * c_p / (l * l),
        d,
        f,
        g: a_p + p / l * f - inv.dg_p * b_p,
        h: a_p + f / p - inv.dh_p * b_p / p,
        h_tilde: a_p + p * f - inv.dht_p * b_p,
    })
}

/// Principal square root with imaginary parts at rounding level set to `+0`, so that radicands
/// on the negative real axis always map to the upper half plane.
fn cut_stable_sqrt(z: C64) -> C64 {
    if z.im.abs() <= 1e-12 * z.norm() {
        C64::new(z.re, 0.0).sqrt()
    } else {
        z.sqrt()
    }
}

/// Sign relating the branch's `d` weight to the principal root used in reconstruction.
pub fn d_orientation(branch: BranchId, params: &BranchParams) -> Result<Sign> {
    let mut lambda = c(0.37, 0.21);
    for _ in 0..8 {
        if let Ok(w) = make_weights(branch, params, lambda) {
            let inv = compute_invariants(&w)?;
            let rec = reconstruct_dependent_weights(w.a_plus, w.b_plus, w.c_plus, &inv, Sign::Plus)?;
            return Ok(Sign::of((w.d / rec.d).re));
        }
        lambda += c(0.113, 0.071);
    }
    Err(Error::Pole { quantity: "reference point", modulus: 0.0 })
}

/// `(x - Δ y/2)² - (Δ²/4 - 1) y² - 1`, zero on the fundamental conic.
pub fn conic_residual(x: C64, y: C64, delta_p: C64) -> C64 {
    let t = x - delta_p * y / 2.0;
    t * t - (delta_p * delta_p / 4.0 - 1.0) * y * y - 1.0
}

/// `(a+/c+, b+/c+)` along the hyperbolic parameterization of the conic.
pub fn parameterize_conic(lambda: C64, gamma: C64) -> (C64, C64) {
    let s = gamma.sinh();
    ((lambda + gamma).sinh() / s, lambda.sinh() / s)
}
