//! Design records and lossless JSON output.

use std::io;

use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::analysis::{DesignContext, FlatnessOrders};
use crate::design::{alpha_beta_tf, design, kalata_gains, TransferFunction};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::models::ModelSpec;
use crate::simulate::NamedFilter;

/// Parameters of an alpha-beta tracker, given either directly or through
/// the tracking index.
#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaBetaSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tracking_index: Option<f64>,
    #[serde(default)]
    pub q: i32,
    pub ts: f64,
    /// Turn rate of interest in rad/s, used as the default analysis
    /// frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl AlphaBetaSpec {
    pub fn gains(&self) -> Result<(f64, f64)> {
        match (self.alpha, self.beta, self.tracking_index) {
            (Some(a), Some(b), None) => Ok((a, b)),
            (None, None, Some(l)) if l > 0.0 => Ok(kalata_gains(l)),
            (None, None, Some(l)) => Err(Error::InvalidConfig(format!(
                "tracking_index must be positive, got {l}"
            ))),
            _ => Err(Error::InvalidConfig(
                "give either alpha and beta, or tracking_index".into(),
            )),
        }
    }
}

/// What `design` accepts: a pole-placement spec or an alpha-beta tracker.
#[derive(Debug, Clone, PartialEq)]
pub enum DesignInput {
    Model(ModelSpec),
    AlphaBeta(AlphaBetaSpec),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlphaBetaWrapper {
    alpha_beta: AlphaBetaSpec,
}

impl DesignInput {
    /// Parses a ModelSpec object or `{"alpha_beta": {...}}`. Error messages
    /// carry the line and column reported by the JSON parser.
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        if v.get("alpha_beta").is_some() {
            Ok(Self::AlphaBeta(
                serde_json::from_str::<AlphaBetaWrapper>(text)?.alpha_beta,
            ))
        } else {
            Ok(Self::Model(serde_json::from_str(text)?))
        }
    }
}

/// Alpha-beta parameters as written to a design record.
#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct AlphaBetaParams {
    pub alpha: f64,
    pub beta: f64,
    pub q: i32,
    pub ts: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

/// Serialized result of a design.
#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct DesignRecord {
    #[serde(rename = "K")]
    pub k: usize,
    pub b: Vec<f64>,
    pub a: Vec<f64>,
    pub gain_kin: Vec<f64>,
    pub g_obs_kin: Matrix,
    pub c_obs_kin: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_beta: Option<AlphaBetaParams>,
}

impl DesignRecord {
    pub fn from_input(input: &DesignInput) -> Result<Self> {
        match input {
            DesignInput::Model(spec) => {
                let (obs, tf) = design(spec)?;
                Ok(Self {
                    k: tf.order(),
                    b: tf.b,
                    a: tf.a,
                    gain_kin: obs.gain_kin,
                    g_obs_kin: obs.g_obs_kin,
                    c_obs_kin: obs.c_obs_kin,
                    spec: Some(spec.clone()),
                    alpha_beta: None,
                })
            }
            DesignInput::AlphaBeta(ab) => {
                if !(ab.ts.is_finite() && ab.ts > 0.0) {
                    return Err(Error::InvalidSamplingPeriod(ab.ts));
                }
                let (alpha, beta) = ab.gains()?;
                let tf = alpha_beta_tf(alpha, beta, ab.q);
                let ts = ab.ts;
                let gain = vec![alpha, beta / ts];
                // G_obs = G - K c_prd with G = [[1, ts], [0, 1]], c_prd = [1, ts]
                let g = Matrix::from_fn(2, 2, |i, j| {
                    let g_ij = [[1.0, ts], [0.0, 1.0]][i][j];
                    g_ij - gain[i] * [1.0, ts][j]
                });
                Ok(Self {
                    k: 2,
                    b: tf.b,
                    a: tf.a,
                    gain_kin: gain,
                    g_obs_kin: g,
                    c_obs_kin: vec![1.0, -(ab.q as f64) * ts],
                    spec: None,
                    alpha_beta: Some(AlphaBetaParams {
                        alpha,
                        beta,
                        q: ab.q,
                        ts,
                        omega: ab.omega,
                    }),
                })
            }
        }
    }

    pub fn transfer_function(&self) -> TransferFunction {
        TransferFunction {
            b: self.b.clone(),
            a: self.a.clone(),
        }
    }

    pub fn context(&self) -> Result<DesignContext> {
        match (&self.spec, &self.alpha_beta) {
            (Some(s), _) => Ok(DesignContext::from_spec(s)),
            (None, Some(ab)) => Ok(DesignContext {
                q: ab.q,
                d: 0,
                ts: ab.ts,
                orders: FlatnessOrders {
                    l_dc: 2,
                    l_wb: 0,
                    l_pi: 0,
                },
                omega_man: ab.omega.map(|w| w * ab.ts),
            }),
            (None, None) => Err(Error::InvalidConfig(
                "design record has neither spec nor alpha_beta".into(),
            )),
        }
    }

    /// Checks that the coefficient vectors are usable.
    pub fn validate(&self) -> Result<()> {
        let ok = self.a.len() == self.k + 1
            && self.b.len() == self.k + 1
            && self.a.first() == Some(&1.0)
            && self.a.iter().chain(&self.b).all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "design record needs K + 1 = {} finite coefficients in b and a, with a[0] = 1",
                self.k + 1
            )))
        }
    }

    pub fn named_filter(&self, name: &str) -> Result<NamedFilter> {
        Ok(NamedFilter {
            name: name.to_string(),
            tf: self.transfer_function(),
            q: self.context()?.q,
        })
    }
}

/// Pretty JSON formatter that writes every float with 17 significant
/// digits. Non-finite values are written as `null` by serde_json itself.
#[derive(Default)]
pub struct FullPrecision<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with full-precision floats and a
/// trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision::default());
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}
