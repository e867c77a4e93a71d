//! Read-only JSON API over one loaded model.
//!
//! | Method | Path                 | Body                                           |
//! |--------|----------------------|------------------------------------------------|
//! | GET    | `/api/model`         |                                                |
//! | POST   | `/api/predict/curve` | `{mix, temp_c, grid?}`                         |
//! | POST   | `/api/sweep`         | `{mix, temp_c, factor, values}`                |
//! | POST   | `/api/psd`           | `{mix, temp_c, fracture_energy, thresholds?}`  |
//!
//! Malformed bodies get 400, domain errors 422; both carry
//! `{"error": {"code", "message"}}`.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rutnet_core::mixture::{validate, MixtureDesign, FEATURE_NAMES};
use rutnet_core::predict::{
    predict_curve, psd_point, sensitivity_sweep, value_label, Factor, FactorValue, PredictedCurve, PsdPoint,
    PsdThresholds, SweepResult, DEFAULT_RUT_THRESHOLD_MM,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::artifact::{ModelArtifact, Provenance, FORMAT_VERSION};
use crate::error::Error;
use crate::pipeline::fingerprint;

#[derive(Debug)]
pub struct AppState {
    pub artifact: ModelArtifact,
    /// Used by `/api/psd` when the request leaves `fe_threshold` out.
    pub fe_threshold: Option<f64>,
    pub model_version: String,
}

impl AppState {
    pub fn new(artifact: ModelArtifact, fe_threshold: Option<f64>) -> Self {
        let model_version = fingerprint(artifact.to_json().as_bytes());
        Self {
            artifact,
            fe_threshold,
            model_version,
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/model", get(model_info))
        .route("/api/predict/curve", post(curve))
        .route("/api/sweep", post(sweep))
        .route("/api/psd", post(psd))
        .with_state(Arc::new(state))
}

pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    code: String,
    message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn bad_request(message: String) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody {
                code: "BadRequest".into(),
                message,
            },
        }
    }
}

impl From<rutnet_core::Error> for ApiError {
    fn from(e: rutnet_core::Error) -> Self {
        Self {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: ErrorBody {
                code: e.code().into(),
                message: e.to_string(),
            },
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Core(e) => e.into(),
            Error::Usage(m) => ApiError::bad_request(m),
            _ => Self {
                status: StatusCode::INTERNAL_SERVER_ERROR,
                body: ErrorBody {
                    code: "Internal".into(),
                    message: "internal error".into(),
                },
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.body }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(e.to_string()))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Warning {
    /// `base`, or `<factor>=<value>` for a sweep entry.
    pub scenario: String,
    pub feature: &'static str,
    pub value: f64,
    pub min: f64,
    pub max: f64,
}

fn warnings(state: &AppState, scenario: &str, mix: &MixtureDesign, temp_c: f64) -> Vec<Warning> {
    validate(mix, temp_c, &state.artifact.ranges)
        .into_iter()
        .map(|v| Warning {
            scenario: scenario.to_string(),
            feature: v.feature,
            value: v.value,
            min: v.min,
            max: v.max,
        })
        .collect()
}

#[derive(Serialize)]
struct RangeEntry {
    feature: &'static str,
    min: f64,
    max: f64,
}

#[derive(Serialize)]
struct ModelInfo<'a> {
    model_version: &'a str,
    format_version: u64,
    features: [&'static str; FEATURE_NAMES.len()],
    categorical_codes: serde_json::Value,
    factors: Vec<&'static str>,
    layer_dims: Vec<usize>,
    feature_ranges: Vec<RangeEntry>,
    default_rut_threshold_mm: f64,
    default_fe_threshold: Option<f64>,
    provenance: &'a Provenance,
}

async fn model_info(State(state): State<Arc<AppState>>) -> Response {
    let a = &state.artifact;
    let info = ModelInfo {
        model_version: &state.model_version,
        format_version: FORMAT_VERSION,
        features: FEATURE_NAMES,
        categorical_codes: serde_json::json!({
            "mix_type": {"Plant": 1, "Lab": 2},
            "gradation": {"Dense": 1, "SMA": 2},
            "agg_type": {"Limestone": 1, "Granite": 2},
        }),
        factors: Factor::ALL.iter().map(|f| f.name()).collect(),
        layer_dims: a.model.network.dims(),
        feature_ranges: FEATURE_NAMES
            .iter()
            .zip(a.ranges.bounds)
            .map(|(&feature, (min, max))| RangeEntry { feature, min, max })
            .collect(),
        default_rut_threshold_mm: DEFAULT_RUT_THRESHOLD_MM,
        default_fe_threshold: state.fe_threshold,
        provenance: &a.provenance,
    };
    Json(info).into_response()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveRequest {
    mix: MixtureDesign,
    temp_c: f64,
    grid: Option<Vec<u32>>,
}

#[derive(Debug, Serialize)]
pub struct CurveResponse {
    pub model_version: String,
    pub warnings: Vec<Warning>,
    pub curve: PredictedCurve,
}

async fn curve(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<CurveResponse> {
    let req: CurveRequest = parse_body(&body)?;
    req.mix.check()?;
    let curve = predict_curve(&state.artifact.model, &req.mix, req.temp_c, req.grid.as_deref())?;
    Ok(Json(CurveResponse {
        model_version: state.model_version.clone(),
        warnings: warnings(&state, "base", &req.mix, req.temp_c),
        curve,
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRequest {
    mix: MixtureDesign,
    temp_c: f64,
    factor: String,
    /// Numbers, or strings such as `"64-22"` and `"SMA"`.
    values: Vec<serde_json::Value>,
}

#[derive(Debug, Serialize)]
pub struct SweepResponse {
    pub model_version: String,
    pub warnings: Vec<Warning>,
    pub sweep: SweepResult,
}

fn sweep_value(factor: Factor, value: &serde_json::Value) -> Result<FactorValue, ApiError> {
    match value {
        serde_json::Value::String(s) => Ok(factor.parse_value(s)?),
        serde_json::Value::Number(n) => Ok(factor.parse_value(&n.to_string())?),
        other => Err(ApiError::bad_request(format!(
            "values: expected numbers or strings, found {other}"
        ))),
    }
}

async fn sweep(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<SweepResponse> {
    let req: SweepRequest = parse_body(&body)?;
    req.mix.check()?;
    let factor: Factor = req.factor.parse()?;
    let values = req
        .values
        .iter()
        .map(|v| sweep_value(factor, v))
        .collect::<Result<Vec<_>, _>>()?;
    for &v in &values {
        factor.apply(&req.mix, req.temp_c, v)?.0.check()?;
    }
    let result = sensitivity_sweep(&state.artifact.model, &req.mix, req.temp_c, factor, &values)?;
    let mut all = warnings(&state, "base", &req.mix, req.temp_c);
    for entry in &result.entries {
        let label = value_label(factor, &entry.value);
        all.extend(warnings(&state, &label, &entry.curve.mix, entry.curve.temp_c));
    }
    Ok(Json(SweepResponse {
        model_version: state.model_version.clone(),
        warnings: all,
        sweep: result,
    }))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdsRequest {
    rut_mm: Option<f64>,
    fe_threshold: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PsdRequest {
    mix: MixtureDesign,
    temp_c: f64,
    fracture_energy: f64,
    #[serde(default)]
    thresholds: ThresholdsRequest,
}

#[derive(Debug, Serialize)]
pub struct PsdResponse {
    pub model_version: String,
    pub warnings: Vec<Warning>,
    pub psd: PsdPoint,
}

async fn psd(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<PsdResponse> {
    let req: PsdRequest = parse_body(&body)?;
    req.mix.check()?;
    let thresholds = PsdThresholds {
        rut_mm: req.thresholds.rut_mm.unwrap_or(DEFAULT_RUT_THRESHOLD_MM),
        fracture_energy: req.thresholds.fe_threshold.or(state.fe_threshold),
    };
    let point = psd_point(
        &state.artifact.model,
        &req.mix,
        req.temp_c,
        req.fracture_energy,
        &thresholds,
    )?;
    Ok(Json(PsdResponse {
        model_version: state.model_version.clone(),
        warnings: warnings(&state, "base", &req.mix, req.temp_c),
        psd: point,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_are_unprocessable() {
        let e: ApiError = rutnet_core::Error::MissingThreshold.into();
        assert_eq!(e.status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(e.body.code, "MissingThreshold");
    }

    #[test]
    fn io_errors_do_not_leak() {
        let e: ApiError = Error::Io(std::io::Error::other("/secret/path")).into();
        assert_eq!(e.status, StatusCode::INTERNAL_SERVER_ERROR);
        assert!(!e.body.message.contains("secret"));
    }

    #[test]
    fn sweep_values_accept_numbers_and_text() {
        assert_eq!(
            sweep_value(Factor::TempC, &serde_json::json!(46)).unwrap(),
            FactorValue::Number(46.0)
        );
        assert_eq!(
            sweep_value(Factor::Grade, &serde_json::json!("64-22")).unwrap(),
            FactorValue::Grade { high: 64.0, low: -22.0 }
        );
        assert_eq!(
            sweep_value(Factor::Gradation, &serde_json::json!(true))
                .unwrap_err()
                .status,
            StatusCode::BAD_REQUEST
        );
        assert_eq!(
            sweep_value(Factor::Gradation, &serde_json::json!("open"))
                .unwrap_err()
                .status,
            StatusCode::UNPROCESSABLE_ENTITY
        );
    }
}
