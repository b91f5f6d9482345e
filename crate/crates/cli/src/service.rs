//! HTTP API used by the interactive editor.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;
use tower_http::cors::CorsLayer;

use tacton_sim::analysis::{HarmonicReport, PeakList};
use tacton_sim::pipeline::{derived, simulate_point, AnalysisSettings, Derived, PipelineError};
use tacton_sim::synthesis::{
    command_signal, field_grid, FieldAggregate, FieldGrid, SynthesisError, DEFAULT_CARRIER_RATE_HZ,
    DEFAULT_SKIN_RATE_HZ,
};
use tacton_sim::{Point2D, TactonDocument, ValidationError};

use crate::commands::{shape_catalog, ShapeInfo};

/// Most points returned for the carrier-resolved command waveform.
pub const MAX_COMMAND_POINTS: usize = 20_000;
pub const DEFAULT_GRID_SPACING_MM: f64 = 1.0;

#[derive(Debug, Clone, Deserialize)]
pub struct SimulateRequest {
    pub tacton: TactonDocument,
    /// (x, y) in millimeters.
    pub skin_point: (f64, f64),
    #[serde(default)]
    pub sample_rate: Option<f64>,
    #[serde(default)]
    pub include_grid: bool,
    #[serde(default)]
    pub grid_spacing: Option<f64>,
}

/// Command waveform reduced by min/max binning; `t_s` and `p` are parallel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecimatedWaveform {
    pub sample_rate_hz: f64,
    pub original_len: usize,
    pub t_s: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledWaveform {
    pub sample_rate_hz: f64,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumBody {
    pub frequencies_hz: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateResponse {
    pub command_waveform: DecimatedWaveform,
    pub skin_waveform: SampledWaveform,
    pub spectrum: SpectrumBody,
    pub peaks: PeakList,
    pub classification: HarmonicReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<FieldGrid>,
    pub derived: Derived,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ErrorBody {
    pub kind: String,
    pub field: Option<String>,
    pub message: String,
}

#[derive(Debug)]
pub enum ApiError {
    BadJson(String),
    Invalid(ValidationError),
    Engine(String),
    Internal(String),
}

impl From<SynthesisError> for ApiError {
    fn from(e: SynthesisError) -> Self {
        ApiError::Engine(e.to_string())
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        ApiError::Engine(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::BadJson(message) => (
                StatusCode::BAD_REQUEST,
                ErrorBody {
                    kind: "InvalidJson".into(),
                    field: None,
                    message,
                },
            ),
            ApiError::Invalid(e) => {
                let status = match e {
                    ValidationError::DegenerateNoStimulation => StatusCode::UNPROCESSABLE_ENTITY,
                    _ => StatusCode::BAD_REQUEST,
                };
                (
                    status,
                    ErrorBody {
                        kind: e.kind().into(),
                        field: e.field().map(str::to_owned),
                        message: e.to_string(),
                    },
                )
            }
            ApiError::Engine(message) => (
                StatusCode::BAD_REQUEST,
                ErrorBody {
                    kind: "InvalidRequest".into(),
                    field: None,
                    message,
                },
            ),
            ApiError::Internal(message) => (
                StatusCode::INTERNAL_SERVER_ERROR,
                ErrorBody {
                    kind: "Internal".into(),
                    field: None,
                    message,
                },
            ),
        };
        (status, Json(body)).into_response()
    }
}

/// Keeps the min and max of each bin, in time order. Waveforms already short
/// enough pass through unchanged.
pub fn decimate_min_max(samples: &[f64], sample_rate: f64, max_points: usize) -> DecimatedWaveform {
    let time = |i: usize| i as f64 / sample_rate;
    let (t_s, p) = if samples.len() <= max_points {
        ((0..samples.len()).map(time).collect(), samples.to_vec())
    } else {
        let bins = (max_points / 2).max(1);
        let mut t_s = Vec::with_capacity(2 * bins);
        let mut p = Vec::with_capacity(2 * bins);
        for b in 0..bins {
            let lo = b * samples.len() / bins;
            let hi = ((b + 1) * samples.len() / bins).max(lo + 1);
            let chunk = &samples[lo..hi];
            let (mut imin, mut imax) = (0, 0);
            for (i, &v) in chunk.iter().enumerate() {
                if v < chunk[imin] {
                    imin = i;
                }
                if v > chunk[imax] {
                    imax = i;
                }
            }
            let (a, b) = if imin <= imax {
                (imin, imax)
            } else {
                (imax, imin)
            };
            t_s.push(time(lo + a));
            p.push(chunk[a]);
            if b != a {
                t_s.push(time(lo + b));
                p.push(chunk[b]);
            }
        }
        (t_s, p)
    };
    DecimatedWaveform {
        sample_rate_hz: sample_rate,
        original_len: samples.len(),
        t_s,
        p,
    }
}

/// Runs one simulation request synchronously.
pub fn run_simulation(req: SimulateRequest) -> Result<SimulateResponse, ApiError> {
    let (tacton, model) = req.tacton.validate().map_err(ApiError::Invalid)?;
    let rate = req.sample_rate.unwrap_or(DEFAULT_SKIN_RATE_HZ);
    let point = Point2D::new(req.skin_point.0, req.skin_point.1);
    let sim = simulate_point(&tacton, &model, point, rate, AnalysisSettings::default())?;
    let command = command_signal(&tacton, DEFAULT_CARRIER_RATE_HZ)?;
    let grid = if req.include_grid {
        let spacing = req.grid_spacing.unwrap_or(DEFAULT_GRID_SPACING_MM);
        Some(field_grid(
            &tacton,
            &model,
            spacing,
            rate,
            FieldAggregate::Rms,
        )?)
    } else {
        None
    };
    Ok(SimulateResponse {
        command_waveform: decimate_min_max(
            &command.samples,
            command.sample_rate,
            MAX_COMMAND_POINTS,
        ),
        skin_waveform: SampledWaveform {
            sample_rate_hz: sim.waveform.sample_rate,
            samples: sim.waveform.samples,
        },
        spectrum: SpectrumBody {
            frequencies_hz: sim.spectrum.frequencies,
            magnitudes: sim.spectrum.magnitudes,
        },
        peaks: sim.peaks,
        classification: sim.report,
        grid,
        derived: derived(&tacton, &model)?,
    })
}

#[derive(Clone)]
struct AppState {
    permits: Arc<Semaphore>,
}

async fn simulate(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<Json<SimulateResponse>, ApiError> {
    let req: SimulateRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::BadJson(e.to_string()))?;
    let permit = state
        .permits
        .acquire_owned()
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    let result = tokio::task::spawn_blocking(move || {
        let _permit = permit;
        run_simulation(req)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?;
    result.map(Json)
}

async fn shapes() -> Json<Vec<ShapeInfo>> {
    Json(shape_catalog())
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

/// Router with all API routes; at most `max_concurrent` simulations run at once.
pub fn router(max_concurrent: usize) -> Router {
    let state = AppState {
        permits: Arc::new(Semaphore::new(max_concurrent.max(1))),
    };
    Router::new()
        .route("/api/v1/simulate", post(simulate))
        .route("/api/v1/shapes", get(shapes))
        .route("/api/v1/health", get(health))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serves the API until Ctrl-C.
pub async fn serve(addr: SocketAddr, max_concurrent: usize) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(max_concurrent))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
