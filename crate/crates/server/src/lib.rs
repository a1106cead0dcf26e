//! Run store, review log and the HTTP API used by the web front end.

pub mod api;
pub mod review;
pub mod store;

pub use api::{api_router, AppState, RunHandle};
pub use review::{ReviewLog, ReviewRecord, ReviewStatus};
pub use store::{RunData, RunMeta, RunStore, StoreError};

use axum::Router;
use std::path::{Path, PathBuf};
use std::sync::RwLock;
use thiserror::Error;
use tower_http::cors::CorsLayer;
use tower_http::services::{ServeDir, ServeFile};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot open review log in {path}: {source}")]
    Reviews {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no runs found in {0}")]
    NoRuns(PathBuf),
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

pub fn load_run(dir: &Path) -> Result<RunHandle, ServeError> {
    let data = RunData::load(dir)?;
    let reviews = ReviewLog::open(dir).map_err(|source| ServeError::Reviews {
        path: dir.to_path_buf(),
        source,
    })?;
    Ok(RunHandle {
        data,
        reviews: RwLock::new(reviews),
    })
}

/// Loads either a single run directory or every run of a store.
pub fn load_state(path: &Path) -> Result<AppState, ServeError> {
    if path.join("run.json").exists() {
        let run = load_run(path)?;
        return Ok(AppState::new([(run.data.meta.run_id.clone(), run)]));
    }
    let store = RunStore::new(path);
    let ids = store.run_ids()?;
    if ids.is_empty() {
        return Err(ServeError::NoRuns(path.to_path_buf()));
    }
    let runs = ids
        .into_iter()
        .map(|id| load_run(&store.run_dir(&id)).map(|h| (id, h)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AppState::new(runs))
}

#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    pub static_dir: Option<PathBuf>,
    /// Permissive CORS for a front end served from another origin.
    pub dev: bool,
}

pub fn app(state: AppState, options: &ServeOptions) -> Router {
    let mut router = Router::new().nest("/api/v1", api_router(state));
    if let Some(dir) = &options.static_dir {
        let index = dir.join("index.html");
        router = router.fallback_service(ServeDir::new(dir).fallback(ServeFile::new(index)));
    }
    if options.dev {
        router = router.layer(CorsLayer::permissive());
    }
    router
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, router: Router) -> Result<(), ServeError> {
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
