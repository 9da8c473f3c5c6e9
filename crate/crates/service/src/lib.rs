//! HTTP service over the policy engine, generator and evaluation.
//!
//! Sessions live as JSON snapshots in a store directory and are re-verified
//! every time they are loaded. Requests on one session are serialized; the
//! bank, library and template are loaded once and shared read-only.

mod api;
mod catalog;
mod error;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;

pub use api::{
    router, AnswerView, AppState, BankView, CreatedSession, Progress, QuestionView, SectionProgress, SessionView,
    NON_COMPLIANT_HEADER,
};
pub use catalog::{Catalog, CatalogError, CatalogPaths};
pub use error::{ApiError, ERROR_CODES};
pub use store::{SessionStore, StoreError};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub store_dir: PathBuf,
    pub catalog: CatalogPaths,
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// Loads the inputs, binds and serves until the process is stopped.
pub async fn serve(config: ServiceConfig) -> Result<(), ServeError> {
    let catalog = Catalog::load(&config.catalog)?;
    let store = SessionStore::open(&config.store_dir)?;
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.listen,
            source,
        })?;
    tracing::info!(addr = %listener.local_addr()?, store = %config.store_dir.display(), "listening");
    axum::serve(listener, router(AppState::new(catalog, store))).await?;
    Ok(())
}
