//! JSON API over the annotation engine, store and reconciliation client.

pub mod config;
pub mod error;
pub mod extract;
pub mod routes;
pub mod state;

use std::sync::Arc;

use kwicdesk_reconcile::WikidataClient;
use kwicdesk_store::{Accounts, FileStore, SystemClock, TokenService};

pub use config::Config;
pub use error::ApiError;
pub use routes::router;
pub use state::AppState;

/// Wires the file store, accounts, token service and live Wikidata client
/// described by `config`.
pub fn state_from_config(config: &Config) -> anyhow::Result<AppState> {
    let store = FileStore::open(&config.storage_root)?;
    let accounts = Accounts::open(config.users_file())?;
    let tokens = TokenService::new(config.token_key()?, config.token_lifetime(), Arc::new(SystemClock));
    let wikidata = WikidataClient::http(config.wikidata.clone())?;
    Ok(AppState::new(Arc::new(store), Arc::new(accounts), Arc::new(tokens), wikidata))
}
