//! Runs the dispatcher's HTTP API.
//!
//! cargo run --example http_server -- [config.json]
//!
//! curl -X POST localhost:8080/sessions -H 'content-type: application/json' -d '{"scenario":"2d-shape-random","seed":3}'
//! curl -X POST localhost:8080/jobs/claim -H 'content-type: application/json' -d '{"worker_id":"w1","role":"director"}'

use std::net::SocketAddr;
use std::sync::Arc;

use chatcrowd::dispatch::{serve, DispatchConfig, Dispatcher};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    tracing_subscriber::fmt().init();
    let config = match std::env::args().nth(1) {
        Some(path) => DispatchConfig::load(path.as_ref())?,
        None => DispatchConfig::default(),
    };
    let addr = SocketAddr::from(([127, 0, 0, 1], config.port));
    let dispatcher = Arc::new(Dispatcher::open(config)?);
    println!("listening on http://{addr}");
    serve(dispatcher, addr).await?;
    Ok(())
}
