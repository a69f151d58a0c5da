//! Starts the HTTP service on the given port (default 8645), then try:
//!
//!     curl -s localhost:8645/v1/check -d '{"source":"f :: Int -> Nat\nf x = _0\n"}'

use lqh::service::{serve, DEFAULT_PORT};
use lqh::session::Config;

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let port = std::env::args()
        .nth(1)
        .and_then(|p| p.parse().ok())
        .unwrap_or(DEFAULT_PORT);
    println!("listening on http://127.0.0.1:{port}");
    serve(Config::default(), port).await
}
