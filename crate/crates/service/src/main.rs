use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use coarsekit::json;
use coarsekit_service::{load_fixture_dir, router, SessionStore};

/// Serves the decomposition game over HTTP.
#[derive(Debug, Parser)]
#[command(name = "coarsekit-service", version)]
struct Args {
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Directory of extra family or space documents offered as fixtures.
    #[arg(long)]
    fixture_dir: Option<PathBuf>,
    /// Sessions are restored from this file at startup if it exists and
    /// written back on shutdown.
    #[arg(long)]
    snapshot: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    match serve(args).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({"error": "service", "message": e}));
            ExitCode::FAILURE
        }
    }
}

async fn serve(args: Args) -> Result<(), String> {
    let extra = match &args.fixture_dir {
        Some(dir) => load_fixture_dir(dir)?,
        None => Default::default(),
    };
    let store = Arc::new(SessionStore::new(extra));
    if let Some(path) = args.snapshot.as_ref().filter(|p| p.exists()) {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let restored = json::parse(&text)
            .and_then(|v| store.restore(&v))
            .map_err(|e| format!("{}: {e}", path.display()))?;
        eprintln!("restored {restored} sessions from {}", path.display());
    }
    let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port))
        .await
        .map_err(|e| format!("cannot bind {}:{}: {e}", args.host, args.port))?;
    eprintln!("listening on http://{}", listener.local_addr().map_err(|e| e.to_string())?);
    axum::serve(listener, router(store.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| e.to_string())?;
    if let Some(path) = &args.snapshot {
        fs::write(path, json::to_canonical_string(&store.snapshot()))
            .map_err(|e| format!("{}: {e}", path.display()))?;
        eprintln!("wrote snapshot to {}", path.display());
    }
    Ok(())
}
