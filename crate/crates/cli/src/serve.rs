use crate::args::ServeArgs;
use crate::config::FileConfig;
use crate::detect::build_analyzer;
use crate::usage;
use anyhow::Context;
use reqsmell_server::{app, load_state, serve, RunStore, ServeOptions};
use std::net::SocketAddr;
use std::path::PathBuf;

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_STORE: &str = "reqsmell-store";

pub fn run(args: ServeArgs, file: FileConfig) -> anyhow::Result<u8> {
    let port = match (args.port, file.port) {
        (Some(p), _) => p,
        (None, Some(p)) => u16::try_from(p).map_err(|_| usage(format!("invalid port {p}")))?,
        (None, None) => DEFAULT_PORT,
    };
    let bind = args
        .bind
        .clone()
        .or_else(|| file.bind.clone())
        .unwrap_or_else(|| "127.0.0.1".into());
    let addr: SocketAddr = format!("{bind}:{port}")
        .parse()
        .or_else(|_| format!("[{bind}]:{port}").parse())
        .map_err(|_| usage(format!("invalid bind address `{bind}`")))?;

    let analyze = if args.analyze.is_empty() {
        file.analyze.clone().unwrap_or_default()
    } else {
        args.analyze.clone()
    };
    let target = if !analyze.is_empty() {
        if args.run_dir.is_some() {
            return Err(usage("give either RUN_DIR or --analyze, not both"));
        }
        let root = args
            .store
            .clone()
            .or_else(|| file.store.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_STORE));
        let analyzer = build_analyzer(&args.detect, &file)?;
        let corpus = analyzer.analyze_inputs(&analyze)?;
        for d in &corpus.diagnostics {
            eprintln!("warning: skipped {}: {}", d.path, d.message);
        }
        let id = RunStore::new(&root).create_run(&corpus)?;
        eprintln!("stored run {id} in {}", root.display());
        root
    } else {
        args.run_dir
            .clone()
            .or_else(|| file.store.clone())
            .ok_or_else(|| usage("serve needs RUN_DIR or --analyze"))?
    };

    let state = load_state(&target).with_context(|| format!("loading {}", target.display()))?;
    let options = ServeOptions {
        static_dir: args.static_dir.clone().or_else(|| file.static_dir.clone()),
        dev: args.dev || file.dev.unwrap_or(false),
    };
    if let Some(dir) = &options.static_dir {
        if !dir.is_dir() {
            anyhow::bail!("static directory {} does not exist", dir.display());
        }
    }

    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot listen on {addr}"))?;
        let local = listener.local_addr()?;
        let runs: Vec<&str> = state.run_ids().collect();
        eprintln!("serving {} at http://{local}/api/v1", runs.join(", "));
        serve(listener, app(state, &options)).await?;
        Ok::<_, anyhow::Error>(())
    })?;
    Ok(0)
}
