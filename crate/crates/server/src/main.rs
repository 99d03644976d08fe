use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use kwicdesk_core::{build_index, export_entities, export_tei, parse_rdfa, render_rdfa, Document, Location};
use kwicdesk_server::config::Config;
use kwicdesk_server::routes::{self, UploadFormat};
use kwicdesk_store::{Accounts, DocumentStore, FileStore, Role};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "kwicdesk", version, about = "Entity annotation and concordance service")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Storage root; overrides the config file and KWICDESK_STORAGE_ROOT.
    #[arg(long, global = true)]
    storage: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        bind: Option<String>,
    },
    /// Store a plain-text or annotated HTML file as a new document.
    ImportDoc {
        file: PathBuf,
        /// Document id; defaults to the HTML title or the file stem.
        #[arg(long)]
        id: Option<String>,
        #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
        format: InputFormat,
    },
    /// Write a stored document to stdout or a file.
    ExportDoc {
        id: String,
        #[arg(long, value_enum, default_value_t = ExportFormat::Html)]
        format: ExportFormat,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print concordances without a running server.
    BuildConcordance {
        /// Annotated HTML file; use --doc to read from storage instead.
        input: Option<PathBuf>,
        #[arg(long, conflicts_with = "input")]
        doc: Option<String>,
        /// Limit to these entities; all non-trashed entities by default.
        #[arg(long)]
        entity: Vec<String>,
        #[arg(long, default_value = "KWIC")]
        style: String,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        sort: Option<String>,
    },
    /// Manage accounts.
    User {
        #[command(subcommand)]
        command: UserCommand,
    },
}

#[derive(Subcommand)]
enum UserCommand {
    /// Create an account. The password is read from KWICDESK_PASSWORD or
    /// the first line of stdin.
    Add {
        username: String,
        #[arg(long, value_enum, default_value_t = RoleArg::Annotator)]
        role: RoleArg,
    },
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Auto,
    Text,
    Html,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Html,
    Tei,
    Entities,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoleArg {
    Annotator,
    Admin,
}

fn config(cli: &Cli) -> anyhow::Result<Config> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(s) = &cli.storage {
        cfg.storage_root = s.clone();
    }
    Ok(cfg)
}

fn write_out(output: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => std::fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn read_document(file: &Path, id: Option<String>, format: InputFormat) -> anyhow::Result<Document> {
    let content = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let format = match format {
        InputFormat::Auto => {
            let html_ext = file.extension().is_some_and(|e| e == "html" || e == "htm");
            if html_ext || content.trim_start().starts_with('<') {
                UploadFormat::Html
            } else {
                UploadFormat::Text
            }
        }
        InputFormat::Text => UploadFormat::Text,
        InputFormat::Html => UploadFormat::Html,
    };
    let id = id.or_else(|| match format {
        UploadFormat::Text => file.file_stem().map(|s| s.to_string_lossy().into_owned()),
        _ => None,
    });
    let (doc, warnings) = routes::document_from_upload(id, &content, format)
        .map_err(|e| anyhow!("{}: {}", e.code, e.message))?;
    for w in warnings {
        tracing::warn!("{w:?}");
    }
    Ok(doc)
}

async fn serve(cfg: Config, bind: Option<String>) -> anyhow::Result<()> {
    let bind = bind.unwrap_or_else(|| cfg.bind.clone());
    let state = kwicdesk_server::state_from_config(&cfg)?;
    if state.accounts.list().is_empty() {
        tracing::warn!("no accounts yet; create one with `kwicdesk user add`");
    }
    let app = routes::router(Arc::new(state));
    let listener = tokio::net::TcpListener::bind(&bind).await.with_context(|| format!("binding {bind}"))?;
    tracing::info!("listening on http://{}{}", listener.local_addr()?, routes::PREFIX);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn build_concordance(
    doc: &Document,
    entities: &[String],
    style: &str,
    window: Option<usize>,
    sort: Option<&str>,
) -> anyhow::Result<String> {
    let cfg = routes::concordance_config(Some(style), window, sort).map_err(|e| anyhow!(e.message))?;
    let ids: Vec<String> = if entities.is_empty() {
        let mut v: Vec<_> = doc.entities.values().filter(|e| e.location != Location::Trash).collect();
        v.sort_by_key(|e| (e.sort_key.to_lowercase(), e.entity_id.clone()));
        v.into_iter().map(|e| e.entity_id.clone()).collect()
    } else {
        entities.to_vec()
    };
    let mut out = String::new();
    for id in ids {
        let entries = build_index(doc, &id, &cfg)?;
        let e = &doc.entities[&id];
        out.push_str(&format!("# {id}\t{}\t{}\t{}\n", e.label, e.category, entries.len()));
        for entry in entries {
            out.push_str(&entry.text);
            out.push('\n');
        }
    }
    Ok(out)
}

fn read_password() -> anyhow::Result<String> {
    if let Ok(p) = std::env::var("KWICDESK_PASSWORD") {
        return Ok(p);
    }
    let mut line = String::new();
    std::io::stdin().lock().read_line(&mut line)?;
    let p = line.trim_end_matches(['\r', '\n']).to_string();
    if p.is_empty() {
        bail!("no password given on stdin");
    }
    Ok(p)
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let cfg = config(&cli)?;
    match cli.command {
        Command::Serve { bind } => serve(cfg, bind).await,
        Command::ImportDoc { file, id, format } => {
            let doc = read_document(&file, id, format)?;
            let store = FileStore::open(&cfg.storage_root)?;
            let revision = store.create(&doc)?;
            println!("{}\t{revision}", doc.doc_id);
            Ok(())
        }
        Command::ExportDoc { id, format, output } => {
            let store = FileStore::open(&cfg.storage_root)?;
            let stored = store.load(&id)?;
            let content = match format {
                ExportFormat::Html => render_rdfa(&stored.document),
                ExportFormat::Tei => export_tei(&stored.document, &store.get_metadata(&id)?.unwrap_or_default()),
                ExportFormat::Entities => export_entities(&stored.document),
                ExportFormat::Json => serde_json::to_string_pretty(&stored)?,
            };
            write_out(output.as_deref(), &content)
        }
        Command::BuildConcordance { input, doc, entity, style, window, sort } => {
            let document = match (input, doc) {
                (Some(path), None) => {
                    let html = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    parse_rdfa(&html)?.document
                }
                (None, Some(id)) => FileStore::open(&cfg.storage_root)?.load(&id)?.document,
                _ => bail!("give an input file or --doc"),
            };
            let out = build_concordance(&document, &entity, &style, window, sort.as_deref())?;
            write_out(None, &out)
        }
        Command::User { command } => {
            let accounts = Accounts::open(cfg.users_file())?;
            match command {
                UserCommand::Add { username, role } => {
                    let role = match role {
                        RoleArg::Annotator => Role::Annotator,
                        RoleArg::Admin => Role::Admin,
                    };
                    let user = accounts.add_user(&username, &read_password()?, role)?;
                    println!("created {} ({:?})", user.username, user.role);
                }
                UserCommand::List => {
                    for u in accounts.list() {
                        println!("{}\t{:?}", u.username, u.role);
                    }
                }
            }
            Ok(())
        }
    }
}
