//! Library half of the `aqrm` binary: run configuration, command
//! implementations, SVG plotting. Kept as a library so the parsers are
//! reachable from integration tests and fuzz targets.

pub mod commands;
pub mod config;
pub mod svg;

pub use commands::CliError;
pub use config::RunConfig;

/// Dispatch a parsed command line. `args` excludes the program name.
pub fn run(args: &[String]) -> Result<(), CliError> {
    let Some(command) = args.first() else {
        return Err(CliError::Usage(USAGE.trim().to_string()));
    };
    let mut cfg = RunConfig::default();
    let mut extra: Vec<(String, String)> = Vec::new();
    let mut positional: Vec<String> = Vec::new();
    // config file first, remaining flags in order
    let rest = &args[1..];
    let mut i = 0;
    let mut pending: Vec<(String, String)> = Vec::new();
    while i < rest.len() {
        let arg = &rest[i];
        if let Some(flag) = arg.strip_prefix("--") {
            if flag == "svg" {
                pending.push(("svg".into(), "true".into()));
                i += 1;
                continue;
            }
            let value = rest
                .get(i + 1)
                .ok_or_else(|| CliError::Usage(format!("--{flag} needs a value")))?
                .clone();
            pending.push((flag.to_string(), value));
            i += 2;
        } else {
            positional.push(arg.clone());
            i += 1;
        }
    }
    for (flag, value) in &pending {
        if flag == "config" {
            let text = std::fs::read_to_string(value)
                .map_err(|e| CliError::Io(format!("{value}: {e}")))?;
            cfg.apply_text(&text)
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
    }
    for (flag, value) in pending {
        if flag == "config" {
            continue;
        }
        match cfg.apply_flag(&flag, &value) {
            Ok(()) => {}
            Err(_) => extra.push((flag, value)),
        }
    }
    let lookup = |name: &str| -> Option<String> {
        extra
            .iter()
            .rev()
            .find(|(f, _)| f == name)
            .map(|(_, v)| v.clone())
    };
    for (flag, _) in &extra {
        if !matches!(flag.as_str(), "route" | "trunc" | "t" | "ncut" | "kmax" | "svg") {
            return Err(CliError::Usage(format!("unknown flag --{flag}")));
        }
    }
    match command.as_str() {
        "spectrum" => commands::cmd_spectrum(&cfg, lookup("trunc").as_deref()),
        "curves" => commands::cmd_curves(&cfg, lookup("svg").is_some()),
        "partition" => commands::cmd_partition(&cfg),
        "zeta" => {
            let route = lookup("route").unwrap_or_else(|| "both".into());
            commands::cmd_zeta(&cfg, &route)
        }
        "limits" => {
            let scenario = positional
                .first()
                .ok_or_else(|| CliError::Usage("limits needs a scenario: g0 | ginf | delta0 | parity_g0 | parity_ginf | jc".into()))?;
            commands::cmd_limits(&cfg, scenario)
        }
        "rb" => {
            let kmax = lookup("kmax")
                .unwrap_or_else(|| "3".into())
                .parse::<usize>()
                .map_err(|_| CliError::Usage("--kmax needs an integer".into()))?;
            commands::cmd_rb(&cfg, kmax)
        }
        "heatkernel" => {
            let t = lookup("t")
                .ok_or_else(|| CliError::Usage("heatkernel needs --t".into()))?
                .parse::<f64>()
                .map_err(|_| CliError::Usage("--t needs a number".into()))?;
            commands::cmd_heatkernel(&cfg, t, 64)
        }
        "jzeta" => {
            let n_cut = lookup("ncut")
                .unwrap_or_else(|| "100000".into())
                .parse::<usize>()
                .map_err(|_| CliError::Usage("--ncut needs an integer".into()))?;
            commands::cmd_jzeta(&cfg, n_cut)
        }
        other => Err(CliError::Usage(format!("unknown command {other}\n{USAGE}"))),
    }
}

pub const USAGE: &str = "
aqrm — numerical laboratory for the asymmetric quantum Rabi model

usage: aqrm <command> [--flag value]...

commands:
  spectrum    adaptive truncated eigenvalues        (--g --delta --eps --jmax --tol --out [--trunc 2x])
  curves      g-sweep of the shifted spectrum       (--delta --eps --gmin --gmax --steps --jmax --out [--svg])
  partition   explicit partition-function series    (--g --delta --eps --beta b1,b2 --points --seed --out)
  zeta        spectral zeta, one or both routes     (--g --delta --eps --s --tau auto|v --route eigen|mellin|both --out)
  limits      closed-form limit scenarios           (g0|ginf|delta0|parity_g0|parity_ginf|jc --grid ... --out)
  rb          Rabi-Bernoulli polynomials            (--kmax k --g --delta --out)
  heatkernel  oscillator-term trace identity        (--g --eps --t t --out)
  jzeta       Jaynes-Cummings spectral zeta         (--g --delta --s --tau v --ncut n --out)

all commands accept --config FILE (key = value with [section] headers) and
write results plus a resolved_config.cfg echo into --out (default ./out).
";
