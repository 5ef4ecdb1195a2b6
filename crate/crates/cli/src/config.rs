//! `--config` files: flat `key = value` lines, `#` comments. Keys are long
//! flag names (underscores allowed for dashes); `command` names the
//! subcommand when none is given on the command line.

use std::collections::BTreeMap;

const SUBCOMMANDS: [&str; 8] = [
    "dirichlet",
    "cor2",
    "enumerate",
    "bset",
    "counterexample",
    "dimension",
    "mtp-check",
    "exponents",
];

/// Global flags that take a value.
const VALUE_FLAGS: [&str; 5] = ["--threads", "--precision-bits", "--seed", "--out", "--config"];

const BOOL_KEYS: [&str; 1] = ["reduced"];

pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let k = k.trim().replace('_', "-");
        if k.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Result<(Option<String>, Vec<String>), String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a path")?.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a.clone());
        }
    }
    Ok((path, rest))
}

fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if VALUE_FLAGS.contains(&a) {
            i += 2;
            continue;
        }
        if !a.starts_with('-') {
            return SUBCOMMANDS.contains(&a).then_some(i);
        }
        i += 1;
    }
    None
}

/// Rewrites `argv` so config entries come first and explicit flags win.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, String> {
    let (path, args) = config_path(&args)?;
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut entries = parse_file(&text)?;

    let prog = args.first().cloned().unwrap_or_else(|| "dapprox".into());
    let (pre, sub, post) = match subcommand_index(&args) {
        Some(i) => (args[1..i].to_vec(), args[i].clone(), args[i + 1..].to_vec()),
        None => {
            let sub = entries
                .get("command")
                .cloned()
                .ok_or_else(|| format!("no subcommand given and {path} has no `command` key"))?;
            (args[1..].to_vec(), sub, Vec::new())
        }
    };
    entries.remove("command");

    let mut out = vec![prog, sub];
    for (k, v) in entries {
        if BOOL_KEYS.contains(&k.as_str()) {
            match v.as_str() {
                "true" => out.push(format!("--{k}")),
                "false" => {}
                _ => return Err(format!("config key {k} must be true or false")),
            }
        } else {
            out.push(format!("--{k}"));
            out.push(v);
        }
    }
    out.extend(pre);
    out.extend(post);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn parses_lines() {
        let m = parse_file("# c\nchart = parabola\nfit_bands=4\n\n").unwrap();
        assert_eq!(m["chart"], "parabola");
        assert_eq!(m["fit-bands"], "4");
        assert!(parse_file("oops").is_err());
    }

    #[test]
    fn finds_subcommand_past_global_values() {
        assert_eq!(subcommand_index(&v("dapprox --out bset dimension --tau 1")), Some(3));
        assert_eq!(subcommand_index(&v("dapprox --threads 2")), None);
    }

    #[test]
    fn no_config_is_identity() {
        let a = v("dapprox bset --beta golden");
        assert_eq!(expand(a.clone()).unwrap(), a);
    }
}
