//! Experiment configuration: an optional JSON file merged with command-line
//! overrides, then checked against what the chosen command accepts.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

use splitflow::operator_lab::ZeroModeRule;
use splitflow::EndpointConvention;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Maslov,
    Reduce,
    ApsCompare,
    Split,
    ApsSplit,
    Asymmetry,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Maslov => "maslov",
            Command::Reduce => "reduce",
            Command::ApsCompare => "aps-compare",
            Command::Split => "split",
            Command::ApsSplit => "aps-split",
            Command::Asymmetry => "asymmetry",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    /// `C(u, t) = t·Id`.
    Ramp,
    /// `C ≡ 0`.
    Zero,
    /// Seeded piecewise-linear family in product form on the collars.
    Random,
    /// As `random`, returning to its starting coefficient at `t = 1`.
    RandomLoop,
    /// Seeded trigonometric family; not in product form.
    RandomTrig,
    /// Seeded trigonometric family mirrored across the cut.
    Mirrored,
}

impl FamilyName {
    pub fn is_random(self) -> bool {
        !matches!(self, FamilyName::Ramp | FamilyName::Zero)
    }
}

/// Which family generator a sweep draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Piecewise,
    Loop,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Verification {
    Split,
    ApsSplit,
    Maslov,
    Reduce,
}

impl Verification {
    fn command(self) -> Command {
        match self {
            Verification::Split => Command::Split,
            Verification::ApsSplit => Command::ApsSplit,
            Verification::Maslov => Command::Maslov,
            Verification::Reduce => Command::Reduce,
        }
    }
}

pub fn parse_zero_rule(s: &str) -> Result<ZeroModeRule, String> {
    match s {
        "first-positive" => Ok(ZeroModeRule::FirstPositive),
        "first-negative" => Ok(ZeroModeRule::FirstNegative),
        other => Err(format!(
            "unknown zero-mode rule `{other}` (expected `first-positive` or `first-negative`)"
        )),
    }
}

/// Every setting an experiment can carry. Absent keys take the command's
/// default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<EndpointConvention>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_pairs: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_rule: Option<ZeroModeRule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

impl Settings {
    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        let mut s: Settings = serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut s.spectrum, &mut s.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(s)
    }

    /// `self` with every key set in `over` replaced.
    pub fn merged(mut self, over: Settings) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            command,
            seed,
            convention,
            out,
            family,
            spectrum,
            order,
            n0,
            orders,
            f_pairs,
            count,
            dim,
            scale,
            t,
            zero_rule,
            verification,
            kind
        );
        self
    }

    /// Names of the keys that are set.
    fn present(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        macro_rules! check {
            ($($f:ident => $n:literal),*) => { $( if self.$f.is_some() { v.push($n); } )* };
        }
        check!(
            seed => "seed",
            convention => "convention",
            out => "out",
            family => "family",
            spectrum => "spectrum",
            order => "order",
            n0 => "n0",
            orders => "orders",
            f_pairs => "f-pairs",
            count => "count",
            dim => "dim",
            scale => "scale",
            t => "t",
            zero_rule => "zero-rule",
            verification => "verification",
            kind => "kind"
        );
        v
    }

    pub fn convention(&self) -> EndpointConvention {
        self.convention
            .unwrap_or(splitflow::tol::DEFAULT_CONVENTION)
    }

    pub fn zero_rule(&self) -> ZeroModeRule {
        self.zero_rule.unwrap_or_default()
    }
}

fn allowed(command: Command) -> &'static [&'static str] {
    match command {
        Command::Maslov => &["seed", "convention", "out", "count", "dim", "scale"],
        Command::Reduce => &[
            "seed",
            "convention",
            "out",
            "spectrum",
            "order",
            "n0",
            "count",
            "scale",
        ],
        Command::ApsCompare => &[
            "seed", "out", "spectrum", "order", "n0", "orders", "f-pairs",
        ],
        Command::Split => &["seed", "convention", "out", "family"],
        Command::ApsSplit => &["seed", "convention", "out", "family", "zero-rule"],
        Command::Asymmetry => &["seed", "convention", "out", "family", "t", "zero-rule"],
        Command::Sweep => &[],
    }
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub command: Command,
    pub settings: Settings,
}

impl Experiment {
    /// Checks that every key is meaningful for `command` and that required
    /// keys are present.
    pub fn new(command: Command, mut settings: Settings) -> Result<Self, UsageError> {
        match settings.command {
            Some(c) if c != command => {
                return usage(format!(
                    "config is for `{}` but `{}` was requested",
                    c.name(),
                    command.name()
                ))
            }
            _ => settings.command = Some(command),
        }
        let base = match command {
            Command::Sweep => match settings.verification {
                Some(v) => v.command(),
                None => return usage("sweep needs `verification`"),
            },
            c => c,
        };
        let mut ok: Vec<&str> = allowed(base).to_vec();
        if command == Command::Sweep {
            ok.extend(["verification", "count"]);
            if matches!(base, Command::Split | Command::ApsSplit) {
                ok.push("kind");
                ok.retain(|&k| k != "family");
            }
        }
        for key in settings.present() {
            if !ok.contains(&key) {
                return usage(format!("`{key}` does not apply to `{}`", command.name()));
            }
        }
        let s = &settings;
        let randomized = match base {
            Command::Maslov | Command::Reduce => true,
            Command::Split | Command::ApsSplit | Command::Asymmetry => {
                command == Command::Sweep || s.family.is_some_and(FamilyName::is_random)
            }
            _ => false,
        };
        if randomized && s.seed.is_none() {
            return usage(format!("`{}` needs `seed`", command.name()));
        }
        if matches!(
            base,
            Command::Split | Command::ApsSplit | Command::Asymmetry
        ) && command != Command::Sweep
            && s.family.is_none()
        {
            return usage(format!("`{}` needs `family`", command.name()));
        }
        if matches!(base, Command::Split | Command::ApsSplit)
            && matches!(
                s.family,
                Some(FamilyName::RandomTrig | FamilyName::Mirrored)
            )
        {
            return usage("splitting needs a family in product form on the collars (ramp, zero, random, random-loop)");
        }
        if s.spectrum.is_some() && (s.order.is_some() || s.n0.is_some()) {
            return usage("give either `spectrum` or `order`/`n0`, not both");
        }
        if s.count == Some(0) || s.order == Some(0) {
            return usage("`count` and `order` must be positive");
        }
        if let Some(d) = s.dim {
            if d == 0 || d % 2 == 1 {
                return usage("`dim` must be a positive even number");
            }
        }
        if let Some(x) = s.scale {
            if !(x.is_finite() && x > 0.0) {
                return usage("`scale` must be positive");
            }
        }
        if let Some(t) = s.t {
            if !(0.0..=1.0).contains(&t) {
                return usage("`t` must lie in [0, 1]");
            }
        }
        if let Some(o) = &s.orders {
            if o.is_empty() || o.windows(2).any(|w| w[0] >= w[1]) || o[0] == 0 {
                return usage("`orders` must be positive and strictly increasing");
            }
        }
        if s.f_pairs.as_ref().is_some_and(|f| f.contains(&0)) {
            return usage("`f-pairs` are mode pairs numbered from 1");
        }
        Ok(Experiment { command, settings })
    }

    /// The command the rows are computed with: the sweep's verification or
    /// the command itself.
    pub fn base(&self) -> Command {
        match (self.command, self.settings.verification) {
            (Command::Sweep, Some(v)) => v.command(),
            (c, _) => c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_rejected() {
        let e = serde_json::from_str::<Settings>(r#"{"sed": 3}"#).unwrap_err();
        assert!(e.to_string().contains("unknown field"));
    }

    #[test]
    fn overrides_win() {
        let file = Settings {
            seed: Some(1),
            count: Some(5),
            ..Default::default()
        };
        let cli = Settings {
            seed: Some(2),
            ..Default::default()
        };
        let m = file.merged(cli);
        assert_eq!((m.seed, m.count), (Some(2), Some(5)));
    }

    #[test]
    fn randomized_commands_need_a_seed() {
        assert!(Experiment::new(Command::Maslov, Settings::default()).is_err());
        let ramp = Settings {
            family: Some(FamilyName::Ramp),
            ..Default::default()
        };
        assert!(Experiment::new(Command::Split, ramp.clone()).is_ok());
        let random = Settings {
            family: Some(FamilyName::Random),
            ..Default::default()
        };
        assert!(Experiment::new(Command::Split, random).is_err());
    }

    #[test]
    fn irrelevant_keys_are_usage_errors() {
        let s = Settings {
            seed: Some(1),
            t: Some(0.5),
            ..Default::default()
        };
        let e = Experiment::new(Command::Maslov, s).unwrap_err();
        assert!(e.0.contains("`t`"));
    }

    #[test]
    fn config_command_must_match() {
        let s = Settings {
            command: Some(Command::Reduce),
            seed: Some(1),
            ..Default::default()
        };
        assert!(Experiment::new(Command::Maslov, s).is_err());
    }
}
