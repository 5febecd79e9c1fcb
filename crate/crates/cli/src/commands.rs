use std::fmt::Write as _;

use histories_core::config::ConfigMap;
use histories_core::gaussian_analysis::{self as ga, FactorKind, JForm};
use histories_core::model::{Configuration, InitialState, Normalization};
use histories_core::verify::{self, VerifyOptions};
use histories_core::{exact_decoherence, oracle, Error, QuadratureSpec};
use rayon::prelude::*;

use crate::grid::Grid;

fn j_form(settings: &ConfigMap) -> Result<JForm, Error> {
    settings.get("j_form").map_or(Ok(JForm::Appendix), JForm::parse)
}

fn sweep_factors(kind: &str) -> Result<[FactorKind; 2], Error> {
    match kind {
        "particle-factors" => Ok([FactorKind::I, FactorKind::J]),
        "pointer-factors" => Ok([FactorKind::F, FactorKind::G]),
        "probability-kernels" => Ok([FactorKind::P0, FactorKind::P1]),
        other => Err(Error::Config(format!(
            "unknown sweep kind '{other}' (expected particle-factors, pointer-factors or probability-kernels)"
        ))),
    }
}

fn row(arg: f64, factors: [FactorKind; 2], form: JForm, oracle_spec: Option<&QuadratureSpec>) -> Result<String, Error> {
    let closed = factors.map(|k| k.closed_form(arg, form));
    let mut line = format!("{arg:.16e},{:.16e},{:.16e}", closed[0], closed[1]);
    if let Some(spec) = oracle_spec {
        let o = [oracle::oracle_factor(factors[0], arg, spec)?, oracle::oracle_factor(factors[1], arg, spec)?];
        let _ = write!(
            line,
            ",{:.16e},{:.16e},{:.16e},{:.16e}",
            o[0],
            o[1],
            (o[0] - closed[0]).abs(),
            (o[1] - closed[1]).abs()
        );
    }
    line.push('\n');
    Ok(line)
}

/// CSV of closed-form factors over a grid, optionally with oracle columns.
pub fn sweep(settings: &ConfigMap) -> Result<String, Error> {
    let kind = settings.get("kind").ok_or_else(|| Error::Config("sweep needs --kind".into()))?;
    let factors = sweep_factors(kind)?;
    let grid = Grid::parse(settings.get("grid").ok_or_else(|| Error::Config("sweep needs --grid".into()))?)?;
    if grid.start < 0.0 {
        return Err(Error::Config("factor arguments must be >= 0".into()));
    }
    let form = j_form(settings)?;
    let with_oracle = settings.bool_or("with_oracle", false)?;
    let spec = settings.quadrature()?;
    let oracle_spec = with_oracle.then_some(&spec);

    let [a, b] = factors.map(FactorKind::name);
    let mut out = format!("arg,{a},{b}");
    if with_oracle {
        let _ = write!(out, ",{a}_oracle,{b}_oracle,d{a},d{b}");
    }
    out.push('\n');
    // par_iter + collect keeps grid order regardless of scheduling
    let rows: Vec<String> =
        grid.points().par_iter().map(|&x| row(x, factors, form, oracle_spec)).collect::<Result<_, _>>()?;
    out.extend(rows);
    Ok(out)
}

/// Verification report and whether every check passed.
pub fn verify(settings: &ConfigMap) -> Result<(String, bool), Error> {
    let tolerance = match settings.get("tolerance") {
        None => None,
        Some(_) => {
            let t = settings.f64_or("tolerance", 0.0)?;
            if t <= 0.0 {
                return Err(Error::Config(format!("tolerance must be positive, got {t}")));
            }
            Some(t)
        }
    };
    let opts = VerifyOptions { spec: settings.quadrature()?, tolerance, j_form: j_form(settings)? };
    let checks = verify::run_all(&opts)?;
    let mut out = String::from("check,expected,got,delta,tolerance,status\n");
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.3e},{:.3e},{status}",
            c.name,
            c.expected,
            c.got,
            c.delta(),
            c.tolerance
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    eprintln!("{} checks, {failed} failed", checks.len());
    Ok((out, failed == 0))
}

/// How probabilities for a Gaussian ⊗ Gaussian state are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    NarrowParticle,
    NarrowPointer,
    Oracle,
}

fn regime(settings: &ConfigMap, cfg: &Configuration) -> Result<Regime, Error> {
    match settings.get("regime").unwrap_or("auto") {
        "narrow-particle" => Ok(Regime::NarrowParticle),
        "narrow-pointer" => Ok(Regime::NarrowPointer),
        "oracle" => Ok(Regime::Oracle),
        "auto" => {
            let (Some(particle), Some(pointer)) = (cfg.state.particle(), cfg.state.pointer()) else {
                return Err(Error::Config("regime selection needs a product state".into()));
            };
            let narrow_pointer =
                pointer.normalization == Normalization::DeltaLimit || pointer.halfwidth < particle.halfwidth;
            Ok(if narrow_pointer { Regime::NarrowPointer } else { Regime::NarrowParticle })
        }
        other => Err(Error::Config(format!(
            "unknown regime '{other}' (expected auto, narrow-particle, narrow-pointer or oracle)"
        ))),
    }
}

/// CSV `alpha,p,regime,valid` over α ∈ [−window, window].
pub fn probabilities(settings: &ConfigMap) -> Result<String, Error> {
    let cfg = settings.configuration()?;
    let window = settings.f64_or("window", 3.0)?;
    if window < 0.0 || window.fract() != 0.0 {
        return Err(Error::Config(format!("window must be a non-negative integer, got {window}")));
    }
    let n = window as i64;
    let (params, partition) = (&cfg.params, &cfg.partition);

    let rows: Vec<(f64, &str, bool)> = match cfg.state {
        InitialState::SharpParticle { .. } => {
            let p = exact_decoherence::sharp_particle_probability(params, partition)?;
            vec![(p, "exact-sharp-particle", true); (2 * n + 1) as usize]
        }
        InitialState::SharpPointer { .. } => {
            let p = exact_decoherence::sharp_pointer_probability(params, partition)?;
            vec![(p, "exact-sharp-pointer", true); (2 * n + 1) as usize]
        }
        InitialState::Product { particle, pointer } => match regime(settings, &cfg)? {
            Regime::NarrowParticle => {
                let b = ga::narrow_particle_probability(
                    params,
                    partition,
                    particle.halfwidth,
                    pointer.halfwidth,
                    particle.normalization,
                )?;
                vec![(b.total(), "narrow-particle", b.valid); (2 * n + 1) as usize]
            }
            Regime::NarrowPointer => {
                let p = ga::narrow_pointer_probability(params, partition, pointer.halfwidth, pointer.normalization)?;
                vec![(p.value, "narrow-pointer", p.valid); (2 * n + 1) as usize]
            }
            Regime::Oracle => {
                let spec = settings.quadrature()?;
                (-n..=n)
                    .into_par_iter()
                    .map(|alpha| {
                        let d = oracle::general_functional_exact(alpha, alpha, &cfg.state, params, partition, &spec)?;
                        Ok((d.value.re, "oracle", true))
                    })
                    .collect::<Result<_, Error>>()?
            }
        },
    };

    let mut out = String::from("alpha,p,regime,valid\n");
    for (alpha, (p, regime, valid)) in (-n..=n).zip(rows) {
        let _ = writeln!(out, "{alpha},{p:.16e},{regime},{valid}");
    }
    Ok(out)
}
