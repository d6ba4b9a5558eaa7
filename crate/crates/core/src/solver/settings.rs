//! Solver settings and their defaults.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Choice of Newton linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LinsysChoice {
    /// Pick by the estimated factorization cost ratio.
    #[default]
    Auto,
    Kkt,
    Schur,
}

impl std::str::FromStr for LinsysChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "kkt" => Ok(Self::Kkt),
            "schur" => Ok(Self::Schur),
            other => Err(Error::InvalidSettings(format!("linsys must be auto, kkt or schur, got `{other}`"))),
        }
    }
}

/// Every tunable of the method.  Field defaults are listed in [`Settings::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    /// Absolute termination tolerance `εa`.
    pub eps_abs: f64,
    /// Relative termination tolerance `εr`.
    pub eps_rel: f64,
    /// Initial absolute inner tolerance `δa,0`.
    pub delta_abs0: f64,
    /// Initial relative inner tolerance `δr,0`.
    pub delta_rel0: f64,
    /// Tolerance update factor `ρ`.
    pub rho: f64,
    /// Initial penalty factor `σ_init`.
    pub sigma_init: f64,
    /// Penalty cap `σ_max`.
    pub sigma_max: f64,
    /// Penalty growth factor `Δ`.
    pub delta: f64,
    /// Sufficient-decrease factor `θ` for constraint violations.
    pub theta: f64,
    /// Proximal penalty `γ` (convex case): `Σx = γ I`.
    pub gamma_init: f64,
    /// Growth factor of `γ` when proximal updates are enabled.
    pub gamma_upd: f64,
    /// Cap on `γ`.
    pub gamma_max: f64,
    /// Enables the `γ` growth rule (off by default).
    pub proximal_update: bool,
    /// Number of Ruiz sweeps on `A`.
    pub scaling_iters: usize,
    /// Primal infeasibility tolerance.
    pub eps_pinf: f64,
    /// Dual infeasibility tolerance.
    pub eps_dinf: f64,
    /// Absolute cap on the number of low-rank modifications per refresh.
    pub max_rank_update: usize,
    /// Relative cap (fraction of `n + m`).
    pub max_rank_update_fraction: f64,
    /// Treat `Q` as possibly indefinite.
    pub nonconvex: bool,
    /// Linear system formulation.
    pub linsys: LinsysChoice,
    /// Outer iteration cap.
    pub max_outer_iter: usize,
    /// Cap on the total number of Newton iterations.
    pub max_total_newton_iter: usize,
    /// Newton iterations per outer iteration before it is closed anyway.
    pub inner_max_iter: usize,
    /// Wall-clock limit in seconds (`inf` for none).
    pub time_limit: f64,
    /// Use the supplied initial point (when given) for scaling and penalties.
    pub warm_start: bool,
    /// Evaluate the dual residual at the trial multiplier `ỹ` (otherwise at `y`).
    pub dual_residual_at_trial: bool,
    /// Tolerance of the smallest-eigenvalue iteration.
    pub eig_tol: f64,
    /// Iteration cap of the smallest-eigenvalue iteration.
    pub eig_max_iter: usize,
    /// Disable factorization updates (refactorize on every change).
    pub always_refactor: bool,
    /// Record per-iteration traces in the result.
    pub record_trace: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            eps_abs: 1e-4,
            eps_rel: 1e-4,
            delta_abs0: 1.0,
            delta_rel0: 1.0,
            rho: 0.1,
            sigma_init: 20.0,
            sigma_max: 1e9,
            delta: 100.0,
            theta: 0.25,
            gamma_init: 1e7,
            gamma_upd: 10.0,
            gamma_max: 1e7,
            proximal_update: false,
            scaling_iters: 10,
            eps_pinf: 1e-5,
            eps_dinf: 1e-5,
            max_rank_update: 160,
            max_rank_update_fraction: 0.1,
            nonconvex: false,
            linsys: LinsysChoice::Auto,
            max_outer_iter: 10_000,
            max_total_newton_iter: 100_000,
            inner_max_iter: 100,
            time_limit: f64::INFINITY,
            warm_start: true,
            dual_residual_at_trial: true,
            eig_tol: 1e-5,
            eig_max_iter: 10_000,
            always_refactor: false,
            record_trace: false,
        }
    }
}

/// Names accepted by [`Settings::set`].
pub const SETTING_KEYS: &[&str] = &[
    "eps_abs",
    "eps_rel",
    "delta_abs0",
    "delta_rel0",
    "rho",
    "sigma_init",
    "sigma_max",
    "delta",
    "theta",
    "gamma_init",
    "gamma_upd",
    "gamma_max",
    "proximal_update",
    "scaling_iters",
    "eps_pinf",
    "eps_dinf",
    "max_rank_update",
    "max_rank_update_fraction",
    "nonconvex",
    "linsys",
    "max_outer_iter",
    "max_total_newton_iter",
    "inner_max_iter",
    "time_limit",
    "warm_start",
    "dual_residual_at_trial",
    "eig_tol",
    "eig_max_iter",
    "always_refactor",
    "record_trace",
];

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    match v.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        s => s.parse().map_err(|_| Error::InvalidSettings(format!("{key}: `{v}` is not a number"))),
    }
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    let x = parse_f64(key, v)?;
    if x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(Error::InvalidSettings(format!("{key}: `{v}` is not a nonnegative integer")))
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::InvalidSettings(format!("{key}: `{v}` is not a boolean"))),
    }
}

impl Settings {
    /// Sets one field by name from its textual value.  Unknown names fail
    /// with [`Error::UnknownSetting`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = key;
        match key {
            "eps_abs" => self.eps_abs = parse_f64(k, value)?,
            "eps_rel" => self.eps_rel = parse_f64(k, value)?,
            "delta_abs0" => self.delta_abs0 = parse_f64(k, value)?,
            "delta_rel0" => self.delta_rel0 = parse_f64(k, value)?,
            "rho" => self.rho = parse_f64(k, value)?,
            "sigma_init" => self.sigma_init = parse_f64(k, value)?,
            "sigma_max" => self.sigma_max = parse_f64(k, value)?,
            "delta" => self.delta = parse_f64(k, value)?,
            "theta" => self.theta = parse_f64(k, value)?,
            "gamma_init" => self.gamma_init = parse_f64(k, value)?,
            "gamma_upd" => self.gamma_upd = parse_f64(k, value)?,
            "gamma_max" => self.gamma_max = parse_f64(k, value)?,
            "proximal_update" => self.proximal_update = parse_bool(k, value)?,
            "scaling_iters" => self.scaling_iters = parse_usize(k, value)?,
            "eps_pinf" => self.eps_pinf = parse_f64(k, value)?,
            "eps_dinf" => self.eps_dinf = parse_f64(k, value)?,
            "max_rank_update" => self.max_rank_update = parse_usize(k, value)?,
            "max_rank_update_fraction" => self.max_rank_update_fraction = parse_f64(k, value)?,
            "nonconvex" => self.nonconvex = parse_bool(k, value)?,
            "linsys" => self.linsys = value.parse()?,
            "max_outer_iter" => self.max_outer_iter = parse_usize(k, value)?,
            "max_total_newton_iter" => self.max_total_newton_iter = parse_usize(k, value)?,
            "inner_max_iter" => self.inner_max_iter = parse_usize(k, value)?,
            "time_limit" => self.time_limit = parse_f64(k, value)?,
            "warm_start" => self.warm_start = parse_bool(k, value)?,
            "dual_residual_at_trial" => self.dual_residual_at_trial = parse_bool(k, value)?,
            "eig_tol" => self.eig_tol = parse_f64(k, value)?,
            "eig_max_iter" => self.eig_max_iter = parse_usize(k, value)?,
            "always_refactor" => self.always_refactor = parse_bool(k, value)?,
            "record_trace" => self.record_trace = parse_bool(k, value)?,
            other => return Err(Error::UnknownSetting(other.to_string())),
        }
        Ok(())
    }

    /// Checks ranges: tolerances positive, `ρ, θ ∈ (0,1)`, `Δ > 1`, caps consistent.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSettings(msg.to_string()));
        let pos = [
            ("eps_abs", self.eps_abs),
            ("eps_rel", self.eps_rel),
            ("delta_abs0", self.delta_abs0),
            ("delta_rel0", self.delta_rel0),
            ("sigma_init", self.sigma_init),
            ("sigma_max", self.sigma_max),
            ("gamma_init", self.gamma_init),
            ("gamma_max", self.gamma_max),
            ("eps_pinf", self.eps_pinf),
            ("eps_dinf", self.eps_dinf),
            ("eig_tol", self.eig_tol),
            ("time_limit", self.time_limit),
        ];
        for (name, v) in pos {
            if !(v > 0.0) {
                return Err(Error::InvalidSettings(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho must lie in (0, 1)");
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad("theta must lie in (0, 1)");
        }
        if !(self.delta > 1.0) {
            return bad("delta must exceed 1");
        }
        if !(self.gamma_upd >= 1.0) {
            return bad("gamma_upd must be at least 1");
        }
        if self.gamma_max < self.gamma_init {
            return bad("gamma_max must be at least gamma_init");
        }
        if !(self.max_rank_update_fraction >= 0.0) {
            return bad("max_rank_update_fraction must be nonnegative");
        }
        if self.inner_max_iter == 0 {
            return bad("inner_max_iter must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let s = Settings::default();
        s.validate().unwrap();
        assert_eq!(s.eps_abs, 1e-4);
        assert_eq!(s.sigma_max, 1e9);
        assert_eq!(s.gamma_init, 1e7);
        assert_eq!(s.scaling_iters, 10);
    }

    #[test]
    fn set_every_key() {
        let mut s = Settings::default();
        for k in SETTING_KEYS {
            let v = match *k {
                "linsys" => "kkt",
                "proximal_update" | "nonconvex" | "warm_start" | "dual_residual_at_trial" | "always_refactor"
                | "record_trace" => "true",
                "rho" | "theta" | "max_rank_update_fraction" => "0.5",
                _ => "3",
            };
            s.set(k, v).unwrap();
        }
        assert_eq!(s.linsys, LinsysChoice::Kkt);
        assert!(s.nonconvex);
        assert_eq!(s.scaling_iters, 3);
    }

    #[test]
    fn unknown_key_is_named() {
        let mut s = Settings::default();
        let e = s.set("eps_absolute", "1").unwrap_err();
        assert_eq!(e, Error::UnknownSetting("eps_absolute".into()));
        assert!(e.to_string().contains("eps_absolute"));
    }

    #[test]
    fn invalid_values_rejected() {
        let mut s = Settings::default();
        assert!(s.set("rho", "abc").is_err());
        assert!(s.set("scaling_iters", "1.5").is_err());
        s.rho = 1.0;
        assert!(s.validate().is_err());
        let mut s = Settings::default();
        s.delta = 1.0;
        assert!(s.validate().is_err());
        let mut s = Settings::default();
        s.set("time_limit", "inf").unwrap();
        s.validate().unwrap();
    }
}
