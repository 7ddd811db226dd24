//! Fitting (stub).
pub struct FitConfig;
pub struct FitResult;
pub struct Score;
