//! Density shape classification (stub).
pub struct ShapeReport;
pub enum Classification {}
pub enum CriticalKind {}
pub struct HdrRegion;
