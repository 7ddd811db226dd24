//! Contaminated binary models (stub).
pub struct BinarySample;
pub struct KlProfile;
pub enum ModelVariant {}
pub struct TrajectoryRecord;
