//! Closed-form bound calculators (in progress).
