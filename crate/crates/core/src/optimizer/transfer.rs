//! V-shaped transfer functions map a velocity to a bit-flip probability.

pub type TransferFn = fn(f64) -> f64;

/// `|tanh(v)|`: zero at rest, approaching one symmetrically as `|v|` grows.
pub fn v_shaped(velocity: f64) -> f64 {
    velocity.tanh().abs()
}
