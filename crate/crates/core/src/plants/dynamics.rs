/// Cart mass `m_c` in kg.
pub const CART_MASS: f64 = 1.0;
/// Pole mass `m_p` in kg.
pub const POLE_MASS: f64 = 0.1;
/// Pole length parameter `l` in m (distance to the pole's centre of mass).
pub const POLE_HALF_LENGTH: f64 = 0.5;
pub const GRAVITY: f64 = 9.81;

/// `ẋ₁ = x₂`, `ẋ₂ = −0.0025 cos(3x₁) + 0.0015 u`.
pub fn mountain_car_deriv(x: &[f64; 2], u: f64) -> [f64; 2] {
    [x[1], -0.0025 * libm::cos(3.0 * x[0]) + 0.0015 * u]
}

/// State `[x, ẋ, φ, φ̇]`, `φ = 0` upright. `φ̈` is evaluated first and
/// substituted into `ẍ`.
pub fn cartpole_deriv(s: &[f64; 4], u: f64) -> [f64; 4] {
    let (sin, cos) = (libm::sin(s[2]), libm::cos(s[2]));
    let total = POLE_MASS + CART_MASS;
    let omega2 = s[3] * s[3];
    let phi_acc = (GRAVITY * sin - cos * (u + POLE_MASS * POLE_HALF_LENGTH * omega2 * sin) / total)
        / (POLE_HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos * cos / total));
    let x_acc = (u + POLE_MASS * POLE_HALF_LENGTH * (omega2 * sin - phi_acc * cos)) / total;
    [s[1], x_acc, s[3], phi_acc]
}

/// Mechanical energy of the cart-pole, pole modelled as a uniform rod of
/// length `2l` (inertia about its centre `m_p l²/3`).
pub fn cartpole_energy(s: &[f64; 4]) -> f64 {
    let (sin, cos) = (libm::sin(s[2]), libm::cos(s[2]));
    let vx = s[1] + POLE_HALF_LENGTH * s[3] * cos;
    let vy = -POLE_HALF_LENGTH * s[3] * sin;
    0.5 * CART_MASS * s[1] * s[1]
        + 0.5 * POLE_MASS * (vx * vx + vy * vy)
        + 0.5 * (POLE_MASS * POLE_HALF_LENGTH * POLE_HALF_LENGTH / 3.0) * s[3] * s[3]
        + POLE_MASS * GRAVITY * POLE_HALF_LENGTH * cos
}

/// Classical fourth-order Runge–Kutta step with zero-order-hold input.
pub fn rk4_step<const N: usize, F>(deriv: F, x: &[f64; N], u: f64, dt: f64) -> [f64; N]
where
    F: Fn(&[f64; N], f64) -> [f64; N],
{
    let axpy = |a: &[f64; N], k: &[f64; N], h: f64| core::array::from_fn(|i| a[i] + h * k[i]);
    let k1 = deriv(x, u);
    let k2 = deriv(&axpy(x, &k1, 0.5 * dt), u);
    let k3 = deriv(&axpy(x, &k2, 0.5 * dt), u);
    let k4 = deriv(&axpy(x, &k3, dt), u);
    core::array::from_fn(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn mountain_car_values() {
        assert_eq!(mountain_car_deriv(&[0.0, 0.0], 0.0), [0.0, -0.0025]);
        let d = mountain_car_deriv(&[PI / 6.0, 0.0], 0.0);
        assert_eq!(d[0], 0.0);
        assert!(d[1].abs() < 1e-18);
        let d = mountain_car_deriv(&[0.0, 0.0], 1.0);
        assert!((d[1] + 0.001).abs() < 1e-18);
    }

    #[test]
    fn cartpole_equilibria() {
        assert_eq!(cartpole_deriv(&[0.0; 4], 0.0), [0.0; 4]);
        let d = cartpole_deriv(&[0.0, 0.0, PI, 0.0], 0.0);
        assert!(d.iter().all(|v| v.abs() < 1e-14), "{d:?}");
    }

    #[test]
    fn cartpole_horizontal_pole() {
        let d = cartpole_deriv(&[0.0, 0.0, PI / 2.0, 0.0], 0.0);
        // cos(π/2) ≈ 6e-17 only perturbs at rounding level.
        assert!((d[3] - 14.715).abs() < 1e-12);
        // ẍ = m_p l (0 − φ̈ cos φ)/(m_p + m_c) with cos φ ≈ 0.
        assert!(d[1].abs() < 1e-15);
    }

    #[test]
    fn cartpole_tilted_pole_by_hand() {
        let phi: f64 = 0.7;
        let (s, c) = (phi.sin(), phi.cos());
        let u = 2.0;
        let w = -1.3;
        let tot = 1.1;
        let phi_acc = (9.81 * s - c * (u + 0.1 * 0.5 * w * w * s) / tot) / (0.5 * (4.0 / 3.0 - 0.1 * c * c / tot));
        let x_acc = (u + 0.1 * 0.5 * (w * w * s - phi_acc * c)) / tot;
        let d = cartpole_deriv(&[0.3, 0.2, phi, w], u);
        assert!((d[3] - phi_acc).abs() < 1e-13);
        assert!((d[1] - x_acc).abs() < 1e-13);
        assert_eq!((d[0], d[2]), (0.2, w));
    }

    #[test]
    fn rk4_zero_field() {
        let x = rk4_step(|_: &[f64; 3], _| [0.0; 3], &[1.0, -2.0, 3.0], 0.0, 0.5);
        assert_eq!(x, [1.0, -2.0, 3.0]);
    }

    #[test]
    fn rk4_exponential_is_taylor_quartic() {
        let x = rk4_step(|x: &[f64; 1], _| [x[0]], &[1.0], 0.0, 0.1);
        let h: f64 = 0.1;
        let taylor = 1.0 + h + h * h / 2.0 + h.powi(3) / 6.0 + h.powi(4) / 24.0;
        assert!((x[0] - taylor).abs() < 1e-15);
        assert!((x[0] - 1.105_170_8).abs() < 1e-7);
    }
}
