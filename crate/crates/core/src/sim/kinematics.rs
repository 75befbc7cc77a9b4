use super::{normalize_angle, Action, Pose, SimError};

/// Exact unicycle integration over `dt` with constant commands.
pub fn step_kinematics(pose: &Pose, action: &Action, dt: f64) -> Result<Pose, SimError> {
    let inputs = [pose.x, pose.y, pose.heading, action.v_cmd, action.omega_cmd, dt];
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(SimError::NonFinite("kinematics input"));
    }
    if dt <= 0.0 {
        return Err(SimError::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    let (v, w, h) = (action.v_cmd, action.omega_cmd, pose.heading);
    if w.abs() < 1e-6 {
        return Ok(Pose { x: pose.x + v * h.cos() * dt, y: pose.y + v * h.sin() * dt, heading: h });
    }
    let h1 = h + w * dt;
    Ok(Pose {
        x: pose.x + (v / w) * (h1.sin() - h.sin()),
        y: pose.y - (v / w) * (h1.cos() - h.cos()),
        heading: normalize_angle(h1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Forward-Euler reference with many substeps.
    fn euler(pose: &Pose, v: f64, w: f64, dt: f64, n: usize) -> (f64, f64, f64) {
        let (mut x, mut y, mut h) = (pose.x, pose.y, pose.heading);
        let h_step = dt / n as f64;
        for _ in 0..n {
            x += v * h.cos() * h_step;
            y += v * h.sin() * h_step;
            h += w * h_step;
        }
        (x, y, h)
    }

    #[test]
    fn straight_line_at_control_rate() {
        let p = step_kinematics(&Pose::new(0.0, 0.0, 0.0), &Action::new(0.5, 0.0), 0.2).unwrap();
        assert!((p.x - 0.1).abs() < 1e-12 && p.y.abs() < 1e-12 && p.heading == 0.0);
    }

    #[test]
    fn pure_rotation() {
        let p = step_kinematics(&Pose::new(0.0, 0.0, 0.0), &Action::new(0.0, PI / 2.0), 1.0).unwrap();
        assert!(p.x.abs() < 1e-12 && p.y.abs() < 1e-12);
        assert!((p.heading - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn arc_matches_euler_oracle() {
        let start = Pose::new(0.0, 0.0, 0.0);
        let p = step_kinematics(&start, &Action::new(0.5, 0.5), 1.0).unwrap();
        let (ex, ey, eh) = euler(&start, 0.5, 0.5, 1.0, 10_000);
        // frozen from the oracle: (0.479426, 0.122417)
        assert!((p.x - 0.5f64.sin()).abs() < 1e-12);
        assert!((p.y - (1.0 - 0.5f64.cos())).abs() < 1e-12);
        assert!((p.x - ex).hypot(p.y - ey) < 1e-3);
        assert!((p.heading - eh).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_finite() {
        let p = Pose::new(0.0, 0.0, 0.0);
        assert!(step_kinematics(&p, &Action::new(f64::NAN, 0.0), 0.2).is_err());
        assert!(step_kinematics(&p, &Action::new(0.1, 0.0), 0.0).is_err());
    }

    proptest! {
        #[test]
        fn straight_motion_reverses(x in -5.0..5.0f64, y in -5.0..5.0f64, h in -3.0..3.0f64, v in -0.5..0.5f64) {
            let start = Pose::new(x, y, h);
            let fwd = step_kinematics(&start, &Action::new(v, 0.0), 0.2).unwrap();
            let back = step_kinematics(&fwd, &Action::new(-v, 0.0), 0.2).unwrap();
            prop_assert!((back.x - x).abs() < 1e-9 && (back.y - y).abs() < 1e-9);
            prop_assert!((back.heading - start.heading).abs() < 1e-9);
        }

        #[test]
        fn heading_stays_normalized(h in -10.0..10.0f64, w in -2.0..2.0f64, dt in 0.01..5.0f64) {
            let p = step_kinematics(&Pose::new(0.0, 0.0, h), &Action::new(0.3, w), dt).unwrap();
            prop_assert!(p.heading > -PI && p.heading <= PI);
        }
    }
}
